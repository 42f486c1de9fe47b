#include "aismarkov/hexgrid.hpp"

#include "aismarkov/error.hpp"
#include "aismarkov/textio.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace aismarkov {

namespace {

const double sqrt3 = std::sqrt(3.0);

} // namespace

std::string to_string(CellId c) {
    return std::to_string(c.q) + ":" + std::to_string(c.r);
}

std::optional<CellId> parse_cell(std::string_view text) {
    const auto colon = text.find(':');
    long long q = 0, r = 0;
    if (colon == std::string_view::npos || !parse_int64(text.substr(0, colon), q) ||
        !parse_int64(text.substr(colon + 1), r)) {
        return std::nullopt;
    }
    return CellId{static_cast<std::int32_t>(q), static_cast<std::int32_t>(r)};
}

double GridConfig::cell_area_m2() const {
    return 1.5 * sqrt3 * edge_m * edge_m;
}

void GridConfig::validate() const {
    if (!(edge_m > 0.0) || !std::isfinite(edge_m)) {
        throw ConfigError("grid: edge length must be positive");
    }
    if (!(bbox.min_lat < bbox.max_lat) || !(bbox.min_lon < bbox.max_lon) || bbox.min_lat < -90.0 ||
        bbox.max_lat > 90.0 || bbox.min_lon < -180.0 || bbox.max_lon > 180.0) {
        throw ConfigError("grid: bounding box is degenerate or out of range");
    }
    if (!(std::abs(origin.lat) < 89.0) || origin.lon < -180.0 || origin.lon > 180.0) {
        throw ConfigError("grid: projection origin out of range");
    }
    if (target_area_km2) {
        const double target = *target_area_km2 * 1e6;
        if (!(target > 0.0) || std::abs(cell_area_m2() - target) > 1e-3 * target) {
            throw ConfigError("grid: hexagon area " + format_double(cell_area_m2() / 1e6) +
                              " km^2 does not match target " + format_double(*target_area_km2) +
                              " km^2 within 0.1%");
        }
    }
}

HexGrid::HexGrid(GridConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    lat_scale_ = earth_radius_m * deg_to_rad;
    lon_scale_ = lat_scale_ * std::cos(cfg_.origin.lat * deg_to_rad);
    box_lo_ = project({cfg_.bbox.min_lat, cfg_.bbox.min_lon});
    box_hi_ = project({cfg_.bbox.max_lat, cfg_.bbox.max_lon});
}

PlanePoint HexGrid::project(LatLon p) const {
    return {(p.lon - cfg_.origin.lon) * lon_scale_, (p.lat - cfg_.origin.lat) * lat_scale_};
}

LatLon HexGrid::unproject(PlanePoint p) const {
    return {cfg_.origin.lat + p.y / lat_scale_, cfg_.origin.lon + p.x / lon_scale_};
}

CellId HexGrid::cell_of_plane(PlanePoint p) const {
    const double a = cfg_.edge_m;
    const double fq = (2.0 / 3.0) * p.x / a;
    const double fr = (-p.x / 3.0 + sqrt3 / 3.0 * p.y) / a;
    const double fs = -fq - fr;
    double q = std::round(fq);
    double r = std::round(fr);
    const double s = std::round(fs);
    const double dq = std::abs(q - fq);
    const double dr = std::abs(r - fr);
    const double ds = std::abs(s - fs);
    if (dq > dr && dq > ds) {
        q = -r - s;
    } else if (dr > ds) {
        r = -q - s;
    }
    return {static_cast<std::int32_t>(q), static_cast<std::int32_t>(r)};
}

PlanePoint HexGrid::center_plane(CellId c) const {
    const double a = cfg_.edge_m;
    return {a * 1.5 * c.q, a * sqrt3 * (c.r + c.q / 2.0)};
}

std::vector<PlanePoint> HexGrid::hexagon_plane(CellId c) const {
    const PlanePoint ctr = center_plane(c);
    std::vector<PlanePoint> v;
    v.reserve(6);
    for (int i = 0; i < 6; ++i) {
        const double ang = pi / 3.0 * i;
        v.push_back({ctr.x + cfg_.edge_m * std::cos(ang), ctr.y + cfg_.edge_m * std::sin(ang)});
    }
    return v;
}

CellId HexGrid::cell_of(LatLon p) const {
    if (!cfg_.bbox.contains(p)) {
        throw DomainError("point (" + format_double(p.lat) + ", " + format_double(p.lon) +
                          ") outside the study bounding box");
    }
    return cell_of_plane(project(p));
}

LatLon HexGrid::center_of(CellId c) const {
    return unproject(center_plane(c));
}

bool HexGrid::in_domain(CellId c) const {
    // Separating-axis test between the hexagon and the projected box. Axes:
    // the box's x/y plus the hexagon's edge normals at 30 and 150 degrees
    // (its third normal is the y axis).
    const PlanePoint ctr = center_plane(c);
    const double a = cfg_.edge_m;
    if (ctr.x + a < box_lo_.x || ctr.x - a > box_hi_.x) {
        return false;
    }
    const double half_h = a * sqrt3 / 2.0;
    if (ctr.y + half_h < box_lo_.y || ctr.y - half_h > box_hi_.y) {
        return false;
    }
    const std::array<PlanePoint, 4> corners = {
        PlanePoint{box_lo_.x, box_lo_.y}, PlanePoint{box_hi_.x, box_lo_.y}, PlanePoint{box_lo_.x, box_hi_.y},
        PlanePoint{box_hi_.x, box_hi_.y}};
    for (double deg : {30.0, 150.0}) {
        const double nx = std::cos(deg * deg_to_rad);
        const double ny = std::sin(deg * deg_to_rad);
        double lo = INFINITY, hi = -INFINITY;
        for (const PlanePoint& k : corners) {
            const double d = k.x * nx + k.y * ny;
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        const double cd = ctr.x * nx + ctr.y * ny;
        if (cd + half_h < lo || cd - half_h > hi) {
            return false;
        }
    }
    return true;
}

std::vector<CellId> HexGrid::neighbors(CellId c) const {
    std::vector<CellId> out;
    out.reserve(6);
    for (CellId d : axial_directions) {
        const CellId n{c.q + d.q, c.r + d.r};
        if (in_domain(n)) {
            out.push_back(n);
        }
    }
    return out;
}

std::vector<LatLon> HexGrid::polygon(CellId c) const {
    std::vector<LatLon> ring;
    ring.reserve(7);
    for (const PlanePoint& v : hexagon_plane(c)) {
        ring.push_back(unproject(v));
    }
    ring.push_back(ring.front());
    return ring;
}

std::vector<CellId> HexGrid::cells_in_domain() const {
    const double a = cfg_.edge_m;
    const auto q_lo = static_cast<std::int32_t>(std::floor(box_lo_.x / (1.5 * a))) - 1;
    const auto q_hi = static_cast<std::int32_t>(std::ceil(box_hi_.x / (1.5 * a))) + 1;
    std::vector<CellId> out;
    for (std::int32_t q = q_lo; q <= q_hi; ++q) {
        // y = a*sqrt3*(r + q/2)  =>  r = y/(a*sqrt3) - q/2
        const auto r_lo = static_cast<std::int32_t>(std::floor(box_lo_.y / (a * sqrt3) - q / 2.0)) - 1;
        const auto r_hi = static_cast<std::int32_t>(std::ceil(box_hi_.y / (a * sqrt3) - q / 2.0)) + 1;
        for (std::int32_t r = r_lo; r <= r_hi; ++r) {
            if (in_domain(CellId{q, r})) {
                out.push_back({q, r});
            }
        }
    }
    return out;
}

DiscretizeResult discretize(const ResampledTrajectory& rt, const CellIndexer& grid) {
    DiscretizeResult out;
    bool open = false;
    for (std::size_t k = 0; k < rt.size(); ++k) {
        const LatLon p = rt.samples[k];
        if (!grid.in_domain(p)) {
            ++out.dropped;
            open = false;
            continue;
        }
        if (!open) {
            out.sequences.push_back(StateSequence{rt.vessel_id, rt.timestamp(k), rt.dt_s, {}});
            open = true;
        }
        out.sequences.back().cells.push_back(grid.cell_of(p));
    }
    return out;
}

DiscretizeResult discretize_point(VesselId vessel, const TrackPoint& point, std::int64_t dt_s,
                                  const CellIndexer& grid) {
    DiscretizeResult out;
    const LatLon p{point.lat, point.lon};
    if (!grid.in_domain(p)) {
        out.dropped = 1;
        return out;
    }
    out.sequences.push_back(StateSequence{vessel, floor_div(point.t, dt_s) * dt_s, dt_s, {grid.cell_of(p)}});
    return out;
}

} // namespace aismarkov
