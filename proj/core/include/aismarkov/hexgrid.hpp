#pragma once

#include "aismarkov/ais_ingest.hpp"
#include "aismarkov/geo.hpp"
#include "aismarkov/trajectory.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aismarkov {

/// Axial hexagon coordinates. Ordering is lexicographic on (q, r).
struct CellId {
    std::int32_t q = 0;
    std::int32_t r = 0;

    friend auto operator<=>(const CellId&, const CellId&) = default;
};

/// `q:r`
std::string to_string(CellId c);
std::optional<CellId> parse_cell(std::string_view text);

struct CellIdHash {
    std::size_t operator()(CellId c) const noexcept {
        const auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.q)) << 32) |
                         static_cast<std::uint32_t>(c.r);
        return std::hash<std::uint64_t>{}(key * 0x9E3779B97F4A7C15ull);
    }
};

struct BoundingBox {
    double min_lat = 0.0;
    double min_lon = 0.0;
    double max_lat = 0.0;
    double max_lon = 0.0;

    bool contains(LatLon p) const {
        return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
    }
    LatLon centroid() const { return {(min_lat + max_lat) / 2, (min_lon + max_lon) / 2}; }
};

/// Hexagon edge length giving a 36 km^2 cell, i.e. (3*sqrt(3)/2) a^2 = 36e6 m^2.
inline constexpr double default_edge_m = 3722.0;

struct GridConfig {
    LatLon origin;  ///< projection origin; maps to cell (0, 0)
    double edge_m = default_edge_m;
    /// When set, the hexagon area must match it within 0.1%.
    std::optional<double> target_area_km2 = 36.0;
    BoundingBox bbox;

    double cell_area_m2() const;
    /// Throws ConfigError.
    void validate() const;
};

/// Local equirectangular plane in meters (x east, y north).
struct PlanePoint {
    double x = 0.0;
    double y = 0.0;
};

/// Spatial index behind which the state space is defined; HexGrid is the
/// local implementation, a global hierarchical indexer can be swapped in.
class CellIndexer {
public:
    virtual ~CellIndexer() = default;

    /// Throws DomainError outside the study area.
    virtual CellId cell_of(LatLon p) const = 0;
    virtual bool in_domain(LatLon p) const = 0;
    /// Whether the cell's hexagon intersects the study area.
    virtual bool in_domain(CellId c) const = 0;
    virtual LatLon center_of(CellId c) const = 0;
    /// Adjacent cells that are in the domain.
    virtual std::vector<CellId> neighbors(CellId c) const = 0;
    /// Closed ring of 7 vertices (first == last), counter-clockwise.
    virtual std::vector<LatLon> polygon(CellId c) const = 0;
};

/// Flat-top hexagonal lattice on an equirectangular projection about the
/// configured origin (longitude scaled by cos(origin latitude)).
class HexGrid final : public CellIndexer {
public:
    explicit HexGrid(GridConfig cfg);

    const GridConfig& config() const { return cfg_; }

    CellId cell_of(LatLon p) const override;
    bool in_domain(LatLon p) const override { return cfg_.bbox.contains(p); }
    bool in_domain(CellId c) const override;
    LatLon center_of(CellId c) const override;
    std::vector<CellId> neighbors(CellId c) const override;
    std::vector<LatLon> polygon(CellId c) const override;

    PlanePoint project(LatLon p) const;
    LatLon unproject(PlanePoint p) const;
    /// Cube rounding on the plane; no domain check.
    CellId cell_of_plane(PlanePoint p) const;
    PlanePoint center_plane(CellId c) const;
    /// 6 vertices, counter-clockwise starting at angle 0.
    std::vector<PlanePoint> hexagon_plane(CellId c) const;

    /// All cells whose hexagon intersects the bounding box, sorted.
    std::vector<CellId> cells_in_domain() const;

private:
    GridConfig cfg_;
    double lon_scale_;  // meters per degree of longitude
    double lat_scale_;  // meters per degree of latitude
    PlanePoint box_lo_;
    PlanePoint box_hi_;
};

inline constexpr CellId axial_directions[6] = {{+1, 0}, {+1, -1}, {0, -1}, {-1, 0}, {-1, +1}, {0, +1}};

/// Discrete-time realization: cells[k] was occupied at start + k * dt_s.
struct StateSequence {
    VesselId vessel_id = 0;
    UnixSeconds start = 0;
    std::int64_t dt_s = 60;
    std::vector<CellId> cells;

    bool empty() const { return cells.empty(); }
    std::size_t size() const { return cells.size(); }
    UnixSeconds timestamp(std::size_t k) const { return start + static_cast<std::int64_t>(k) * dt_s; }
};

struct DiscretizeResult {
    /// Split wherever samples leave the domain.
    std::vector<StateSequence> sequences;
    std::size_t dropped = 0;
};

DiscretizeResult discretize(const ResampledTrajectory& rt, const CellIndexer& grid);

/// One-sample sequence for a single-report segment (no interpolation
/// possible); contributes residence only. Empty if the point is out of domain.
DiscretizeResult discretize_point(VesselId vessel, const TrackPoint& point, std::int64_t dt_s,
                                  const CellIndexer& grid);

} // namespace aismarkov
