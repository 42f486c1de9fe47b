#include "aismarkov/synthgen.hpp"

#include "aismarkov/error.hpp"
#include "aismarkov/textio.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace aismarkov {

namespace {

constexpr double knot_m_s = 1852.0 / 3600.0;

double distance_m(LatLon a, LatLon b) {
    const double mean_lat = 0.5 * (a.lat + b.lat) * deg_to_rad;
    const double dx = (b.lon - a.lon) * deg_to_rad * std::cos(mean_lat) * earth_radius_m;
    const double dy = (b.lat - a.lat) * deg_to_rad * earth_radius_m;
    return std::hypot(dx, dy);
}

LatLon offset_m(LatLon p, double east, double north) {
    return {p.lat + north / (earth_radius_m * deg_to_rad),
            p.lon + east / (earth_radius_m * deg_to_rad * std::cos(p.lat * deg_to_rad))};
}

LatLon lerp(LatLon a, LatLon b, double f) {
    return {a.lat + (b.lat - a.lat) * f, a.lon + (b.lon - a.lon) * f};
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Portable draws from the raw engine (std distributions differ between
// standard library implementations).
struct NoiseSource {
    std::mt19937_64 engine;

    double uniform() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
    double gaussian() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }
};

void push_waypoint(Track& track, double t, LatLon pos) {
    const auto ts = static_cast<UnixSeconds>(std::llround(t));
    if (!track.waypoints.empty() && ts <= track.waypoints.back().t) {
        track.waypoints.back().pos = pos;
        return;
    }
    track.waypoints.push_back({ts, pos});
}

bool day_active(const std::vector<DateRange>& active, UnixSeconds day) {
    if (active.empty()) {
        return true;
    }
    return std::any_of(active.begin(), active.end(),
                       [&](const DateRange& r) { return day >= r.first_day && day <= r.last_day; });
}

std::vector<Track> corridor_tracks(const Corridor& c, int v, const std::vector<DateRange>& periods) {
    std::vector<LatLon> cycle = c.polyline;
    if (c.bidirectional) {
        for (std::size_t k = c.polyline.size() - 1; k-- > 0;) {
            cycle.push_back(c.polyline[k]);
        }
    }
    std::vector<double> leg(cycle.size() - 1);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cycle.size(); ++k) {
        leg[k] = distance_m(cycle[k], cycle[k + 1]);
        total += leg[k];
    }
    const double speed = c.speed_kn * knot_m_s;
    std::vector<Track> tracks;
    for (const DateRange& p : periods) {
        Track tr;
        double t = static_cast<double>(p.begin());
        const double t_end = static_cast<double>(p.end() - 1);
        double s = 0.0;
        if (c.bidirectional) {
            s = total * v / c.vessels;
        } else {
            t += 600.0 * v;
        }
        std::size_t k = 0;
        while (s >= leg[k]) {
            s -= leg[k];
            k = (k + 1) % leg.size();
        }
        push_waypoint(tr, t, lerp(cycle[k], cycle[k + 1], s / leg[k]));
        while (true) {
            const double t_next = t + (leg[k] - s) / speed;
            if (t_next >= t_end) {
                push_waypoint(tr, t_end, lerp(cycle[k], cycle[k + 1], (s + (t_end - t) * speed) / leg[k]));
                break;
            }
            t = t_next;
            s = 0.0;
            push_waypoint(tr, t, cycle[k + 1]);
            if (!c.bidirectional && k + 2 == cycle.size()) {
                break;
            }
            k = (k + 1) % leg.size();
        }
        if (tr.waypoints.size() >= 2) {
            tracks.push_back(std::move(tr));
        }
    }
    return tracks;
}

std::vector<Track> loiter_tracks(const LoiterZone& z, int v, const std::vector<DateRange>& periods) {
    const double angle = (30.0 + 360.0 * v / z.vessels) * deg_to_rad;
    const double approach_m = z.approach_km * 1000.0;
    const LatLon start = offset_m(z.center, approach_m * std::cos(angle), approach_m * std::sin(angle));
    const double excursion = 0.5 * z.drift_speed_kn * knot_m_s * z.dwell_min * 60.0;
    const LatLon far = offset_m(z.center, -excursion * std::sin(angle), excursion * std::cos(angle));
    const double transit = approach_m / (z.transit_speed_kn * knot_m_s);
    const double dwell = z.dwell_min * 60.0;
    std::vector<Track> tracks;
    for (const DateRange& p : periods) {
        for (UnixSeconds day = p.first_day; day <= p.last_day; day += seconds_per_day) {
            for (int s = 0; s < z.sorties_per_day; ++s) {
                const int bin = (v + s * (8 / z.sorties_per_day)) % 8;
                const double t0 = static_cast<double>(day + bin * 10800 + 300);
                Track tr;
                push_waypoint(tr, t0, start);
                push_waypoint(tr, t0 + transit, z.center);
                push_waypoint(tr, t0 + transit + dwell / 2, far);
                push_waypoint(tr, t0 + transit + dwell, z.center);
                push_waypoint(tr, t0 + 2 * transit + dwell, start);
                tracks.push_back(std::move(tr));
            }
        }
    }
    return tracks;
}

std::vector<Track> shuttle_tracks(const Shuttle& sh, int v, const std::vector<DateRange>& periods) {
    const double leg = distance_m(sh.a, sh.b) / (sh.speed_kn * knot_m_s);
    const double turn = sh.turnaround_min * 60.0;
    const double slot = 86400.0 / sh.round_trips_per_day;
    std::vector<Track> tracks;
    for (const DateRange& p : periods) {
        for (UnixSeconds day = p.first_day; day <= p.last_day; day += seconds_per_day) {
            if (!day_active(sh.active, day)) {
                continue;
            }
            for (int k = 0; k < sh.round_trips_per_day; ++k) {
                const double t0 = static_cast<double>(day) + k * slot + v * slot / sh.vessels;
                Track tr;
                push_waypoint(tr, t0, sh.a);
                push_waypoint(tr, t0 + leg, sh.b);
                push_waypoint(tr, t0 + leg + turn, sh.b);
                push_waypoint(tr, t0 + 2 * leg + turn, sh.a);
                tracks.push_back(std::move(tr));
            }
        }
    }
    return tracks;
}

void check_inside(const BoundingBox& box, LatLon p, const std::string& what) {
    if (!box.contains(p)) {
        throw ConfigError("scenario: " + what + " lies outside the bounding box");
    }
}

} // namespace

std::optional<int> representative_ship_type(VesselCategory c) {
    switch (c) {
    case VesselCategory::Commercial: return 70;
    case VesselCategory::Fishing: return 30;
    case VesselCategory::Passenger: return 60;
    default: return std::nullopt;
    }
}

void Scenario::validate() const {
    if (!(bbox.min_lat < bbox.max_lat) || !(bbox.min_lon < bbox.max_lon)) {
        throw ConfigError("scenario: degenerate bounding box");
    }
    if (periods.empty()) {
        throw ConfigError("scenario: no simulated periods");
    }
    for (const DateRange& p : periods) {
        if (p.first_day > p.last_day) {
            throw ConfigError("scenario: period ends before it starts");
        }
    }
    if (noise.jitter_m < 0.0 || noise.dropout < 0.0 || noise.dropout >= 1.0) {
        throw ConfigError("scenario: noise parameters out of range");
    }
    for (const Corridor& c : corridors) {
        if (c.polyline.size() < 2 || c.vessels < 1 || !(c.speed_kn > 0.0) || c.report_interval_s <= 0) {
            throw ConfigError("scenario: corridor needs >= 2 vertices, vessels, speed and report interval");
        }
        for (std::size_t k = 0; k < c.polyline.size(); ++k) {
            check_inside(bbox, c.polyline[k], "corridor vertex");
            if (k > 0 && distance_m(c.polyline[k - 1], c.polyline[k]) < 100.0) {
                throw ConfigError("scenario: corridor legs must be at least 100 m long");
            }
        }
    }
    for (const LoiterZone& z : loiter_zones) {
        check_inside(bbox, z.center, "loiter center");
        if (z.vessels < 1 || !(z.dwell_min > 0.0) || !(z.approach_km > 0.0) || !(z.transit_speed_kn > 0.0) ||
            z.drift_speed_kn < 0.0 || z.sorties_per_day < 1 || z.sorties_per_day > 8 || z.report_interval_s <= 0) {
            throw ConfigError("scenario: loiter zone parameters out of range");
        }
    }
    for (const Shuttle& sh : shuttles) {
        check_inside(bbox, sh.a, "shuttle endpoint");
        check_inside(bbox, sh.b, "shuttle endpoint");
        if (sh.vessels < 1 || sh.round_trips_per_day < 1 || !(sh.speed_kn > 0.0) || sh.report_interval_s <= 0 ||
            distance_m(sh.a, sh.b) < 100.0) {
            throw ConfigError("scenario: shuttle parameters out of range");
        }
        const double trip = 2 * distance_m(sh.a, sh.b) / (sh.speed_kn * knot_m_s) + sh.turnaround_min * 60.0;
        if (trip >= 86400.0 / sh.round_trips_per_day) {
            throw ConfigError("scenario: shuttle round trip longer than its departure interval");
        }
    }
}

LatLon Track::position(UnixSeconds t) const {
    if (t <= waypoints.front().t) {
        return waypoints.front().pos;
    }
    if (t >= waypoints.back().t) {
        return waypoints.back().pos;
    }
    auto it = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                               [](UnixSeconds v, const Waypoint& w) { return v < w.t; });
    const Waypoint& b = *it;
    const Waypoint& a = *(it - 1);
    if (a.t == t) {
        return a.pos;
    }
    return lerp(a.pos, b.pos, static_cast<double>(t - a.t) / static_cast<double>(b.t - a.t));
}

std::vector<UnixSeconds> VesselPlan::report_times(const Track& track) const {
    std::vector<UnixSeconds> out;
    for (UnixSeconds t = ceil_div(track.begin(), report_interval_s) * report_interval_s; t <= track.end();
         t += report_interval_s) {
        out.push_back(t);
    }
    return out;
}

std::vector<VesselPlan> plan_vessels(const Scenario& s) {
    s.validate();
    std::vector<VesselPlan> plans;
    VesselId next = s.first_vessel_id;
    for (std::size_t i = 0; i < s.corridors.size(); ++i) {
        const Corridor& c = s.corridors[i];
        for (int v = 0; v < c.vessels; ++v) {
            plans.push_back({next++, PrimitiveKind::Corridor, i, c.category, c.report_interval_s,
                             corridor_tracks(c, v, s.periods)});
        }
    }
    for (std::size_t i = 0; i < s.loiter_zones.size(); ++i) {
        const LoiterZone& z = s.loiter_zones[i];
        for (int v = 0; v < z.vessels; ++v) {
            plans.push_back({next++, PrimitiveKind::Loiter, i, z.category, z.report_interval_s,
                             loiter_tracks(z, v, s.periods)});
        }
    }
    for (std::size_t i = 0; i < s.shuttles.size(); ++i) {
        const Shuttle& sh = s.shuttles[i];
        for (int v = 0; v < sh.vessels; ++v) {
            plans.push_back({next++, PrimitiveKind::Shuttle, i, sh.category, sh.report_interval_s,
                             shuttle_tracks(sh, v, s.periods)});
        }
    }
    return plans;
}

std::vector<AisRecord> generate(const Scenario& s) {
    std::vector<AisRecord> out;
    for (const VesselPlan& plan : plan_vessels(s)) {
        NoiseSource noise{std::mt19937_64(splitmix64(s.seed ^ splitmix64(plan.id)))};
        const auto ship_type = representative_ship_type(plan.category);
        UnixSeconds last = std::numeric_limits<UnixSeconds>::min();
        for (const Track& track : plan.tracks) {
            for (UnixSeconds t : plan.report_times(track)) {
                const double u = noise.uniform();
                const double ex = noise.gaussian() * s.noise.jitter_m;
                const double ny = noise.gaussian() * s.noise.jitter_m;
                if (u < s.noise.dropout || t <= last) {
                    continue;
                }
                LatLon p = track.position(t);
                if (s.noise.jitter_m > 0.0) {
                    p = offset_m(p, ex, ny);
                }
                // Kinematics from the motion over the next (or previous) second.
                const LatLon ahead = track.position(std::min(t + 1, track.end()));
                const LatLon behind = track.position(std::max(t - 1, track.begin()));
                const LatLon p0 = t + 1 <= track.end() ? track.position(t) : behind;
                const LatLon p1 = t + 1 <= track.end() ? ahead : track.position(t);
                const double speed = distance_m(p0, p1) / knot_m_s;
                double course = std::atan2((p1.lon - p0.lon) * std::cos(p0.lat * deg_to_rad), p1.lat - p0.lat) /
                                deg_to_rad;
                if (course < 0.0) {
                    course += 360.0;
                }
                AisRecord r;
                r.vessel_id = plan.id;
                r.timestamp = t;
                r.lat = std::round(p.lat * 1e7) / 1e7;
                r.lon = std::round(p.lon * 1e7) / 1e7;
                r.sog = std::round(speed * 10.0) / 10.0;
                r.cog = std::fmod(std::round(course * 10.0) / 10.0, 360.0);
                r.nav_status = plan.kind == PrimitiveKind::Loiter && speed < 1.0 ? 7 : 0;
                r.ship_type = ship_type;
                if (s.bbox.contains(p)) {
                    out.push_back(r);
                    last = t;
                }
            }
        }
    }
    sort_and_dedup(out);
    return out;
}

namespace {

LatLon yaml_point(const YAML::Node& n) {
    if (!n.IsSequence() || n.size() != 2) {
        throw ConfigError("scenario: expected [lat, lon]");
    }
    return {n[0].as<double>(), n[1].as<double>()};
}

DateRange yaml_range(const YAML::Node& n) {
    if (!n.IsSequence() || n.size() != 2) {
        throw ConfigError("scenario: expected [first_day, last_day]");
    }
    auto a = parse_date_utc(n[0].as<std::string>());
    auto b = parse_date_utc(n[1].as<std::string>());
    if (!a || !b) {
        throw ConfigError("scenario: dates must be YYYY-MM-DD");
    }
    return {*a, *b};
}

VesselCategory yaml_category(const YAML::Node& n, VesselCategory fallback) {
    if (!n) {
        return fallback;
    }
    auto c = parse_category(n.as<std::string>());
    if (!c || *c == VesselCategory::All) {
        throw ConfigError("scenario: unknown vessel category '" + n.as<std::string>() + "'");
    }
    return *c;
}

template <typename T>
void read_opt(const YAML::Node& n, const char* key, T& out) {
    if (n[key]) {
        out = n[key].as<T>();
    }
}

} // namespace

Scenario parse_scenario(const std::string& yaml_text) {
    Scenario s;
    try {
        const YAML::Node root = YAML::Load(yaml_text);
        read_opt(root, "seed", s.seed);
        read_opt(root, "first_vessel_id", s.first_vessel_id);
        const YAML::Node box = root["bbox"];
        if (!box || !box.IsSequence() || box.size() != 4) {
            throw ConfigError("scenario: bbox must be [min_lat, min_lon, max_lat, max_lon]");
        }
        s.bbox = {box[0].as<double>(), box[1].as<double>(), box[2].as<double>(), box[3].as<double>()};
        for (const auto& p : root["periods"]) {
            s.periods.push_back(yaml_range(p));
        }
        if (const auto noise = root["noise"]) {
            read_opt(noise, "jitter_m", s.noise.jitter_m);
            read_opt(noise, "dropout", s.noise.dropout);
        }
        for (const auto& n : root["corridors"]) {
            Corridor c;
            for (const auto& p : n["polyline"]) {
                c.polyline.push_back(yaml_point(p));
            }
            read_opt(n, "vessels", c.vessels);
            read_opt(n, "speed_kn", c.speed_kn);
            read_opt(n, "report_interval_s", c.report_interval_s);
            read_opt(n, "bidirectional", c.bidirectional);
            c.category = yaml_category(n["category"], c.category);
            s.corridors.push_back(std::move(c));
        }
        for (const auto& n : root["loiter_zones"]) {
            LoiterZone z;
            z.center = yaml_point(n["center"]);
            read_opt(n, "dwell_min", z.dwell_min);
            read_opt(n, "vessels", z.vessels);
            read_opt(n, "approach_km", z.approach_km);
            read_opt(n, "transit_speed_kn", z.transit_speed_kn);
            read_opt(n, "drift_speed_kn", z.drift_speed_kn);
            read_opt(n, "sorties_per_day", z.sorties_per_day);
            read_opt(n, "report_interval_s", z.report_interval_s);
            z.category = yaml_category(n["category"], z.category);
            s.loiter_zones.push_back(z);
        }
        for (const auto& n : root["shuttles"]) {
            Shuttle sh;
            const YAML::Node ends = n["endpoints"];
            if (!ends || ends.size() != 2) {
                throw ConfigError("scenario: shuttle endpoints must be two points");
            }
            sh.a = yaml_point(ends[0]);
            sh.b = yaml_point(ends[1]);
            read_opt(n, "round_trips_per_day", sh.round_trips_per_day);
            read_opt(n, "vessels", sh.vessels);
            read_opt(n, "speed_kn", sh.speed_kn);
            read_opt(n, "turnaround_min", sh.turnaround_min);
            read_opt(n, "report_interval_s", sh.report_interval_s);
            for (const auto& r : n["active"]) {
                sh.active.push_back(yaml_range(r));
            }
            sh.category = yaml_category(n["category"], sh.category);
            s.shuttles.push_back(std::move(sh));
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_file(path));
}

} // namespace aismarkov
