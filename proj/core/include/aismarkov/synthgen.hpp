#pragma once

#include "aismarkov/ais_ingest.hpp"
#include "aismarkov/geo.hpp"
#include "aismarkov/hexgrid.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace aismarkov {

/// Inclusive day range.
struct DateRange {
    UnixSeconds first_day = 0;
    UnixSeconds last_day = 0;

    UnixSeconds begin() const { return first_day; }
    UnixSeconds end() const { return last_day + seconds_per_day; }
};

/// Vessels moving along a polyline at constant speed. Bidirectional
/// corridors shuttle back and forth for the whole period, starting at
/// evenly spread phases; one-way corridors make a single pass per period,
/// departures staggered by ten minutes.
struct Corridor {
    std::vector<LatLon> polyline;
    int vessels = 1;
    double speed_kn = 10.0;
    std::int64_t report_interval_s = 60;
    bool bidirectional = true;
    VesselCategory category = VesselCategory::Commercial;
};

/// Each sortie: transit in from a point `approach_km` away, drift near the
/// center for `dwell_min`, transit back out. One sortie per vessel per day
/// by default, each starting 5 minutes into a 3-hour bin.
struct LoiterZone {
    LatLon center;
    double dwell_min = 120.0;
    int vessels = 1;
    double approach_km = 5.0;
    double transit_speed_kn = 10.0;
    double drift_speed_kn = 0.2;
    int sorties_per_day = 1;
    std::int64_t report_interval_s = 60;
    VesselCategory category = VesselCategory::Fishing;
};

/// Round trips between two endpoints, emitted only on days inside one of
/// the active ranges (all days when `active` is empty).
struct Shuttle {
    LatLon a;
    LatLon b;
    int round_trips_per_day = 4;
    int vessels = 1;
    double speed_kn = 15.0;
    double turnaround_min = 10.0;
    std::vector<DateRange> active;
    std::int64_t report_interval_s = 60;
    VesselCategory category = VesselCategory::Passenger;
};

struct NoiseModel {
    double jitter_m = 0.0;   ///< Gaussian position noise, standard deviation
    double dropout = 0.0;    ///< probability each report is lost
};

struct Scenario {
    std::uint64_t seed = 1;
    BoundingBox bbox;
    std::vector<DateRange> periods;  ///< simulated days
    NoiseModel noise;
    VesselId first_vessel_id = 100000001;
    std::vector<Corridor> corridors;
    std::vector<LoiterZone> loiter_zones;
    std::vector<Shuttle> shuttles;

    /// Throws ConfigError (geometry outside bbox, bad counts or rates).
    void validate() const;
};

/// Reads the YAML scenario format (see README).
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& yaml_text);

/// AIS ship type code emitted for a category (Other: no code).
std::optional<int> representative_ship_type(VesselCategory c);

struct Waypoint {
    UnixSeconds t = 0;
    LatLon pos;
};

/// Piecewise-linear motion in lat/lon between strictly increasing waypoints.
struct Track {
    std::vector<Waypoint> waypoints;

    UnixSeconds begin() const { return waypoints.front().t; }
    UnixSeconds end() const { return waypoints.back().t; }
    LatLon position(UnixSeconds t) const;
};

enum class PrimitiveKind { Corridor, Loiter, Shuttle };

/// Ground truth for one synthetic vessel.
struct VesselPlan {
    VesselId id = 0;
    PrimitiveKind kind = PrimitiveKind::Corridor;
    std::size_t primitive = 0;  ///< index into the scenario's list of that kind
    VesselCategory category = VesselCategory::Other;
    std::int64_t report_interval_s = 60;
    std::vector<Track> tracks;

    /// Report instants: multiples of the interval inside each track.
    std::vector<UnixSeconds> report_times(const Track& track) const;
};

std::vector<VesselPlan> plan_vessels(const Scenario& s);

/// Deterministic under the seed; sorted by (vessel_id, timestamp).
std::vector<AisRecord> generate(const Scenario& s);

} // namespace aismarkov
