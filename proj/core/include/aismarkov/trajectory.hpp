#pragma once

#include "aismarkov/ais_ingest.hpp"
#include "aismarkov/geo.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace aismarkov {

struct TrackPoint {
    UnixSeconds t = 0;
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

/// Raw reports of one vessel confined to a single aligned segment window,
/// with no internal gap above the interpolation cap.
struct RawSegment {
    VesselId vessel_id = 0;
    std::vector<TrackPoint> points;
};

struct SegmentConfig {
    /// Wall-clock bin length; bins are aligned to UTC midnight.
    std::int64_t window_s = 3 * 3600;
    /// Consecutive reports further apart than this start a new segment.
    std::int64_t max_gap_s = 15 * 60;
};

/// Splits time-sorted records into segments. A new segment starts whenever
/// the vessel changes, the aligned bin changes, the gap exceeds the cap, or
/// the track crosses the antimeridian. Throws std::invalid_argument if the
/// input is not sorted by (vessel_id, timestamp).
std::vector<RawSegment> segment_stream(std::span<const AisRecord> records, const SegmentConfig& cfg = {});

/// Positions at start + k * dt_s, k = 0..size()-1.
struct ResampledTrajectory {
    VesselId vessel_id = 0;
    UnixSeconds start = 0;
    std::int64_t dt_s = 60;
    std::vector<LatLon> samples;

    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }
    UnixSeconds timestamp(std::size_t k) const { return start + static_cast<std::int64_t>(k) * dt_s; }
};

inline constexpr std::int64_t default_resample_interval_s = 60;

/// Linear interpolation in lat and lon at every multiple of dt_s between the
/// first and last raw timestamps (no extrapolation). Segments with fewer than
/// two points give an empty trajectory. Throws std::invalid_argument on
/// non-increasing timestamps or dt_s <= 0.
ResampledTrajectory resample_segment(const RawSegment& seg, std::int64_t dt_s = default_resample_interval_s);

/// Debug dump: `vessel_id,timestamp,lat,lon` per sample.
std::string write_resampled_csv(std::span<const ResampledTrajectory> trajectories, char delimiter = ',');

} // namespace aismarkov
