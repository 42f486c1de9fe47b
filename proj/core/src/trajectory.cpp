#include "aismarkov/trajectory.hpp"

#include "aismarkov/textio.hpp"

#include <cmath>
#include <stdexcept>

namespace aismarkov {

std::vector<RawSegment> segment_stream(std::span<const AisRecord> records, const SegmentConfig& cfg) {
    if (cfg.window_s <= 0 || cfg.max_gap_s < 0) {
        throw std::invalid_argument("segment_stream: bad segment configuration");
    }
    std::vector<RawSegment> segments;
    const AisRecord* prev = nullptr;
    for (const AisRecord& r : records) {
        bool split = prev == nullptr;
        if (prev != nullptr) {
            if (r.vessel_id < prev->vessel_id ||
                (r.vessel_id == prev->vessel_id && r.timestamp <= prev->timestamp)) {
                throw std::invalid_argument("segment_stream: records not sorted by (vessel_id, timestamp)");
            }
            split = r.vessel_id != prev->vessel_id ||
                    floor_div(r.timestamp, cfg.window_s) != floor_div(prev->timestamp, cfg.window_s) ||
                    r.timestamp - prev->timestamp > cfg.max_gap_s || std::abs(r.lon - prev->lon) > 180.0;
        }
        if (split) {
            segments.push_back(RawSegment{r.vessel_id, {}});
        }
        segments.back().points.push_back({r.timestamp, r.lat, r.lon});
        prev = &r;
    }
    return segments;
}

ResampledTrajectory resample_segment(const RawSegment& seg, std::int64_t dt_s) {
    if (dt_s <= 0) {
        throw std::invalid_argument("resample_segment: dt must be positive");
    }
    const auto& pts = seg.points;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].t <= pts[i - 1].t) {
            throw std::invalid_argument("resample_segment: timestamps not strictly increasing");
        }
    }
    ResampledTrajectory out{seg.vessel_id, 0, dt_s, {}};
    if (pts.size() < 2) {
        return out;
    }
    out.start = ceil_div(pts.front().t, dt_s) * dt_s;
    const UnixSeconds last = pts.back().t;
    if (out.start > last) {
        return out;
    }
    out.samples.reserve(static_cast<std::size_t>((last - out.start) / dt_s + 1));
    std::size_t j = 0; // pts[j].t <= t < pts[j + 1].t, or t == last
    for (UnixSeconds t = out.start; t <= last; t += dt_s) {
        while (j + 1 < pts.size() && pts[j + 1].t <= t) {
            ++j;
        }
        const TrackPoint& a = pts[j];
        if (a.t == t || j + 1 == pts.size()) {
            out.samples.push_back({a.lat, a.lon});
            continue;
        }
        const TrackPoint& b = pts[j + 1];
        const double frac = static_cast<double>(t - a.t) / static_cast<double>(b.t - a.t);
        out.samples.push_back({a.lat + (b.lat - a.lat) * frac, a.lon + (b.lon - a.lon) * frac});
    }
    return out;
}

std::string write_resampled_csv(std::span<const ResampledTrajectory> trajectories, char delimiter) {
    std::string out = "vessel_id";
    for (const char* name : {"timestamp", "lat", "lon"}) {
        out += delimiter;
        out += name;
    }
    out += '\n';
    for (const ResampledTrajectory& rt : trajectories) {
        for (std::size_t k = 0; k < rt.size(); ++k) {
            out += std::to_string(rt.vessel_id);
            out += delimiter;
            out += format_iso8601_utc(rt.timestamp(k));
            out += delimiter;
            out += format_double(rt.samples[k].lat);
            out += delimiter;
            out += format_double(rt.samples[k].lon);
            out += '\n';
        }
    }
    return out;
}

} // namespace aismarkov
