#include "aismarkov/trajectory.hpp"

#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

using namespace aismarkov;

namespace {

UnixSeconds at(const char* hhmm) {
    return *parse_iso8601_utc(std::string("2019-06-01T") + hhmm + ":00Z");
}

AisRecord rec(VesselId v, UnixSeconds t, double lat = 0.0, double lon = 0.0) {
    AisRecord r;
    r.vessel_id = v;
    r.timestamp = t;
    r.lat = lat;
    r.lon = lon;
    return r;
}

std::vector<UnixSeconds> times(const RawSegment& s) {
    std::vector<UnixSeconds> out;
    for (const auto& p : s.points) out.push_back(p.t);
    return out;
}

} // namespace

TEST(Segment, ThreeHourBinsSplitAcrossBoundary) {
    SegmentConfig cfg;
    cfg.max_gap_s = 3 * 3600; // isolate the binning rule
    const std::vector<AisRecord> recs = {rec(1, at("01:00")), rec(1, at("02:00")), rec(1, at("04:00"))};
    const auto segs = segment_stream(recs, cfg);
    ASSERT_EQ(segs.size(), 2u);
    EXPECT_EQ(times(segs[0]), (std::vector<UnixSeconds>{at("01:00"), at("02:00")}));
    EXPECT_EQ(times(segs[1]), (std::vector<UnixSeconds>{at("04:00")}));
}

TEST(Segment, DefaultGapCapSplitsLongGaps) {
    const std::vector<AisRecord> recs = {rec(1, at("00:10")), rec(1, at("02:50"))};
    const auto segs = segment_stream(recs);
    ASSERT_EQ(segs.size(), 2u);
    EXPECT_EQ(segs[0].points.size(), 1u);
    EXPECT_EQ(segs[1].points.size(), 1u);
}

TEST(Segment, GapExactlyAtCapIsKept) {
    const std::vector<AisRecord> recs = {rec(1, at("00:00")), rec(1, at("00:15")), rec(1, at("00:30") + 1)};
    const auto segs = segment_stream(recs);
    ASSERT_EQ(segs.size(), 2u);
    EXPECT_EQ(segs[0].points.size(), 2u);
}

TEST(Segment, SinglePointAndVesselChange) {
    EXPECT_EQ(segment_stream(std::vector<AisRecord>{rec(1, 0)}).size(), 1u);
    const std::vector<AisRecord> recs = {rec(1, 0), rec(1, 60), rec(2, 120), rec(2, 180)};
    const auto segs = segment_stream(recs);
    ASSERT_EQ(segs.size(), 2u);
    EXPECT_EQ(segs[1].vessel_id, 2u);
}

TEST(Segment, AntimeridianCrossingSplits) {
    const std::vector<AisRecord> recs = {rec(1, 0, 10, 179.9), rec(1, 60, 10, -179.9)};
    EXPECT_EQ(segment_stream(recs).size(), 2u);
}

TEST(Segment, UnsortedInputThrows) {
    const std::vector<AisRecord> recs = {rec(1, 60), rec(1, 0)};
    EXPECT_THROW(segment_stream(recs), std::invalid_argument);
}

TEST(Resample, MidpointOfLinearInterpolation) {
    RawSegment seg{1, {{0, 0.0, 0.0}, {600, 0.0, 0.2}}};
    const auto rt = resample_segment(seg, 60);
    ASSERT_EQ(rt.size(), 11u);
    EXPECT_EQ(rt.start, 0);
    EXPECT_NEAR(rt.samples[5].lat, 0.0, 1e-15);
    EXPECT_NEAR(rt.samples[5].lon, 0.1, 1e-15);
    EXPECT_EQ(rt.timestamp(5), 300);
}

TEST(Resample, ConstantPositionGivesIdenticalSamples) {
    RawSegment seg{1, {{0, 12.5, 3.25}, {120, 12.5, 3.25}}};
    const auto rt = resample_segment(seg);
    ASSERT_EQ(rt.size(), 3u);
    for (const auto& p : rt.samples) {
        EXPECT_EQ(p, (LatLon{12.5, 3.25}));
    }
}

TEST(Resample, DefaultIntervalIsOneMinute) {
    EXPECT_EQ(default_resample_interval_s, 60);
}

TEST(Resample, GridAlignedStartAndEnd) {
    RawSegment seg{1, {{61, 0.0, 0.0}, {239, 1.0, 1.0}}};
    const auto rt = resample_segment(seg, 60);
    ASSERT_EQ(rt.size(), 2u);
    EXPECT_EQ(rt.start, 120);
    EXPECT_EQ(rt.timestamp(1), 180);
    // Segment shorter than the grid step between two grid points: nothing.
    RawSegment tiny{1, {{61, 0.0, 0.0}, {119, 1.0, 1.0}}};
    EXPECT_TRUE(resample_segment(tiny, 60).empty());
    RawSegment single{1, {{60, 0.0, 0.0}}};
    EXPECT_TRUE(resample_segment(single, 60).empty());
}

TEST(Resample, ConstantVelocityIsExact) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double lat0 = -60 + 120 * u(rng), lon0 = -170 + 340 * u(rng);
        const double vlat = (u(rng) - 0.5) * 1e-4, vlon = (u(rng) - 0.5) * 1e-4;
        RawSegment seg{1, {}};
        UnixSeconds t = static_cast<UnixSeconds>(rng() % 1000);
        const UnixSeconds t0 = t;
        for (int k = 0; k < 30; ++k) {
            seg.points.push_back({t, lat0 + vlat * static_cast<double>(t - t0), lon0 + vlon * static_cast<double>(t - t0)});
            t += 1 + static_cast<UnixSeconds>(rng() % 400);
        }
        const auto rt = resample_segment(seg, 60);
        for (std::size_t k = 0; k < rt.size(); ++k) {
            const double dt = static_cast<double>(rt.timestamp(k) - t0);
            EXPECT_NEAR(rt.samples[k].lat, lat0 + vlat * dt, 1e-9);
            EXPECT_NEAR(rt.samples[k].lon, lon0 + vlon * dt, 1e-9);
        }
    }
}

TEST(Resample, RejectsBadInput) {
    RawSegment seg{1, {{0, 0, 0}, {0, 1, 1}}};
    EXPECT_THROW(resample_segment(seg), std::invalid_argument);
    RawSegment ok{1, {{0, 0, 0}, {60, 1, 1}}};
    EXPECT_THROW(resample_segment(ok, 0), std::invalid_argument);
}

TEST(Resample, CsvExport) {
    RawSegment seg{7, {{0, 0.0, 0.0}, {60, 0.5, 1.0}}};
    const std::vector<ResampledTrajectory> rts = {resample_segment(seg)};
    EXPECT_EQ(write_resampled_csv(rts),
              "vessel_id,timestamp,lat,lon\n7,1970-01-01T00:00:00Z,0,0\n7,1970-01-01T00:01:00Z,0.5,1\n");
}
