#include "aismarkov/error.hpp"
#include "aismarkov/markov.hpp"
#include "aismarkov/pipeline.hpp"
#include "aismarkov/synthgen.hpp"
#include "aismarkov/trajectory.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace aismarkov;

namespace {

UnixSeconds day(const char* d) {
    return *parse_date_utc(d);
}

Scenario base_scenario() {
    Scenario s;
    s.seed = 99;
    s.bbox = {1.0, 103.5, 2.0, 104.5};
    s.periods = {{day("2019-03-01"), day("2019-03-01")}};
    return s;
}

GridConfig grid_config(LatLon origin) {
    GridConfig g;
    g.bbox = {1.0, 103.5, 2.0, 104.5};
    g.origin = origin;
    return g;
}

/// Segment, resample, discretize and accumulate, as the pipeline does for
/// multi-point segments.
std::vector<StateSequence> sequences(const std::vector<AisRecord>& recs, const HexGrid& grid) {
    std::vector<StateSequence> out;
    for (const auto& seg : segment_stream(recs)) {
        const auto rt = resample_segment(seg, 60);
        for (auto& s : discretize(rt, grid).sequences) out.push_back(std::move(s));
    }
    return out;
}

std::vector<CellId> runs(const std::vector<CellId>& cells) {
    std::vector<CellId> out;
    for (CellId c : cells) {
        if (out.empty() || out.back() != c) out.push_back(c);
    }
    return out;
}

} // namespace

TEST(Synthgen, SameScenarioIsByteIdentical) {
    Scenario s = base_scenario();
    s.noise = {25.0, 0.1};
    s.corridors.push_back({{{1.2, 103.6}, {1.3, 104.3}}, 3, 12.0, 60, true, VesselCategory::Commercial});
    s.loiter_zones.push_back({{1.7, 103.8}, 90.0, 2, 4.0, 10.0, 0.3, 2, 60, VesselCategory::Fishing});
    const auto a = generate(s);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(write_ais_csv(a), write_ais_csv(generate(s)));
    s.seed = 100;
    EXPECT_NE(write_ais_csv(a), write_ais_csv(generate(s)));
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end(), [](const AisRecord& x, const AisRecord& y) {
        return std::pair(x.vessel_id, x.timestamp) < std::pair(y.vessel_id, y.timestamp);
    }));
}

TEST(Synthgen, SingleCorridorVesselGivesOneChain) {
    Scenario s = base_scenario();
    const LatLon from{1.5, 103.85}, to{1.5, 104.15};
    s.corridors.push_back({{from, to}, 1, 12.0, 60, false, VesselCategory::Commercial});
    const auto recs = generate(s);
    const HexGrid grid(grid_config({1.5, 104.0}));
    const auto seqs = sequences(recs, grid);
    ASSERT_EQ(seqs.size(), 1u);
    const auto chain = runs(seqs[0].cells);
    EXPECT_EQ(chain.front(), grid.cell_of(from));
    EXPECT_EQ(chain.back(), grid.cell_of(to));
    for (std::size_t k = 1; k < chain.size(); ++k) {
        const auto n = grid.neighbors(chain[k - 1]);
        EXPECT_NE(std::find(n.begin(), n.end(), chain[k]), n.end()) << k;
    }
    TransitionStats stats;
    accumulate(seqs[0], stats);
    EXPECT_EQ(stats.total_transitions(), chain.size() - 1);
}

TEST(Synthgen, LoiterDwellMatchesConfiguredDuration) {
    Scenario s = base_scenario();
    const LatLon center{1.5, 104.0};
    // Near-instant transit isolates the dwell in the center cell.
    s.loiter_zones.push_back({center, 120.0, 1, 5.0, 5000.0, 0.2, 1, 60, VesselCategory::Fishing});
    const HexGrid grid(grid_config(center));
    TransitionStats stats;
    for (const auto& seq : sequences(generate(s), grid)) accumulate(seq, stats);
    const CellId c = grid.cell_of(center);
    std::int64_t dwell = 0;
    for (const auto& [pair, ps] : stats.pairs()) {
        if (pair.from == c) dwell += ps.dwell_s;
    }
    if (auto it = stats.terminal_dwell().find(c); it != stats.terminal_dwell().end()) dwell += it->second;
    EXPECT_NEAR(static_cast<double>(dwell), 120.0 * 60.0, 60.0);
}

TEST(Synthgen, InactiveShuttleEmitsNothing) {
    Scenario s = base_scenario();
    s.periods = {{day("2019-03-01"), day("2019-03-03")}, {day("2020-03-01"), day("2020-03-03")}};
    Shuttle sh;
    sh.a = {1.55, 104.05};
    sh.b = {1.72, 104.20};
    sh.active = {{day("2019-01-01"), day("2019-12-31")}};
    s.shuttles.push_back(sh);
    const auto recs = generate(s);
    ASSERT_FALSE(recs.empty());
    const UnixSeconds boundary = day("2020-01-01");
    EXPECT_TRUE(std::all_of(recs.begin(), recs.end(), [&](const AisRecord& r) { return r.timestamp < boundary; }));
    EXPECT_TRUE(std::all_of(recs.begin(), recs.end(), [](const AisRecord& r) {
        return categorize_vessel(r.ship_type) == VesselCategory::Passenger;
    }));
}

TEST(Synthgen, TrackInterpolationAndReportTimes) {
    Track tr{{{0, {0.0, 0.0}}, {100, {1.0, 2.0}}}};
    EXPECT_EQ(tr.position(50), (LatLon{0.5, 1.0}));
    EXPECT_EQ(tr.position(100), (LatLon{1.0, 2.0}));
    VesselPlan plan;
    plan.report_interval_s = 30;
    EXPECT_EQ(plan.report_times(Track{{{10, {}}, {95, {}}}}), (std::vector<UnixSeconds>{30, 60, 90}));
}

TEST(Synthgen, ValidationErrors) {
    Scenario s = base_scenario();
    s.corridors.push_back({{{1.2, 103.6}, {3.0, 104.3}}, 1, 12.0, 60, true, VesselCategory::Commercial});
    EXPECT_THROW(s.validate(), ConfigError);
    s = base_scenario();
    s.noise.dropout = 1.5;
    EXPECT_THROW(s.validate(), ConfigError);
    s = base_scenario();
    s.periods.clear();
    EXPECT_THROW(s.validate(), ConfigError);
    s = base_scenario();
    Shuttle sh;
    sh.a = {1.1, 103.6};
    sh.b = {1.9, 104.4};
    sh.round_trips_per_day = 24;
    s.shuttles.push_back(sh);
    EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Synthgen, YamlParsing) {
    const std::string yaml = R"(
seed: 5
bbox: [1.0, 103.5, 2.0, 104.5]
periods: [[2019-03-01, 2019-03-02]]
noise: {jitter_m: 10, dropout: 0.0}
corridors:
  - polyline: [[1.2, 103.6], [1.3, 104.3]]
    vessels: 2
    speed_kn: 11
    category: Commercial
shuttles:
  - endpoints: [[1.55, 104.05], [1.72, 104.20]]
    active: [[2019-03-02, 2019-03-02]]
)";
    const auto s = parse_scenario(yaml);
    EXPECT_EQ(s.seed, 5u);
    ASSERT_EQ(s.corridors.size(), 1u);
    EXPECT_EQ(s.corridors[0].vessels, 2);
    ASSERT_EQ(s.shuttles.size(), 1u);
    ASSERT_EQ(s.shuttles[0].active.size(), 1u);
    EXPECT_EQ(s.shuttles[0].active[0].first_day, day("2019-03-02"));
    EXPECT_EQ(plan_vessels(s).size(), 3u);

    EXPECT_THROW(parse_scenario("seed: [unterminated"), ConfigError);
    EXPECT_THROW(parse_scenario(yaml + "loiter_zones:\n  - center: [1.5]\n"), ConfigError);
    EXPECT_THROW(parse_scenario("bbox: [1, 2, 3]\nperiods: [[2019-01-01, 2019-01-01]]\n"), ConfigError);
}

TEST(Synthgen, ZeroNoiseCoverageMatchesPipelineCells) {
    Scenario s = base_scenario();
    s.corridors.push_back({{{1.15, 103.55}, {1.18, 103.90}, {1.15, 104.30}}, 3, 12.0, 60, true,
                           VesselCategory::Commercial});
    s.loiter_zones.push_back({{1.75, 103.75}, 120.0, 2, 5.0, 10.0, 0.2, 2, 60, VesselCategory::Fishing});
    Shuttle sh;
    sh.a = {1.55, 104.05};
    sh.b = {1.72, 104.20};
    sh.vessels = 2;
    s.shuttles.push_back(sh);

    PipelineConfig cfg;
    cfg.grid = grid_config({1.5, 104.0});
    cfg.windows = {{"day", day("2019-03-01"), day("2019-03-01")}};
    cfg.categories = {VesselCategory::All};
    const auto analysis = analyze(generate(s), cfg, ShipTypeTable::builtin());
    ASSERT_EQ(analysis.streams.size(), 1u);
    const auto occupied = analysis.streams[0].stats.occupied_cells();

    // Ground truth: the cell of every reported position along the planned tracks.
    const HexGrid grid(cfg.grid);
    std::set<CellId> expected;
    for (const auto& plan : plan_vessels(s)) {
        for (const auto& track : plan.tracks) {
            for (UnixSeconds t : plan.report_times(track)) expected.insert(grid.cell_of(track.position(t)));
        }
    }
    EXPECT_EQ(std::vector<CellId>(expected.begin(), expected.end()), occupied);
}
