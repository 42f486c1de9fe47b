#include "aismarkov/pipeline.hpp"

#include "aismarkov/error.hpp"
#include "aismarkov/parallel.hpp"
#include "aismarkov/textio.hpp"

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <chrono>
#include <set>

namespace aismarkov {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> top_level_keys = {
    "config_version", "inputs",   "csv",        "ship_type_table", "grid", "resample",
    "windows",        "categories", "quantization", "metrics",       "output_dir", "workers",
    "seed",           "max_rejection_fraction"};

template <typename T>
void read_opt(const YAML::Node& n, const char* key, T& out) {
    if (n && n[key]) {
        out = n[key].as<T>();
    }
}

UnixSeconds yaml_date(const YAML::Node& n, const char* what) {
    auto d = parse_date_utc(n.as<std::string>());
    if (!d) {
        throw ConfigError(std::string("config: ") + what + " must be a YYYY-MM-DD date");
    }
    return *d;
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

} // namespace

void PipelineConfig::validate() const {
    if (config_version != current_config_version) {
        throw ConfigError("config: unsupported config_version " + std::to_string(config_version));
    }
    if (inputs.empty()) {
        throw ConfigError("config: no input files");
    }
    for (const auto& p : inputs) {
        if (!fs::is_regular_file(p)) {
            throw ConfigError("config: input file not found: " + p.string());
        }
    }
    if (ship_type_table && !fs::is_regular_file(*ship_type_table)) {
        throw ConfigError("config: ship type table not found: " + ship_type_table->string());
    }
    grid.validate();
    if (dt_s <= 0 || segment.window_s <= 0 || segment.max_gap_s < 0) {
        throw ConfigError("config: resample intervals must be positive");
    }
    if (segment.window_s % dt_s != 0) {
        throw ConfigError("config: dt_s = " + std::to_string(dt_s) + " does not divide the segment window of " +
                          std::to_string(segment.window_s) + " s");
    }
    if (windows.empty()) {
        throw ConfigError("config: no time windows");
    }
    validate_windows(windows);
    if (categories.empty()) {
        throw ConfigError("config: no categories to emit");
    }
    quantization.validate();
    if (workers < 1) {
        throw ConfigError("config: workers must be >= 1");
    }
    if (!(max_rejection_fraction >= 0.0 && max_rejection_fraction <= 1.0)) {
        throw ConfigError("config: max_rejection_fraction must lie in [0, 1]");
    }
}

PipelineConfig parse_config(const std::string& yaml_text, const fs::path& base_dir) {
    PipelineConfig cfg;
    try {
        const YAML::Node root = YAML::Load(yaml_text);
        if (!root.IsMap()) {
            throw ConfigError("config: expected a mapping at the top level");
        }
        for (const auto& kv : root) {
            const auto key = kv.first.as<std::string>();
            if (!top_level_keys.count(key)) {
                throw ConfigError("config: unknown key '" + key + "'");
            }
        }
        if (!root["config_version"]) {
            throw ConfigError("config: missing config_version");
        }
        cfg.config_version = root["config_version"].as<int>();

        const YAML::Node inputs = root["inputs"];
        if (inputs && inputs.IsScalar()) {
            cfg.inputs.push_back(resolve(base_dir, inputs.as<std::string>()));
        } else {
            for (const auto& p : inputs) {
                cfg.inputs.push_back(resolve(base_dir, p.as<std::string>()));
            }
        }

        if (const YAML::Node csv = root["csv"]) {
            if (csv["delimiter"]) {
                const auto d = csv["delimiter"].as<std::string>();
                if (d.size() != 1) {
                    throw ConfigError("config: csv.delimiter must be a single character");
                }
                cfg.schema.delimiter = d[0];
            }
            const YAML::Node cols = csv["columns"];
            read_opt(cols, "vessel_id", cfg.schema.vessel_id);
            read_opt(cols, "timestamp", cfg.schema.timestamp);
            read_opt(cols, "lat", cfg.schema.lat);
            read_opt(cols, "lon", cfg.schema.lon);
            read_opt(cols, "sog", cfg.schema.sog);
            read_opt(cols, "cog", cfg.schema.cog);
            read_opt(cols, "nav_status", cfg.schema.nav_status);
            read_opt(cols, "ship_type", cfg.schema.ship_type);
        }

        if (root["ship_type_table"]) {
            cfg.ship_type_table = resolve(base_dir, root["ship_type_table"].as<std::string>());
        }

        const YAML::Node grid = root["grid"];
        if (!grid || !grid["bbox"] || grid["bbox"].size() != 4) {
            throw ConfigError("config: grid.bbox must be [min_lat, min_lon, max_lat, max_lon]");
        }
        const YAML::Node box = grid["bbox"];
        cfg.grid.bbox = {box[0].as<double>(), box[1].as<double>(), box[2].as<double>(), box[3].as<double>()};
        if (const YAML::Node o = grid["origin"]) {
            if (o.size() != 2) {
                throw ConfigError("config: grid.origin must be [lat, lon]");
            }
            cfg.grid.origin = {o[0].as<double>(), o[1].as<double>()};
        } else {
            cfg.grid.origin = cfg.grid.bbox.centroid();
        }
        read_opt(grid, "edge_m", cfg.grid.edge_m);
        if (const YAML::Node a = grid["target_area_km2"]) {
            cfg.grid.target_area_km2 = a.IsNull() ? std::nullopt : std::optional<double>(a.as<double>());
        }

        if (const YAML::Node r = root["resample"]) {
            read_opt(r, "dt_s", cfg.dt_s);
            read_opt(r, "segment_window_s", cfg.segment.window_s);
            read_opt(r, "max_gap_s", cfg.segment.max_gap_s);
        }

        if (const YAML::Node w = root["windows"]) {
            if (w.IsScalar()) {
                if (w.as<std::string>() != "pandemic") {
                    throw ConfigError("config: unknown window preset '" + w.as<std::string>() + "'");
                }
                cfg.windows = pandemic_window_preset();
            } else {
                cfg.windows.clear();
                for (const auto& n : w) {
                    if (!n["label"] || !n["start"] || !n["end"]) {
                        throw ConfigError("config: each window needs label, start and end");
                    }
                    cfg.windows.push_back(
                        {n["label"].as<std::string>(), yaml_date(n["start"], "window start"),
                         yaml_date(n["end"], "window end")});
                }
            }
        }

        if (const YAML::Node c = root["categories"]) {
            cfg.categories.clear();
            for (const auto& n : c) {
                auto cat = parse_category(n.as<std::string>());
                if (!cat) {
                    throw ConfigError("config: unknown category '" + n.as<std::string>() + "'");
                }
                if (std::find(cfg.categories.begin(), cfg.categories.end(), *cat) == cfg.categories.end()) {
                    cfg.categories.push_back(*cat);
                }
            }
        }

        if (const YAML::Node q = root["quantization"]) {
            read_opt(q, "low_pct", cfg.quantization.low_pct);
            read_opt(q, "high_pct", cfg.quantization.high_pct);
            if (const YAML::Node k = q["knots"]) {
                cfg.quantization.knots.clear();
                for (const auto& p : k) {
                    if (p.size() != 2) {
                        throw ConfigError("config: quantization knots are [x, y] pairs");
                    }
                    cfg.quantization.knots.push_back({p[0].as<double>(), p[1].as<double>()});
                }
            }
        }

        if (const YAML::Node m = root["metrics"]) {
            read_opt(m, "dtm_include_terminal", cfg.dtm_include_terminal);
            if (m["modularity_weights"]) {
                const auto w = m["modularity_weights"].as<std::string>();
                if (w == "probability") {
                    cfg.modularity_weights = ModularityWeights::Probability;
                } else if (w == "count") {
                    cfg.modularity_weights = ModularityWeights::Count;
                } else {
                    throw ConfigError("config: modularity_weights must be 'probability' or 'count'");
                }
            }
        }

        if (root["output_dir"]) {
            cfg.output_dir = resolve(base_dir, root["output_dir"].as<std::string>());
        }
        if (root["workers"]) {
            const int w = root["workers"].as<int>();
            if (w < 1) {
                throw ConfigError("config: workers must be >= 1");
            }
            cfg.workers = static_cast<unsigned>(w);
        }
        read_opt(root, "seed", cfg.seed);
        read_opt(root, "max_rejection_fraction", cfg.max_rejection_fraction);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

PipelineConfig load_config(const fs::path& path) {
    if (!fs::is_regular_file(path)) {
        throw ConfigError("config file not found: " + path.string());
    }
    return parse_config(read_file(path), path.parent_path());
}

std::string artifact_stem(const StreamKey& key) {
    return std::string(to_string(key.category)) + "_" + key.window;
}

namespace {

/// Segments -> resampled -> discretized -> counted, fanned out over fixed
/// chunks. The counts are exact integers, so the merge order is irrelevant.
void accumulate_stream(StreamResult& out, const std::vector<AisRecord>& records, const PipelineConfig& cfg,
                       const HexGrid& grid) {
    const std::vector<RawSegment> segments = segment_stream(records, cfg.segment);
    out.segments = segments.size();
    const std::size_t chunks = std::min<std::size_t>(segments.size(), 256);
    std::vector<TransitionStats> partial(chunks);
    std::vector<std::size_t> dropped(chunks, 0);
    parallel_for(chunks, cfg.workers, [&](std::size_t c) {
        const std::size_t lo = segments.size() * c / chunks;
        const std::size_t hi = segments.size() * (c + 1) / chunks;
        for (std::size_t s = lo; s < hi; ++s) {
            const RawSegment& seg = segments[s];
            DiscretizeResult d = seg.points.size() == 1
                                     ? discretize_point(seg.vessel_id, seg.points.front(), cfg.dt_s, grid)
                                     : discretize(resample_segment(seg, cfg.dt_s), grid);
            dropped[c] += d.dropped;
            for (const StateSequence& seq : d.sequences) {
                accumulate(seq, partial[c]);
            }
        }
    });
    for (std::size_t c = 0; c < chunks; ++c) {
        out.stats.merge(partial[c]);
        out.dropped_samples += dropped[c];
    }
}

std::vector<double> as_doubles(const auto& values) {
    return std::vector<double>(values.begin(), values.end());
}

} // namespace

Analysis analyze(const std::vector<AisRecord>& records, const PipelineConfig& cfg, const ShipTypeTable& table) {
    const HexGrid grid(cfg.grid);
    RecordStreams streams = partition_records(records, cfg.windows, table);

    std::set<StreamKey> keys;
    for (VesselCategory c : cfg.categories) {
        for (const TimeWindow& w : cfg.windows) {
            keys.insert({c, w.label});
        }
    }
    Analysis out;
    out.streams.resize(keys.size());
    std::size_t idx = 0;
    for (const StreamKey& key : keys) {
        StreamResult& s = out.streams[idx++];
        s.key = key;
        auto it = streams.find(key);
        if (it != streams.end()) {
            s.records = it->second.size();
            accumulate_stream(s, it->second, cfg, grid);
        }
    }

    GraphOptions gopts;
    gopts.dtm_include_terminal = cfg.dtm_include_terminal;
    gopts.weights = cfg.modularity_weights;
    gopts.community_seed = cfg.seed;
    gopts.workers = 1;
    parallel_for(out.streams.size(), cfg.workers, [&](std::size_t i) {
        StreamResult& s = out.streams[i];
        s.model = fit_markov_model(s.stats);
        s.graph = compute_graph_metrics(s.model, gopts);
        s.summary = summarize(s.key.window, s.key.category, s.model, s.graph);
    });

    for (VesselCategory c : cfg.categories) {
        std::vector<std::vector<double>> mm, dtm, cb;
        for (const StreamResult& s : out.streams) {
            if (s.key.category == c && !s.model.states.cells.empty()) {
                mm.push_back(as_doubles(s.graph.cells.mm));
                dtm.push_back(as_doubles(s.graph.cells.dtm_s));
                cb.push_back(s.graph.cells.betweenness);
            }
        }
        if (mm.empty()) {
            continue;
        }
        const auto& q = cfg.quantization;
        const CategoryThresholds& t = out.thresholds[c] = {fit_thresholds(mm, q.low_pct, q.high_pct),
                                                           fit_thresholds(dtm, q.low_pct, q.high_pct),
                                                           fit_thresholds(cb, q.low_pct, q.high_pct)};
        for (const auto& [name, th] : {std::pair{"MM", &t.mm}, std::pair{"DTM", &t.dtm}, std::pair{"C", &t.c}}) {
            if (th->degenerate) {
                out.warnings.push_back(std::string(to_string(c)) + ": " + name +
                                       " thresholds are degenerate; quantized values are all 0");
            }
        }
    }

    const MonotoneSpline spline(cfg.quantization.knots);
    for (StreamResult& s : out.streams) {
        auto th = out.thresholds.find(s.key.category);
        if (th == out.thresholds.end()) {
            continue;
        }
        const CellMetrics& m = s.graph.cells;
        for (std::size_t i = 0; i < s.model.states.size(); ++i) {
            s.mm_q.push_back(quantize(static_cast<double>(m.mm[i]), th->second.mm, spline));
            s.dtm_q.push_back(quantize(static_cast<double>(m.dtm_s[i]), th->second.dtm, spline));
            s.c_q.push_back(quantize(m.betweenness[i], th->second.c, spline));
        }
    }
    return out;
}

std::string write_heatmap_geojson(const StreamResult& s, const CellIndexer& grid) {
    using json = nlohmann::ordered_json;
    json features = json::array();
    const CellMetrics& m = s.graph.cells;
    for (std::size_t i = 0; i < s.model.states.size(); ++i) {
        const CellId cell = s.model.states.cells[i];
        json ring = json::array();
        for (const LatLon& p : grid.polygon(cell)) {
            ring.push_back(json::array({p.lon, p.lat}));
        }
        json props;
        props["cell"] = to_string(cell);
        props["MM"] = m.mm[i];
        props["DTM_s"] = m.dtm_s[i];
        props["C"] = m.betweenness[i];
        props["MM_q"] = s.mm_q[i];
        props["DTM_q"] = s.dtm_q[i];
        props["C_q"] = s.c_q[i];
        json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "Polygon"}, {"coordinates", json::array({ring})}};
        f["properties"] = props;
        features.push_back(std::move(f));
    }
    json fc;
    fc["type"] = "FeatureCollection";
    fc["features"] = std::move(features);
    return fc.dump() + "\n";
}

RunReport run_pipeline(const PipelineConfig& cfg) {
    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };
    cfg.validate();
    const ShipTypeTable table =
        cfg.ship_type_table ? ShipTypeTable::load(*cfg.ship_type_table) : ShipTypeTable::builtin();

    RunReport report;
    nlohmann::ordered_json timings;

    auto t0 = clock::now();
    std::vector<ParseResult> parsed(cfg.inputs.size());
    report.inputs.resize(cfg.inputs.size());
    parallel_for(cfg.inputs.size(), cfg.workers, [&](std::size_t i) {
        const std::string text = read_file(cfg.inputs[i]);
        report.inputs[i].path = cfg.inputs[i];
        report.inputs[i].sha256 = sha256_hex(text);
        if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
            parsed[i] = parse_ais_csv(text, cfg.schema);
        }
        report.inputs[i].rows = parsed[i].rows;
        report.inputs[i].records = parsed[i].records.size();
        report.inputs[i].rejections = parsed[i].rejections.size();
    });
    std::size_t rows = 0;
    std::size_t rejected = 0;
    std::vector<AisRecord> records;
    for (const ParseResult& p : parsed) {
        rows += p.rows;
        rejected += p.rejections.size();
        records.insert(records.end(), p.records.begin(), p.records.end());
    }
    report.cross_file_duplicates = sort_and_dedup(records);
    report.records = records.size();
    timings["ingest_ms"] = ms_since(t0);

    if (records.empty()) {
        throw DataError("no usable records");
    }
    if (rows > 0 && static_cast<double>(rejected) > cfg.max_rejection_fraction * static_cast<double>(rows)) {
        throw DataError(std::to_string(rejected) + " of " + std::to_string(rows) +
                        " rows rejected, above max_rejection_fraction " + format_double(cfg.max_rejection_fraction));
    }

    t0 = clock::now();
    report.analysis = analyze(records, cfg, table);
    timings["analyze_ms"] = ms_since(t0);

    t0 = clock::now();
    const HexGrid grid(cfg.grid);
    nlohmann::ordered_json artifacts = nlohmann::ordered_json::array();
    auto emit = [&](const fs::path& rel, const std::string& content) {
        write_file_atomic(cfg.output_dir / rel, content);
        report.artifacts.push_back(rel);
        artifacts.push_back({{"file", rel.generic_string()}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
    };
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        emit("input" + std::to_string(i) + "_" + cfg.inputs[i].filename().string() + ".rejections.tsv",
             format_rejection_log(parsed[i].rejections));
    }
    nlohmann::ordered_json stream_rows = nlohmann::ordered_json::array();
    for (const StreamResult& s : report.analysis.streams) {
        const std::string stem = artifact_stem(s.key);
        emit(stem + ".model.csv", write_model_csv(s.model));
        emit(stem + ".pi.csv", write_pi_csv(s.model));
        emit(stem + ".metrics.csv", write_metrics_csv(s.model, s.graph.cells));
        emit(stem + ".heatmap.geojson", write_heatmap_geojson(s, grid));
        emit(stem + ".summary.json", write_summary_json(s.summary));
        stream_rows.push_back({{"category", std::string(to_string(s.key.category))},
                               {"window", s.key.window},
                               {"records", s.records},
                               {"segments", s.segments},
                               {"dropped_samples", s.dropped_samples},
                               {"states", s.model.states.size()},
                               {"transitions", s.model.total_transitions()}});
    }
    timings["export_ms"] = ms_since(t0);

    nlohmann::ordered_json manifest;
    manifest["config_version"] = cfg.config_version;
    {
        // Hash of the effective configuration, independent of formatting in
        // the source file and of the worker count and output location.
        nlohmann::ordered_json c;
        nlohmann::ordered_json ins = nlohmann::ordered_json::array();
        for (const auto& in : report.inputs) {
            ins.push_back(in.sha256);
        }
        c["inputs"] = ins;
        c["schema"] = {std::string(1, cfg.schema.delimiter), cfg.schema.vessel_id, cfg.schema.timestamp,
                       cfg.schema.lat, cfg.schema.lon, cfg.schema.sog, cfg.schema.cog, cfg.schema.nav_status,
                       cfg.schema.ship_type};
        std::string table_text;
        for (const auto& r : table.ranges()) {
            table_text += std::to_string(r.lo) + "," + std::to_string(r.hi) + "," +
                          std::string(to_string(r.category)) + ";";
        }
        c["ship_type_table"] = {table.version(), table_text};
        c["grid"] = {cfg.grid.origin.lat, cfg.grid.origin.lon, cfg.grid.edge_m, cfg.grid.bbox.min_lat,
                     cfg.grid.bbox.min_lon, cfg.grid.bbox.max_lat, cfg.grid.bbox.max_lon};
        c["resample"] = {cfg.dt_s, cfg.segment.window_s, cfg.segment.max_gap_s};
        nlohmann::ordered_json ws = nlohmann::ordered_json::array();
        for (const auto& w : cfg.windows) {
            ws.push_back({w.label, w.start, w.last_day});
        }
        c["windows"] = ws;
        nlohmann::ordered_json cats = nlohmann::ordered_json::array();
        for (auto cat : cfg.categories) {
            cats.push_back(std::string(to_string(cat)));
        }
        c["categories"] = cats;
        nlohmann::ordered_json knots = nlohmann::ordered_json::array();
        for (const auto& k : cfg.quantization.knots) {
            knots.push_back({k.x, k.y});
        }
        c["quantization"] = {cfg.quantization.low_pct, cfg.quantization.high_pct, knots};
        c["metrics"] = {cfg.dtm_include_terminal, cfg.modularity_weights == ModularityWeights::Count};
        c["seed"] = cfg.seed;
        c["max_rejection_fraction"] = cfg.max_rejection_fraction;
        manifest["config_sha256"] = sha256_hex(c.dump());
    }
    manifest["workers"] = cfg.workers;
    nlohmann::ordered_json ins = nlohmann::ordered_json::array();
    for (const auto& in : report.inputs) {
        ins.push_back({{"path", in.path.generic_string()},
                       {"sha256", in.sha256},
                       {"rows", in.rows},
                       {"records", in.records},
                       {"rejections", in.rejections}});
    }
    manifest["inputs"] = ins;
    manifest["row_counts"] = {{"rows", rows},
                              {"rejected", rejected},
                              {"cross_file_duplicates", report.cross_file_duplicates},
                              {"records", report.records}};
    manifest["streams"] = stream_rows;
    manifest["warnings"] = report.analysis.warnings;
    manifest["timings"] = timings;
    manifest["artifacts"] = artifacts;
    write_file_atomic(cfg.output_dir / "manifest.json", manifest.dump(2) + "\n");
    return report;
}

} // namespace aismarkov
