#pragma once

#include "aismarkov/aggregate.hpp"
#include "aismarkov/ais_ingest.hpp"
#include "aismarkov/graph_metrics.hpp"
#include "aismarkov/hexgrid.hpp"
#include "aismarkov/markov.hpp"
#include "aismarkov/trajectory.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aismarkov {

inline constexpr int current_config_version = 1;

struct PipelineConfig {
    int config_version = current_config_version;
    std::vector<std::filesystem::path> inputs;
    CsvSchema schema;
    std::optional<std::filesystem::path> ship_type_table;  ///< builtin table when empty
    GridConfig grid;
    std::int64_t dt_s = default_resample_interval_s;
    SegmentConfig segment;
    std::vector<TimeWindow> windows = pandemic_window_preset();
    std::vector<VesselCategory> categories = {VesselCategory::Commercial, VesselCategory::Fishing,
                                              VesselCategory::Passenger, VesselCategory::Other,
                                              VesselCategory::All};
    QuantizationConfig quantization;
    bool dtm_include_terminal = false;
    ModularityWeights modularity_weights = ModularityWeights::Probability;
    std::filesystem::path output_dir = "out";
    unsigned workers = 1;
    std::uint64_t seed = 0;
    /// Fatal (exit 3) when rejected rows exceed this share of all data rows.
    double max_rejection_fraction = 0.5;

    /// Throws ConfigError. Checks value ranges, that dt divides the segment
    /// window, and that every referenced file exists.
    void validate() const;
};

/// YAML config. Relative paths resolve against `base_dir`.
PipelineConfig parse_config(const std::string& yaml_text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Model, metrics and summary for one category x window.
struct StreamResult {
    StreamKey key;
    std::size_t records = 0;
    std::size_t segments = 0;
    std::size_t dropped_samples = 0;  ///< resampled points outside the grid domain
    TransitionStats stats;
    MarkovModel model;
    GraphSummary graph;
    GlobalSummary summary;
    /// Per-state quantized MM, DTM and C (same order as model.states).
    std::vector<double> mm_q, dtm_q, c_q;
};

/// Per-category percentile thresholds, pooled over windows.
struct CategoryThresholds {
    Thresholds mm, dtm, c;
};

struct Analysis {
    std::vector<StreamResult> streams;  ///< ordered by (category, window)
    std::map<VesselCategory, CategoryThresholds> thresholds;
    std::vector<std::string> warnings;
};

/// Everything after ingest: records must be sorted and deduplicated.
Analysis analyze(const std::vector<AisRecord>& records, const PipelineConfig& cfg, const ShipTypeTable& table);

struct InputReport {
    std::filesystem::path path;
    std::string sha256;
    std::size_t rows = 0;
    std::size_t records = 0;
    std::size_t rejections = 0;
};

struct RunReport {
    std::vector<InputReport> inputs;
    std::size_t records = 0;           ///< after cross-file deduplication
    std::size_t cross_file_duplicates = 0;
    std::vector<std::filesystem::path> artifacts;  ///< relative to the output dir
    Analysis analysis;
};

/// Full run: ingest, analyze, write artifacts and manifest.json into
/// cfg.output_dir. Throws ConfigError (exit 2) or DataError (exit 3).
RunReport run_pipeline(const PipelineConfig& cfg);

/// Heatmap FeatureCollection: one hexagon per state, coordinates (lon, lat).
std::string write_heatmap_geojson(const StreamResult& stream, const CellIndexer& grid);

std::string artifact_stem(const StreamKey& key);

} // namespace aismarkov
