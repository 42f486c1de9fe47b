// aismarkov: run, validate, synth and inspect subcommands.

#include "aismarkov/error.hpp"
#include "aismarkov/markov.hpp"
#include "aismarkov/pipeline.hpp"
#include "aismarkov/synthgen.hpp"
#include "aismarkov/textio.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

namespace fs = std::filesystem;
using namespace aismarkov;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;
constexpr int exit_data = 3;

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int inspect_model(const fs::path& path) {
    const auto rows = read_model_csv(read_file(path));
    std::map<CellId, std::uint64_t> mm;
    std::set<CellId> cells;
    std::uint64_t total = 0;
    for (const ModelRow& r : rows) {
        mm[r.from] += r.count;
        cells.insert(r.from);
        cells.insert(r.to);
        total += r.count;
    }
    // States that only ever ended a segment appear in the stationary table.
    std::string name = path.filename().string();
    const fs::path pi_path = path.parent_path() / (name.substr(0, name.size() - 10) + ".pi.csv");
    if (fs::is_regular_file(pi_path)) {
        const std::string text = read_file(pi_path);
        std::size_t pos = text.find('\n');
        while (pos != std::string::npos && pos + 1 < text.size()) {
            const std::size_t end = text.find('\n', pos + 1);
            const std::string line = text.substr(pos + 1, end - pos - 1);
            if (auto c = parse_cell(line.substr(0, line.find(',')))) {
                cells.insert(*c);
            }
            pos = end;
        }
    }
    std::vector<std::pair<CellId, std::uint64_t>> top(mm.begin(), mm.end());
    std::stable_sort(top.begin(), top.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    top.resize(std::min<std::size_t>(top.size(), 10));
    std::cout << "model: " << path.string() << "\n";
    std::cout << "states: " << cells.size() << "\n";
    std::cout << "transition_pairs: " << rows.size() << "\n";
    std::cout << "transitions: " << total << "\n";
    std::cout << "top_mm_cells:\n";
    for (const auto& [cell, n] : top) {
        std::cout << "  " << to_string(cell) << " " << n << "\n";
    }
    return exit_ok;
}

int inspect_json(const fs::path& path) {
    const auto j = nlohmann::ordered_json::parse(read_file(path));
    if (j.contains("phi")) {
        std::cout << "summary: " << path.string() << "\n";
        for (const auto& [key, value] : j.items()) {
            if (key == "phi") {
                for (const auto& [name, v] : value.items()) {
                    std::cout << "phi_" << name << ": " << v.dump() << "\n";
                }
            } else {
                std::cout << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
            }
        }
    } else if (j.contains("artifacts")) {
        std::cout << "manifest: " << path.string() << "\n";
        std::cout << "config_sha256: " << j["config_sha256"].get<std::string>() << "\n";
        for (const auto& [key, value] : j["row_counts"].items()) {
            std::cout << key << ": " << value.dump() << "\n";
        }
        std::cout << "artifacts: " << j["artifacts"].size() << "\n";
    } else {
        throw DataError("unrecognized JSON artifact: " + path.string());
    }
    return exit_ok;
}

int inspect(const fs::path& path) {
    if (!fs::is_regular_file(path)) {
        throw ConfigError("artifact not found: " + path.string());
    }
    const std::string name = path.filename().string();
    if (ends_with(name, ".model.csv")) {
        return inspect_model(path);
    }
    if (ends_with(name, ".json")) {
        return inspect_json(path);
    }
    throw ConfigError("inspect supports *.model.csv, *.summary.json and manifest.json");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"AIS hex-grid Markov mobility models"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    unsigned workers = 0;
    auto* run = app.add_subcommand("run", "Run the full pipeline");
    run->add_option("--config", config_path, "Pipeline config (YAML)")->required();
    run->add_option("--workers", workers, "Worker threads (overrides config)")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "Output directory (overrides env and config)");

    auto* validate = app.add_subcommand("validate", "Check a config without writing anything");
    validate->add_option("--config", config_path, "Pipeline config (YAML)")->required();

    std::string scenario_path;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic AIS CSV from a scenario");
    synth->add_option("--scenario", scenario_path, "Scenario (YAML)")->required();
    synth->add_option("--out", synth_out, "Output CSV")->required();

    std::string artifact;
    auto* insp = app.add_subcommand("inspect", "Print statistics for one artifact");
    insp->add_option("artifact", artifact, "Model CSV, summary JSON or manifest")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*run || *validate) {
            PipelineConfig cfg = load_config(config_path);
            if (*validate) {
                cfg.validate();
                std::cout << "config ok: " << cfg.inputs.size() << " input file(s), " << cfg.windows.size()
                          << " window(s), " << cfg.categories.size() << " categor"
                          << (cfg.categories.size() == 1 ? "y" : "ies") << "\n";
                return exit_ok;
            }
            if (workers > 0) {
                cfg.workers = workers;
            }
            if (!out_dir.empty()) {
                cfg.output_dir = out_dir;
            } else if (const char* env = std::getenv("AISMARKOV_OUT_DIR"); env && *env) {
                cfg.output_dir = env;
            }
            const RunReport report = run_pipeline(cfg);
            for (const auto& w : report.analysis.warnings) {
                std::cerr << "warning: " << w << "\n";
            }
            std::cout << "records: " << report.records << "\n";
            std::cout << "artifacts: " << report.artifacts.size() + 1 << " written to " << cfg.output_dir.string()
                      << "\n";
            return exit_ok;
        }
        if (*synth) {
            const Scenario scenario = load_scenario(scenario_path);
            const auto records = generate(scenario);
            write_file_atomic(synth_out, write_ais_csv(records));
            std::cout << "records: " << records.size() << "\n";
            return exit_ok;
        }
        if (*insp) {
            return inspect(artifact);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_data;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_failure;
}
