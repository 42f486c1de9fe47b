#pragma once

#include "aismarkov/markov.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace aismarkov {

/// Outgoing transition count per state.
std::vector<std::uint64_t> mobility_magnitude(const MarkovModel& model);

/// Dwell accumulated before outbound transitions, per state, in seconds.
/// Exact: sums the integer dwell totals. With include_terminal the censored
/// residence of each state is added as well.
std::vector<std::int64_t> dwell_time_magnitude(const MarkovModel& model, bool include_terminal = false);

/// Same quantity evaluated as sum_j N_ij * w_ij in floating point.
std::vector<double> dwell_time_magnitude_from_means(const MarkovModel& model);

/// Directed graph from an edge list (values 1). Duplicate edges collapse;
/// self-loops are kept.
SparseMatrix digraph_from_edges(std::size_t n, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);

/// Raw shortest-path betweenness on the unweighted directed support of `g`
/// (Brandes accumulation). Sources are split into a fixed set of chunks whose
/// partial sums are added in chunk order, so the result does not depend on
/// `workers`.
std::vector<double> betweenness(const SparseMatrix& g, unsigned workers = 1);

/// Divides by (n-1)(n-2); zeros when n < 3.
std::vector<double> normalize_betweenness(std::span<const double> raw);

struct PathLengthSummary {
    double mean = 0.0;                  ///< over reachable ordered pairs i != j
    std::uint64_t distance_sum = 0;
    std::uint64_t reachable_pairs = 0;
    std::uint64_t excluded_pairs = 0;   ///< ordered pairs with no path
};

/// BFS hop counts on the directed support. Throws DomainError when no
/// ordered pair is reachable.
PathLengthSummary average_path_length(const SparseMatrix& g);

/// R = (A + A^T) / 2 with the diagonal dropped.
SparseMatrix symmetrize(const SparseMatrix& a);

/// Q = (1/2y) sum_ij (R_ij - k_i k_j / 2y) delta(c_i, c_j). Throws
/// DomainError when the total weight is zero or labels do not cover R.
double modularity(const SparseMatrix& R, std::span<const std::uint32_t> labels);

/// Greedy modularity maximization (local moves, then aggregation, repeated
/// until no move improves). Nodes are visited in a seed-determined order;
/// ties go to the lowest community index. Labels are renumbered 0..k-1 in
/// order of first appearance. Never returns a partition scoring below the
/// single-community baseline; with no edges every node is a singleton.
std::vector<std::uint32_t> detect_communities(const SparseMatrix& R, std::uint64_t seed = 0);

/// Per-state metrics for one model.
struct CellMetrics {
    std::vector<std::uint64_t> mm;
    std::vector<std::int64_t> dtm_s;
    std::vector<double> betweenness;
    std::vector<double> betweenness_normalized;
    std::vector<std::uint32_t> community;
};

enum class ModularityWeights {
    Probability,  ///< R_ij = (p_ij + p_ji) / 2
    Count,        ///< experimental: R_ij = (N_ij + N_ji) / 2
};

struct GraphOptions {
    bool dtm_include_terminal = false;
    ModularityWeights weights = ModularityWeights::Probability;
    std::uint64_t community_seed = 0;
    unsigned workers = 1;
};

struct GraphSummary {
    CellMetrics cells;
    std::optional<PathLengthSummary> path_length;
    std::optional<double> modularity;
};

GraphSummary compute_graph_metrics(const MarkovModel& model, const GraphOptions& opts = {});

/// `cell_q,cell_r,MM,DTM_seconds,C_raw,C_normalized,community` in state order.
std::string write_metrics_csv(const MarkovModel& model, const CellMetrics& metrics, char delimiter = ',');

} // namespace aismarkov
