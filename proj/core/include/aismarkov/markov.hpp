#pragma once

#include "aismarkov/hexgrid.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aismarkov {

struct CellPair {
    CellId from;
    CellId to;

    friend auto operator<=>(const CellPair&, const CellPair&) = default;
};

struct PairStats {
    std::uint64_t count = 0;     ///< N_ij
    std::int64_t dwell_s = 0;    ///< sum of the dwell durations preceding i -> j
    /// Multiset of dwell durations (value -> multiplicity); filled only when
    /// the accumulator was created with keep_durations.
    std::map<std::int64_t, std::uint64_t> durations;

    friend bool operator==(const PairStats&, const PairStats&) = default;
};

/// Mergeable accumulator of exits and residence. Self-transitions are never
/// stored: staying in a cell is dwell, leaving it is a transition. All
/// arithmetic is exact, so merge is associative and commutative.
class TransitionStats {
public:
    explicit TransitionStats(bool keep_durations = false) : keep_durations_(keep_durations) {}

    /// Requires from != to and dwell_s > 0.
    void record_transition(CellId from, CellId to, std::int64_t dwell_s);
    /// Residence with no observed exit (right-censored).
    void record_terminal(CellId cell, std::int64_t dwell_s);

    /// Field-wise sum. Both sides must agree on keep_durations.
    void merge(const TransitionStats& other);

    bool keep_durations() const { return keep_durations_; }
    bool empty() const { return pairs_.empty() && terminal_.empty(); }
    const std::map<CellPair, PairStats>& pairs() const { return pairs_; }
    const std::map<CellId, std::int64_t>& terminal_dwell() const { return terminal_; }
    std::uint64_t total_transitions() const;
    /// Every cell that appears as a source, destination, or terminal cell; sorted.
    std::vector<CellId> occupied_cells() const;

    friend bool operator==(const TransitionStats&, const TransitionStats&) = default;

private:
    bool keep_durations_;
    std::map<CellPair, PairStats> pairs_;
    std::map<CellId, std::int64_t> terminal_;
};

/// Run-length scan: a run of m samples in cell i followed by cell j records
/// i -> j with dwell m * dt; the final run only adds terminal dwell.
void accumulate(const StateSequence& seq, TransitionStats& into);

/// Compressed sparse rows over state indices. Rows are sorted by column.
struct SparseMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    std::size_t nnz() const { return col.size(); }
    std::size_t row_size(std::size_t i) const { return row_ptr[i + 1] - row_ptr[i]; }
    double row_sum(std::size_t i) const;
    /// Builds from a dense row-major matrix, keeping entries != 0.
    static SparseMatrix from_dense(std::size_t n, std::span<const double> dense);
};

/// Sorted occupied cells; state index i refers to cells[i].
struct StateIndex {
    std::vector<CellId> cells;

    explicit StateIndex(std::vector<CellId> sorted_cells) : cells(std::move(sorted_cells)) {}
    static StateIndex from(const TransitionStats& stats) { return StateIndex(stats.occupied_cells()); }
    std::size_t size() const { return cells.size(); }
    std::optional<std::uint32_t> find(CellId c) const;
};

/// p_ij = N_ij / sum_j' N_ij'. States without exits have empty rows.
SparseMatrix transition_matrix(const TransitionStats& stats, const StateIndex& index);

struct DwellHazard {
    SparseMatrix mean_dwell;  ///< w_ij, seconds
    SparseMatrix hazard;      ///< lambda_ij = N_ij / dwell sum, 1/seconds
};

DwellHazard dwell_and_hazard(const TransitionStats& stats, const StateIndex& index);

/// q_ij = lambda_ij / sum over observed destinations j' of lambda_ij'.
SparseMatrix dwell_weighted_matrix(const SparseMatrix& hazard);

struct StationaryOptions {
    double tolerance = 1e-12;   ///< on ||pi_{k+1} - pi_k||_1
    long max_iterations = 100000;
    double laziness = 0.5;      ///< pi_{k+1} = a pi_k + (1 - a) pi_k P
};

struct StationaryResult {
    std::vector<double> pi;                     ///< over all states, zero off the class
    std::vector<std::uint32_t> recurrent_class; ///< sorted state indices
    long iterations = 0;
    double residual = 0.0;                      ///< ||pi P - pi||_1 on the class
};

/// Picks the closed strongly connected class of P's support with the largest
/// share of `row_weight` (default: one per state; pass outgoing transition
/// counts for the observed-transition share) and power-iterates on it from
/// a start proportional to `row_weight`. Throws DomainError if no closed
/// class exists, ConvergenceError if the tolerance is not reached.
StationaryResult stationary(const SparseMatrix& P, std::span<const double> row_weight = {},
                            const StationaryOptions& opts = {});

/// P, w, lambda, Q and (when it exists) pi for one category x window.
struct MarkovModel {
    StateIndex states{{}};
    std::vector<std::uint64_t> exit_count;     ///< per state, sum_j N_ij
    std::vector<std::int64_t> exit_dwell_s;    ///< per state, sum_j dwell_sum_ij
    std::vector<std::int64_t> terminal_dwell_s;
    SparseMatrix count;                        ///< N_ij as doubles
    std::vector<std::int64_t> dwell_sum_s;     ///< aligned with count.col
    SparseMatrix P;
    DwellHazard dwell;
    SparseMatrix Q;
    std::optional<StationaryResult> stationary;
    std::string stationary_status = "ok";      ///< reason when stationary is empty

    std::uint64_t total_transitions() const;
};

MarkovModel fit_markov_model(const TransitionStats& stats, const StationaryOptions& opts = {});

/// `i_cell,j_cell,N,dwell_sum,p,w,lambda,q`, rows in (i, j) lexicographic
/// order of axial coordinates.
std::string write_model_csv(const MarkovModel& model, char delimiter = ',');
/// `cell,pi` for every state.
std::string write_pi_csv(const MarkovModel& model, char delimiter = ',');

struct ModelRow {
    CellId from;
    CellId to;
    std::uint64_t count = 0;
    std::int64_t dwell_s = 0;
    double p = 0, w = 0, lambda = 0, q = 0;
};

/// Reads write_model_csv output back. Throws DataError on malformed input.
std::vector<ModelRow> read_model_csv(std::string_view text, char delimiter = ',');

} // namespace aismarkov
