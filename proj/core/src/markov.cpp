#include "aismarkov/markov.hpp"

#include "aismarkov/error.hpp"
#include "aismarkov/textio.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aismarkov {

void TransitionStats::record_transition(CellId from, CellId to, std::int64_t dwell_s) {
    if (from == to || dwell_s <= 0) {
        throw std::invalid_argument("record_transition: needs distinct cells and positive dwell");
    }
    PairStats& s = pairs_[CellPair{from, to}];
    s.count += 1;
    s.dwell_s += dwell_s;
    if (keep_durations_) {
        s.durations[dwell_s] += 1;
    }
}

void TransitionStats::record_terminal(CellId cell, std::int64_t dwell_s) {
    if (dwell_s <= 0) {
        throw std::invalid_argument("record_terminal: dwell must be positive");
    }
    terminal_[cell] += dwell_s;
}

void TransitionStats::merge(const TransitionStats& other) {
    if (other.keep_durations_ != keep_durations_) {
        throw std::invalid_argument("TransitionStats::merge: keep_durations mismatch");
    }
    for (const auto& [key, s] : other.pairs_) {
        PairStats& mine = pairs_[key];
        mine.count += s.count;
        mine.dwell_s += s.dwell_s;
        for (const auto& [d, m] : s.durations) {
            mine.durations[d] += m;
        }
    }
    for (const auto& [cell, d] : other.terminal_) {
        terminal_[cell] += d;
    }
}

std::uint64_t TransitionStats::total_transitions() const {
    std::uint64_t total = 0;
    for (const auto& [key, s] : pairs_) {
        total += s.count;
    }
    return total;
}

std::vector<CellId> TransitionStats::occupied_cells() const {
    std::vector<CellId> cells;
    cells.reserve(2 * pairs_.size() + terminal_.size());
    for (const auto& [key, s] : pairs_) {
        cells.push_back(key.from);
        cells.push_back(key.to);
    }
    for (const auto& [cell, d] : terminal_) {
        cells.push_back(cell);
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

void accumulate(const StateSequence& seq, TransitionStats& into) {
    const auto& cells = seq.cells;
    std::size_t run_start = 0;
    for (std::size_t k = 1; k <= cells.size(); ++k) {
        if (k < cells.size() && cells[k] == cells[run_start]) {
            continue;
        }
        const auto dwell = static_cast<std::int64_t>(k - run_start) * seq.dt_s;
        if (k < cells.size()) {
            into.record_transition(cells[run_start], cells[k], dwell);
        } else {
            into.record_terminal(cells[run_start], dwell);
        }
        run_start = k;
    }
}

double SparseMatrix::row_sum(std::size_t i) const {
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
        s += val[k];
    }
    return s;
}

SparseMatrix SparseMatrix::from_dense(std::size_t n, std::span<const double> dense) {
    if (dense.size() != n * n) {
        throw std::invalid_argument("from_dense: size mismatch");
    }
    SparseMatrix m;
    m.n = n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (dense[i * n + j] != 0.0) {
                m.col.push_back(static_cast<std::uint32_t>(j));
                m.val.push_back(dense[i * n + j]);
            }
        }
        m.row_ptr.push_back(m.col.size());
    }
    return m;
}

std::optional<std::uint32_t> StateIndex::find(CellId c) const {
    auto it = std::lower_bound(cells.begin(), cells.end(), c);
    if (it == cells.end() || *it != c) {
        return std::nullopt;
    }
    return static_cast<std::uint32_t>(it - cells.begin());
}

namespace {

// Pairs are stored in (from, to) order, which is exactly CSR order because
// state indices follow the same lexicographic order on cells.
template <typename ValueFn>
SparseMatrix build_rows(const TransitionStats& stats, const StateIndex& index, ValueFn value) {
    SparseMatrix m;
    m.n = index.size();
    m.row_ptr.assign(m.n + 1, 0);
    m.col.reserve(stats.pairs().size());
    m.val.reserve(stats.pairs().size());
    for (const auto& [key, s] : stats.pairs()) {
        const auto i = index.find(key.from);
        const auto j = index.find(key.to);
        if (!i || !j) {
            throw std::invalid_argument("state index does not cover the statistics");
        }
        m.row_ptr[*i + 1] += 1;
        m.col.push_back(*j);
        m.val.push_back(value(s));
    }
    for (std::size_t i = 0; i < m.n; ++i) {
        m.row_ptr[i + 1] += m.row_ptr[i];
    }
    return m;
}

void normalize_rows(SparseMatrix& m) {
    for (std::size_t i = 0; i < m.n; ++i) {
        const double total = m.row_sum(i);
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            m.val[k] /= total;
        }
    }
}

// Iterative Tarjan; returns component id per node and the component count.
// Components are numbered in reverse topological order of the condensation.
std::pair<std::vector<std::uint32_t>, std::uint32_t> strongly_connected(const SparseMatrix& g) {
    constexpr std::uint32_t unvisited = static_cast<std::uint32_t>(-1);
    const std::size_t n = g.n;
    std::vector<std::uint32_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
    std::vector<std::uint32_t> stack;
    std::vector<bool> on_stack(n, false);
    std::vector<std::pair<std::uint32_t, std::size_t>> call; // node, next edge offset
    std::uint32_t counter = 0, ncomp = 0;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) {
            continue;
        }
        call.push_back({root, g.row_ptr[root]});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, e] = call.back();
            if (e < g.row_ptr[v + 1]) {
                const std::uint32_t w = g.col[e++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, g.row_ptr[w]});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::uint32_t done = v;
            call.pop_back();
            if (!call.empty()) {
                low[call.back().first] = std::min(low[call.back().first], low[done]);
            }
            if (low[done] == index[done]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = ncomp;
                } while (w != done);
                ++ncomp;
            }
        }
    }
    return {comp, ncomp};
}

} // namespace

SparseMatrix transition_matrix(const TransitionStats& stats, const StateIndex& index) {
    SparseMatrix P = build_rows(stats, index, [](const PairStats& s) { return static_cast<double>(s.count); });
    normalize_rows(P);
    return P;
}

DwellHazard dwell_and_hazard(const TransitionStats& stats, const StateIndex& index) {
    for (const auto& [key, s] : stats.pairs()) {
        assert(s.dwell_s > 0 && s.count > 0);
        (void)key;
        (void)s;
    }
    return {
        build_rows(stats, index,
                   [](const PairStats& s) { return static_cast<double>(s.dwell_s) / static_cast<double>(s.count); }),
        build_rows(stats, index,
                   [](const PairStats& s) { return static_cast<double>(s.count) / static_cast<double>(s.dwell_s); }),
    };
}

SparseMatrix dwell_weighted_matrix(const SparseMatrix& hazard) {
    SparseMatrix Q = hazard;
    normalize_rows(Q);
    return Q;
}

StationaryResult stationary(const SparseMatrix& P, std::span<const double> row_weight,
                            const StationaryOptions& opts) {
    const std::size_t n = P.n;
    if (!row_weight.empty() && row_weight.size() != n) {
        throw std::invalid_argument("stationary: row_weight size mismatch");
    }
    auto weight = [&](std::size_t i) { return row_weight.empty() ? 1.0 : row_weight[i]; };

    const auto [comp, ncomp] = strongly_connected(P);
    std::vector<bool> closed(ncomp, true), has_edge(ncomp, false);
    std::vector<double> share(ncomp, 0.0);
    std::vector<std::uint32_t> first(ncomp, static_cast<std::uint32_t>(n));
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto c = comp[i];
        first[c] = std::min(first[c], i);
        share[c] += weight(i);
        for (std::size_t k = P.row_ptr[i]; k < P.row_ptr[i + 1]; ++k) {
            if (comp[P.col[k]] != c) {
                closed[c] = false;
            } else {
                has_edge[c] = true;
            }
        }
    }
    std::optional<std::uint32_t> best;
    for (std::uint32_t c = 0; c < ncomp; ++c) {
        if (!closed[c] || !has_edge[c]) {
            continue;
        }
        if (!best || share[c] > share[*best] || (share[c] == share[*best] && first[c] < first[*best])) {
            best = c;
        }
    }
    if (!best) {
        throw DomainError("no recurrent class: every state leads to an absorbing state");
    }

    StationaryResult result;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (comp[i] == *best) {
            result.recurrent_class.push_back(i);
        }
    }
    const auto& cls = result.recurrent_class;
    std::vector<std::uint32_t> local(n, 0);
    for (std::uint32_t k = 0; k < cls.size(); ++k) {
        local[cls[k]] = k;
    }

    std::vector<double> x(cls.size()), y(cls.size());
    double total = 0.0;
    for (std::size_t k = 0; k < cls.size(); ++k) {
        x[k] = std::max(weight(cls[k]), 0.0);
        total += x[k];
    }
    if (!(total > 0.0)) {
        std::fill(x.begin(), x.end(), 1.0);
        total = static_cast<double>(cls.size());
    }
    for (double& v : x) {
        v /= total;
    }

    const double a = opts.laziness;
    double delta = INFINITY;
    long it = 0;
    while (it < opts.max_iterations) {
        for (std::size_t k = 0; k < cls.size(); ++k) {
            y[k] = a * x[k];
        }
        for (std::size_t k = 0; k < cls.size(); ++k) {
            const std::uint32_t i = cls[k];
            const double mass = (1.0 - a) * x[k];
            for (std::size_t e = P.row_ptr[i]; e < P.row_ptr[i + 1]; ++e) {
                y[local[P.col[e]]] += mass * P.val[e];
            }
        }
        delta = 0.0;
        for (std::size_t k = 0; k < cls.size(); ++k) {
            delta += std::abs(y[k] - x[k]);
        }
        x.swap(y);
        ++it;
        if (delta < opts.tolerance) {
            break;
        }
    }
    if (!(delta < opts.tolerance)) {
        throw ConvergenceError("stationary: power iteration did not converge after " + std::to_string(it) +
                                   " iterations (last delta " + format_double(delta) + ")",
                               it, delta);
    }

    total = 0.0;
    for (double v : x) {
        total += v;
    }
    result.pi.assign(n, 0.0);
    for (std::size_t k = 0; k < cls.size(); ++k) {
        result.pi[cls[k]] = x[k] / total;
    }

    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t k = 0; k < cls.size(); ++k) {
        const std::uint32_t i = cls[k];
        for (std::size_t e = P.row_ptr[i]; e < P.row_ptr[i + 1]; ++e) {
            y[local[P.col[e]]] += result.pi[i] * P.val[e];
        }
    }
    result.residual = 0.0;
    for (std::size_t k = 0; k < cls.size(); ++k) {
        result.residual += std::abs(y[k] - result.pi[cls[k]]);
    }
    result.iterations = it;
    return result;
}

std::uint64_t MarkovModel::total_transitions() const {
    return std::accumulate(exit_count.begin(), exit_count.end(), std::uint64_t{0});
}

MarkovModel fit_markov_model(const TransitionStats& stats, const StationaryOptions& opts) {
    MarkovModel m;
    m.states = StateIndex::from(stats);
    const std::size_t n = m.states.size();
    m.count = build_rows(stats, m.states, [](const PairStats& s) { return static_cast<double>(s.count); });
    m.dwell_sum_s.reserve(stats.pairs().size());
    m.exit_count.assign(n, 0);
    m.exit_dwell_s.assign(n, 0);
    m.terminal_dwell_s.assign(n, 0);
    for (const auto& [key, s] : stats.pairs()) {
        const auto i = *m.states.find(key.from);
        m.dwell_sum_s.push_back(s.dwell_s);
        m.exit_count[i] += s.count;
        m.exit_dwell_s[i] += s.dwell_s;
    }
    for (const auto& [cell, d] : stats.terminal_dwell()) {
        m.terminal_dwell_s[*m.states.find(cell)] += d;
    }
    m.P = transition_matrix(stats, m.states);
    m.dwell = dwell_and_hazard(stats, m.states);
    m.Q = dwell_weighted_matrix(m.dwell.hazard);

    if (m.P.nnz() == 0) {
        m.stationary_status = "no transitions";
        return m;
    }
    std::vector<double> weight(n);
    for (std::size_t i = 0; i < n; ++i) {
        weight[i] = static_cast<double>(m.exit_count[i]);
    }
    try {
        m.stationary = stationary(m.P, weight, opts);
    } catch (const DomainError& e) {
        m.stationary_status = e.what();
    } catch (const ConvergenceError& e) {
        m.stationary_status = e.what();
    }
    return m;
}

std::string write_model_csv(const MarkovModel& model, char d) {
    std::string out = "i_cell";
    for (const char* name : {"j_cell", "N", "dwell_sum", "p", "w", "lambda", "q"}) {
        out += d;
        out += name;
    }
    out += '\n';
    const auto& cells = model.states.cells;
    for (std::size_t i = 0; i < model.P.n; ++i) {
        for (std::size_t k = model.P.row_ptr[i]; k < model.P.row_ptr[i + 1]; ++k) {
            out += to_string(cells[i]);
            out += d;
            out += to_string(cells[model.P.col[k]]);
            out += d;
            out += std::to_string(static_cast<std::uint64_t>(model.count.val[k]));
            out += d;
            out += std::to_string(model.dwell_sum_s[k]);
            out += d;
            out += format_double(model.P.val[k]);
            out += d;
            out += format_double(model.dwell.mean_dwell.val[k]);
            out += d;
            out += format_double(model.dwell.hazard.val[k]);
            out += d;
            out += format_double(model.Q.val[k]);
            out += '\n';
        }
    }
    return out;
}

std::string write_pi_csv(const MarkovModel& model, char d) {
    std::string out = "cell";
    out += d;
    out += "pi\n";
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        out += to_string(model.states.cells[i]);
        out += d;
        out += model.stationary ? format_double(model.stationary->pi[i]) : std::string("0");
        out += '\n';
    }
    return out;
}

std::vector<ModelRow> read_model_csv(std::string_view text, char delimiter) {
    std::vector<ModelRow> rows;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (++line_no == 1 || line.empty()) {
            continue;
        }
        const auto f = split_fields(line, delimiter);
        ModelRow r;
        long long count = 0, dwell = 0;
        auto from = f.size() == 8 ? parse_cell(f[0]) : std::nullopt;
        auto to = f.size() == 8 ? parse_cell(f[1]) : std::nullopt;
        if (!from || !to || !parse_int64(f[2], count) || !parse_int64(f[3], dwell) || !parse_double(f[4], r.p) ||
            !parse_double(f[5], r.w) || !parse_double(f[6], r.lambda) || !parse_double(f[7], r.q)) {
            throw DataError("model file: malformed line " + std::to_string(line_no));
        }
        r.from = *from;
        r.to = *to;
        r.count = static_cast<std::uint64_t>(count);
        r.dwell_s = dwell;
        rows.push_back(r);
    }
    return rows;
}

} // namespace aismarkov
