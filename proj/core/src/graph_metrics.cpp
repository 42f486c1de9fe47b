#include "aismarkov/graph_metrics.hpp"

#include "aismarkov/error.hpp"
#include "aismarkov/parallel.hpp"
#include "aismarkov/textio.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>

namespace aismarkov {

std::vector<std::uint64_t> mobility_magnitude(const MarkovModel& model) {
    return model.exit_count;
}

std::vector<std::int64_t> dwell_time_magnitude(const MarkovModel& model, bool include_terminal) {
    std::vector<std::int64_t> dtm = model.exit_dwell_s;
    if (include_terminal) {
        for (std::size_t i = 0; i < dtm.size(); ++i) {
            dtm[i] += model.terminal_dwell_s[i];
        }
    }
    return dtm;
}

std::vector<double> dwell_time_magnitude_from_means(const MarkovModel& model) {
    const SparseMatrix& w = model.dwell.mean_dwell;
    std::vector<double> dtm(w.n, 0.0);
    for (std::size_t i = 0; i < w.n; ++i) {
        for (std::size_t k = w.row_ptr[i]; k < w.row_ptr[i + 1]; ++k) {
            dtm[i] += model.count.val[k] * w.val[k];
        }
    }
    return dtm;
}

SparseMatrix digraph_from_edges(std::size_t n, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
    std::vector<double> dense(n * n, 0.0);
    for (auto [a, b] : edges) {
        dense.at(static_cast<std::size_t>(a) * n + b) = 1.0;
    }
    return SparseMatrix::from_dense(n, dense);
}

namespace {

constexpr std::uint32_t unreached = std::numeric_limits<std::uint32_t>::max();

// Single-source dependency accumulation, added into `acc`.
struct BrandesWorkspace {
    std::vector<std::uint32_t> order;
    std::vector<std::uint32_t> dist;
    std::vector<double> sigma;
    std::vector<double> delta;

    explicit BrandesWorkspace(std::size_t n) : dist(n), sigma(n), delta(n) { order.reserve(n); }

    void run(const SparseMatrix& g, std::uint32_t s, std::vector<double>& acc) {
        std::fill(dist.begin(), dist.end(), unreached);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        order.clear();
        dist[s] = 0;
        sigma[s] = 1.0;
        order.push_back(s);
        for (std::size_t head = 0; head < order.size(); ++head) {
            const std::uint32_t v = order[head];
            for (std::size_t e = g.row_ptr[v]; e < g.row_ptr[v + 1]; ++e) {
                const std::uint32_t w = g.col[e];
                if (dist[w] == unreached) {
                    dist[w] = dist[v] + 1;
                    order.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                }
            }
        }
        // Predecessors of w are the v with an edge v->w and dist[v] + 1 == dist[w];
        // walking the BFS order backwards visits every w after all its successors.
        for (std::size_t k = order.size(); k-- > 0;) {
            const std::uint32_t v = order[k];
            for (std::size_t e = g.row_ptr[v]; e < g.row_ptr[v + 1]; ++e) {
                const std::uint32_t w = g.col[e];
                if (dist[w] == dist[v] + 1) {
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
            }
            if (v != s) {
                acc[v] += delta[v];
            }
        }
    }
};

constexpr std::size_t betweenness_chunks = 64;

} // namespace

std::vector<double> betweenness(const SparseMatrix& g, unsigned workers) {
    const std::size_t n = g.n;
    const std::size_t chunks = std::min(betweenness_chunks, std::max<std::size_t>(n, 1));
    std::vector<std::vector<double>> partial(chunks, std::vector<double>(n, 0.0));
    parallel_for(chunks, workers, [&](std::size_t c) {
        BrandesWorkspace ws(n);
        const std::size_t lo = n * c / chunks;
        const std::size_t hi = n * (c + 1) / chunks;
        for (std::size_t s = lo; s < hi; ++s) {
            ws.run(g, static_cast<std::uint32_t>(s), partial[c]);
        }
    });
    std::vector<double> total(n, 0.0);
    for (const auto& p : partial) {
        for (std::size_t i = 0; i < n; ++i) {
            total[i] += p[i];
        }
    }
    return total;
}

std::vector<double> normalize_betweenness(std::span<const double> raw) {
    const double n = static_cast<double>(raw.size());
    std::vector<double> out(raw.size(), 0.0);
    if (raw.size() >= 3) {
        const double denom = (n - 1.0) * (n - 2.0);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            out[i] = raw[i] / denom;
        }
    }
    return out;
}

PathLengthSummary average_path_length(const SparseMatrix& g) {
    const std::size_t n = g.n;
    PathLengthSummary out;
    std::vector<std::uint32_t> dist(n);
    std::vector<std::uint32_t> queue;
    queue.reserve(n);
    for (std::uint32_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), unreached);
        queue.clear();
        dist[s] = 0;
        queue.push_back(s);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::uint32_t v = queue[head];
            for (std::size_t e = g.row_ptr[v]; e < g.row_ptr[v + 1]; ++e) {
                const std::uint32_t w = g.col[e];
                if (dist[w] == unreached) {
                    dist[w] = dist[v] + 1;
                    out.distance_sum += dist[w];
                    queue.push_back(w);
                }
            }
        }
        out.reachable_pairs += queue.size() - 1;
    }
    const std::uint64_t ordered = n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1);
    out.excluded_pairs = ordered - out.reachable_pairs;
    if (out.reachable_pairs == 0) {
        throw DomainError("average path length: no reachable pair of distinct states");
    }
    out.mean = static_cast<double>(out.distance_sum) / static_cast<double>(out.reachable_pairs);
    return out;
}

SparseMatrix symmetrize(const SparseMatrix& a) {
    const std::size_t n = a.n;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const std::uint32_t j = a.col[k];
            if (j == i) {
                continue;
            }
            rows[i].push_back({j, a.val[k] / 2.0});
            rows[j].push_back({i, a.val[k] / 2.0});
        }
    }
    SparseMatrix r;
    r.n = n;
    for (auto& row : rows) {
        std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        for (std::size_t k = 0; k < row.size();) {
            // p_ij/2 + p_ji/2, summed in a fixed order so R stays exactly symmetric.
            double w = row[k].second;
            std::size_t m = k + 1;
            if (m < row.size() && row[m].first == row[k].first) {
                const double lo = std::min(row[k].second, row[m].second);
                const double hi = std::max(row[k].second, row[m].second);
                w = lo + hi;
                ++m;
            }
            r.col.push_back(row[k].first);
            r.val.push_back(w);
            k = m;
        }
        r.row_ptr.push_back(r.col.size());
    }
    return r;
}

double modularity(const SparseMatrix& R, std::span<const std::uint32_t> labels) {
    if (labels.size() != R.n) {
        throw DomainError("modularity: labels do not cover every node");
    }
    double two_y = 0.0;
    std::vector<double> strength(R.n, 0.0);
    for (std::size_t i = 0; i < R.n; ++i) {
        strength[i] = R.row_sum(i);
        two_y += strength[i];
    }
    if (!(two_y > 0.0)) {
        throw DomainError("modularity: graph has zero total weight");
    }
    const std::uint32_t k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<double> internal(k, 0.0), total(k, 0.0);
    for (std::size_t i = 0; i < R.n; ++i) {
        total[labels[i]] += strength[i];
        for (std::size_t e = R.row_ptr[i]; e < R.row_ptr[i + 1]; ++e) {
            if (labels[R.col[e]] == labels[i]) {
                internal[labels[i]] += R.val[e];
            }
        }
    }
    double q = 0.0;
    for (std::uint32_t c = 0; c < k; ++c) {
        const double frac = total[c] / two_y;
        q += internal[c] / two_y - frac * frac;
    }
    return q;
}

namespace {

// Symmetric weighted graph with explicit self-loop weights, used for the
// aggregation levels of community detection.
struct LevelGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // off-diagonal
    std::vector<double> self;
    std::vector<double> strength;
};

LevelGraph level_from(const SparseMatrix& R) {
    LevelGraph g;
    g.n = R.n;
    g.adj.resize(R.n);
    g.self.assign(R.n, 0.0);
    g.strength.assign(R.n, 0.0);
    for (std::uint32_t i = 0; i < R.n; ++i) {
        for (std::size_t e = R.row_ptr[i]; e < R.row_ptr[i + 1]; ++e) {
            if (R.col[e] == i) {
                g.self[i] += R.val[e];
            } else {
                g.adj[i].push_back({R.col[e], R.val[e]});
            }
            g.strength[i] += R.val[e];
        }
    }
    return g;
}

// One round of local moves. Returns true if any node changed community.
bool local_moves(const LevelGraph& g, double two_y, std::vector<std::uint32_t>& comm,
                 const std::vector<std::uint32_t>& visit_order) {
    std::vector<double> tot(g.n, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) {
        tot[comm[i]] += g.strength[i];
    }
    std::vector<double> link(g.n, 0.0);
    std::vector<char> seen(g.n, 0);
    std::vector<std::uint32_t> touched;
    constexpr double eps = 1e-12;
    bool any = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::uint32_t i : visit_order) {
            const std::uint32_t own = comm[i];
            const double ki = g.strength[i];
            tot[own] -= ki;
            touched.clear();
            touched.push_back(own);
            seen[own] = 1;
            for (auto [j, w] : g.adj[i]) {
                const std::uint32_t c = comm[j];
                if (!seen[c]) {
                    seen[c] = 1;
                    touched.push_back(c);
                }
                link[c] += w;
            }
            auto gain = [&](std::uint32_t c) { return link[c] - tot[c] * ki / two_y; };
            const double stay = gain(own);
            std::uint32_t best = own;
            double best_gain = stay;
            std::sort(touched.begin(), touched.end());
            for (std::uint32_t c : touched) {
                if (c == own) {
                    continue;
                }
                const double gc = gain(c);
                if (gc > stay + eps && (best == own || gc > best_gain + eps)) {
                    best = c;
                    best_gain = gc;
                }
            }
            for (std::uint32_t c : touched) {
                link[c] = 0.0;
                seen[c] = 0;
            }
            tot[best] += ki;
            if (best != own) {
                comm[i] = best;
                moved = true;
                any = true;
            }
        }
    }
    return any;
}

// Renumbers labels by first appearance; returns the label count.
std::uint32_t compact_labels(std::vector<std::uint32_t>& labels) {
    std::vector<std::uint32_t> remap(labels.size() + 1, std::numeric_limits<std::uint32_t>::max());
    std::uint32_t next = 0;
    for (auto& l : labels) {
        if (remap[l] == std::numeric_limits<std::uint32_t>::max()) {
            remap[l] = next++;
        }
        l = remap[l];
    }
    return next;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::uint32_t>& comm, std::uint32_t k) {
    LevelGraph out;
    out.n = k;
    out.adj.resize(k);
    out.self.assign(k, 0.0);
    out.strength.assign(k, 0.0);
    std::vector<std::vector<std::pair<std::uint32_t, double>>> raw(k);
    for (std::uint32_t i = 0; i < g.n; ++i) {
        const std::uint32_t ci = comm[i];
        out.self[ci] += g.self[i];
        out.strength[ci] += g.strength[i];
        for (auto [j, w] : g.adj[i]) {
            if (comm[j] == ci) {
                out.self[ci] += w;
            } else {
                raw[ci].push_back({comm[j], w});
            }
        }
    }
    for (std::uint32_t c = 0; c < k; ++c) {
        auto& row = raw[c];
        std::stable_sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        for (const auto& [d, w] : row) {
            if (!out.adj[c].empty() && out.adj[c].back().first == d) {
                out.adj[c].back().second += w;
            } else {
                out.adj[c].push_back({d, w});
            }
        }
    }
    return out;
}

} // namespace

std::vector<std::uint32_t> detect_communities(const SparseMatrix& R, std::uint64_t seed) {
    const std::size_t n = R.n;
    std::vector<std::uint32_t> labels(n);
    std::iota(labels.begin(), labels.end(), 0u);
    double two_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        two_y += R.row_sum(i);
    }
    if (!(two_y > 0.0)) {
        return labels;
    }

    std::mt19937_64 rng(seed);
    LevelGraph g = level_from(R);
    while (true) {
        std::vector<std::uint32_t> order(g.n);
        std::iota(order.begin(), order.end(), 0u);
        // Fisher-Yates with raw engine output: identical on every standard library.
        for (std::size_t i = g.n; i > 1; --i) {
            std::swap(order[i - 1], order[rng() % i]);
        }
        std::vector<std::uint32_t> comm(g.n);
        std::iota(comm.begin(), comm.end(), 0u);
        if (!local_moves(g, two_y, comm, order)) {
            break;
        }
        const std::uint32_t k = compact_labels(comm);
        for (auto& l : labels) {
            l = comm[l];
        }
        if (k == g.n) {
            break;
        }
        g = aggregate(g, comm, k);
    }
    compact_labels(labels);
    if (modularity(R, labels) < 0.0) {
        std::fill(labels.begin(), labels.end(), 0u);
    }
    return labels;
}

GraphSummary compute_graph_metrics(const MarkovModel& model, const GraphOptions& opts) {
    GraphSummary out;
    out.cells.mm = mobility_magnitude(model);
    out.cells.dtm_s = dwell_time_magnitude(model, opts.dtm_include_terminal);
    out.cells.betweenness = betweenness(model.P, opts.workers);
    out.cells.betweenness_normalized = normalize_betweenness(out.cells.betweenness);
    if (model.P.nnz() > 0) {
        out.path_length = average_path_length(model.P);
    }
    const SparseMatrix R = symmetrize(opts.weights == ModularityWeights::Count ? model.count : model.P);
    out.cells.community = detect_communities(R, opts.community_seed);
    if (R.nnz() > 0) {
        out.modularity = modularity(R, out.cells.community);
    }
    return out;
}

std::string write_metrics_csv(const MarkovModel& model, const CellMetrics& m, char d) {
    std::string out = "cell_q";
    for (const char* name : {"cell_r", "MM", "DTM_seconds", "C_raw", "C_normalized", "community"}) {
        out += d;
        out += name;
    }
    out += '\n';
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        const CellId c = model.states.cells[i];
        out += std::to_string(c.q);
        out += d;
        out += std::to_string(c.r);
        out += d;
        out += std::to_string(m.mm[i]);
        out += d;
        out += std::to_string(m.dtm_s[i]);
        out += d;
        out += format_double(m.betweenness[i]);
        out += d;
        out += format_double(m.betweenness_normalized[i]);
        out += d;
        out += std::to_string(m.community[i]);
        out += '\n';
    }
    return out;
}

} // namespace aismarkov
