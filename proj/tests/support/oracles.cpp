#include "oracles.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace oracle {

using aismarkov::CellId;
using aismarkov::SparseMatrix;

SparseMatrix Digraph::to_sparse() const {
    std::vector<double> dense(adj.begin(), adj.end());
    return SparseMatrix::from_dense(n, dense);
}

SparseMatrix dense_to_sparse(const std::vector<double>& m, std::size_t n) {
    return SparseMatrix::from_dense(n, m);
}

std::vector<double> betweenness_by_path_enumeration(const Digraph& g) {
    const std::size_t n = g.n;
    std::vector<double> c(n, 0.0);
    std::vector<std::size_t> path;
    std::vector<char> on_path(n, 0);
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> best(n, std::numeric_limits<std::size_t>::max());
        std::vector<double> total(n, 0.0);
        std::vector<std::vector<double>> through(n, std::vector<double>(n, 0.0));
        std::function<void(std::size_t)> dfs = [&](std::size_t u) {
            if (u != s) {
                const std::size_t len = path.size() - 1;
                if (len < best[u]) {
                    best[u] = len;
                    total[u] = 0.0;
                    std::fill(through[u].begin(), through[u].end(), 0.0);
                }
                if (len == best[u]) {
                    total[u] += 1.0;
                    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
                        through[u][path[k]] += 1.0;
                    }
                }
            }
            for (std::size_t w = 0; w < n; ++w) {
                if (g.edge(u, w) && !on_path[w]) {
                    on_path[w] = 1;
                    path.push_back(w);
                    dfs(w);
                    path.pop_back();
                    on_path[w] = 0;
                }
            }
        };
        on_path[s] = 1;
        path.push_back(s);
        dfs(s);
        path.pop_back();
        on_path[s] = 0;
        for (std::size_t t = 0; t < n; ++t) {
            if (t == s || total[t] == 0.0) {
                continue;
            }
            for (std::size_t v = 0; v < n; ++v) {
                c[v] += through[t][v] / total[t];
            }
        }
    }
    return c;
}

std::vector<double> betweenness_by_path_counts(const Digraph& g) {
    const std::size_t n = g.n;
    constexpr std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
    std::vector<std::size_t> d(n * n, inf);
    for (std::size_t i = 0; i < n; ++i) {
        d[i * n + i] = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (g.edge(i, j)) {
                d[i * n + j] = 1;
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
            }
        }
    }
    // sigma(s, t): number of shortest paths, by increasing distance.
    std::vector<long double> sigma(n * n, 0.0L);
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> by_dist(n);
        std::iota(by_dist.begin(), by_dist.end(), 0);
        std::sort(by_dist.begin(), by_dist.end(),
                  [&](std::size_t a, std::size_t b) { return d[s * n + a] < d[s * n + b]; });
        sigma[s * n + s] = 1.0L;
        for (std::size_t t : by_dist) {
            if (t == s || d[s * n + t] >= inf) {
                continue;
            }
            for (std::size_t u = 0; u < n; ++u) {
                if (g.edge(u, t) && d[s * n + u] + 1 == d[s * n + t]) {
                    sigma[s * n + t] += sigma[s * n + u];
                }
            }
        }
    }
    std::vector<long double> c(n, 0.0L);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = 0; t < n; ++t) {
            if (s == t || d[s * n + t] >= inf) {
                continue;
            }
            for (std::size_t v = 0; v < n; ++v) {
                if (v == s || v == t || d[s * n + v] >= inf || d[v * n + t] >= inf) {
                    continue;
                }
                if (d[s * n + v] + d[v * n + t] == d[s * n + t]) {
                    c[v] += sigma[s * n + v] * sigma[v * n + t] / sigma[s * n + t];
                }
            }
        }
    }
    return std::vector<double>(c.begin(), c.end());
}

Reachability reachability_by_matrix_powers(const Digraph& g) {
    const std::size_t n = g.n;
    if (n > 256) {
        throw std::invalid_argument("reachability oracle supports n <= 256");
    }
    using Row = std::bitset<256>;
    std::vector<Row> a(n), reach(n);
    for (std::size_t i = 0; i < n; ++i) {
        reach[i].set(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (g.edge(i, j)) {
                a[i].set(j);
            }
        }
    }
    Reachability out;
    // After step k, reach[i] holds every node within distance k of i.
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<Row> next = reach;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (reach[i].test(j)) {
                    next[i] |= a[j];
                }
            }
        }
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const Row fresh = next[i] & ~reach[i];
            if (fresh.any()) {
                changed = true;
                out.distance_sum += k * fresh.count();
                out.reachable_pairs += fresh.count();
            }
        }
        reach.swap(next);
        if (!changed) {
            break;
        }
    }
    out.unreachable_pairs = n < 2 ? 0 : n * (n - 1) - out.reachable_pairs;
    return out;
}

std::vector<Digraph> nonisomorphic_digraphs(std::size_t n) {
    if (n == 0 || n > 5) {
        throw std::invalid_argument("nonisomorphic_digraphs: 1 <= n <= 5");
    }
    // Bit position of each ordered pair (i, j), i != j.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::size_t> bit(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) {
                bit[i * n + j] = pairs.size();
                pairs.push_back({i, j});
            }
        }
    }
    const std::size_t m = pairs.size();
    const std::size_t bytes = (m + 7) / 8;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    // tables[p][b][v]: image of byte b having value v under permutation p.
    std::vector<std::vector<std::vector<std::uint32_t>>> tables;
    do {
        std::vector<std::vector<std::uint32_t>> t(bytes, std::vector<std::uint32_t>(256, 0));
        for (std::size_t b = 0; b < bytes; ++b) {
            for (std::uint32_t v = 0; v < 256; ++v) {
                std::uint32_t img = 0;
                for (std::size_t k = 0; k < 8; ++k) {
                    const std::size_t pos = b * 8 + k;
                    if (pos < m && (v >> k & 1u)) {
                        const auto [i, j] = pairs[pos];
                        img |= 1u << bit[perm[i] * n + perm[j]];
                    }
                }
                t[b][v] = img;
            }
        }
        tables.push_back(std::move(t));
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<Digraph> out;
    const std::uint32_t limit = m == 0 ? 1u : (1u << m);
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        bool canonical = true;
        for (const auto& t : tables) {
            std::uint32_t img = 0;
            for (std::size_t b = 0; b < bytes; ++b) {
                img |= t[b][(mask >> (8 * b)) & 0xFFu];
            }
            if (img < mask) {
                canonical = false;
                break;
            }
        }
        if (!canonical) {
            continue;
        }
        Digraph g{n, std::vector<char>(n * n, 0)};
        for (std::size_t k = 0; k < m; ++k) {
            if (mask >> k & 1u) {
                g.adj[pairs[k].first * n + pairs[k].second] = 1;
            }
        }
        out.push_back(std::move(g));
    }
    return out;
}

double modularity_dense(const std::vector<double>& R, std::size_t n, const std::vector<std::uint32_t>& labels) {
    std::vector<double> k(n, 0.0);
    double two_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            k[i] += R[i * n + j];
        }
        two_y += k[i];
    }
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (labels[i] == labels[j]) {
                q += R[i * n + j] - k[i] * k[j] / two_y;
            }
        }
    }
    return q / two_y;
}

double max_modularity_brute_force(const std::vector<double>& R, std::size_t n) {
    std::vector<std::uint32_t> labels(n, 0);
    double best = -std::numeric_limits<double>::infinity();
    std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i, std::uint32_t used) {
        if (i == n) {
            best = std::max(best, modularity_dense(R, n, labels));
            return;
        }
        for (std::uint32_t c = 0; c <= used; ++c) {
            labels[i] = c;
            rec(i + 1, std::max(used, c + 1));
        }
    };
    if (n == 0) {
        return 0.0;
    }
    labels[0] = 0;
    rec(1, 1);
    return best;
}

std::vector<double> stationary_dense(const std::vector<double>& P, std::size_t n) {
    // Row i of A: equation for pi_i, sum_j pi_j (P_ji - delta_ji) = 0.
    std::vector<double> a(n * (n + 1), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a[i * (n + 1) + j] = P[j * n + i] - (i == j ? 1.0 : 0.0);
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        a[(n - 1) * (n + 1) + j] = 1.0;
    }
    a[(n - 1) * (n + 1) + n] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r * (n + 1) + col]) > std::abs(a[piv * (n + 1) + col])) {
                piv = r;
            }
        }
        for (std::size_t c = 0; c <= n; ++c) {
            std::swap(a[col * (n + 1) + c], a[piv * (n + 1) + c]);
        }
        const double p = a[col * (n + 1) + col];
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) {
                continue;
            }
            const double f = a[r * (n + 1) + col] / p;
            if (f == 0.0) {
                continue;
            }
            for (std::size_t c = col; c <= n; ++c) {
                a[r * (n + 1) + c] -= f * a[col * (n + 1) + c];
            }
        }
    }
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i) {
        pi[i] = a[i * (n + 1) + n] / a[i * (n + 1) + i];
    }
    return pi;
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

} // namespace

Digraph random_digraph(std::mt19937_64& rng, std::size_t n, double density) {
    Digraph g{n, std::vector<char>(n * n, 0)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && uniform(rng, 0.0, 1.0) < density) {
                g.adj[i * n + j] = 1;
            }
        }
    }
    return g;
}

std::vector<double> random_irreducible_chain(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> w(n * n, 0.0);
    const double density = uniform(rng, 0.02, 0.4);
    for (std::size_t i = 0; i < n; ++i) {
        // The cycle through every state; for n = 1 it is a self loop.
        w[i * n + (i + 1) % n] = uniform(rng, 0.1, 1.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && uniform(rng, 0.0, 1.0) < density) {
                w[i * n + j] = uniform(rng, 0.1, 1.0);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            s += w[i * n + j];
        }
        for (std::size_t j = 0; j < n; ++j) {
            w[i * n + j] /= s;
        }
    }
    return w;
}

aismarkov::TransitionStats random_stats(std::mt19937_64& rng, bool constant_dwell) {
    aismarkov::TransitionStats stats;
    const int span = std::uniform_int_distribution<int>(1, 4)(rng);
    std::uniform_int_distribution<int> coord(-span, span);
    std::vector<CellId> cells;
    const int ncells = std::uniform_int_distribution<int>(2, 12)(rng);
    for (int k = 0; k < ncells; ++k) {
        cells.push_back({coord(rng), coord(rng)});
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    if (cells.size() < 2) {
        cells.push_back({span + 1, 0});
    }
    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    std::vector<std::int64_t> fixed(cells.size());
    for (auto& d : fixed) {
        d = 60 * std::uniform_int_distribution<std::int64_t>(1, 30)(rng);
    }
    const int observations = std::uniform_int_distribution<int>(1, 200)(rng);
    for (int k = 0; k < observations; ++k) {
        const std::size_t a = pick(rng);
        std::size_t b = pick(rng);
        if (a == b) {
            b = (b + 1) % cells.size();
        }
        const std::int64_t dwell =
            constant_dwell ? fixed[a] : 60 * std::uniform_int_distribution<std::int64_t>(1, 30)(rng);
        stats.record_transition(cells[a], cells[b], dwell);
        if (uniform(rng, 0.0, 1.0) < 0.1) {
            stats.record_terminal(cells[b], 60);
        }
    }
    return stats;
}

std::vector<double> random_symmetric_weights(std::mt19937_64& rng, std::size_t n, double density) {
    std::vector<double> r(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (uniform(rng, 0.0, 1.0) < density) {
                const double w = uniform(rng, 0.1, 1.0);
                r[i * n + j] = w;
                r[j * n + i] = w;
            }
        }
    }
    return r;
}

} // namespace oracle
