#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They favour obviousness over speed and share no code with the
// library beyond plain data types.

#include "aismarkov/markov.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

/// Dense 0/1 adjacency, row-major, no self loops.
struct Digraph {
    std::size_t n = 0;
    std::vector<char> adj;

    bool edge(std::size_t i, std::size_t j) const { return adj[i * n + j] != 0; }
    aismarkov::SparseMatrix to_sparse() const;
};

/// Betweenness by enumerating every simple s -> t path (exponential; n <= 7).
std::vector<double> betweenness_by_path_enumeration(const Digraph& g);

/// Betweenness from all-pairs distances and exact shortest-path counts:
/// C(v) = sum over s != v != t with d(s,v) + d(v,t) = d(s,t) of
/// sigma(s,v) sigma(v,t) / sigma(s,t).
std::vector<double> betweenness_by_path_counts(const Digraph& g);

struct Reachability {
    std::uint64_t distance_sum = 0;
    std::uint64_t reachable_pairs = 0;
    std::uint64_t unreachable_pairs = 0;
};

/// Distances from successive boolean matrix powers of the adjacency.
Reachability reachability_by_matrix_powers(const Digraph& g);

/// All non-isomorphic loop-free digraphs on n <= 5 vertices, as canonical
/// (minimum over vertex permutations) adjacency bitmasks.
std::vector<Digraph> nonisomorphic_digraphs(std::size_t n);

/// Q = (1 / 2y) sum_ij [R_ij - k_i k_j / 2y] delta(c_i, c_j) on a dense matrix.
double modularity_dense(const std::vector<double>& R, std::size_t n, const std::vector<std::uint32_t>& labels);

/// Maximum modularity over every set partition (restricted growth strings).
double max_modularity_brute_force(const std::vector<double>& R, std::size_t n);

/// Stationary distribution by Gaussian elimination with partial pivoting on
/// pi (P - I) = 0 with one equation replaced by sum(pi) = 1.
std::vector<double> stationary_dense(const std::vector<double>& P, std::size_t n);

// Random instances.

Digraph random_digraph(std::mt19937_64& rng, std::size_t n, double density);

/// Row-stochastic dense matrix containing the cycle 0 -> 1 -> ... -> n-1 -> 0
/// plus random extra edges, hence irreducible.
std::vector<double> random_irreducible_chain(std::mt19937_64& rng, std::size_t n);

/// Random transition statistics over a small cell neighbourhood. With
/// `constant_dwell` every observed dwell out of a cell has the same length.
aismarkov::TransitionStats random_stats(std::mt19937_64& rng, bool constant_dwell);

/// Symmetric non-negative weight matrix with zero diagonal.
std::vector<double> random_symmetric_weights(std::mt19937_64& rng, std::size_t n, double density);

aismarkov::SparseMatrix dense_to_sparse(const std::vector<double>& m, std::size_t n);

} // namespace oracle
