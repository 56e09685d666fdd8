#pragma once

#include <cstddef>
#include <vector>

#include "grande/tensor.hpp"

namespace grande {

enum class DegreeKind { centrality, grande };

/// Per-node degree values used to normalize the diffusion matrix. For
/// kind == grande, sigma records the kernel width the penalty used.
struct DegreeVector {
    std::size_t n = 0;
    std::vector<double> values;
    DegreeKind kind = DegreeKind::centrality;
    double sigma = 0.0;
};

/// Euclidean distances over the stored entries of a propagator, kept in
/// the same CSR layout. `normalized` holds the min-max rescaled values;
/// when all raw distances coincide the normalized values are all zero.
struct EdgeDistanceTable {
    std::size_t n = 0;
    std::vector<std::size_t> row_offsets;
    std::vector<std::size_t> col_indices;
    std::vector<double> raw;
    std::vector<double> normalized;

    std::size_t row_begin(std::size_t i) const { return row_offsets[i]; }
    std::size_t row_end(std::size_t i) const { return row_offsets[i + 1]; }
};

/// Number of stored entries per row (neighbors including the self-loop).
DegreeVector degree_centrality(const SparsePropagator& p);

/// Distance of every stored (q,i) pair of the propagator in the row space
/// of h, min-max normalized globally over all stored pairs.
EdgeDistanceTable compute_edge_distances(const SparsePropagator& p, const DenseMatrix& h);

/// Gaussian RBF exp(-rho_norm^2 / sigma). Exponents below 1e-8 are
/// treated as zero so the kernel is exactly 1 there; this keeps the
/// large-sigma limit of the penalty exact while perturbing the kernel by
/// less than 1e-8 anywhere. Throws std::invalid_argument when sigma <= 0.
double gaussian_kernel(double rho_norm, double sigma);

/// Mean of the inverse Gaussian similarities over each closed
/// neighborhood: s(q) = (1/deg_ctr(q)) * sum_i 1/f_g(rho'(q,i), sigma).
/// Every value lies in [1, exp(1/sigma)].
std::vector<double> neighborhood_penalty(const EdgeDistanceTable& table,
                                         const DegreeVector& deg_ctr, double sigma);

/// Elementwise deg_ctr + penalty, tagged kind = grande.
DegreeVector grande_degree(const DegreeVector& deg_ctr, const std::vector<double>& penalty,
                           double sigma);

/// Rebuilds every stored value as 1/sqrt(deg[i] * deg[j]), preserving the
/// sparsity pattern. Throws on nonpositive degrees.
SparsePropagator normalize_adjacency(const SparsePropagator& p, const DegreeVector& deg);

}  // namespace grande
