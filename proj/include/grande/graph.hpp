#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "grande/tensor.hpp"

namespace grande {

/// Per-node nearest-neighbor lists sorted ascending by Euclidean distance,
/// self excluded, ties broken by ascending node index.
struct RankedLists {
    std::size_t n = 0;
    std::size_t k_max = 0;
    std::vector<std::size_t> neighbors;  // n * k_max, row-major
    std::vector<double> distances;       // aligned with neighbors

    std::size_t neighbor(std::size_t node, std::size_t rank) const {
        return neighbors[node * k_max + rank];
    }
    double distance(std::size_t node, std::size_t rank) const {
        return distances[node * k_max + rank];
    }
};

/// Undirected reciprocal-kNN graph. Edges are stored as normalized pairs
/// (i < j), sorted lexicographically and duplicate-free. Self pairs never
/// appear; self-loops enter later through the propagator.
struct NeighborGraph {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

/// Exact k_max nearest neighbors per node under the Euclidean norm,
/// computed by all-pairs search. Throws std::invalid_argument when
/// k_max >= n.
RankedLists compute_ranked_lists(const DenseMatrix& x, std::size_t k_max);

/// Keeps edge {i,j} iff j is among the first k entries of list(i) and
/// i is among the first k entries of list(j). Throws when k > k_max.
NeighborGraph build_reciprocal_graph(const RankedLists& lists, std::size_t k);

/// CSR matrix with value 1.0 at (i,j) and (j,i) for every edge plus a
/// 1.0 diagonal entry for every node.
SparsePropagator to_propagator_with_self_loops(const NeighborGraph& g);

}  // namespace grande
