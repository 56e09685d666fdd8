#include "grande/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace grande {

namespace {

// Candidate ordered by squared distance, ties by ascending node index.
// Ordering by squared distance is equivalent to ordering by distance and
// avoids sqrt rounding in the sort keys.
struct Candidate {
    double dist_sq;
    std::size_t index;

    bool operator<(const Candidate& o) const {
        if (dist_sq != o.dist_sq) return dist_sq < o.dist_sq;
        return index < o.index;
    }
};

double squared_distance(const DenseMatrix& x, std::size_t a, std::size_t b) {
    const double* pa = x.row(a);
    const double* pb = x.row(b);
    double acc = 0.0;
    for (std::size_t j = 0; j < x.cols; ++j) {
        const double d = pa[j] - pb[j];
        acc += d * d;
    }
    return acc;
}

}  // namespace

RankedLists compute_ranked_lists(const DenseMatrix& x, std::size_t k_max) {
    const std::size_t n = x.rows;
    if (k_max >= n)
        throw std::invalid_argument("compute_ranked_lists: k_max (" + std::to_string(k_max) +
                                    ") must be smaller than the node count (" +
                                    std::to_string(n) + ")");
    if (x.cols == 0) throw std::invalid_argument("compute_ranked_lists: features need d >= 1");
    for (double v : x.values)
        if (!std::isfinite(v))
            throw std::invalid_argument("compute_ranked_lists: features must be finite");

    RankedLists lists;
    lists.n = n;
    lists.k_max = k_max;
    lists.neighbors.resize(n * k_max);
    lists.distances.resize(n * k_max);

    std::vector<Candidate> candidates(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t m = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            candidates[m++] = Candidate{squared_distance(x, i, j), j};
        }
        std::partial_sort(candidates.begin(),
                          candidates.begin() + static_cast<std::ptrdiff_t>(k_max),
                          candidates.end());
        for (std::size_t r = 0; r < k_max; ++r) {
            lists.neighbors[i * k_max + r] = candidates[r].index;
            lists.distances[i * k_max + r] = std::sqrt(candidates[r].dist_sq);
        }
    }
    return lists;
}

NeighborGraph build_reciprocal_graph(const RankedLists& lists, std::size_t k) {
    if (k > lists.k_max)
        throw std::invalid_argument("build_reciprocal_graph: k (" + std::to_string(k) +
                                    ") exceeds the ranked-list length (" +
                                    std::to_string(lists.k_max) + ")");
    NeighborGraph g;
    g.n = lists.n;
    g.k = k;

    auto mutual = [&](std::size_t from, std::size_t to) {
        for (std::size_t r = 0; r < k; ++r)
            if (lists.neighbor(from, r) == to) return true;
        return false;
    };

    for (std::size_t i = 0; i < lists.n; ++i) {
        for (std::size_t r = 0; r < k; ++r) {
            const std::size_t j = lists.neighbor(i, r);
            if (j < i) continue;  // handled from the smaller endpoint
            if (mutual(j, i)) g.edges.emplace_back(i, j);
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    return g;
}

SparsePropagator to_propagator_with_self_loops(const NeighborGraph& g) {
    std::vector<std::vector<std::size_t>> adjacency(g.n);
    for (std::size_t i = 0; i < g.n; ++i) adjacency[i].push_back(i);
    for (const auto& [a, b] : g.edges) {
        if (a == b || a >= g.n || b >= g.n)
            throw std::invalid_argument("to_propagator_with_self_loops: invalid edge");
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    }

    SparsePropagator p;
    p.n = g.n;
    p.row_offsets.resize(g.n + 1, 0);
    for (std::size_t i = 0; i < g.n; ++i) {
        std::sort(adjacency[i].begin(), adjacency[i].end());
        p.row_offsets[i + 1] = p.row_offsets[i] + adjacency[i].size();
    }
    p.col_indices.reserve(p.row_offsets.back());
    for (std::size_t i = 0; i < g.n; ++i)
        p.col_indices.insert(p.col_indices.end(), adjacency[i].begin(), adjacency[i].end());
    p.values.assign(p.col_indices.size(), 1.0);
    return p;
}

}  // namespace grande
