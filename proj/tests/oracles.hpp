// Independent reference implementations used by the unit and acceptance
// suites. Everything here recomputes results from first principles and
// must stay decoupled from the library code paths it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "grande/graph.hpp"
#include "grande/tensor.hpp"

namespace oracles {

// Plain i,j,k triple loop.
inline grande::DenseMatrix matmul_ref(const grande::DenseMatrix& a,
                                      const grande::DenseMatrix& b) {
    grande::DenseMatrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < b.cols; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += a(i, k) * b(k, j);
            out(i, j) = acc;
        }
    return out;
}

inline grande::DenseMatrix densify(const grande::SparsePropagator& p) {
    grande::DenseMatrix out(p.n, p.n);
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t e = p.row_begin(i); e < p.row_end(i); ++e)
            out(i, p.col_indices[e]) = p.values[e];
    return out;
}

// Dominant eigenvalue magnitude by power iteration with Rayleigh quotient.
inline double power_iteration(const grande::DenseMatrix& a, std::size_t iterations,
                              std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(a.rows);
    for (double& x : v) x = dist(rng);
    std::vector<double> w(a.rows);
    double lambda = 0.0;
    for (std::size_t it = 0; it < iterations; ++it) {
        for (std::size_t i = 0; i < a.rows; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < a.cols; ++j) acc += a(i, j) * v[j];
            w[i] = acc;
        }
        double num = 0.0, den = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < a.rows; ++i) {
            num += v[i] * w[i];
            den += v[i] * v[i];
            norm += w[i] * w[i];
        }
        lambda = num / den;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        for (std::size_t i = 0; i < a.rows; ++i) v[i] = w[i] / norm;
    }
    return std::abs(lambda);
}

// Full-sort brute-force nearest neighbors: ties by ascending index, self
// excluded. Key is the squared distance, matching the documented order.
struct RankedEntry {
    std::size_t index;
    double dist_sq;
};

inline std::vector<std::vector<RankedEntry>> knn_bruteforce(const grande::DenseMatrix& x,
                                                            std::size_t k) {
    const std::size_t n = x.rows;
    std::vector<std::vector<RankedEntry>> lists(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<RankedEntry> all;
        all.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double acc = 0.0;
            for (std::size_t f = 0; f < x.cols; ++f) {
                const double d = x(i, f) - x(j, f);
                acc += d * d;
            }
            all.push_back({j, acc});
        }
        std::sort(all.begin(), all.end(), [](const RankedEntry& a, const RankedEntry& b) {
            if (a.dist_sq != b.dist_sq) return a.dist_sq < b.dist_sq;
            return a.index < b.index;
        });
        all.resize(k);
        lists[i] = std::move(all);
    }
    return lists;
}

// Mutual-membership edge set computed directly from the brute-force lists.
inline std::vector<std::pair<std::size_t, std::size_t>> reciprocal_bruteforce(
    const grande::DenseMatrix& x, std::size_t k) {
    const auto lists = knn_bruteforce(x, k);
    const std::size_t n = x.rows;
    auto contains = [&](std::size_t from, std::size_t to) {
        for (std::size_t r = 0; r < k; ++r)
            if (lists[from][r].index == to) return true;
        return false;
    };
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (contains(i, j) && contains(j, i)) edges.emplace_back(i, j);
    return edges;
}

// Leave-one-out 1-nearest-neighbor classification accuracy.
inline double nn1_accuracy(const grande::DenseMatrix& x, const std::vector<int>& labels) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        double best = 0.0;
        std::size_t arg = x.rows;
        for (std::size_t j = 0; j < x.rows; ++j) {
            if (j == i) continue;
            double acc = 0.0;
            for (std::size_t f = 0; f < x.cols; ++f) {
                const double d = x(i, f) - x(j, f);
                acc += d * d;
            }
            if (arg == x.rows || acc < best) {
                best = acc;
                arg = j;
            }
        }
        if (labels[arg] == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(x.rows);
}

// Central finite differences of a scalar function of one parameter matrix.
template <class Loss>
grande::DenseMatrix finite_difference(grande::DenseMatrix& w, Loss loss, double step = 1e-6) {
    grande::DenseMatrix grad(w.rows, w.cols);
    for (std::size_t k = 0; k < w.values.size(); ++k) {
        const double saved = w.values[k];
        w.values[k] = saved + step;
        const double up = loss();
        w.values[k] = saved - step;
        const double down = loss();
        w.values[k] = saved;
        grad.values[k] = (up - down) / (2.0 * step);
    }
    return grad;
}

// Max-norm relative error between an analytic gradient and its finite
// difference estimate.
inline double gradient_rel_error(const grande::DenseMatrix& analytic,
                                 const grande::DenseMatrix& fd) {
    double max_diff = 0.0, max_ref = 0.0;
    for (std::size_t k = 0; k < analytic.values.size(); ++k) {
        max_diff = std::max(max_diff, std::abs(analytic.values[k] - fd.values[k]));
        max_ref = std::max(max_ref, std::abs(fd.values[k]));
    }
    return max_diff / std::max(max_ref, 1e-8);
}

inline double max_abs_diff(const grande::DenseMatrix& a, const grande::DenseMatrix& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k)
        m = std::max(m, std::abs(a.values[k] - b.values[k]));
    return m;
}

inline grande::DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                                         double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    grande::DenseMatrix m(rows, cols);
    for (double& v : m.values) v = dist(rng);
    return m;
}

// Random reciprocal-kNN propagator over random points, self-loops included.
inline grande::SparsePropagator random_propagator(std::size_t n, std::size_t k,
                                                  std::uint64_t seed) {
    const grande::DenseMatrix x = random_matrix(n, 3, seed);
    const grande::RankedLists lists = grande::compute_ranked_lists(x, k);
    const grande::NeighborGraph g = grande::build_reciprocal_graph(lists, k);
    return grande::to_propagator_with_self_loops(g);
}

}  // namespace oracles
