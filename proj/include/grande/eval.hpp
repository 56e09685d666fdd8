#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "grande/models.hpp"

namespace grande {

/// Derives an independent stream seed from a base seed. The rule is
/// fixed: splitmix64 applied to base + (stream + 1) * 0x9E3779B97F4A7C15.
/// Streams used by the harness:
///   execution e         -> derive_seed(top_seed, e)
///   cell (e, fold f)    -> derive_seed(exec_seed, 1 + f), from which
///   stream 0 seeds weight initialization and stream 1 seeds training.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Seeded uniform permutation partitioned into fold_count contiguous
/// blocks whose sizes differ by at most one. The permutation is a
/// hand-rolled Fisher-Yates draw so the assignment depends only on
/// (n, fold_count, seed), not on a library implementation.
struct FoldPlan {
    std::size_t n = 0;
    std::size_t fold_count = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> assignment;  // fold index per node

    std::vector<std::size_t> nodes_in_fold(std::size_t fold) const;
    std::vector<std::size_t> nodes_not_in_fold(std::size_t fold) const;
};

FoldPlan make_folds(std::size_t n, std::size_t fold_count, std::uint64_t seed);

/// Fraction of masked nodes with pred == truth. Throws on an empty mask.
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth,
                const std::vector<std::size_t>& mask);

struct MetricsReport {
    std::vector<std::vector<double>> cell_accuracy;  // [execution][fold]
    double mean = 0.0;
    double stddev = 0.0;  // population formula over all cells

    // Config echo.
    TrainConfig config;
    std::size_t executions = 0;
    std::size_t fold_count = 0;
    std::size_t graph_k = 0;
    std::vector<std::uint64_t> execution_seeds;
};

/// Fold-based transductive protocol: within each execution every fold is
/// used once as the training set and the remaining nodes as the test
/// set. The graph is shared across folds; only labels are masked.
MetricsReport run_experiment(const DenseMatrix& x, const std::vector<int>& labels,
                             const NeighborGraph& graph, const TrainConfig& cfg,
                             std::size_t executions, std::size_t fold_count);

struct SweepResult {
    std::vector<double> sigmas;
    std::vector<MetricsReport> reports;
    std::size_t best_index = 0;  // highest mean accuracy, ties to the smaller sigma
};

/// One full run_experiment per sigma with a shared top-level seed, so
/// every sigma sees identical fold plans.
SweepResult sigma_sweep(const DenseMatrix& x, const std::vector<int>& labels,
                        const NeighborGraph& graph, const TrainConfig& cfg,
                        const std::vector<double>& sigmas, std::size_t executions,
                        std::size_t fold_count);

/// Isotropic Gaussian blobs with class means at separation * e_{c mod dim}.
/// Labels come out grouped: node i belongs to class i / per_class.
std::pair<DenseMatrix, std::vector<int>> generate_blobs(std::size_t classes,
                                                        std::size_t per_class, std::size_t dim,
                                                        double separation, double noise,
                                                        std::uint64_t seed);

}  // namespace grande
