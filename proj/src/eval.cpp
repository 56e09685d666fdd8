#include "grande/eval.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace grande {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Uniform draw in [0, bound) by rejection, independent of any library
// distribution implementation.
std::uint64_t bounded_draw(Rng& rng, std::uint64_t bound) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % bound;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

std::vector<std::size_t> FoldPlan::nodes_in_fold(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::nodes_not_in_fold(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] != fold) out.push_back(i);
    return out;
}

FoldPlan make_folds(std::size_t n, std::size_t fold_count, std::uint64_t seed) {
    if (fold_count < 2) throw std::invalid_argument("make_folds: fold_count must be >= 2");
    if (n < fold_count)
        throw std::invalid_argument("make_folds: need at least fold_count nodes, got " +
                                    std::to_string(n));
    FoldPlan plan;
    plan.n = n;
    plan.fold_count = fold_count;
    plan.seed = seed;
    plan.assignment.resize(n);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded_draw(rng, i + 1));
        std::swap(perm[i], perm[j]);
    }

    // First n % fold_count folds take one extra node.
    const std::size_t base = n / fold_count;
    const std::size_t extra = n % fold_count;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < fold_count; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        for (std::size_t s = 0; s < size; ++s) plan.assignment[perm[pos++]] = f;
    }
    return plan;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth,
                const std::vector<std::size_t>& mask) {
    if (mask.empty()) throw std::invalid_argument("accuracy: empty mask");
    std::size_t hits = 0;
    for (std::size_t node : mask) {
        if (node >= pred.size() || node >= truth.size())
            throw std::invalid_argument("accuracy: mask index out of range");
        if (pred[node] == truth[node]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(mask.size());
}

namespace {

std::size_t class_count(const std::vector<int>& labels) {
    int max_label = 0;
    for (int l : labels) {
        if (l < 0) throw std::invalid_argument("labels must be nonnegative");
        max_label = std::max(max_label, l);
    }
    return static_cast<std::size_t>(max_label) + 1;
}

double run_cell(const DenseMatrix& x, const std::vector<int>& labels, const NeighborGraph& graph,
                const TrainConfig& cfg, std::size_t classes, const FoldPlan& plan,
                std::size_t fold, std::uint64_t cell_seed) {
    const std::vector<std::size_t> train_mask = plan.nodes_in_fold(fold);
    const std::vector<std::size_t> test_mask = plan.nodes_not_in_fold(fold);

    TrainConfig cell_cfg = cfg;
    cell_cfg.seed = derive_seed(cell_seed, 1);
    Rng init_rng(derive_seed(cell_seed, 0));

    std::vector<int> preds;
    if (cfg.model == ModelKind::sgc) {
        SgcModel model = SgcModel::make(x.cols, classes, cfg.k_steps, init_rng);
        TrainOutput out = train(model, x, graph, labels, train_mask, cell_cfg);
        preds = predict(model, x, out.propagator);
    } else {
        AppnpModel model = AppnpModel::make(x.cols, classes, cfg.hidden, cfg.k_steps, cfg.alpha,
                                            cfg.dropout, init_rng);
        TrainOutput out = train(model, x, graph, labels, train_mask, cell_cfg);
        preds = predict(model, x, out.propagator);
    }
    return accuracy(preds, labels, test_mask);
}

}  // namespace

MetricsReport run_experiment(const DenseMatrix& x, const std::vector<int>& labels,
                             const NeighborGraph& graph, const TrainConfig& cfg,
                             std::size_t executions, std::size_t fold_count) {
    validate_config(cfg);
    if (executions < 1) throw std::invalid_argument("run_experiment: executions must be >= 1");
    if (labels.size() != x.rows)
        throw std::invalid_argument("run_experiment: one label per node required");
    const std::size_t classes = class_count(labels);

    MetricsReport report;
    report.config = cfg;
    report.executions = executions;
    report.fold_count = fold_count;
    report.graph_k = graph.k;
    report.cell_accuracy.resize(executions);

    double sum = 0.0;
    for (std::size_t e = 0; e < executions; ++e) {
        const std::uint64_t exec_seed = derive_seed(cfg.seed, e);
        report.execution_seeds.push_back(exec_seed);
        const FoldPlan plan = make_folds(x.rows, fold_count, exec_seed);
        report.cell_accuracy[e].resize(fold_count);
        for (std::size_t f = 0; f < fold_count; ++f) {
            const std::uint64_t cell_seed = derive_seed(exec_seed, 1 + f);
            const double acc = run_cell(x, labels, graph, cfg, classes, plan, f, cell_seed);
            report.cell_accuracy[e][f] = acc;
            sum += acc;
        }
    }

    const double cells = static_cast<double>(executions * fold_count);
    report.mean = sum / cells;
    double sq = 0.0;
    for (const auto& row : report.cell_accuracy)
        for (double a : row) sq += (a - report.mean) * (a - report.mean);
    report.stddev = std::sqrt(sq / cells);
    return report;
}

SweepResult sigma_sweep(const DenseMatrix& x, const std::vector<int>& labels,
                        const NeighborGraph& graph, const TrainConfig& cfg,
                        const std::vector<double>& sigmas, std::size_t executions,
                        std::size_t fold_count) {
    if (cfg.degree_kind != DegreeKind::grande)
        throw std::invalid_argument("sigma_sweep: degree kind must be grande");
    if (sigmas.empty()) throw std::invalid_argument("sigma_sweep: empty sigma grid");

    SweepResult result;
    result.sigmas = sigmas;
    for (double sigma : sigmas) {
        TrainConfig run_cfg = cfg;
        run_cfg.sigma = sigma;
        result.reports.push_back(
            run_experiment(x, labels, graph, run_cfg, executions, fold_count));
    }
    result.best_index = 0;
    for (std::size_t i = 1; i < sigmas.size(); ++i) {
        const double mean = result.reports[i].mean;
        const double best_mean = result.reports[result.best_index].mean;
        if (mean > best_mean || (mean == best_mean && sigmas[i] < sigmas[result.best_index]))
            result.best_index = i;
    }
    return result;
}

std::pair<DenseMatrix, std::vector<int>> generate_blobs(std::size_t classes,
                                                        std::size_t per_class, std::size_t dim,
                                                        double separation, double noise,
                                                        std::uint64_t seed) {
    if (classes < 1 || per_class < 1 || dim < 1)
        throw std::invalid_argument("generate_blobs: counts must be >= 1");
    if (!(noise > 0.0)) throw std::invalid_argument("generate_blobs: noise must be positive");

    DenseMatrix x(classes * per_class, dim);
    std::vector<int> labels(classes * per_class);
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::size_t row = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        const std::size_t axis = c % dim;
        for (std::size_t p = 0; p < per_class; ++p, ++row) {
            double* xi = x.row(row);
            for (std::size_t j = 0; j < dim; ++j)
                xi[j] = (j == axis ? separation : 0.0) + noise * gauss(rng);
            labels[row] = static_cast<int>(c);
        }
    }
    return {std::move(x), std::move(labels)};
}

}  // namespace grande
