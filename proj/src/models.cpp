#include "grande/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace grande {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

DenseMatrix scale_add(const DenseMatrix& a, double wa, const DenseMatrix& b, double wb) {
    DenseMatrix out(a.rows, a.cols);
    for (std::size_t k = 0; k < a.values.size(); ++k)
        out.values[k] = wa * a.values[k] + wb * b.values[k];
    return out;
}

}  // namespace

void validate_config(const TrainConfig& cfg, bool strict_lr) {
    require(cfg.epochs >= 1, "config: epochs must be >= 1");
    require(std::isfinite(cfg.lr) && cfg.lr >= 0.0, "config: learning rate must be >= 0");
    if (strict_lr) require(cfg.lr > 0.0, "config: learning rate must be positive");
    if (cfg.degree_kind == DegreeKind::grande)
        require(cfg.sigma > 0.0, "config: sigma must be positive when degree kind is grande");
    if (cfg.model == ModelKind::appnp) {
        require(cfg.alpha > 0.0 && cfg.alpha < 1.0, "config: alpha must lie in (0,1)");
        require(cfg.dropout >= 0.0 && cfg.dropout < 1.0, "config: dropout must lie in [0,1)");
    }
}

// ---------------------------------------------------------------------------
// SGC
// ---------------------------------------------------------------------------

SgcModel SgcModel::make(std::size_t d, std::size_t c, std::size_t k_steps, Rng& rng) {
    SgcModel m;
    m.w = ParameterBlock(glorot_init(d, c, rng));
    m.k_steps = k_steps;
    return m;
}

std::pair<DenseMatrix, SgcCache> sgc_forward(const SgcModel& m, const DenseMatrix& x,
                                             const SparsePropagator& a_hat) {
    require(x.cols == m.w.value.rows, "sgc_forward: feature width does not match W");
    require(x.rows == a_hat.n, "sgc_forward: propagator size does not match features");
    DenseMatrix z = matmul(x, m.w.value);
    for (std::size_t k = 0; k < m.k_steps; ++k) z = spmm(a_hat, z);
    return {std::move(z), SgcCache{&x, &a_hat, m.k_steps}};
}

void sgc_backward(SgcModel& m, const SgcCache& cache, const DenseMatrix& grad_z) {
    // grad_W = (A_hat^K X)^T grad_z = X^T (A_hat^K grad_z) since A_hat is symmetric.
    DenseMatrix g = grad_z;
    for (std::size_t k = 0; k < cache.k_steps; ++k) g = spmm(*cache.a_hat, g);
    DenseMatrix grad_w = matmul_at_b(*cache.x, g);
    for (std::size_t k = 0; k < grad_w.values.size(); ++k)
        m.w.grad.values[k] += grad_w.values[k];
}

// ---------------------------------------------------------------------------
// APPNP
// ---------------------------------------------------------------------------

AppnpModel AppnpModel::make(std::size_t d, std::size_t c, std::size_t hidden,
                            std::size_t k_steps, double alpha, double dropout, Rng& rng) {
    require(alpha > 0.0 && alpha < 1.0, "appnp: alpha must lie in (0,1)");
    require(dropout >= 0.0 && dropout < 1.0, "appnp: dropout must lie in [0,1)");
    AppnpModel m;
    m.hidden = hidden;
    m.k_steps = k_steps;
    m.alpha = alpha;
    m.dropout_rate = dropout;
    if (hidden == 0) {
        m.w1 = ParameterBlock(glorot_init(d, c, rng));
    } else {
        m.w1 = ParameterBlock(glorot_init(d, hidden, rng));
        m.w2 = ParameterBlock(glorot_init(hidden, c, rng));
    }
    return m;
}

DenseMatrix appnp_propagate(const DenseMatrix& h0, const SparsePropagator& a_hat, double alpha,
                            std::size_t k_steps) {
    require(h0.rows == a_hat.n, "appnp_propagate: propagator size does not match H0");
    DenseMatrix h = h0;
    for (std::size_t k = 0; k < k_steps; ++k) {
        DenseMatrix diffused = spmm(a_hat, h);
        h = scale_add(diffused, 1.0 - alpha, h0, alpha);
    }
    return h;
}

std::pair<DenseMatrix, AppnpCache> appnp_forward(const AppnpModel& m, const DenseMatrix& x,
                                                 const SparsePropagator& a_hat, bool training,
                                                 Rng& rng) {
    require(x.rows == a_hat.n, "appnp_forward: propagator size does not match features");
    AppnpCache cache;
    cache.a_hat = &a_hat;
    cache.training = training;

    auto dropped = dropout_apply(x, m.dropout_rate, rng, training);
    cache.x_dropped = std::move(dropped.out);

    DenseMatrix h0;
    if (m.hidden == 0) {
        require(x.cols == m.w1.value.rows, "appnp_forward: feature width does not match W1");
        h0 = matmul(cache.x_dropped, m.w1.value);
    } else {
        require(x.cols == m.w1.value.rows, "appnp_forward: feature width does not match W1");
        DenseMatrix pre = matmul(cache.x_dropped, m.w1.value);
        ReluResult relu = relu_forward(pre);
        cache.relu_active = std::move(relu.active);
        auto hidden_drop = dropout_apply(relu.out, m.dropout_rate, rng, training);
        cache.hidden_dropped = std::move(hidden_drop.out);
        cache.hidden_kept = std::move(hidden_drop.kept);
        h0 = matmul(cache.hidden_dropped, m.w2.value);
    }
    DenseMatrix z = appnp_propagate(h0, a_hat, m.alpha, m.k_steps);
    return {std::move(z), std::move(cache)};
}

void appnp_backward(AppnpModel& m, const AppnpCache& cache, const DenseMatrix& grad_z) {
    // Adjoint of the teleport recursion; A_hat symmetry lets the reverse
    // pass reuse the forward diffusion operator.
    const double alpha = m.alpha;
    DenseMatrix g = grad_z;
    DenseMatrix grad_h0(grad_z.rows, grad_z.cols);
    for (std::size_t k = 0; k < m.k_steps; ++k) {
        for (std::size_t t = 0; t < g.values.size(); ++t)
            grad_h0.values[t] += alpha * g.values[t];
        DenseMatrix diffused = spmm(*cache.a_hat, g);
        for (std::size_t t = 0; t < diffused.values.size(); ++t)
            diffused.values[t] *= (1.0 - alpha);
        g = std::move(diffused);
    }
    for (std::size_t t = 0; t < g.values.size(); ++t) grad_h0.values[t] += g.values[t];

    if (m.hidden == 0) {
        DenseMatrix grad_w1 = matmul_at_b(cache.x_dropped, grad_h0);
        for (std::size_t t = 0; t < grad_w1.values.size(); ++t)
            m.w1.grad.values[t] += grad_w1.values[t];
        return;
    }

    DenseMatrix grad_w2 = matmul_at_b(cache.hidden_dropped, grad_h0);
    for (std::size_t t = 0; t < grad_w2.values.size(); ++t)
        m.w2.grad.values[t] += grad_w2.values[t];

    DenseMatrix grad_hidden = matmul_a_bt(grad_h0, m.w2.value);
    if (cache.training && m.dropout_rate > 0.0)
        grad_hidden = dropout_backward(grad_hidden, cache.hidden_kept, m.dropout_rate);
    DenseMatrix grad_pre = relu_backward(grad_hidden, cache.relu_active);
    DenseMatrix grad_w1 = matmul_at_b(cache.x_dropped, grad_pre);
    for (std::size_t t = 0; t < grad_w1.values.size(); ++t)
        m.w1.grad.values[t] += grad_w1.values[t];
}

// ---------------------------------------------------------------------------
// Shared training machinery
// ---------------------------------------------------------------------------

DenseMatrix h0_eval(const SgcModel& m, const DenseMatrix& x) { return matmul(x, m.w.value); }

DenseMatrix h0_eval(const AppnpModel& m, const DenseMatrix& x) {
    if (m.hidden == 0) return matmul(x, m.w1.value);
    DenseMatrix pre = matmul(x, m.w1.value);
    ReluResult relu = relu_forward(pre);
    return matmul(relu.out, m.w2.value);
}

namespace {

std::vector<int> argmax_rows(const DenseMatrix& z) {
    std::vector<int> out(z.rows);
    for (std::size_t i = 0; i < z.rows; ++i) {
        const double* zi = z.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < z.cols; ++j)
            if (zi[j] > zi[best]) best = j;  // ties keep the lowest class index
        out[i] = static_cast<int>(best);
    }
    return out;
}

std::pair<DenseMatrix, SgcCache> model_forward(const SgcModel& m, const DenseMatrix& x,
                                               const SparsePropagator& a_hat, bool, Rng&) {
    return sgc_forward(m, x, a_hat);
}

std::pair<DenseMatrix, AppnpCache> model_forward(const AppnpModel& m, const DenseMatrix& x,
                                                 const SparsePropagator& a_hat, bool training,
                                                 Rng& rng) {
    return appnp_forward(m, x, a_hat, training, rng);
}

void model_backward(SgcModel& m, const SgcCache& cache, const DenseMatrix& grad_z) {
    sgc_backward(m, cache, grad_z);
}

void model_backward(AppnpModel& m, const AppnpCache& cache, const DenseMatrix& grad_z) {
    appnp_backward(m, cache, grad_z);
}

void model_step(SgcModel& m, const TrainConfig& cfg) {
    adam_step(m.w, cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
    m.w.zero_grad();
}

void model_step(AppnpModel& m, const TrainConfig& cfg) {
    adam_step(m.w1, cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
    m.w1.zero_grad();
    if (!m.w2.empty()) {
        adam_step(m.w2, cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
        m.w2.zero_grad();
    }
}

template <class Model>
TrainOutput train_impl(Model& model, const DenseMatrix& x, const NeighborGraph& graph,
                       const std::vector<int>& labels,
                       const std::vector<std::size_t>& train_mask, const TrainConfig& cfg,
                       const DegreeProvider& degree_override) {
    validate_config(cfg, /*strict_lr=*/false);
    if (train_mask.empty()) throw std::invalid_argument("train: empty training mask");
    if (labels.size() != x.rows) throw std::invalid_argument("train: one label per node required");
    if (graph.n != x.rows) throw std::invalid_argument("train: graph size does not match features");

    SparsePropagator tilde = to_propagator_with_self_loops(graph);
    const DegreeVector deg_ctr = degree_centrality(tilde);
    const bool dynamic =
        cfg.degree_kind == DegreeKind::grande || static_cast<bool>(degree_override);

    SparsePropagator a_hat;
    if (!dynamic) a_hat = normalize_adjacency(tilde, deg_ctr);

    auto refresh = [&]() {
        DenseMatrix h0 = h0_eval(model, x);
        DegreeVector deg;
        if (degree_override) {
            deg = degree_override(tilde, h0);
        } else {
            EdgeDistanceTable table = compute_edge_distances(tilde, h0);
            std::vector<double> penalty = neighborhood_penalty(table, deg_ctr, cfg.sigma);
            deg = grande_degree(deg_ctr, penalty, cfg.sigma);
        }
        a_hat = normalize_adjacency(tilde, deg);
    };

    Rng rng(cfg.seed);
    TrainOutput out;
    out.loss_trace.reserve(cfg.epochs);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (dynamic) refresh();
        auto [z, cache] = model_forward(model, x, a_hat, /*training=*/true, rng);
        MaskedLoss ml = cross_entropy_masked(z, labels, train_mask);
        if (!std::isfinite(ml.loss))
            throw std::runtime_error("train: non-finite loss at epoch " +
                                     std::to_string(epoch + 1));
        model_backward(model, cache, ml.grad);
        model_step(model, cfg);
        out.loss_trace.push_back(ml.loss);
    }
    if (dynamic) refresh();  // leave the propagator consistent with the final weights
    out.propagator = std::move(a_hat);
    return out;
}

}  // namespace

std::vector<int> predict(const SgcModel& m, const DenseMatrix& x,
                         const SparsePropagator& a_hat) {
    return argmax_rows(sgc_forward(m, x, a_hat).first);
}

std::vector<int> predict(const AppnpModel& m, const DenseMatrix& x,
                         const SparsePropagator& a_hat) {
    Rng unused(0);
    return argmax_rows(appnp_forward(m, x, a_hat, /*training=*/false, unused).first);
}

TrainOutput train(SgcModel& m, const DenseMatrix& x, const NeighborGraph& graph,
                  const std::vector<int>& labels, const std::vector<std::size_t>& train_mask,
                  const TrainConfig& cfg, const DegreeProvider& degree_override) {
    return train_impl(m, x, graph, labels, train_mask, cfg, degree_override);
}

TrainOutput train(AppnpModel& m, const DenseMatrix& x, const NeighborGraph& graph,
                  const std::vector<int>& labels, const std::vector<std::size_t>& train_mask,
                  const TrainConfig& cfg, const DegreeProvider& degree_override) {
    return train_impl(m, x, graph, labels, train_mask, cfg, degree_override);
}

}  // namespace grande
