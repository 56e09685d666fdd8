#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "grande/degree.hpp"
#include "grande/graph.hpp"
#include "grande/tensor.hpp"

namespace grande {

enum class ModelKind { sgc, appnp };

/// Full training configuration. Model hyperparameters that do not apply
/// to the selected model kind are ignored.
struct TrainConfig {
    std::size_t epochs = 200;
    double lr = 1e-3;
    DegreeKind degree_kind = DegreeKind::centrality;
    double sigma = 0.2;
    std::uint64_t seed = 1;

    ModelKind model = ModelKind::sgc;
    std::size_t k_steps = 2;    // diffusion depth K
    double alpha = 0.1;         // APPNP teleport probability
    std::size_t hidden = 256;   // APPNP hidden width; 0 selects a single linear map
    double dropout = 0.5;       // APPNP feature dropout rate

    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

/// Throws std::invalid_argument when a field violates its contract.
/// `strict_lr` additionally rejects lr == 0 (allowed only in tests).
void validate_config(const TrainConfig& cfg, bool strict_lr = true);

// ---------------------------------------------------------------------------
// SGC: Z = A_hat^K (X W)
// ---------------------------------------------------------------------------

struct SgcModel {
    ParameterBlock w;  // d x c
    std::size_t k_steps = 2;

    static SgcModel make(std::size_t d, std::size_t c, std::size_t k_steps, Rng& rng);
};

struct SgcCache {
    const DenseMatrix* x = nullptr;
    const SparsePropagator* a_hat = nullptr;
    std::size_t k_steps = 0;
};

std::pair<DenseMatrix, SgcCache> sgc_forward(const SgcModel& m, const DenseMatrix& x,
                                             const SparsePropagator& a_hat);

/// Accumulates d loss / d W into m.w.grad. Uses the symmetry of A_hat so
/// the adjoint diffusion reuses spmm.
void sgc_backward(SgcModel& m, const SgcCache& cache, const DenseMatrix& grad_z);

// ---------------------------------------------------------------------------
// APPNP: H^(k) = (1-alpha) A_hat H^(k-1) + alpha H^(0), Z = H^(K)
// ---------------------------------------------------------------------------

/// Two-layer perceptron head (dropout -> linear -> relu -> dropout ->
/// linear) followed by teleport propagation. hidden == 0 degrades to a
/// single linear map (w1 is d x c, w2 unused).
struct AppnpModel {
    ParameterBlock w1;
    ParameterBlock w2;
    std::size_t hidden = 256;
    std::size_t k_steps = 10;
    double alpha = 0.1;
    double dropout_rate = 0.5;

    static AppnpModel make(std::size_t d, std::size_t c, std::size_t hidden,
                           std::size_t k_steps, double alpha, double dropout, Rng& rng);
};

struct AppnpCache {
    DenseMatrix x_dropped;      // input after the first dropout
    BoolMatrix relu_active;     // hidden path only
    DenseMatrix hidden_dropped; // relu output after the second dropout
    BoolMatrix hidden_kept;
    const SparsePropagator* a_hat = nullptr;
    bool training = false;
};

/// K teleport iterations of the propagation recursion on a given H^(0).
DenseMatrix appnp_propagate(const DenseMatrix& h0, const SparsePropagator& a_hat, double alpha,
                            std::size_t k_steps);

std::pair<DenseMatrix, AppnpCache> appnp_forward(const AppnpModel& m, const DenseMatrix& x,
                                                 const SparsePropagator& a_hat, bool training,
                                                 Rng& rng);

/// Accumulates gradients for both weight matrices into the model.
void appnp_backward(AppnpModel& m, const AppnpCache& cache, const DenseMatrix& grad_z);

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

/// Representation that feeds the per-epoch distance table: XW for SGC,
/// the MLP output in evaluation mode for APPNP.
DenseMatrix h0_eval(const SgcModel& m, const DenseMatrix& x);
DenseMatrix h0_eval(const AppnpModel& m, const DenseMatrix& x);

std::vector<int> predict(const SgcModel& m, const DenseMatrix& x, const SparsePropagator& a_hat);
std::vector<int> predict(const AppnpModel& m, const DenseMatrix& x,
                         const SparsePropagator& a_hat);

/// Test hook: replaces the per-epoch degree computation. Receives the
/// self-looped adjacency and the current evaluation-mode H^(0).
using DegreeProvider =
    std::function<DegreeVector(const SparsePropagator& tilde, const DenseMatrix& h0)>;

struct TrainOutput {
    std::vector<double> loss_trace;   // one entry per epoch
    SparsePropagator propagator;      // normalized A_hat consistent with the final weights
};

/// Runs cfg.epochs epochs of full-graph training. Under
/// degree_kind == grande the normalized adjacency is refreshed at the
/// start of every epoch from the current weights; under centrality it is
/// built once. Throws std::runtime_error naming the epoch if the loss
/// turns non-finite.
TrainOutput train(SgcModel& m, const DenseMatrix& x, const NeighborGraph& graph,
                  const std::vector<int>& labels, const std::vector<std::size_t>& train_mask,
                  const TrainConfig& cfg, const DegreeProvider& degree_override = {});
TrainOutput train(AppnpModel& m, const DenseMatrix& x, const NeighborGraph& graph,
                  const std::vector<int>& labels, const std::vector<std::size_t>& train_mask,
                  const TrainConfig& cfg, const DegreeProvider& degree_override = {});

}  // namespace grande
