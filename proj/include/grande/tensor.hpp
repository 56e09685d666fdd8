#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace grande {

using Rng = std::mt19937_64;

/// Row-major dense matrix of 64-bit reals.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), values(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }

    double* row(std::size_t i) { return values.data() + i * cols; }
    const double* row(std::size_t i) const { return values.data() + i * cols; }

    bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }
    bool empty() const { return rows == 0 || cols == 0; }
};

/// Symmetric sparse matrix in CSR form. Every row carries an explicit
/// diagonal entry (self-loop), column indices are strictly increasing
/// within a row, and all stored values are finite and positive.
struct SparsePropagator {
    std::size_t n = 0;
    std::vector<std::size_t> row_offsets;  // length n+1
    std::vector<std::size_t> col_indices;  // sorted within each row
    std::vector<double> values;            // aligned with col_indices

    std::size_t row_begin(std::size_t i) const { return row_offsets[i]; }
    std::size_t row_end(std::size_t i) const { return row_offsets[i + 1]; }
    std::size_t nnz() const { return col_indices.size(); }

    static SparsePropagator identity(std::size_t n);

    /// Throws std::invalid_argument if any structural invariant is broken.
    void validate() const;
};

struct BoolMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> values;

    BoolMatrix() = default;
    BoolMatrix(std::size_t r, std::size_t c, bool fill = false)
        : rows(r), cols(c), values(r * c, fill ? 1 : 0) {}

    std::uint8_t& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
    std::uint8_t operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// Learnable matrix with its gradient accumulator and Adam moments.
/// All four matrices share one shape; the training loop zeroes `grad`
/// between epochs.
struct ParameterBlock {
    DenseMatrix value;
    DenseMatrix grad;
    DenseMatrix adam_m;
    DenseMatrix adam_v;
    std::size_t step_count = 0;

    ParameterBlock() = default;
    explicit ParameterBlock(DenseMatrix init)
        : value(std::move(init)),
          grad(value.rows, value.cols),
          adam_m(value.rows, value.cols),
          adam_v(value.rows, value.cols) {}

    void zero_grad() { std::fill(grad.values.begin(), grad.values.end(), 0.0); }
    bool empty() const { return value.empty(); }
};

// ---------------------------------------------------------------------------
// Dense and sparse products
// ---------------------------------------------------------------------------

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// aT * b without materializing the transpose.
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);

/// a * bT without materializing the transpose.
DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b);

/// out[i,:] = sum over stored entries (i,j) of value * h[j,:].
DenseMatrix spmm(const SparsePropagator& p, const DenseMatrix& h);

// ---------------------------------------------------------------------------
// Classification head
// ---------------------------------------------------------------------------

/// Row-wise softmax with per-row max subtraction.
DenseMatrix softmax_rows(const DenseMatrix& z);

struct MaskedLoss {
    double loss = 0.0;
    DenseMatrix grad;  // d loss / d z, zero outside the mask
};

/// Mean negative log-likelihood over the masked rows, with the fused
/// log-softmax gradient. Throws std::invalid_argument on an empty mask.
MaskedLoss cross_entropy_masked(const DenseMatrix& z, const std::vector<int>& labels,
                                const std::vector<std::size_t>& mask);

// ---------------------------------------------------------------------------
// Optimizer and initialization
// ---------------------------------------------------------------------------

/// One bias-corrected Adam update. Increments step_count and leaves the
/// gradient untouched (the caller clears it).
void adam_step(ParameterBlock& p, double lr, double beta1 = 0.9, double beta2 = 0.999,
               double eps = 1e-8);

/// Entries i.i.d. uniform on [-a, a] with a = sqrt(6 / (rows + cols)).
DenseMatrix glorot_init(std::size_t rows, std::size_t cols, Rng& rng);

// ---------------------------------------------------------------------------
// Elementwise layers
// ---------------------------------------------------------------------------

struct ReluResult {
    DenseMatrix out;
    BoolMatrix active;  // h > 0
};

ReluResult relu_forward(const DenseMatrix& h);
DenseMatrix relu_backward(const DenseMatrix& grad_out, const BoolMatrix& active);

struct DropoutResult {
    DenseMatrix out;
    BoolMatrix kept;
};

/// Inverted dropout: kept entries are scaled by 1/(1-rate). With
/// training=false the input passes through and no randomness is consumed.
DropoutResult dropout_apply(const DenseMatrix& h, double rate, Rng& rng, bool training);
DenseMatrix dropout_backward(const DenseMatrix& grad_out, const BoolMatrix& kept, double rate);

}  // namespace grande
