#include "grande/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace grande {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

SparsePropagator SparsePropagator::identity(std::size_t n) {
    SparsePropagator p;
    p.n = n;
    p.row_offsets.resize(n + 1);
    p.col_indices.resize(n);
    p.values.assign(n, 1.0);
    for (std::size_t i = 0; i <= n; ++i) p.row_offsets[i] = i;
    for (std::size_t i = 0; i < n; ++i) p.col_indices[i] = i;
    return p;
}

void SparsePropagator::validate() const {
    require(row_offsets.size() == n + 1, "propagator: row_offsets must have length n+1");
    require(row_offsets.front() == 0 && row_offsets.back() == col_indices.size(),
            "propagator: row_offsets endpoints inconsistent");
    require(col_indices.size() == values.size(), "propagator: values misaligned");
    for (std::size_t i = 0; i < n; ++i) {
        require(row_offsets[i] <= row_offsets[i + 1], "propagator: row_offsets not monotone");
        bool has_diag = false;
        for (std::size_t e = row_begin(i); e < row_end(i); ++e) {
            require(col_indices[e] < n, "propagator: column index out of range");
            if (e > row_begin(i))
                require(col_indices[e - 1] < col_indices[e],
                        "propagator: columns not strictly increasing in row " + std::to_string(i));
            if (col_indices[e] == i) has_diag = true;
            require(std::isfinite(values[e]) && values[e] > 0.0,
                    "propagator: values must be finite and positive");
        }
        require(has_diag, "propagator: missing diagonal entry in row " + std::to_string(i));
    }
    // Structural symmetry: (i,j) stored implies (j,i) stored.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = row_begin(i); e < row_end(i); ++e) {
            std::size_t j = col_indices[e];
            auto lo = col_indices.begin() + static_cast<std::ptrdiff_t>(row_begin(j));
            auto hi = col_indices.begin() + static_cast<std::ptrdiff_t>(row_end(j));
            require(std::binary_search(lo, hi, i),
                    "propagator: entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") has no transpose partner");
        }
    }
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.cols == b.rows, "matmul: inner dimensions differ (" + std::to_string(a.cols) +
                                  " vs " + std::to_string(b.rows) + ")");
    DenseMatrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double* oi = out.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = ai[k];
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) oi[j] += aik * bk[j];
        }
    }
    return out;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.rows == b.rows, "matmul_at_b: row counts differ");
    DenseMatrix out(a.cols, b.cols);
    for (std::size_t k = 0; k < a.rows; ++k) {
        const double* ak = a.row(k);
        const double* bk = b.row(k);
        for (std::size_t i = 0; i < a.cols; ++i) {
            const double aki = ak[i];
            double* oi = out.row(i);
            for (std::size_t j = 0; j < b.cols; ++j) oi[j] += aki * bk[j];
        }
    }
    return out;
}

DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b) {
    require(a.cols == b.cols, "matmul_a_bt: column counts differ");
    DenseMatrix out(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double* oi = out.row(i);
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* bj = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += ai[k] * bj[k];
            oi[j] = acc;
        }
    }
    return out;
}

DenseMatrix spmm(const SparsePropagator& p, const DenseMatrix& h) {
    require(p.n == h.rows, "spmm: propagator size " + std::to_string(p.n) +
                               " does not match matrix rows " + std::to_string(h.rows));
    DenseMatrix out(p.n, h.cols);
    for (std::size_t i = 0; i < p.n; ++i) {
        double* oi = out.row(i);
        for (std::size_t e = p.row_begin(i); e < p.row_end(i); ++e) {
            const double w = p.values[e];
            const double* hj = h.row(p.col_indices[e]);
            for (std::size_t j = 0; j < h.cols; ++j) oi[j] += w * hj[j];
        }
    }
    return out;
}

DenseMatrix softmax_rows(const DenseMatrix& z) {
    DenseMatrix out(z.rows, z.cols);
    for (std::size_t i = 0; i < z.rows; ++i) {
        const double* zi = z.row(i);
        double* oi = out.row(i);
        double m = zi[0];
        for (std::size_t j = 1; j < z.cols; ++j) m = std::max(m, zi[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < z.cols; ++j) {
            oi[j] = std::exp(zi[j] - m);
            sum += oi[j];
        }
        for (std::size_t j = 0; j < z.cols; ++j) oi[j] /= sum;
    }
    return out;
}

MaskedLoss cross_entropy_masked(const DenseMatrix& z, const std::vector<int>& labels,
                                const std::vector<std::size_t>& mask) {
    require(!mask.empty(), "cross_entropy_masked: empty mask");
    require(labels.size() == z.rows, "cross_entropy_masked: one label per row required");
    MaskedLoss result;
    result.grad = DenseMatrix(z.rows, z.cols);
    const double inv_count = 1.0 / static_cast<double>(mask.size());
    double total = 0.0;
    for (std::size_t node : mask) {
        require(node < z.rows, "cross_entropy_masked: mask index out of range");
        const int label = labels[node];
        require(label >= 0 && static_cast<std::size_t>(label) < z.cols,
                "cross_entropy_masked: label out of range for node " + std::to_string(node));
        const double* zi = z.row(node);
        double* gi = result.grad.row(node);
        double m = zi[0];
        for (std::size_t j = 1; j < z.cols; ++j) m = std::max(m, zi[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < z.cols; ++j) sum += std::exp(zi[j] - m);
        const double log_sum = std::log(sum);
        total += -(zi[static_cast<std::size_t>(label)] - m - log_sum);
        for (std::size_t j = 0; j < z.cols; ++j) {
            const double p = std::exp(zi[j] - m - log_sum);
            gi[j] = (p - (static_cast<std::size_t>(label) == j ? 1.0 : 0.0)) * inv_count;
        }
    }
    result.loss = total * inv_count;
    return result;
}

void adam_step(ParameterBlock& p, double lr, double beta1, double beta2, double eps) {
    require(lr >= 0.0, "adam_step: negative learning rate");
    require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
            "adam_step: betas must lie in [0,1)");
    require(eps > 0.0, "adam_step: eps must be positive");
    if (p.empty()) return;
    p.step_count += 1;
    const double t = static_cast<double>(p.step_count);
    const double corr1 = 1.0 - std::pow(beta1, t);
    const double corr2 = 1.0 - std::pow(beta2, t);
    for (std::size_t k = 0; k < p.value.values.size(); ++k) {
        const double g = p.grad.values[k];
        double& m = p.adam_m.values[k];
        double& v = p.adam_v.values[k];
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g * g;
        const double m_hat = m / corr1;
        const double v_hat = v / corr2;
        p.value.values[k] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

DenseMatrix glorot_init(std::size_t rows, std::size_t cols, Rng& rng) {
    require(rows > 0 && cols > 0, "glorot_init: empty shape");
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-a, a);
    DenseMatrix out(rows, cols);
    for (double& v : out.values) v = dist(rng);
    return out;
}

ReluResult relu_forward(const DenseMatrix& h) {
    ReluResult r;
    r.out = DenseMatrix(h.rows, h.cols);
    r.active = BoolMatrix(h.rows, h.cols);
    for (std::size_t k = 0; k < h.values.size(); ++k) {
        const bool on = h.values[k] > 0.0;
        r.active.values[k] = on ? 1 : 0;
        r.out.values[k] = on ? h.values[k] : 0.0;
    }
    return r;
}

DenseMatrix relu_backward(const DenseMatrix& grad_out, const BoolMatrix& active) {
    require(grad_out.rows == active.rows && grad_out.cols == active.cols,
            "relu_backward: shape mismatch");
    DenseMatrix grad_in(grad_out.rows, grad_out.cols);
    for (std::size_t k = 0; k < grad_out.values.size(); ++k)
        grad_in.values[k] = active.values[k] ? grad_out.values[k] : 0.0;
    return grad_in;
}

DropoutResult dropout_apply(const DenseMatrix& h, double rate, Rng& rng, bool training) {
    require(rate >= 0.0 && rate < 1.0, "dropout_apply: rate must lie in [0,1)");
    DropoutResult r;
    if (!training || rate == 0.0) {
        r.out = h;
        r.kept = BoolMatrix(h.rows, h.cols, true);
        return r;
    }
    r.out = DenseMatrix(h.rows, h.cols);
    r.kept = BoolMatrix(h.rows, h.cols);
    const double scale = 1.0 / (1.0 - rate);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (std::size_t k = 0; k < h.values.size(); ++k) {
        const bool keep = dist(rng) >= rate;
        r.kept.values[k] = keep ? 1 : 0;
        r.out.values[k] = keep ? h.values[k] * scale : 0.0;
    }
    return r;
}

DenseMatrix dropout_backward(const DenseMatrix& grad_out, const BoolMatrix& kept, double rate) {
    require(grad_out.rows == kept.rows && grad_out.cols == kept.cols,
            "dropout_backward: shape mismatch");
    DenseMatrix grad_in(grad_out.rows, grad_out.cols);
    const double scale = 1.0 / (1.0 - rate);
    for (std::size_t k = 0; k < grad_out.values.size(); ++k)
        grad_in.values[k] = kept.values[k] ? grad_out.values[k] * scale : 0.0;
    return grad_in;
}

}  // namespace grande
