#include "grande/degree.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace grande {

namespace {

// Exponent magnitudes below this are indistinguishable from zero for
// every tolerance this artifact guarantees; flushing them makes the
// sigma -> infinity limit of the penalty land exactly on 1.
constexpr double kNegligibleExponent = 1e-8;

}  // namespace

DegreeVector degree_centrality(const SparsePropagator& p) {
    DegreeVector deg;
    deg.n = p.n;
    deg.kind = DegreeKind::centrality;
    deg.values.resize(p.n);
    for (std::size_t i = 0; i < p.n; ++i)
        deg.values[i] = static_cast<double>(p.row_end(i) - p.row_begin(i));
    return deg;
}

EdgeDistanceTable compute_edge_distances(const SparsePropagator& p, const DenseMatrix& h) {
    if (h.rows != p.n)
        throw std::invalid_argument("compute_edge_distances: representation rows (" +
                                    std::to_string(h.rows) + ") must match node count (" +
                                    std::to_string(p.n) + ")");
    EdgeDistanceTable table;
    table.n = p.n;
    table.row_offsets = p.row_offsets;
    table.col_indices = p.col_indices;
    table.raw.resize(p.nnz());
    table.normalized.resize(p.nnz());

    for (std::size_t q = 0; q < p.n; ++q) {
        const double* hq = h.row(q);
        for (std::size_t e = p.row_begin(q); e < p.row_end(q); ++e) {
            const std::size_t i = p.col_indices[e];
            if (i == q) {
                table.raw[e] = 0.0;
                continue;
            }
            const double* hi = h.row(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < h.cols; ++j) {
                const double d = hq[j] - hi[j];
                acc += d * d;
            }
            table.raw[e] = std::sqrt(acc);
        }
    }

    double lo = 0.0;
    double hi = 0.0;
    if (!table.raw.empty()) {
        lo = table.raw[0];
        hi = table.raw[0];
        for (double v : table.raw) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi == lo) {
        // Degenerate spread: all pairs equally far, define rho' = 0.
        std::fill(table.normalized.begin(), table.normalized.end(), 0.0);
    } else {
        const double span = hi - lo;
        for (std::size_t e = 0; e < table.raw.size(); ++e)
            table.normalized[e] = (table.raw[e] - lo) / span;
    }
    return table;
}

double gaussian_kernel(double rho_norm, double sigma) {
    if (sigma <= 0.0)
        throw std::invalid_argument("gaussian_kernel: sigma must be positive, got " +
                                    std::to_string(sigma));
    const double exponent = rho_norm * rho_norm / sigma;
    if (exponent < kNegligibleExponent) return 1.0;
    return std::exp(-exponent);
}

std::vector<double> neighborhood_penalty(const EdgeDistanceTable& table,
                                         const DegreeVector& deg_ctr, double sigma) {
    if (deg_ctr.n != table.n)
        throw std::invalid_argument("neighborhood_penalty: table and degrees disagree on n");
    if (sigma <= 0.0)
        throw std::invalid_argument("neighborhood_penalty: sigma must be positive");
    std::vector<double> penalty(table.n);
    for (std::size_t q = 0; q < table.n; ++q) {
        double sum = 0.0;
        for (std::size_t e = table.row_begin(q); e < table.row_end(q); ++e)
            sum += 1.0 / gaussian_kernel(table.normalized[e], sigma);
        // deg_ctr >= 1 is guaranteed by the mandatory self-loop.
        penalty[q] = sum / deg_ctr.values[q];
    }
    return penalty;
}

DegreeVector grande_degree(const DegreeVector& deg_ctr, const std::vector<double>& penalty,
                           double sigma) {
    if (deg_ctr.values.size() != penalty.size())
        throw std::invalid_argument("grande_degree: length mismatch");
    DegreeVector deg;
    deg.n = deg_ctr.n;
    deg.kind = DegreeKind::grande;
    deg.sigma = sigma;
    deg.values.resize(penalty.size());
    for (std::size_t q = 0; q < penalty.size(); ++q)
        deg.values[q] = deg_ctr.values[q] + penalty[q];
    return deg;
}

SparsePropagator normalize_adjacency(const SparsePropagator& p, const DegreeVector& deg) {
    if (deg.n != p.n)
        throw std::invalid_argument("normalize_adjacency: degree length mismatch");
    for (std::size_t i = 0; i < p.n; ++i) {
        const double d = deg.values[i];
        if (!(d > 0.0) || !std::isfinite(d))
            throw std::invalid_argument("normalize_adjacency: nonpositive degree at node " +
                                        std::to_string(i));
    }
    SparsePropagator out;
    out.n = p.n;
    out.row_offsets = p.row_offsets;
    out.col_indices = p.col_indices;
    out.values.resize(p.nnz());
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t e = p.row_begin(i); e < p.row_end(i); ++e)
            out.values[e] = 1.0 / std::sqrt(deg.values[i] * deg.values[p.col_indices[e]]);
    return out;
}

}  // namespace grande
