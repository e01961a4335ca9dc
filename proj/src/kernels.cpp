#include "fellerlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace feller::kernels {

void Stencil7::resize(int nodes_per_axis) {
    m = nodes_per_axis;
    const std::size_t n = static_cast<std::size_t>(m) * m * m;
    diag.assign(n, 1.0);
    for (auto& p : pull) p.assign(n, 0.0);
}

namespace {

inline double pow_abs(double x, double p) {
    const double a = std::abs(x);
    if (p == 2.0) return a * a;
    if (p == 1.0) return a;
    return std::pow(a, p);
}

// Row update shared by the Gauss-Seidel kernels and the operator apply.
inline double neighbour_sum(const Stencil7& op, std::span<const double> x, int i, int j, int k,
                            std::size_t id) {
    const int m = op.m;
    const std::size_t sx = static_cast<std::size_t>(m) * m, sy = m;
    double s = 0.0;
    if (i > 0) s += op.pull[0][id] * x[id - sx];
    if (i < m - 1) s += op.pull[1][id] * x[id + sx];
    if (j > 0) s += op.pull[2][id] * x[id - sy];
    if (j < m - 1) s += op.pull[3][id] * x[id + sy];
    if (k > 0) s += op.pull[4][id] * x[id - 1];
    if (k < m - 1) s += op.pull[5][id] * x[id + 1];
    return s;
}

inline double convolve1_at(const ConvolutionKernel1& k, std::span<const double> in, int components,
                           std::size_t n, std::size_t node, int c) {
    double acc = 0.0, mass = 0.0;
    for (int o = -k.radius; o <= k.radius; ++o) {
        const auto j = static_cast<long long>(node) + o;
        if (j < 0 || j >= static_cast<long long>(n)) continue;
        const double w = k.weights[o + k.radius];
        acc += w * in[static_cast<std::size_t>(j) * components + c];
        mass += w;
    }
    return mass > 0.0 ? acc / mass : 0.0;
}

inline void convolve3_at(const ConvolutionKernel3& k, int m, std::span<const double> in, int components,
                         int i, int j, int l, std::span<double> out_node) {
    double mass = 0.0;
    for (int c = 0; c < components; ++c) out_node[c] = 0.0;
    for (std::size_t q = 0; q < k.offsets.size(); ++q) {
        const int a = i + k.offsets[q][0], b = j + k.offsets[q][1], e = l + k.offsets[q][2];
        if (a < 0 || b < 0 || e < 0 || a >= m || b >= m || e >= m) continue;
        const std::size_t id = (static_cast<std::size_t>(a) * m + b) * m + e;
        const double w = k.weights[q];
        for (int c = 0; c < components; ++c) out_node[c] += w * in[id * components + c];
        mass += w;
    }
    if (mass > 0.0)
        for (int c = 0; c < components; ++c) out_node[c] /= mass;
}

std::size_t block_count(std::size_t n) { return (n + kReductionBlock - 1) / kReductionBlock; }

// Deterministic blocked reduction: each block is summed serially, blocks are
// computed in parallel and combined in block order.
template <class Term>
double blocked_sum(std::size_t n, Term term) {
    const std::size_t nb = block_count(n);
    std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
        const std::size_t hi = std::min(n, lo + kReductionBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[b] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// serial reference
// ---------------------------------------------------------------------------
namespace serial {

double sum(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double weighted_power_sum(std::span<const double> w, std::span<const double> x, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * pow_abs(x[i], p);
    return s;
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

double min_value(std::span<const double> x) {
    double m = std::numeric_limits<double>::infinity();
    for (double v : x) m = std::min(m, v);
    return m;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void xpby(std::span<const double> x, double b, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + b * y[i];
}

void apply(const Stencil7& op, std::span<const double> x, std::span<double> y) {
    const int m = op.m;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const std::size_t id = (static_cast<std::size_t>(i) * m + j) * m + k;
                y[id] = op.diag[id] * x[id] - neighbour_sum(op, x, i, j, k, id);
            }
}

double residual_max(const Stencil7& op, std::span<const double> x, std::span<const double> rhs) {
    const int m = op.m;
    double r = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const std::size_t id = (static_cast<std::size_t>(i) * m + j) * m + k;
                r = std::max(r, std::abs(rhs[id] - op.diag[id] * x[id] + neighbour_sum(op, x, i, j, k, id)));
            }
    return r;
}

void red_black_sweep(const Stencil7& op, std::span<const double> rhs, std::span<double> x, int color) {
    const int m = op.m;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = (i + j + color) & 1; k < m; k += 2) {
                const std::size_t id = (static_cast<std::size_t>(i) * m + j) * m + k;
                x[id] = (rhs[id] + neighbour_sum(op, x, i, j, k, id)) / op.diag[id];
            }
}

void convolve3(const ConvolutionKernel3& k, int m, std::span<const double> in, int components,
               std::span<double> out) {
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int l = 0; l < m; ++l) {
                const std::size_t id = (static_cast<std::size_t>(i) * m + j) * m + l;
                convolve3_at(k, m, in, components, i, j, l, out.subspan(id * components, components));
            }
}

void convolve1(const ConvolutionKernel1& k, std::span<const double> in, int components,
               std::span<double> out) {
    const std::size_t n = in.size() / components;
    for (std::size_t node = 0; node < n; ++node)
        for (int c = 0; c < components; ++c)
            out[node * components + c] = convolve1_at(k, in, components, n, node, c);
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP
// ---------------------------------------------------------------------------
namespace omp {

double sum(std::span<const double> x) {
    return blocked_sum(x.size(), [&](std::size_t i) { return x[i]; });
}

double dot(std::span<const double> x, std::span<const double> y) {
    return blocked_sum(x.size(), [&](std::size_t i) { return x[i] * y[i]; });
}

double weighted_power_sum(std::span<const double> w, std::span<const double> x, double p) {
    return blocked_sum(x.size(), [&](std::size_t i) { return w[i] * pow_abs(x[i], p); });
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
    const auto n = static_cast<long long>(x.size());
#pragma omp parallel for reduction(max : m) schedule(static)
    for (long long i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

double min_value(std::span<const double> x) {
    double m = std::numeric_limits<double>::infinity();
    const auto n = static_cast<long long>(x.size());
#pragma omp parallel for reduction(min : m) schedule(static)
    for (long long i = 0; i < n; ++i) m = std::min(m, x[i]);
    return m;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    const auto n = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby(std::span<const double> x, double b, std::span<double> y) {
    const auto n = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

void apply(const Stencil7& op, std::span<const double> x, std::span<double> y) {
    const int m = op.m;
#pragma omp parallel for collapse(2) schedule(static)
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const std::size_t id = (static_cast<std::size_t>(i) * m + j) * m + k;
                y[id] = op.diag[id] * x[id] - neighbour_sum(op, x, i, j, k, id);
            }
}

double residual_max(const Stencil7& op, std::span<const double> x, std::span<const double> rhs) {
    const int m = op.m;
    double r = 0.0;
#pragma omp parallel for collapse(2) reduction(max : r) schedule(static)
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const std::size_t id = (static_cast<std::size_t>(i) * m + j) * m + k;
                r = std::max(r, std::abs(rhs[id] - op.diag[id] * x[id] + neighbour_sum(op, x, i, j, k, id)));
            }
    return r;
}

void red_black_sweep(const Stencil7& op, std::span<const double> rhs, std::span<double> x, int color) {
    const int m = op.m;
#pragma omp parallel for collapse(2) schedule(static)
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = (i + j + color) & 1; k < m; k += 2) {
                const std::size_t id = (static_cast<std::size_t>(i) * m + j) * m + k;
                x[id] = (rhs[id] + neighbour_sum(op, x, i, j, k, id)) / op.diag[id];
            }
}

void convolve3(const ConvolutionKernel3& k, int m, std::span<const double> in, int components,
               std::span<double> out) {
#pragma omp parallel for collapse(2) schedule(static)
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int l = 0; l < m; ++l) {
                const std::size_t id = (static_cast<std::size_t>(i) * m + j) * m + l;
                convolve3_at(k, m, in, components, i, j, l, out.subspan(id * components, components));
            }
}

void convolve1(const ConvolutionKernel1& k, std::span<const double> in, int components,
               std::span<double> out) {
    const std::size_t n = in.size() / components;
#pragma omp parallel for schedule(static)
    for (long long node = 0; node < static_cast<long long>(n); ++node)
        for (int c = 0; c < components; ++c)
            out[node * components + c] = convolve1_at(k, in, components, n, node, c);
}

}  // namespace omp
}  // namespace feller::kernels
