#pragma once

// Data-parallel grid kernels. Every kernel exists twice: a plain serial
// reference (kernels::serial) kept for testing and benchmarking, and the
// OpenMP version (kernels::omp) used by the library. Reductions in the
// OpenMP versions use fixed-size blocks combined in block order, so their
// result does not depend on the thread count.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace feller::kernels {

inline constexpr std::size_t kReductionBlock = 4096;

/// Seven-point operator on an (m x m x m) node lattice:
///   (M x)_i = diag_i x_i - sum_k pull[k]_i x_{nbr_k(i)}
/// with neighbours ordered -x, +x, -y, +y, -z, +z. Pull coefficients are
/// nonnegative for M-matrices; they are ignored across the lattice edge.
struct Stencil7 {
    int m = 0;  // nodes per axis
    std::vector<double> diag;
    std::array<std::vector<double>, 6> pull;

    std::size_t size() const noexcept { return diag.size(); }
    void resize(int nodes_per_axis);
};

/// Kernel on integer offsets (di, dj, dk) with weights, for 3-D convolution.
struct ConvolutionKernel3 {
    std::vector<std::array<int, 3>> offsets;
    std::vector<double> weights;
};

/// 1-D kernel on offsets -radius..radius.
struct ConvolutionKernel1 {
    int radius = 0;
    std::vector<double> weights;  // size 2 radius + 1
};

namespace serial {
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
/// sum_i w_i |x_i|^p
double weighted_power_sum(std::span<const double> w, std::span<const double> x, double p);
double max_abs(std::span<const double> x);
double min_value(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);  // y += a x
void xpby(std::span<const double> x, double b, std::span<double> y);  // y = x + b y
void apply(const Stencil7& op, std::span<const double> x, std::span<double> y);
double residual_max(const Stencil7& op, std::span<const double> x, std::span<const double> rhs);
/// One Gauss-Seidel half sweep over nodes with (i + j + k) % 2 == color.
void red_black_sweep(const Stencil7& op, std::span<const double> rhs, std::span<double> x, int color);
/// Convolution renormalized over in-lattice offsets (unit mass up to the edge).
void convolve3(const ConvolutionKernel3& k, int m, std::span<const double> in, int components,
               std::span<double> out);
void convolve1(const ConvolutionKernel1& k, std::span<const double> in, int components,
               std::span<double> out);
}  // namespace serial

namespace omp {
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
/// sum_i w_i |x_i|^p
double weighted_power_sum(std::span<const double> w, std::span<const double> x, double p);
double max_abs(std::span<const double> x);
double min_value(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);  // y += a x
void xpby(std::span<const double> x, double b, std::span<double> y);  // y = x + b y
void apply(const Stencil7& op, std::span<const double> x, std::span<double> y);
double residual_max(const Stencil7& op, std::span<const double> x, std::span<const double> rhs);
/// One Gauss-Seidel half sweep over nodes with (i + j + k) % 2 == color.
void red_black_sweep(const Stencil7& op, std::span<const double> rhs, std::span<double> x, int color);
/// Convolution renormalized over in-lattice offsets (unit mass up to the edge).
void convolve3(const ConvolutionKernel3& k, int m, std::span<const double> in, int components,
               std::span<double> out);
void convolve1(const ConvolutionKernel1& k, std::span<const double> in, int components,
               std::span<double> out);
}  // namespace omp

}  // namespace feller::kernels
