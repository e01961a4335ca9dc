#pragma once

// Regularization b_m = eta_m * (1_m b): cut the field off where |b| > m,
// |x| > m or t > m, then smooth in space with a compact polynomial bump.

#include "fellerlab/drift.hpp"
#include "fellerlab/formbound.hpp"
#include "fellerlab/grid.hpp"
#include "fellerlab/solver.hpp"

#include <optional>
#include <span>
#include <vector>

namespace feller {

/// b(t, x) where |b| <= m, |x| <= m and t <= m; zero elsewhere (including the singular locus).
void truncate(const DriftField& field, double m, double t, std::span<const double> x, std::span<double> out);
std::vector<double> truncate(const DriftField& field, double m, double t, std::span<const double> x);

/// Grid samples of a field at time t: radial grids keep the component along the
/// probe ray, tensor3 grids all three components. Nodes on the locus get zero.
VectorField sample_exact(const DriftField& field, const Grid& grid, double t);
VectorField sample_truncated(const DriftField& field, double m, const Grid& grid, double t);

/// Default mollifier radius max(1/m, 2h).
double auto_width(double m, const Grid& grid);

/// Normalized weights (1 - r^2/w^2)^4 on lattice offsets with r < w.
kernels::ConvolutionKernel3 bump_kernel3(double width, double h);
kernels::ConvolutionKernel1 bump_kernel1(double width, double h);

struct MollifiedDrift {
    DriftPtr source;
    double m = 1.0;
    double width = 0.0;
    double time = 0.0;
    VectorField samples;
};

/// Slice of b_m at time t. An explicit width below 2 grid spacings is rejected.
MollifiedDrift mollify(DriftPtr field, double m, const Grid& grid, double t,
                       std::optional<double> width = std::nullopt);

/// Solver drift sources: b_m sampled per step, or the raw field with zero on the locus.
DriftSource mollified_source(DriftPtr field, double m, const Grid& grid, std::optional<double> width = std::nullopt);
DriftSource exact_source(DriftPtr field, const Grid& grid);

/// Spherical shell r_lo <= |x| <= r_hi.
struct Shell {
    double r_lo = 0.0;
    double r_hi = 1.0;
};

/// Discrete L^2(shell x times) distance between b_m and b, time-averaged over the
/// given slices. Nodes on the singular locus are skipped (a null set).
double c1_error(const DriftField& field, double m, const Grid& grid, const Shell& region,
                std::span<const double> times, std::optional<double> width = std::nullopt);

/// beta_hat(b_m slice) - (beta + 1/m).
double c2_margin(const MollifiedDrift& moll, const Grid& grid, double beta, const FormBoundOptions& opts = {});

}  // namespace feller
