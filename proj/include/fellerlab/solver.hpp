#pragma once

// Implicit Euler evolution for  u_t = Laplace(u) + b . grad(u)  on a Grid,
// with first-order upwind advection. Every step matrix is an M-matrix with
// row sums >= 1, so a step maps f >= 0 to u >= 0 and never increases sup|u|.

#include "fellerlab/grid.hpp"
#include "fellerlab/kernels.hpp"
#include "fellerlab/time_profile.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace feller {

/// Per-node drift samples at a given time. Radial grids take one component
/// (the radial component along the probe ray), tensor3 grids take three.
struct DriftSource {
    bool time_dependent = false;
    std::function<VectorField(double t)> sample;
    std::string label = "zero";

    static DriftSource zero(const Grid& grid);
};

enum class Advection {
    upwind,   // M-matrix: positivity preserving and sup contractive
    /// Radial only: centered differences plus the origin row a u_rr(0), a = lim r b(r).
    /// Not an M-matrix; tracks smooth solutions that violate the maximum principle.
    centered,
};

struct SolverOptions {
    Advection advection = Advection::upwind;
    double tol = 1e-10;          // relative residual for iterative solves
    int max_sweeps = 200000;     // red-black Gauss-Seidel sweeps per step
    /// Optional damping: u_t = ... + h'(t) u with h'(t) = -damping_coef * g(t) <= 0.
    double damping_coef = 0.0;
    TimeProfile damping_g;
    bool store_states = true;    // false keeps only the first and last state
    /// Called after each step with the new state.
    std::function<void(const ScalarState&)> observer;
};

/// One implicit step  (I - dt A(t)) u_next = u.
class StepOperator {
public:
    StepOperator(const Grid& grid, double dt);

    /// Builds the matrix from drift samples (grid.vector_components() per node)
    /// and a nonnegative reaction coefficient added to -A.
    void assemble(const VectorField& drift, double reaction = 0.0, Advection scheme = Advection::upwind);

    ScalarState step(const ScalarState& state, const SolverOptions& opts = {}) const;
    /// Solves (I - dt A) x = rhs in place of x (x holds the initial guess).
    void solve(std::span<const double> rhs, std::span<double> x, const SolverOptions& opts = {}) const;

    double dt() const noexcept { return dt_; }
    const Grid& grid() const noexcept { return *grid_; }
    /// Off-diagonals <= 0 and diag >= sum |offdiag| + 1 on every row.
    bool is_m_matrix() const;
    /// Applies (I - dt A) to x.
    void apply(std::span<const double> x, std::span<double> y) const;

private:
    const Grid* grid_;
    double dt_;
    // radial: tridiagonal rows 0..n-1 (node n is Dirichlet)
    std::vector<double> lower_, diag_, upper_;
    // tensor3
    kernels::Stencil7 stencil_;
};

/// Number of steps of size dt in [s, t]; throws if (t - s)/dt is not integral to rounding.
long long step_count(double s, double t, double dt);

/// Discrete U(t, s) f with the drift frozen at each step's left endpoint.
Trajectory evolve(const DriftSource& drift, const Grid& grid, double s, double t, const ScalarState& f,
                  double dt, const SolverOptions& opts = {});

/// Zeroes boundary nodes; throws on non-finite values or size mismatch.
ScalarState make_state(const Grid& grid, double time, std::vector<double> values);
ScalarState sample_state(const Grid& grid, double time, const std::function<double(std::span<const double>)>& f);

/// Centered differences inside, second-order one-sided at the ends of each axis.
/// Radial grids return the radial derivative.
VectorField gradient(std::span<const double> values, const Grid& grid);
inline VectorField gradient(const ScalarState& s, const Grid& grid) { return gradient(s.values, grid); }

/// (sum_i w_i |u_i|^p)^(1/p) with the grid's dual-cell weights; p = inf gives max |u_i|.
double lp_norm(std::span<const double> values, const Grid& grid, double p);
inline double lp_norm(const ScalarState& s, const Grid& grid, double p) { return lp_norm(s.values, grid, p); }

/// Time composition of per-state values: trapezoid of x^p_time over [s, tau], or max for inf.
double time_norm(std::span<const double> times, std::span<const double> values, double s, double tau,
                 double p_time);

enum class NormTarget { value, gradient };

/// L^{p_time}([s, tau], L^{p_space}) norm of u (or |grad u|) along the trajectory.
double mixed_norm(const Trajectory& traj, const Grid& grid, double s, double tau, double p_time,
                  double p_space, NormTarget target = NormTarget::value);

// Trajectory export. CSV rows "time,node,value"; binary dumps are row-major
// with a self-describing header and reload bit-exactly.
void write_csv(std::ostream& os, const Trajectory& traj);
void write_binary(std::ostream& os, const Trajectory& traj, const Grid& grid);

struct LoadedTrajectory {
    GridKind kind = GridKind::radial;
    int d = 3;
    int n = 0;
    double extent = 0.0;
    double spacing = 0.0;
    Trajectory traj;
};
LoadedTrajectory read_binary(std::istream& is);

}  // namespace feller
