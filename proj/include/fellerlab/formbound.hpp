#pragma once

// Form-bound estimation for stationary fields: the largest beta with
//   sum |b|^2 phi^2 vol <= beta * <K phi, phi>
// over grid functions vanishing on the Dirichlet boundary, i.e. the top
// eigenvalue of W phi = beta K phi with W = diag(|b|^2 vol) and K the
// finite-volume stiffness matrix used by the solver.

#include "fellerlab/grid.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace feller {

struct FormBoundOptions {
    double tol = 1e-9;         // relative eigen-residual in the K norm
    int max_iter = 20000;
    std::uint64_t seed = 0;    // start vector
    double inner_tol = 1e-13;  // conjugate gradient tolerance (tensor3)
};

struct FormBoundReport {
    double beta_hat = 0.0;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> maximizer;  // unit K-norm, zero on the boundary
    std::string grid;
};

/// Radial mesh 0 = r_0 < r_1 < ... < r_n = R with Dirichlet data at r_n and
/// finite-volume cells in R^d (faces at midpoints).
struct RadialMesh {
    int d = 3;
    std::vector<double> r;

    static RadialMesh uniform(const Grid& radial_grid);
    /// r_0 = 0 and r_i = eps (R/eps)^((i-1)/(n-1)) for i = 1..n.
    static RadialMesh graded(int d, double eps, double R, int n);

    int n() const noexcept { return static_cast<int>(r.size()) - 1; }
    std::vector<double> volumes() const;  // nodes 0..n-1
    std::vector<double> fluxes() const;   // faces i+1/2, i = 0..n-1
    std::string describe() const;
};

/// Discrete quadratic-form ratio; phi is indexed like the grid (boundary values ignored).
double rayleigh(const VectorField& b, std::span<const double> phi, const Grid& grid);
double rayleigh(const RadialMesh& mesh, std::span<const double> b2, std::span<const double> phi);

/// Power iteration in the K inner product. Throws ConvergenceError past max_iter.
FormBoundReport estimate_beta(const VectorField& b, const Grid& grid, const FormBoundOptions& opts = {});
/// b2 holds |b|^2 at nodes 0..n-1 of the mesh.
FormBoundReport estimate_beta(const RadialMesh& mesh, std::span<const double> b2, const FormBoundOptions& opts = {});

/// Hardy field a x/|x|^2 on a graded mesh over [eps, R]; the drift is cut off for r < eps.
FormBoundReport hardy_beta(int d, double a, double eps, double R, int n, const FormBoundOptions& opts = {});

std::string formbound_csv_header();
std::string formbound_csv_row(const FormBoundReport& rep);

}  // namespace feller
