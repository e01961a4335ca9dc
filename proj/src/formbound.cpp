#include "fellerlab/formbound.hpp"

#include "fellerlab/error.hpp"
#include "fellerlab/format.hpp"
#include "fellerlab/kernels.hpp"
#include "fellerlab/random.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace feller {

namespace {

using Vec = std::vector<double>;

struct Problem {
    std::size_t size = 0;
    std::function<void(const Vec&, Vec&)> apply_w;   // W x
    std::function<void(const Vec&, Vec&)> solve_k;   // K^{-1} x
    std::function<double(const Vec&, const Vec&)> k_dot;
    std::function<bool(std::size_t)> fixed;          // Dirichlet nodes
    std::string descriptor;
};

FormBoundReport power_iteration(const Problem& p, const FormBoundOptions& opts) {
    require(opts.tol > 0.0 && opts.max_iter >= 1, "estimate_beta: tol and max_iter must be positive");
    FormBoundReport rep;
    rep.grid = p.descriptor;

    Vec phi(p.size, 0.0), w(p.size), y(p.size), r(p.size);
    for (std::size_t i = 0; i < p.size; ++i)
        if (!p.fixed(i)) phi[i] = 0.5 + rng::uniform(opts.seed, "formbound.start", i);
    const double kn0 = std::sqrt(p.k_dot(phi, phi));
    require(kn0 > 0.0, "estimate_beta: stiffness matrix is not positive definite");
    for (double& v : phi) v /= kn0;

    for (int it = 1; it <= opts.max_iter; ++it) {
        p.apply_w(phi, w);
        const double beta = kernels::omp::dot(phi, w);  // phi has unit K norm
        if (!(beta > 0.0)) {
            require(beta == 0.0, "estimate_beta: negative weighted mass");
            rep.beta_hat = 0.0;
            rep.iterations = it;
            rep.residual = 0.0;
            rep.maximizer = phi;
            return rep;
        }
        p.solve_k(w, y);
        for (std::size_t i = 0; i < p.size; ++i) r[i] = y[i] - beta * phi[i];
        const double res = std::sqrt(std::max(0.0, p.k_dot(r, r))) / beta;
        rep.beta_hat = beta;
        rep.iterations = it;
        rep.residual = res;
        if (res <= opts.tol) {
            rep.maximizer = phi;
            return rep;
        }
        const double ky = std::sqrt(p.k_dot(y, y));
        for (std::size_t i = 0; i < p.size; ++i) phi[i] = y[i] / ky;
    }
    throw ConvergenceError("estimate_beta: power iteration did not converge", rep.residual);
}

// Symmetric tridiagonal stiffness on nodes 0..n-1: K_ii = F_{i-1/2} + F_{i+1/2}, K_{i,i+1} = -F_{i+1/2}.
void solve_tridiagonal_k(const Vec& flux, const Vec& rhs, Vec& x) {
    const std::size_t n = flux.size();
    Vec cp(n), dp(n);
    double piv = flux[0];
    cp[0] = -flux[0] / piv;
    dp[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        const double diag = flux[i - 1] + flux[i];
        const double lower = -flux[i - 1];
        piv = diag - lower * cp[i - 1];
        cp[i] = i + 1 < n ? -flux[i] / piv : 0.0;
        dp[i] = (rhs[i] - lower * dp[i - 1]) / piv;
    }
    x.assign(n, 0.0);
    x[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
}

double radial_k_dot(const Vec& flux, std::span<const double> x, std::span<const double> y) {
    const std::size_t n = flux.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = (i + 1 < n ? x[i + 1] : 0.0) - x[i];
        const double dy = (i + 1 < n ? y[i + 1] : 0.0) - y[i];
        s += flux[i] * dx * dy;
    }
    return s;
}

kernels::Stencil7 tensor_stiffness(const Grid& g) {
    kernels::Stencil7 k;
    const int m = g.n() + 1;
    k.resize(m);
    const double h = g.spacing();
    for (std::size_t id = 0; id < k.size(); ++id) {
        if (g.is_boundary(id)) continue;
        k.diag[id] = 6.0 * h;
        for (auto& p : k.pull) p[id] = h;
    }
    return k;
}

// Conjugate gradient on the interior; boundary entries stay zero.
void conjugate_gradient(const kernels::Stencil7& k, const Vec& rhs, Vec& x, double tol) {
    const std::size_t n = rhs.size();
    x.assign(n, 0.0);
    Vec r = rhs, p = rhs, ap(n);
    double rr = kernels::omp::dot(r, r);
    const double stop = tol * tol * rr;
    if (rr == 0.0) return;
    for (std::size_t it = 0; it < 10 * n + 100; ++it) {
        kernels::omp::apply(k, p, ap);
        const double alpha = rr / kernels::omp::dot(p, ap);
        kernels::omp::axpy(alpha, p, x);
        kernels::omp::axpy(-alpha, ap, r);
        const double rr_new = kernels::omp::dot(r, r);
        if (rr_new <= stop) return;
        kernels::omp::xpby(r, rr_new / rr, p);
        rr = rr_new;
    }
    throw ConvergenceError("conjugate gradient did not converge", std::sqrt(rr));
}

}  // namespace

RadialMesh RadialMesh::uniform(const Grid& g) {
    require(g.kind() == GridKind::radial, "RadialMesh::uniform: radial grid required");
    RadialMesh m;
    m.d = g.dimension();
    m.r.resize(g.n() + 1);
    for (int i = 0; i <= g.n(); ++i) m.r[i] = g.coord(i);
    return m;
}

RadialMesh RadialMesh::graded(int d, double eps, double R, int n) {
    require(d >= 3, "graded mesh: d must be >= 3");
    require(eps > 0.0 && R > eps, "graded mesh: need 0 < eps < R");
    require(n >= 16, "graded mesh: n must be >= 16");
    RadialMesh m;
    m.d = d;
    m.r.resize(n + 1);
    m.r[0] = 0.0;
    const double ratio = std::log(R / eps);
    for (int i = 1; i <= n; ++i) m.r[i] = eps * std::exp(ratio * (i - 1) / (n - 1));
    m.r[n] = R;
    return m;
}

std::vector<double> RadialMesh::volumes() const {
    const double area = unit_sphere_area(d);
    std::vector<double> v(n());
    double lo = 0.0;
    for (int i = 0; i < n(); ++i) {
        const double hi = 0.5 * (r[i] + r[i + 1]);
        v[i] = area * (std::pow(hi, d) - std::pow(lo, d)) / d;
        lo = hi;
    }
    return v;
}

std::vector<double> RadialMesh::fluxes() const {
    const double area = unit_sphere_area(d);
    std::vector<double> f(n());
    for (int i = 0; i < n(); ++i) {
        const double face = 0.5 * (r[i] + r[i + 1]);
        f[i] = area * std::pow(face, d - 1) / (r[i + 1] - r[i]);
    }
    return f;
}

std::string RadialMesh::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "radial_mesh(d=" << d << ";r1=" << (r.size() > 1 ? r[1] : 0.0) << ";R=" << r.back() << ";n=" << n() << ")";
    return os.str();
}

double rayleigh(const RadialMesh& mesh, std::span<const double> b2, std::span<const double> phi) {
    const auto vol = mesh.volumes();
    const auto flux = mesh.fluxes();
    require(b2.size() >= vol.size() && phi.size() >= vol.size(), "rayleigh: sample size mismatch");
    double num = 0.0;
    for (std::size_t i = 0; i < vol.size(); ++i) num += b2[i] * vol[i] * phi[i] * phi[i];
    const double den = radial_k_dot(flux, phi.first(vol.size()), phi.first(vol.size()));
    require(den > 0.0, "rayleigh: phi has zero stiffness norm");
    return num / den;
}

double rayleigh(const VectorField& b, std::span<const double> phi, const Grid& grid) {
    require(b.nodes() == grid.size() && phi.size() == grid.size(), "rayleigh: size mismatch with grid");
    const auto mag = b.magnitude();
    if (grid.kind() == GridKind::radial) {
        std::vector<double> b2(grid.n());
        for (int i = 0; i < grid.n(); ++i) b2[i] = mag[i] * mag[i];
        return rayleigh(RadialMesh::uniform(grid), b2, phi);
    }
    Vec x(phi.begin(), phi.end());
    for (std::size_t i = 0; i < x.size(); ++i)
        if (grid.is_boundary(i)) x[i] = 0.0;
    const auto k = tensor_stiffness(grid);
    Vec kx(x.size());
    kernels::omp::apply(k, x, kx);
    const double den = kernels::omp::dot(x, kx);
    require(den > 0.0, "rayleigh: phi has zero stiffness norm");
    double num = 0.0;
    const auto w = grid.weights();
    for (std::size_t i = 0; i < x.size(); ++i) num += mag[i] * mag[i] * w[i] * x[i] * x[i];
    return num / den;
}

FormBoundReport estimate_beta(const RadialMesh& mesh, std::span<const double> b2, const FormBoundOptions& opts) {
    const auto vol = mesh.volumes();
    const auto flux = mesh.fluxes();
    const std::size_t n = vol.size();
    require(b2.size() == n, "estimate_beta: need |b|^2 at nodes 0..n-1");
    Vec wdiag(n);
    for (std::size_t i = 0; i < n; ++i) {
        require(std::isfinite(b2[i]) && b2[i] >= 0.0, "estimate_beta: |b|^2 samples must be finite");
        wdiag[i] = b2[i] * vol[i];
    }
    Problem p;
    p.size = n;
    p.apply_w = [&](const Vec& x, Vec& y) {
        for (std::size_t i = 0; i < n; ++i) y[i] = wdiag[i] * x[i];
    };
    p.solve_k = [&](const Vec& x, Vec& y) { solve_tridiagonal_k(flux, x, y); };
    p.k_dot = [&](const Vec& x, const Vec& y) { return radial_k_dot(flux, x, y); };
    p.fixed = [](std::size_t) { return false; };
    p.descriptor = mesh.describe();
    auto rep = power_iteration(p, opts);
    rep.maximizer.push_back(0.0);  // Dirichlet node
    return rep;
}

FormBoundReport estimate_beta(const VectorField& b, const Grid& grid, const FormBoundOptions& opts) {
    require(b.nodes() == grid.size(), "estimate_beta: drift samples do not match the grid");
    const auto mag = b.magnitude();
    if (grid.kind() == GridKind::radial) {
        std::vector<double> b2(grid.n());
        for (int i = 0; i < grid.n(); ++i) b2[i] = mag[i] * mag[i];
        auto rep = estimate_beta(RadialMesh::uniform(grid), b2, opts);
        rep.grid = grid.describe();
        return rep;
    }
    const auto k = tensor_stiffness(grid);
    const auto w = grid.weights();
    const std::size_t n = grid.size();
    Vec wdiag(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (grid.is_boundary(i)) continue;
        require(std::isfinite(mag[i]), "estimate_beta: drift samples must be finite");
        wdiag[i] = mag[i] * mag[i] * w[i];
    }
    Problem p;
    p.size = n;
    p.apply_w = [&](const Vec& x, Vec& y) {
        for (std::size_t i = 0; i < n; ++i) y[i] = wdiag[i] * x[i];
    };
    p.solve_k = [&](const Vec& x, Vec& y) { conjugate_gradient(k, x, y, opts.inner_tol); };
    Vec scratch(n);
    p.k_dot = [&](const Vec& x, const Vec& y) {
        kernels::omp::apply(k, y, scratch);
        return kernels::omp::dot(x, scratch);
    };
    p.fixed = [&](std::size_t i) { return grid.is_boundary(i); };
    p.descriptor = grid.describe();
    return power_iteration(p, opts);
}

FormBoundReport hardy_beta(int d, double a, double eps, double R, int n, const FormBoundOptions& opts) {
    const auto mesh = RadialMesh::graded(d, eps, R, n);
    std::vector<double> b2(mesh.n(), 0.0);
    for (int i = 1; i < mesh.n(); ++i) b2[i] = a * a / (mesh.r[i] * mesh.r[i]);
    return estimate_beta(mesh, b2, opts);
}

std::string formbound_csv_header() { return "beta_hat,iterations,residual,grid"; }

std::string formbound_csv_row(const FormBoundReport& rep) {
    return fmt_double(rep.beta_hat) + "," + std::to_string(rep.iterations) + "," + fmt_double(rep.residual) + "," +
           rep.grid;
}

}  // namespace feller
