#include "fellerlab/solver.hpp"

#include "fellerlab/error.hpp"
#include "fellerlab/format.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

namespace feller {

namespace {

constexpr char kMagic[8] = {'F', 'L', 'T', 'R', 'A', 'J', '0', '1'};
constexpr std::uint32_t kBinaryVersion = 1;

void check_values(const Grid& grid, std::span<const double> v) {
    require(v.size() == grid.size(), "state size does not match the grid");
}

}  // namespace

DriftSource DriftSource::zero(const Grid& grid) {
    const std::size_t len = grid.size() * grid.vector_components();
    const int comps = grid.vector_components();
    return {false, [len, comps](double) { return VectorField{comps, std::vector<double>(len, 0.0)}; }, "zero"};
}

StepOperator::StepOperator(const Grid& grid, double dt) : grid_(&grid), dt_(dt) {
    require(dt > 0.0 && std::isfinite(dt), "step operator: dt must be positive");
}

void StepOperator::assemble(const VectorField& drift, double reaction, Advection scheme) {
    const Grid& g = *grid_;
    require(drift.components == g.vector_components() && drift.nodes() == g.size(),
            "step operator: drift samples do not match the grid");
    require(reaction >= 0.0 && std::isfinite(reaction), "step operator: reaction must be nonnegative");
    const double h = g.spacing();

    if (g.kind() == GridKind::radial) {
        const int n = g.n();
        const double area = unit_sphere_area(g.dimension());
        const double dm1 = g.dimension() - 1;
        auto flux = [&](double face) { return area * std::pow(face, dm1) / h; };
        lower_.assign(n, 0.0);
        diag_.assign(n, 0.0);
        upper_.assign(n, 0.0);
        const auto w = g.weights();
        for (int i = 0; i < n; ++i) {
            const double vol = w[i];
            const double left = i > 0 ? flux((i - 0.5) * h) / vol : 0.0;
            const double right = flux((i + 0.5) * h) / vol;
            double up = right, lo = left;
            if (scheme == Advection::centered) {
                if (i == 0) {
                    // b u_r -> a u_rr(0) = 2 a (u_1 - u_0) / h^2 for b ~ a / r
                    up += 2.0 * drift.data[1] * h / (h * h);
                } else {
                    lo -= drift.data[i] / (2.0 * h);
                    up += drift.data[i] / (2.0 * h);
                }
            } else if (i > 0) {
                const double b = drift.data[i];
                require(std::isfinite(b), "step operator: non-finite drift sample");
                if (b > 0.0) up += b / h;
                else lo += -b / h;
            }
            diag_[i] = 1.0 + dt_ * (up + lo + reaction);
            lower_[i] = -dt_ * lo;
            upper_[i] = i + 1 < n ? -dt_ * up : 0.0;  // node n is Dirichlet zero
        }
        return;
    }

    require(scheme == Advection::upwind, "step operator: centered advection is radial only");
    const int m = g.n() + 1;
    stencil_.resize(m);
    const double diff = dt_ / (h * h);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const std::size_t id = g.index(i, j, k);
                if (g.is_boundary(id)) continue;  // identity row, zero pulls
                double diag = 1.0 + 6.0 * diff + dt_ * reaction;
                for (int c = 0; c < 3; ++c) {
                    const double b = drift.data[id * 3 + c];
                    require(std::isfinite(b), "step operator: non-finite drift sample");
                    const double adv = dt_ * std::abs(b) / h;
                    stencil_.pull[2 * c][id] = diff + (b < 0.0 ? adv : 0.0);
                    stencil_.pull[2 * c + 1][id] = diff + (b > 0.0 ? adv : 0.0);
                    diag += adv;
                }
                stencil_.diag[id] = diag;
            }
}

bool StepOperator::is_m_matrix() const {
    if (grid_->kind() == GridKind::radial) {
        for (std::size_t i = 0; i < diag_.size(); ++i) {
            if (lower_[i] > 0.0 || upper_[i] > 0.0) return false;
            if (diag_[i] < 1.0 - lower_[i] - upper_[i] - 1e-12 * diag_[i]) return false;
        }
        return !diag_.empty();
    }
    for (std::size_t id = 0; id < stencil_.size(); ++id) {
        double off = 0.0;
        for (const auto& p : stencil_.pull) {
            if (p[id] < 0.0) return false;
            off += p[id];
        }
        if (stencil_.diag[id] < 1.0 + off - 1e-12 * stencil_.diag[id]) return false;
    }
    return stencil_.size() > 0;
}

void StepOperator::apply(std::span<const double> x, std::span<double> y) const {
    check_values(*grid_, x);
    check_values(*grid_, y);
    if (grid_->kind() == GridKind::radial) {
        const int n = static_cast<int>(diag_.size());
        for (int i = 0; i < n; ++i) {
            double v = diag_[i] * x[i];
            if (i > 0) v += lower_[i] * x[i - 1];
            if (i + 1 < n) v += upper_[i] * x[i + 1];
            y[i] = v;
        }
        y[n] = x[n];
        return;
    }
    kernels::omp::apply(stencil_, x, y);
}

void StepOperator::solve(std::span<const double> rhs, std::span<double> x, const SolverOptions& opts) const {
    check_values(*grid_, rhs);
    check_values(*grid_, x);
    if (grid_->kind() == GridKind::radial) {
        // Thomas algorithm. For an M-matrix every pivot is positive and every
        // multiplier nonpositive, so nonnegative data give a nonnegative solution.
        const int n = static_cast<int>(diag_.size());
        std::vector<double> cp(n), dp(n);
        double piv = diag_[0];
        cp[0] = upper_[0] / piv;
        dp[0] = rhs[0] / piv;
        for (int i = 1; i < n; ++i) {
            piv = diag_[i] - lower_[i] * cp[i - 1];
            cp[i] = upper_[i] / piv;
            dp[i] = (rhs[i] - lower_[i] * dp[i - 1]) / piv;
        }
        x[n] = 0.0;
        x[n - 1] = dp[n - 1];
        for (int i = n - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
        return;
    }

    const double scale = kernels::omp::max_abs(rhs);
    if (scale == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return;
    }
    for (std::size_t id = 0; id < x.size(); ++id)
        if (grid_->is_boundary(id)) x[id] = rhs[id];
    double res = kernels::omp::residual_max(stencil_, x, rhs);
    int sweeps = 0;
    while (res > opts.tol * scale) {
        if (sweeps >= opts.max_sweeps)
            throw ConvergenceError("Gauss-Seidel did not reach the step tolerance", res / scale);
        for (int s = 0; s < 4; ++s) {
            kernels::omp::red_black_sweep(stencil_, rhs, x, 0);
            kernels::omp::red_black_sweep(stencil_, rhs, x, 1);
        }
        sweeps += 4;
        res = kernels::omp::residual_max(stencil_, x, rhs);
    }
}

ScalarState StepOperator::step(const ScalarState& state, const SolverOptions& opts) const {
    ScalarState next{state.time + dt_, state.values};
    solve(state.values, next.values, opts);
    return next;
}

long long step_count(double s, double t, double dt) {
    require(t >= s, "evolve: t must be >= s");
    require(dt > 0.0 && std::isfinite(dt), "evolve: dt must be positive");
    const double q = (t - s) / dt;
    const double k = std::round(q);
    require(std::abs(q - k) <= 1e-9 * std::max(1.0, q), "evolve: (t - s)/dt is not an integer");
    return static_cast<long long>(k);
}

Trajectory evolve(const DriftSource& drift, const Grid& grid, double s, double t, const ScalarState& f, double dt,
                  const SolverOptions& opts) {
    check_values(grid, f.values);
    require(static_cast<bool>(drift.sample), "evolve: drift source has no sampler");
    require(opts.damping_coef >= 0.0, "evolve: damping coefficient must be nonnegative");
    const long long steps = step_count(s, t, dt);

    Trajectory traj;
    traj.s = s;
    traj.step = dt;
    ScalarState cur{s, f.values};
    traj.states.push_back(cur);
    if (steps == 0) return traj;

    StepOperator op(grid, dt);
    VectorField frozen;
    const bool damped = opts.damping_coef > 0.0 && !opts.damping_g.is_zero();
    if (!drift.time_dependent) frozen = drift.sample(s);
    bool assembled = false;

    for (long long k = 0; k < steps; ++k) {
        const double tk = s + static_cast<double>(k) * dt;
        const double reaction = damped ? opts.damping_coef * opts.damping_g(tk) : 0.0;
        if (drift.time_dependent) {
            op.assemble(drift.sample(tk), reaction, opts.advection);
        } else if (!assembled || damped) {
            op.assemble(frozen, reaction, opts.advection);
            assembled = true;
        }
        ScalarState next = op.step(cur, opts);
        next.time = s + static_cast<double>(k + 1) * dt;
        if (opts.observer) opts.observer(next);
        cur = std::move(next);
        if (opts.store_states || k + 1 == steps) traj.states.push_back(cur);
    }
    return traj;
}

ScalarState make_state(const Grid& grid, double time, std::vector<double> values) {
    check_values(grid, values);
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(std::isfinite(values[i]), "state has a non-finite value");
        if (grid.is_boundary(i)) values[i] = 0.0;
    }
    return {time, std::move(values)};
}

ScalarState sample_state(const Grid& grid, double time,
                         const std::function<double(std::span<const double>)>& f) {
    std::vector<double> v(grid.size());
    std::vector<double> x(grid.dimension());
    for (std::size_t i = 0; i < v.size(); ++i) {
        grid.point(i, x);
        v[i] = f(x);
    }
    return make_state(grid, time, std::move(v));
}

VectorField gradient(std::span<const double> u, const Grid& grid) {
    check_values(grid, u);
    const double h = grid.spacing();
    const int n = grid.n();
    auto d1 = [&](auto at, int i) {
        if (i == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
        if (i == n) return (3.0 * at(n) - 4.0 * at(n - 1) + at(n - 2)) / (2.0 * h);
        return (at(i + 1) - at(i - 1)) / (2.0 * h);
    };
    if (grid.kind() == GridKind::radial) {
        VectorField g{1, std::vector<double>(u.size())};
        for (int i = 0; i <= n; ++i) g.data[i] = d1([&](int j) { return u[j]; }, i);
        return g;
    }
    VectorField g{3, std::vector<double>(u.size() * 3)};
#pragma omp parallel for collapse(2) schedule(static)
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= n; ++k) {
                const std::size_t id = grid.index(i, j, k);
                g.data[id * 3 + 0] = d1([&](int a) { return u[grid.index(a, j, k)]; }, i);
                g.data[id * 3 + 1] = d1([&](int a) { return u[grid.index(i, a, k)]; }, j);
                g.data[id * 3 + 2] = d1([&](int a) { return u[grid.index(i, j, a)]; }, k);
            }
    return g;
}

double lp_norm(std::span<const double> values, const Grid& grid, double p) {
    check_values(grid, values);
    require(p >= 1.0, "lp_norm: p must be >= 1");
    if (std::isinf(p)) return kernels::omp::max_abs(values);
    return std::pow(kernels::omp::weighted_power_sum(grid.weights(), values, p), 1.0 / p);
}

double time_norm(std::span<const double> times, std::span<const double> values, double s, double tau,
                 double p_time) {
    require(times.size() == values.size(), "time_norm: size mismatch");
    require(p_time >= 1.0, "time_norm: p must be >= 1");
    require(tau >= s, "time_norm: tau must be >= s");
    const double slack = 1e-9 * std::max(1.0, std::abs(tau));
    double acc = 0.0;
    bool have_prev = false;
    double t_prev = 0.0, f_prev = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < s - slack || times[i] > tau + slack) continue;
        any = true;
        if (std::isinf(p_time)) {
            acc = std::max(acc, std::abs(values[i]));
            continue;
        }
        const double fv = std::pow(std::abs(values[i]), p_time);
        if (have_prev) acc += 0.5 * (times[i] - t_prev) * (fv + f_prev);
        t_prev = times[i];
        f_prev = fv;
        have_prev = true;
    }
    require(any, "time_norm: no samples inside [s, tau]");
    return std::isinf(p_time) ? acc : std::pow(acc, 1.0 / p_time);
}

double mixed_norm(const Trajectory& traj, const Grid& grid, double s, double tau, double p_time, double p_space,
                  NormTarget target) {
    require(p_space >= 1.0 && p_time >= 1.0, "mixed_norm: exponents must be >= 1");
    const double slack = 1e-9 * std::max(1.0, std::abs(tau));
    require(!traj.states.empty() && s >= traj.states.front().time - slack && tau <= traj.end_time() + slack,
            "mixed_norm: [s, tau] outside the trajectory span");
    std::vector<double> times, norms;
    for (const auto& st : traj.states) {
        if (st.time < s - slack || st.time > tau + slack) continue;
        times.push_back(st.time);
        if (target == NormTarget::value) norms.push_back(lp_norm(st.values, grid, p_space));
        else norms.push_back(lp_norm(gradient(st.values, grid).magnitude(), grid, p_space));
    }
    return time_norm(times, norms, s, tau, p_time);
}

void write_csv(std::ostream& os, const Trajectory& traj) {
    os << "time,node,value\n";
    for (const auto& st : traj.states) {
        const std::string t = fmt_double(st.time);
        for (std::size_t i = 0; i < st.values.size(); ++i) os << t << ',' << i << ',' << fmt_double(st.values[i]) << '\n';
    }
}

namespace {

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw InvalidArgument("binary trajectory: truncated input");
    return v;
}

}  // namespace

void write_binary(std::ostream& os, const Trajectory& traj, const Grid& grid) {
    os.write(kMagic, sizeof kMagic);
    put(os, kBinaryVersion);
    put(os, static_cast<std::uint32_t>(grid.kind() == GridKind::radial ? 0 : 1));
    put(os, static_cast<std::int32_t>(grid.dimension()));
    put(os, static_cast<std::int32_t>(grid.n()));
    put(os, grid.extent());
    put(os, grid.spacing());
    put(os, static_cast<std::uint64_t>(traj.states.size()));
    put(os, static_cast<std::uint64_t>(grid.size()));
    put(os, traj.s);
    put(os, traj.step);
    for (const auto& st : traj.states) put(os, st.time);
    for (const auto& st : traj.states) {
        require(st.values.size() == grid.size(), "binary trajectory: state size does not match the grid");
        os.write(reinterpret_cast<const char*>(st.values.data()),
                 static_cast<std::streamsize>(st.values.size() * sizeof(double)));
    }
}

LoadedTrajectory read_binary(std::istream& is) {
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw InvalidArgument("binary trajectory: bad magic");
    if (get<std::uint32_t>(is) != kBinaryVersion) throw InvalidArgument("binary trajectory: unsupported version");
    LoadedTrajectory out;
    const auto kind = get<std::uint32_t>(is);
    require(kind <= 1, "binary trajectory: bad grid kind");
    out.kind = kind == 0 ? GridKind::radial : GridKind::tensor3;
    out.d = get<std::int32_t>(is);
    out.n = get<std::int32_t>(is);
    out.extent = get<double>(is);
    out.spacing = get<double>(is);
    const auto count = get<std::uint64_t>(is);
    const auto nodes = get<std::uint64_t>(is);
    out.traj.s = get<double>(is);
    out.traj.step = get<double>(is);
    out.traj.states.resize(count);
    for (auto& st : out.traj.states) st.time = get<double>(is);
    for (auto& st : out.traj.states) {
        st.values.resize(nodes);
        is.read(reinterpret_cast<char*>(st.values.data()), static_cast<std::streamsize>(nodes * sizeof(double)));
        if (!is) throw InvalidArgument("binary trajectory: truncated input");
    }
    return out;
}

}  // namespace feller
