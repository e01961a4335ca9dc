#include "fellerlab/verifier.hpp"

#include "fellerlab/approximation.hpp"
#include "fellerlab/constants.hpp"
#include "fellerlab/drift.hpp"
#include "fellerlab/error.hpp"
#include "fellerlab/format.hpp"
#include "fellerlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace feller {

namespace {

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::string kv(const std::string& key, double v) { return key + "=" + fmt_double(v); }

// States of run(s, T) at the given lattice times (all >= s), keeping nothing else.
std::vector<ScalarState> lattice_states(const RunSpec& run, double s, double T, const std::vector<double>& times) {
    std::vector<ScalarState> out;
    const double tol = 1e-9 * std::max(1.0, T);
    auto wanted = [&](double t) {
        for (double x : times)
            if (std::abs(x - t) <= tol) return true;
        return false;
    };
    if (wanted(s)) out.push_back({s, run.f});
    SolverOptions opts = run.opts;
    opts.store_states = false;
    opts.observer = [&](const ScalarState& st) {
        if (wanted(st.time)) out.push_back(st);
    };
    evolve(run.drift, *run.grid, s, T, make_state(*run.grid, s, run.f), run.dt, opts);
    return out;
}

std::vector<double> lattice_times(double T, int lattice) {
    std::vector<double> t(lattice + 1);
    for (int i = 0; i <= lattice; ++i) t[i] = T * i / lattice;
    return t;
}

}  // namespace

CheckReport CheckReport::bounded(std::string name, double measured, double bound, double slack, std::string desc) {
    CheckReport r;
    r.name = std::move(name);
    r.measured = measured;
    r.bound = bound;
    r.slack = slack;
    r.pass = measured <= bound * (1.0 + slack);
    r.descriptors = std::move(desc);
    return r;
}

CheckReport CheckReport::logged(std::string name, double measured, bool pass, std::string desc) {
    CheckReport r;
    r.name = std::move(name);
    r.measured = measured;
    r.pass = pass;
    r.descriptors = std::move(desc);
    return r;
}

Trajectory RunSpec::run(double s, double t) const {
    require(grid != nullptr, "run: grid required");
    return evolve(drift, *grid, s, t, make_state(*grid, s, f), dt, opts);
}

std::string describe_run(const RunSpec& run) {
    std::ostringstream os;
    os << "run=" << run.label << ";grid=" << (run.grid ? run.grid->describe() : "none") << ";dt=" << fmt_double(run.dt);
    return os.str();
}

CheckReport check_E1(const RunSpec& run, double s, double r, double t, double bound) {
    require(s <= r && r <= t, "check_E1: need s <= r <= t");
    step_count(s, r, run.dt);
    step_count(r, t, run.dt);
    RunSpec quiet = run;
    quiet.opts.store_states = false;
    const auto direct = quiet.run(s, t).states.back();
    const auto first = quiet.run(s, r).states.back();
    RunSpec second = quiet;
    second.f = first.values;
    const auto composed = second.run(r, t).states.back();
    return CheckReport::bounded("E1.composition", sup_diff(direct.values, composed.values), bound, 0.0,
                                describe_run(run) + ";" + kv("s", s) + ";" + kv("r", r) + ";" + kv("t", t));
}

CheckReport check_E1_richardson(const RunSpec& run, double s, double t) {
    RunSpec a = run;
    a.opts.store_states = false;
    std::vector<std::vector<double>> out;
    for (int level = 0; level < 3; ++level) {
        a.dt = run.dt / (1 << level);
        out.push_back(a.run(s, t).states.back().values);
    }
    const double d1 = sup_diff(out[0], out[1]);
    const double d2 = sup_diff(out[1], out[2]);
    const double ratio = d2 > 0.0 ? d1 / d2 : (d1 == 0.0 ? 2.0 : std::numeric_limits<double>::infinity());
    const bool pass = ratio >= 1.6 && ratio <= 2.4;
    return CheckReport::logged("E1.richardson_ratio", ratio, pass,
                               describe_run(run) + ";" + kv("defect_dt", d1) + ";" + kv("defect_dt2", d2) + ";" +
                                   kv("s", s) + ";" + kv("t", t));
}

CheckReport check_E2(const RunSpec& run, double s, std::span<const double> deltas) {
    require(deltas.size() >= 2, "check_E2: need at least two deltas");
    std::vector<double> defects;
    RunSpec a = run;
    a.opts.store_states = false;
    for (double delta : deltas) {
        require(delta >= 0.0, "check_E2: deltas must be nonnegative");
        if (delta == 0.0) {
            defects.push_back(0.0);
            continue;
        }
        a.dt = delta;
        defects.push_back(sup_diff(a.run(s, s + delta).states.back().values, run.f));
    }
    double worst = 0.0;
    std::ostringstream desc;
    desc << describe_run(run) << ";defects=";
    for (std::size_t i = 0; i < defects.size(); ++i) desc << (i ? "|" : "") << fmt_double(defects[i]);
    for (std::size_t i = 1; i < defects.size(); ++i) {
        if (defects[i - 1] == 0.0 && defects[i] == 0.0) continue;
        const double ratio = defects[i] > 0.0 ? defects[i - 1] / defects[i] : std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::abs(ratio - 2.0));
    }
    return CheckReport::bounded("E2.halving", worst, 0.4, 0.0, desc.str());
}

std::vector<CheckReport> check_E3(const RunSpec& run, double s, double t) {
    double min_value = kernels::omp::min_value(run.f);
    double max_ratio = 0.0;
    double prev_sup = kernels::omp::max_abs(run.f);
    SolverOptions opts = run.opts;
    opts.store_states = false;
    opts.observer = [&](const ScalarState& st) {
        min_value = std::min(min_value, kernels::omp::min_value(st.values));
        const double sup = kernels::omp::max_abs(st.values);
        if (prev_sup > 0.0) max_ratio = std::max(max_ratio, sup / prev_sup);
        else require(sup == 0.0, "check_E3: zero state produced nonzero output");
        prev_sup = sup;
    };
    evolve(run.drift, *run.grid, s, t, make_state(*run.grid, s, run.f), run.dt, opts);
    const std::string desc = describe_run(run) + ";" + kv("s", s) + ";" + kv("t", t);
    return {CheckReport::bounded("E3.positivity", -min_value, 1e-13, 0.0, desc),
            CheckReport::bounded("E3.contraction", max_ratio, 1.0 + 1e-12, 0.0, desc)};
}

double SpaceTimeBump::value(double t, std::span<const double> x) const {
    if (t <= t_a || t >= t_b) return 0.0;
    const double tau = (2.0 * t - t_a - t_b) / (t_b - t_a);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double c = center.empty() ? 0.0 : center[i];
        s += (x[i] - c) * (x[i] - c);
    }
    s /= rho * rho;
    if (s >= 1.0) return 0.0;
    return std::pow(1.0 - tau * tau, 4) * std::pow(1.0 - s, 4);
}

double SpaceTimeBump::dt(double t, std::span<const double> x) const {
    if (t <= t_a || t >= t_b) return 0.0;
    const double tau = (2.0 * t - t_a - t_b) / (t_b - t_a);
    const double chi_t = -16.0 * tau * std::pow(1.0 - tau * tau, 3) / (t_b - t_a);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double c = center.empty() ? 0.0 : center[i];
        s += (x[i] - c) * (x[i] - c);
    }
    s /= rho * rho;
    if (s >= 1.0) return 0.0;
    return chi_t * std::pow(1.0 - s, 4);
}

double SpaceTimeBump::laplacian(double t, std::span<const double> x, int d) const {
    if (t <= t_a || t >= t_b) return 0.0;
    const double tau = (2.0 * t - t_a - t_b) / (t_b - t_a);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double c = center.empty() ? 0.0 : center[i];
        s += (x[i] - c) * (x[i] - c);
    }
    s /= rho * rho;
    if (s >= 1.0) return 0.0;
    const double lap = (-8.0 * d * std::pow(1.0 - s, 3) + 48.0 * s * std::pow(1.0 - s, 2)) / (rho * rho);
    return std::pow(1.0 - tau * tau, 4) * lap;
}

double weak_residual(const Trajectory& traj, const Grid& grid, const DriftSource& drift, const SpaceTimeBump& psi,
                     double* scale) {
    require(!traj.states.empty(), "weak_residual: empty trajectory");
    require(psi.t_a > traj.states.front().time && psi.t_b < traj.end_time() && psi.t_a < psi.t_b,
            "weak_residual: psi must be supported strictly inside the time window");
    require(psi.rho > 0.0, "weak_residual: rho must be positive");
    double reach = psi.rho;
    if (grid.kind() == GridKind::radial) {
        for (double c : psi.center) require(c == 0.0, "weak_residual: radial grids need a centered psi");
    } else {
        double cmax = 0.0;
        for (double c : psi.center) cmax = std::max(cmax, std::abs(c));
        reach += cmax;
    }
    require(reach < grid.extent() - grid.spacing(), "weak_residual: psi touches the boundary");

    const int d = grid.dimension();
    const int comps = grid.vector_components();
    const auto w = grid.weights();
    VectorField frozen;
    if (!drift.time_dependent) frozen = drift.sample(traj.states.front().time);
    std::vector<double> x(d);
    double total = 0.0, prev_t = 0.0, prev_i = 0.0;
    double abs_total = 0.0, prev_a = 0.0;
    bool first = true;
    for (const auto& st : traj.states) {
        const double t = st.time;
        double integrand = 0.0, abs_integrand = 0.0;
        if (t > psi.t_a && t < psi.t_b) {
            const VectorField b = drift.time_dependent ? drift.sample(t) : frozen;
            const VectorField g = gradient(st.values, grid);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                grid.point(i, x);
                const double p = psi.value(t, x);
                double adv = 0.0;
                for (int c = 0; c < comps; ++c) adv += b.data[i * comps + c] * g.data[i * comps + c];
                const double pt = psi.dt(t, x), lap = psi.laplacian(t, x, d);
                integrand += w[i] * (st.values[i] * (pt + lap) + adv * p);
                abs_integrand += w[i] * (std::abs(st.values[i]) * (std::abs(pt) + std::abs(lap)) + std::abs(adv * p));
            }
        }
        if (!first) {
            total += 0.5 * (t - prev_t) * (integrand + prev_i);
            abs_total += 0.5 * (t - prev_t) * (abs_integrand + prev_a);
        }
        prev_t = t;
        prev_i = integrand;
        prev_a = abs_integrand;
        first = false;
    }
    if (scale) *scale = abs_total;
    return total;
}

double apriori_value(const Trajectory& traj, const Grid& grid, std::span<const double> f, double q, double alpha,
                     double s, double tau) {
    require(q >= 2.0, "apriori: q must be >= 2");
    require(alpha >= 0.0 && alpha <= 1.0, "apriori: alpha must lie in [0, 1]");
    const double den = lp_norm(gradient(f, grid).magnitude(), grid, q);
    if (den == 0.0) return 0.0;
    if (alpha == 1.0) return lp_norm(gradient(traj.at(tau).values, grid).magnitude(), grid, q) / den;
    const int d = grid.dimension();
    return mixed_norm(traj, grid, s, tau, q / (1.0 - alpha), q * d / (d - 2.0 + 2.0 * alpha), NormTarget::gradient) /
           den;
}

AprioriSweep apriori_sweep(const std::vector<RunSpec>& runs, double beta, double q, double alpha, double T,
                           int lattice) {
    require(!runs.empty(), "apriori_sweep: no runs");
    require(lattice >= 1, "apriori_sweep: lattice must be >= 1");
    const double limit = 4.0 / (q * q) * std::pow(constants::omega(q), 2);
    require(beta < limit, "apriori_sweep: beta violates the hypothesis beta < (4/q^2) omega_q^2");
    const auto times = lattice_times(T, lattice);
    AprioriSweep out;
    out.min_ratio = std::numeric_limits<double>::infinity();
    std::map<int, std::pair<double, double>> by_lag;  // lag -> (min, max)
    for (const auto& run : runs) {
        for (int i = 0; i < lattice; ++i) {
            const Trajectory traj = run.run(times[i], T);
            for (int j = i + 1; j <= lattice; ++j) {
                const double r = apriori_value(traj, *run.grid, run.f, q, alpha, times[i], times[j]);
                out.max_ratio = std::max(out.max_ratio, r);
                out.min_ratio = std::min(out.min_ratio, r);
                auto [it, fresh] = by_lag.try_emplace(j - i, r, r);
                if (!fresh) {
                    it->second.first = std::min(it->second.first, r);
                    it->second.second = std::max(it->second.second, r);
                }
            }
        }
    }
    for (const auto& [lag, mm] : by_lag)
        out.max_spread = std::max(out.max_spread, mm.first > 0.0 ? mm.second / mm.first : 1.0);
    std::ostringstream desc;
    desc << "runs=" << runs.size() << ";lattice=" << lattice << ";" << kv("q", q) << ";" << kv("alpha", alpha) << ";"
         << kv("beta", beta) << ";" << kv("raw_max", out.max_ratio) << ";" << kv("raw_min", out.min_ratio) << ";"
         << describe_run(runs.front());
    if (alpha == 1.0)
        out.reports.push_back(CheckReport::bounded("apriori.endpoint", out.max_ratio, 1.0 + 2e-2, 0.0, desc.str()));
    else
        out.reports.push_back(CheckReport::bounded("apriori.spread", out.max_spread, 1.5, 0.0, desc.str()));
    return out;
}

CheckReport lp_ratio(const RunSpec& run, double p, double beta, double s, double tau) {
    require(p > constants::lp_threshold(beta), "lp_ratio: p must exceed lp_threshold(beta)");
    RunSpec quiet = run;
    quiet.opts.store_states = false;
    const auto end = quiet.run(s, tau).states.back();
    const double den = lp_norm(run.f, *run.grid, p);
    const double ratio = den > 0.0 ? lp_norm(end.values, *run.grid, p) / den : 0.0;
    return CheckReport::bounded("Lp.ratio", ratio, 1.0 + 1e-3, 0.0,
                                describe_run(run) + ";" + kv("p", p) + ";" + kv("beta", beta) + ";" + kv("s", s) +
                                    ";" + kv("tau", tau));
}

double mixed_quasi_norm(const std::vector<ScalarState>& states, const Grid& grid, double s, double tau,
                        double p_time, double p_space) {
    require(p_time > 0.0 && p_space > 0.0, "mixed_quasi_norm: exponents must be positive");
    std::vector<double> times, vals;
    const auto w = grid.weights();
    for (const auto& st : states) {
        if (st.time < s - 1e-12 || st.time > tau + 1e-12) continue;
        times.push_back(st.time);
        if (std::isinf(p_space)) vals.push_back(kernels::omp::max_abs(st.values));
        else vals.push_back(std::pow(kernels::omp::weighted_power_sum(w, st.values, p_space), 1.0 / p_space));
    }
    require(!times.empty(), "mixed_quasi_norm: no samples inside [s, tau]");
    if (std::isinf(p_time)) return *std::max_element(vals.begin(), vals.end());
    double acc = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i)
        acc += 0.5 * (times[i] - times[i - 1]) * (std::pow(vals[i], p_time) + std::pow(vals[i - 1], p_time));
    return std::pow(acc, 1.0 / p_time);
}

double IterationTerms::rhs(double C0) const {
    return std::pow(C0 * factor * grad_term, 1.0 / p) * std::pow(p, 2.0 * k / p) * std::pow(rest, 1.0 - 2.0 / p);
}

double IterationTerms::required_C0() const {
    if (lhs == 0.0) return 0.0;
    const double base = lhs / (std::pow(p, 2.0 * k / p) * std::pow(rest, 1.0 - 2.0 / p));
    return std::pow(base, p) / (factor * grad_term);
}

IterationTerms iteration_terms(const RunSpec& run_m, const RunSpec& run_n, double m, double n, double beta, double p,
                               double alpha, double sigma_prime, double s, double T) {
    require(run_m.grid && run_n.grid && run_m.grid->same_layout(*run_n.grid), "iteration: runs need a shared grid");
    require(run_m.dt == run_n.dt, "iteration: runs need a shared step");
    const Grid& grid = *run_m.grid;
    const int d = grid.dimension();
    require(beta >= 0.0 && beta < 4.0, "iteration: beta must lie in [0, 4)");
    const double p_min = 2.0 / (2.0 - std::sqrt(beta));
    require(p > p_min, "iteration: p must exceed 2/(2 - sqrt(beta))");
    require(alpha >= 0.0 && alpha < 1.0, "iteration: alpha must lie in [0, 1)");
    const double sp_max = d / (d - 2.0 + 2.0 * alpha);
    require(sigma_prime > 1.0 && sigma_prime < sp_max, "iteration: sigma' must lie in (1, d/(d-2+2 alpha))");
    const double sigma = sigma_prime / (sigma_prime - 1.0);
    const double lambda = sigma_prime * (d - 2.0 + 2.0 * alpha) / (d * (1.0 - alpha));
    require(lambda > 1.0, "iteration: exponent relation gives lambda <= 1");
    const double lambda_p = lambda / (lambda - 1.0);

    const auto tm = run_m.run(s, T);
    const auto tn = run_n.run(s, T);
    require(tm.states.size() == tn.states.size(), "iteration: runs disagree in length");
    std::vector<ScalarState> diff(tm.states.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i].time = tm.states[i].time;
        diff[i].values.resize(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j)
            diff[i].values[j] = tm.states[i].values[j] - tn.states[i].values[j];
    }

    IterationTerms it;
    it.p = p;
    it.k = std::max(1.0, constants::iteration_exponent_k(beta, p));
    it.factor = beta + 1.0 / std::min(m, n);
    it.lhs = mixed_quasi_norm(diff, grid, s, T, p / (1.0 - alpha), p * d / (d - 2.0 + 2.0 * alpha));
    it.rest = mixed_quasi_norm(diff, grid, s, T, (p - 2.0) * lambda, (p - 2.0) * sigma_prime);
    const double g = mixed_norm(tm, grid, s, T, 2.0 * lambda_p, 2.0 * sigma, NormTarget::gradient);
    it.grad_term = g * g;
    return it;
}

std::vector<CheckReport> iteration_inequality_check(const IterationTerms& calibration, const IterationTerms& check,
                                                    double slack) {
    return iteration_inequality_check(calibration.required_C0(), calibration, check, slack);
}

std::vector<CheckReport> iteration_inequality_check(double C0, const IterationTerms& calibration,
                                                    const IterationTerms& check, double slack) {
    require(C0 >= 0.0 && std::isfinite(C0), "iteration: C0 must be finite and nonnegative");
    const double rhs = check.rhs(C0);
    std::ostringstream desc;
    desc << kv("C0_frozen", C0) << ";" << kv("lhs", check.lhs) << ";" << kv("rhs", rhs) << ";" << kv("k", check.k)
         << ";" << kv("p", check.p) << ";" << kv("calibration_lhs", calibration.lhs);
    std::vector<CheckReport> out;
    out.push_back(CheckReport::bounded("iteration.inequality", check.lhs, rhs, slack, desc.str()));
    out.push_back(CheckReport::logged("iteration.lhs_trend", check.lhs / calibration.lhs,
                                      check.lhs < calibration.lhs, desc.str()));
    return out;
}

CauchyResult cauchy_matrix(const std::vector<RunSpec>& runs, const std::vector<double>& m_list, CauchyNorm norm,
                           double T, int lattice, double slack) {
    require(runs.size() == m_list.size() && !runs.empty(), "cauchy_matrix: one run per m required");
    for (std::size_t i = 1; i < m_list.size(); ++i) require(m_list[i] > m_list[i - 1], "cauchy_matrix: m-list must increase");
    for (const auto& r : runs)
        require(r.grid && r.grid->same_layout(*runs.front().grid) && r.dt == runs.front().dt,
                "cauchy_matrix: grid or step mismatch");
    const Grid& grid = *runs.front().grid;
    const std::size_t k = runs.size();
    CauchyResult res;
    res.m_list = m_list;
    res.matrix.assign(k, std::vector<double>(k, 0.0));
    const auto times = lattice_times(T, lattice);
    std::vector<double> buf(grid.size());
    for (int i = 0; i < lattice; ++i) {
        const std::vector<double> wanted(times.begin() + i, times.end());
        std::vector<std::vector<ScalarState>> states;
        for (const auto& r : runs) states.push_back(lattice_states(r, times[i], T, wanted));
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b)
                for (std::size_t t = 0; t < states[a].size(); ++t) {
                    for (std::size_t j = 0; j < buf.size(); ++j) buf[j] = states[a][t].values[j] - states[b][t].values[j];
                    const double v = norm == CauchyNorm::supL2 ? lp_norm(buf, grid, 2.0) : kernels::omp::max_abs(buf);
                    res.matrix[a][b] = std::max(res.matrix[a][b], v);
                    res.matrix[b][a] = res.matrix[a][b];
                }
    }
    double worst = 0.0;
    for (std::size_t off = 1; off < k; ++off)
        for (std::size_t a = 0; a + off + 1 < k; ++a) {
            const double e0 = res.matrix[a][a + off], e1 = res.matrix[a + 1][a + 1 + off];
            if (e1 <= 1e-12) continue;  // below the solver noise floor
            worst = std::max(worst, e0 > 0.0 ? e1 / e0 : std::numeric_limits<double>::infinity());
        }
    std::ostringstream desc;
    desc << "norm=" << (norm == CauchyNorm::supL2 ? "supL2" : "supC") << ";m=";
    for (std::size_t i = 0; i < k; ++i) desc << (i ? "|" : "") << fmt_double(m_list[i]);
    double max_entry = 0.0;
    for (const auto& row : res.matrix)
        for (double v : row) max_entry = std::max(max_entry, v);
    desc << ";" << kv("max_entry", max_entry) << ";lattice=" << lattice << ";" << describe_run(runs.front());
    res.report = CheckReport::bounded(std::string("cauchy.") + (norm == CauchyNorm::supL2 ? "supL2" : "supC"), worst,
                                      1.0, slack, desc.str());
    return res;
}

std::vector<CheckReport> counterexample_check(double kappa, double alpha_exp, int d, const Grid& grid, double t0,
                                              double t1, double dt, double bound) {
    require(grid.kind() == GridKind::radial && grid.dimension() == d, "counterexample: radial grid in dimension d");
    require(t0 > 0.0 && t0 < t1 && t1 < 1.0, "counterexample: need 0 < t0 < t1 < 1");
    // The explicit pair solves u_t - Lap u + b . grad u = 0, so the solver drift is -b.
    const auto field = drift::scaled(-1.0, drift::log_counterexample(d, kappa, alpha_exp));
    RunSpec run;
    run.grid = &grid;
    run.drift = exact_source(field, grid);
    run.dt = dt;
    run.label = "counterexample";
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = drift::explicit_solution_radial(kappa, alpha_exp, d, t0, grid.radius(i));
    run.f = make_state(grid, t0, f).values;
    run.opts.store_states = false;

    auto rel_error = [&](const std::vector<double>& u) {
        double err = 0.0, sup = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double exact = drift::explicit_solution_radial(kappa, alpha_exp, d, t1, grid.radius(i));
            err = std::max(err, std::abs(u[i] - exact));
            sup = std::max(sup, std::abs(exact));
        }
        return err / sup;
    };
    const std::string desc = describe_run(run) + ";" + kv("kappa", kappa) + ";" + kv("alpha", alpha_exp) + ";" +
                             kv("t0", t0) + ";" + kv("t1", t1);

    run.opts.advection = Advection::centered;
    const double centered = rel_error(run.run(t0, t1).states.back().values);
    run.opts.advection = Advection::upwind;
    const double upwind = rel_error(run.run(t0, t1).states.back().values);
    return {CheckReport::bounded("counterexample.propagation", centered, bound, 0.0, desc + ";advection=centered"),
            CheckReport::logged("counterexample.upwind_gap", upwind, true, desc + ";advection=upwind")};
}

CheckReport counterexample_decay(double kappa, double alpha_exp, int d, const Grid& grid,
                                 std::span<const double> t0_list, double bound) {
    require(alpha_exp == 1.0, "counterexample decay exponent: alpha must be 1");
    require(kappa > d / 2.0, "counterexample decay: refused since kappa <= d/2 (no decay)");
    require(t0_list.size() >= 2, "counterexample decay: need at least two t0 values");
    std::vector<double> lx, ly;
    for (double t0 : t0_list) {
        double sup = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            sup = std::max(sup, drift::explicit_solution_radial(kappa, alpha_exp, d, t0, grid.radius(i)));
        lx.push_back(std::log(t0));
        ly.push_back(std::log(sup));
    }
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double expected = kappa - d / 2.0;
    return CheckReport::bounded("counterexample.decay_exponent", std::abs(slope - expected), bound, 0.0,
                                "grid=" + grid.describe() + ";" + kv("slope", slope) + ";" + kv("expected", expected));
}

}  // namespace feller
