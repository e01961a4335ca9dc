// Acceptance suite: one line per criterion with the measured value, the bound
// and the wall time against its budget. Exit status is nonzero if any fails.

#include "fellerlab/approximation.hpp"
#include "fellerlab/config.hpp"
#include "fellerlab/constants.hpp"
#include "fellerlab/drift.hpp"
#include "fellerlab/formbound.hpp"
#include "fellerlab/harness.hpp"
#include "fellerlab/verifier.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace feller;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string measured;
    std::string bound;
};

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<Outcome()> body;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Tally of a batch of reports: worst margin name and count of failures.
struct Tally {
    int total = 0;
    int failed = 0;
    std::string first_failure;

    void add(const CheckReport& r) {
        ++total;
        if (!r.pass) {
            if (failed++ == 0) first_failure = r.name + "(" + num(r.measured) + ") " + r.descriptors;
        }
    }
    std::string summary() const {
        std::string s = std::to_string(total - failed) + "/" + std::to_string(total) + " checks pass";
        if (failed) s += "; first failure " + first_failure;
        return s;
    }
};

RunSpec make_run(const Grid& g, const DriftPtr& field, double m, const std::vector<double>& f, double dt) {
    RunSpec r;
    r.grid = &g;
    r.drift = mollified_source(field, m, g);
    r.f = f;
    r.dt = dt;
    r.label = "m" + num(m);
    return r;
}

const std::vector<double> kM{8.0, 16.0, 32.0, 64.0};

InitialSpec shell() {
    InitialSpec s;
    s.kind = "shell";
    s.radius = 1.0;
    s.width = 0.25;
    return s;
}

Grid radial_2048() { return Grid::radial({3, 8.0, 2048}); }
Grid tensor_48() { return Grid::tensor3({4.0, 48}); }

DriftPtr hardy_004() { return drift::hardy(3, 0.1); }  // beta = 4 a^2 = 0.04

Outcome hardy_recovery() {
    const std::vector<double> eps{1e-3, 5e-4, 2.5e-4, 1.25e-4};
    std::vector<double> beta;
    for (double e : eps) beta.push_back(hardy_beta(3, 1.0, e, 50.0, 4096).beta_hat);
    bool increasing = true;
    for (std::size_t i = 1; i < beta.size(); ++i) increasing = increasing && beta[i] > beta[i - 1] && beta[i] < 4.0;
    const bool in_window = beta[0] >= 3.6 && beta[0] <= 4.0;
    std::string m = "beta_hat(eps) =";
    for (std::size_t i = 0; i < eps.size(); ++i) m += " " + num(beta[i]) + "@" + num(eps[i]);
    m += increasing ? "; increasing below 4" : "; NOT increasing below 4";
    return {in_window && increasing, m, "beta_hat(1e-3) in [3.6, 4.0], increasing under halving"};
}

Outcome bounded_field_oracle() {
    const Grid g = Grid::radial({3, 1.0, 2048});
    VectorField b;
    b.components = 1;
    b.data.assign(g.size(), 1.0);
    const double beta = estimate_beta(b, g).beta_hat;
    const double target = 1.0 / (M_PI * M_PI);
    return {std::abs(beta - target) <= 1e-3, "beta_hat = " + num(beta) + " (1/pi^2 = " + num(target) + ")",
            "|beta_hat - 1/pi^2| <= 1e-3"};
}

Outcome threshold_arithmetic() {
    namespace c = constants;
    const auto mp = c::moser_params(0.04, 2.0, 1.25, 3, 60);
    double agree = 0.0;
    for (int l = 0; l < 60; ++l) agree = std::max(agree, std::abs(mp.p_seq[l] - mp.p_recurrence[l]) / mp.p_recurrence[l]);
    const double thr = std::abs(c::beta_threshold(3) - 16.0 / 81.0);
    const bool pass = thr <= 1e-15 && c::lp_threshold(1.0) == 2.0 && std::abs(mp.p_seq[0] - 3.6) <= 1e-14 &&
                      std::abs(mp.k - std::log2(2.5)) <= 1e-14 && std::abs(mp.gamma_inf_bound - 1.0 / 6.0) <= 1e-14 &&
                      std::abs(mp.Gamma_bound - 4.059) <= 5e-4 && agree <= 1e-12;
    return {pass,
            "|threshold - 16/81| = " + num(thr) + "; lp_threshold(1) = " + num(c::lp_threshold(1.0)) + "; p1 = " +
                num(mp.p_seq[0]) + "; k = " + num(mp.k) + "; gamma = " + num(mp.gamma_inf_bound) + "; Gamma = " +
                num(mp.Gamma_bound) + "; closed/recurrence = " + num(agree),
            "1e-15, exact, 3.6, log2 2.5, 1/6, 4.059, 1e-12"};
}

Outcome feller_sweep() {
    struct Setup {
        Grid grid;
        double T, dt;
    };
    std::vector<Setup> setups{{radial_2048(), 1.0, 1e-3}, {tensor_48(), 0.5, 0.01}};
    const std::vector<DriftPtr> fields{drift::zero(3), hardy_004(), drift::annulus(3, 1.0, 0.6, 0.25),
                                       drift::split(3, 0.1, 0.05, 2)};
    const std::vector<double> deltas{4e-3, 2e-3, 1e-3};
    Tally tally;
    for (const auto& st : setups) {
        const auto f = build_initial(shell(), st.grid);
        for (const auto& field : fields)
            for (double m : kM) {
                const auto run = make_run(st.grid, field, m, f, st.dt);
                const double r = std::round(0.25 * st.T / st.dt) * st.dt;
                tally.add(check_E1(run, 0.0, r, st.T));
                tally.add(check_E2(run, 0.0, deltas));
                for (const auto& rep : check_E3(run, 0.0, st.T)) tally.add(rep);
            }
    }
    return {tally.failed == 0, tally.summary(),
            "positivity >= -1e-13, step ratio <= 1+1e-12, E1 <= 1e-12, E2 ratio in [1.6, 2.4]"};
}

Outcome apriori() {
    const Grid g = radial_2048();
    const auto f = build_initial(shell(), g);
    std::vector<RunSpec> runs;
    for (double m : kM) runs.push_back(make_run(g, hardy_004(), m, f, 1e-3));
    const auto end = apriori_sweep(runs, 0.04, 2.0, 1.0, 1.0, 8);
    const auto mixed = apriori_sweep(runs, 0.04, 3.0, 0.4, 1.0, 8);
    return {end.reports[0].pass && mixed.reports[0].pass,
            "max gradient ratio = " + num(end.max_ratio) + "; mixed spread = " + num(mixed.max_spread),
            "ratio <= 1.02; spread <= 1.5"};
}

Outcome lp_sweep() {
    const Grid r = radial_2048();
    // Annulus scaled to the common form-bound using its estimate at the largest m.
    const auto unit = drift::annulus(3, 1.0, 0.6, 0.25);
    const double beta_unit = estimate_beta(mollify(unit, kM.back(), r, 0.0).samples, r).beta_hat;
    const std::vector<DriftPtr> fields{drift::zero(3), hardy_004(), drift::scaled(std::sqrt(0.04 / beta_unit), unit)};
    struct Setup {
        Grid grid;
        double T, dt;
    };
    std::vector<Setup> setups{{r, 1.0, 1e-3}, {tensor_48(), 0.5, 0.01}};
    Tally tally;
    double worst = 0.0;
    for (const auto& st : setups) {
        const auto f = build_initial(shell(), st.grid);
        for (const auto& field : fields)
            for (double m : kM)
                for (double p : {2.0, 3.0, constants::kInf}) {
                    const auto rep = lp_ratio(make_run(st.grid, field, m, f, st.dt), p, 0.04, 0.0, st.T);
                    worst = std::max(worst, rep.measured);
                    tally.add(rep);
                }
    }
    return {tally.failed == 0, "max ratio = " + num(worst) + "; " + tally.summary() + "; annulus C = " +
                                   num(std::sqrt(0.04 / beta_unit)),
            "ratio <= 1 + 1e-3 (lp_threshold(0.04) = " + num(constants::lp_threshold(0.04)) + ")"};
}

Outcome convergence() {
    const Grid g = radial_2048();
    const auto f = build_initial(shell(), g);
    std::vector<RunSpec> runs;
    for (double m : kM) runs.push_back(make_run(g, hardy_004(), m, f, 1e-3));
    const auto l2 = cauchy_matrix(runs, kM, CauchyNorm::supL2, 1.0, 8, 0.05);
    const auto sc = cauchy_matrix(runs, kM, CauchyNorm::supC, 1.0, 8, 0.05);
    const auto calib = iteration_terms(runs[0], runs[1], 8.0, 16.0, 0.04, 2.5, 0.4, 1.25, 0.0, 1.0);
    const auto check = iteration_terms(runs[1], runs[2], 16.0, 32.0, 0.04, 2.5, 0.4, 1.25, 0.0, 1.0);
    const auto it = iteration_inequality_check(calib, check);
    return {l2.report.pass && sc.report.pass && it[0].pass,
            "supL2 worst growth = " + num(l2.report.measured) + "; supC worst growth = " + num(sc.report.measured) +
                "; (16,32) lhs = " + num(it[0].measured) + " rhs = " + num(*it[0].bound),
            "non-increasing diagonals within 5%; lhs <= rhs(C0 from (8,16)) within 5%"};
}

Outcome nonuniqueness() {
    const Grid g = Grid::radial({3, 8.0, 4096});
    const auto prop = counterexample_check(2.0, 1.0, 3, g, 0.1, 0.5, 1e-4, 0.02);
    const std::vector<double> t0{1e-2, 1e-3, 1e-4};
    const auto decay = counterexample_decay(2.0, 1.0, 3, g, t0, 1e-3);
    return {prop[0].pass && decay.pass,
            "sup-relative error = " + num(prop[0].measured) + "; |slope - 0.5| = " + num(decay.measured),
            "error <= 0.02; slope error <= 1e-3"};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Outcome determinism() {
    std::ifstream is(fs::path(FELLERLAB_SOURCE_DIR) / "configs" / "reference.ini");
    std::ostringstream text;
    text << is.rdbuf();
    const auto cfg = parse_config(text.str());
    const auto base = fs::temp_directory_path() / "fellerlab_acceptance";
    fs::remove_all(base);
    const int threads = omp_get_max_threads();
    // the third run changes the thread count even on a single-core machine
    const std::vector<int> counts{threads, threads, threads == 1 ? 3 : 1};
    std::vector<fs::path> dirs;
    bool all_pass = true;
    for (int run = 0; run < 3; ++run) {
        omp_set_num_threads(counts[run]);
        dirs.push_back(base / ("run" + std::to_string(run)));
        all_pass = run_suite(cfg, dirs.back()).all_pass() && all_pass;
    }
    omp_set_num_threads(threads);
    int files = 0, differing = 0;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
        const auto name = entry.path().filename();
        ++files;
        const auto ref = slurp(entry.path());
        for (std::size_t i = 1; i < dirs.size(); ++i)
            if (slurp(dirs[i] / name) != ref) ++differing;
    }
    fs::remove_all(base);
    return {differing == 0 && files > 0 && all_pass,
            std::to_string(files) + " files x 3 runs (threads " + std::to_string(counts[0]) + ", " +
                std::to_string(counts[1]) + ", " + std::to_string(counts[2]) + "), " + std::to_string(differing) +
                " differ; suite " +
                (all_pass ? "all pass" : "has failures"),
            "byte-identical outputs"};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "Hardy constant recovery", 60, hardy_recovery},
        {2, "bounded-field eigenvalue oracle", 30, bounded_field_oracle},
        {3, "threshold arithmetic", 1, threshold_arithmetic},
        {4, "discrete Feller properties", 600, feller_sweep},
        {5, "gradient a priori estimate", 600, apriori},
        {6, "Lp bound", 300, lp_sweep},
        {7, "convergence of the regularized solutions", 600, convergence},
        {8, "non-uniqueness example", 120, nonuniqueness},
        {9, "determinism", 600, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.body();
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what(), "-"};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = out.pass && in_time;
        failures += !pass;
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << ": " << out.measured
                  << " | bound: " << out.bound << " | " << num(secs) << " s (budget " << num(c.budget_s) << " s"
                  << (in_time ? "" : ", exceeded") << ")" << std::endl;
    }
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria pass"))
              << std::endl;
    return failures ? 1 : 0;
}
