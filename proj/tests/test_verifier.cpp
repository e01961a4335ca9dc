#include "fellerlab/approximation.hpp"
#include "fellerlab/constants.hpp"
#include "fellerlab/error.hpp"
#include "fellerlab/verifier.hpp"

#include <doctest.h>

#include <cmath>

using namespace feller;

namespace {

RunSpec make_run(const Grid& g, DriftPtr field, double m, double dt) {
    RunSpec r;
    r.grid = &g;
    r.drift = mollified_source(field, m, g);
    r.f = sample_state(g, 0.0, [](std::span<const double> x) {
              double r2 = 0.0;
              for (double v : x) r2 += v * v;
              return std::exp(-r2 / 0.5);
          }).values;
    r.dt = dt;
    r.label = "m" + std::to_string(static_cast<int>(m));
    return r;
}

}  // namespace

TEST_CASE("bounded reports apply the slack") {
    CHECK(CheckReport::bounded("x", 1.04, 1.0, 0.05, "").pass);
    CHECK_FALSE(CheckReport::bounded("x", 1.06, 1.0, 0.05, "").pass);
    CHECK(CheckReport::bounded("x", 1.0, 1.0, 0.0, "").pass);
    const auto l = CheckReport::logged("y", 3.0, false, "k=v");
    CHECK_FALSE(l.bound.has_value());
    CHECK_FALSE(l.pass);
}

TEST_CASE("composition is exact for stationary drifts on both grids") {
    const auto r = Grid::radial({3, 4.0, 256});
    const auto t = Grid::tensor3({2.0, 16});
    for (const auto& field : {drift::zero(3), drift::scaled(0.1, drift::hardy(3, 1.0)), drift::annulus(3, 1.0, 0.6, 0.25),
                              drift::split(3, 0.1, 0.05, 2)}) {
        CHECK(check_E1(make_run(r, field, 16.0, 0.01), 0.0, 0.3, 0.5).pass);
        CHECK(check_E1(make_run(t, field, 16.0, 0.02), 0.0, 0.1, 0.2).pass);
    }
    CHECK_THROWS_AS(check_E1(make_run(r, drift::zero(3), 8.0, 0.01), 0.0, 0.305, 0.5), InvalidArgument);
}

TEST_CASE("time-dependent drifts compose to first order in the step") {
    const auto r = Grid::radial({3, 4.0, 256});
    const auto run = make_run(r, drift::time_log(3, 1.0, 0.5, 1.0), 16.0, 0.02);
    const auto rep = check_E1_richardson(run, 0.0, 0.4);
    CHECK(rep.name == "E1.richardson_ratio");
    CHECK(rep.pass);
    CHECK(rep.measured == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("continuity defect halves with the step") {
    const auto r = Grid::radial({3, 4.0, 512});
    const std::vector<double> deltas{4e-3, 2e-3, 1e-3};
    const auto rep = check_E2(make_run(r, drift::scaled(0.1, drift::hardy(3, 1.0)), 16.0, 1e-3), 0.0, deltas);
    CHECK(rep.pass);
    const std::vector<double> one{1e-3};
    CHECK_THROWS_AS(check_E2(make_run(r, drift::zero(3), 8.0, 1e-3), 0.0, one), InvalidArgument);
}

TEST_CASE("positivity and contraction on the tensor grid") {
    const auto t = Grid::tensor3({2.0, 16});
    const auto reps = check_E3(make_run(t, drift::annulus(3, 1.0, 0.6, 0.25), 32.0, 0.02), 0.0, 0.2);
    REQUIRE(reps.size() == 2);
    CHECK(reps[0].pass);
    CHECK(reps[1].pass);
    CHECK(reps[1].measured < 1.0);
}

TEST_CASE("weak residual vanishes to discretization order and detects the wrong sign") {
    const auto r = Grid::radial({3, 4.0, 1024});
    const auto run = make_run(r, drift::scaled(0.5, drift::hardy(3, 1.0)), 16.0, 1e-3);
    const auto traj = run.run(0.0, 0.5);
    SpaceTimeBump psi;
    psi.t_a = 0.1;
    psi.t_b = 0.4;
    psi.rho = 1.0;
    double scale = 0.0;
    const double res = weak_residual(traj, r, run.drift, psi, &scale);
    CHECK(std::abs(res) <= 1e-3 * scale);
    // the residual of the flipped drift is of the size of the advection term
    DriftSource flipped = run.drift;
    flipped.sample = [inner = run.drift.sample](double t) {
        auto v = inner(t);
        for (double& x : v.data) x = -x;
        return v;
    };
    CHECK(std::abs(weak_residual(traj, r, flipped, psi)) > 100.0 * std::abs(res));
    psi.t_a = 0.0;
    CHECK_THROWS_AS(weak_residual(traj, r, run.drift, psi), InvalidArgument);
}

TEST_CASE("space-time bump derivatives") {
    SpaceTimeBump psi;
    psi.t_a = 0.0;
    psi.t_b = 1.0;
    psi.rho = 2.0;
    const std::vector<double> x{0.3, -0.2, 0.4};
    const double h = 1e-4;
    const double dt = (psi.value(0.6 + h, x) - psi.value(0.6 - h, x)) / (2 * h);
    CHECK(psi.dt(0.6, x) == doctest::Approx(dt).epsilon(1e-6));
    double lap = 0.0;
    for (int i = 0; i < 3; ++i) {
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        lap += (psi.value(0.6, xp) - 2 * psi.value(0.6, x) + psi.value(0.6, xm)) / (h * h);
    }
    CHECK(psi.laplacian(0.6, x, 3) == doctest::Approx(lap).epsilon(1e-5));
    CHECK(psi.value(1.2, x) == 0.0);
}

TEST_CASE("a priori sweep refuses beta above the hypothesis") {
    const auto r = Grid::radial({3, 4.0, 128});
    const std::vector<RunSpec> runs{make_run(r, drift::zero(3), 8.0, 0.01)};
    const double limit = 4.0 / 9.0 * std::pow(constants::omega(3.0), 2);
    CHECK_THROWS_AS(apriori_sweep(runs, limit, 3.0, 0.4, 0.2, 2), InvalidArgument);
    const auto ok = apriori_sweep(runs, 0.0, 2.0, 1.0, 0.2, 2);
    REQUIRE(ok.reports.size() == 1);
    CHECK(ok.reports[0].name == "apriori.endpoint");
    CHECK(ok.reports[0].pass);
    const auto spread = apriori_sweep(runs, 0.0, 3.0, 0.4, 0.2, 2);
    CHECK(spread.reports[0].name == "apriori.spread");
}

TEST_CASE("Lp ratio") {
    const auto r = Grid::radial({3, 4.0, 256});
    const auto run = make_run(r, drift::scaled(0.1, drift::hardy(3, 1.0)), 16.0, 0.01);
    for (double p : {2.0, 3.0, constants::kInf}) CHECK(lp_ratio(run, p, 0.04, 0.0, 0.2).pass);
    CHECK_THROWS_AS(lp_ratio(run, 1.1, 0.04, 0.0, 0.2), InvalidArgument);
}

TEST_CASE("mixed quasi-norm below exponent one") {
    const auto r = Grid::radial({3, 2.0, 64});
    std::vector<double> ones(r.size(), 1.0);
    ones.back() = 0.0;
    const std::vector<ScalarState> states{{0.0, ones}, {0.5, ones}, {1.0, ones}};
    // |1|_{L^{1/2}(B)} = vol^2 and a constant in time integrates exactly
    double vol = 0.0;
    for (double w : r.weights().first(r.size() - 1)) vol += w;
    CHECK(mixed_quasi_norm(states, r, 0.0, 1.0, 0.5, 0.5) == doctest::Approx(vol * vol).epsilon(1e-12));
    CHECK(mixed_quasi_norm(states, r, 0.0, 1.0, 2.0, 1.0) == doctest::Approx(vol).epsilon(1e-12));
}

TEST_CASE("iteration inequality with a calibrated or frozen constant") {
    IterationTerms a;
    a.lhs = 2.0;
    a.grad_term = 3.0;
    a.rest = 0.5;
    a.k = 1.2;
    a.factor = 0.1;
    a.p = 2.5;
    CHECK(a.rhs(a.required_C0()) == doctest::Approx(a.lhs).epsilon(1e-12));
    IterationTerms b = a;
    b.lhs = 1.0;
    const auto reps = iteration_inequality_check(a, b);
    CHECK(reps[0].pass);
    CHECK(reps[1].pass);
    const auto frozen = iteration_inequality_check(1e-9, a, b);
    CHECK_FALSE(frozen[0].pass);
}

TEST_CASE("Cauchy matrix without drift is m-independent") {
    const auto r = Grid::radial({3, 4.0, 128});
    std::vector<RunSpec> runs;
    const std::vector<double> ms{8.0, 16.0, 32.0, 64.0};
    for (double m : ms) runs.push_back(make_run(r, drift::zero(3), m, 0.01));
    const auto res = cauchy_matrix(runs, ms, CauchyNorm::supL2, 0.2, 4);
    for (const auto& row : res.matrix)
        for (double v : row) CHECK(v <= 1e-12);
    CHECK(res.report.pass);
    const std::vector<double> one{8.0};
    const auto single = cauchy_matrix({runs[0]}, one, CauchyNorm::supC, 0.2, 4);
    REQUIRE(single.matrix.size() == 1);
    CHECK(single.matrix[0][0] == 0.0);
}

TEST_CASE("Cauchy diagonals shrink for the scaled Hardy field") {
    const auto r = Grid::radial({3, 8.0, 1024});
    std::vector<RunSpec> runs;
    const std::vector<double> ms{8.0, 16.0, 32.0, 64.0};
    for (double m : ms) runs.push_back(make_run(r, drift::scaled(0.1, drift::hardy(3, 1.0)), m, 0.01));
    const auto res = cauchy_matrix(runs, ms, CauchyNorm::supC, 0.4, 4);
    CHECK(res.report.pass);
    CHECK(res.matrix[1][2] < res.matrix[0][1]);
    CHECK(res.matrix[2][3] < res.matrix[1][2]);
}

TEST_CASE("explicit example checks") {
    const auto r = Grid::radial({3, 8.0, 512});
    const auto reps = counterexample_check(2.0, 1.0, 3, r, 0.1, 0.2, 1e-3, 0.05);
    REQUIRE(reps.size() == 2);
    CHECK(reps[0].pass);
    CHECK(reps[1].measured > reps[0].measured);  // the contractive scheme cannot follow a growing sup
    const std::vector<double> t0{1e-2, 1e-3, 1e-4};
    CHECK(counterexample_decay(2.0, 1.0, 3, r, t0).pass);
    CHECK_THROWS_AS(counterexample_decay(1.0, 1.0, 3, r, t0), InvalidArgument);
    CHECK_THROWS_AS(counterexample_check(2.0, 1.0, 3, r, 0.5, 0.2, 1e-3), InvalidArgument);
    CHECK_THROWS_AS(counterexample_check(2.0, 1.0, 4, r, 0.1, 0.2, 1e-3), InvalidArgument);
}
