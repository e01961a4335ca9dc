#include "fellerlab/approximation.hpp"
#include "fellerlab/error.hpp"
#include "fellerlab/random.hpp"
#include "fellerlab/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

using namespace feller;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> gaussian(const Grid& g, double w) {
    return sample_state(g, 0.0, [w](std::span<const double> x) {
               double r2 = 0.0;
               for (double v : x) r2 += v * v;
               return std::exp(-r2 / (2 * w * w));
           }).values;
}

double sup(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("grid layout") {
    const auto r = Grid::radial({3, 4.0, 16});
    CHECK(r.size() == 17);
    CHECK(r.spacing() == 0.25);
    CHECK(r.is_boundary(16));
    CHECK_FALSE(r.is_boundary(0));
    const auto t = Grid::tensor3({1.0, 16});
    CHECK(t.size() == 17 * 17 * 17);
    CHECK(t.is_boundary(t.index(0, 8, 8)));
    CHECK_FALSE(t.is_boundary(t.index(8, 8, 8)));
    CHECK(t.radius(t.index(8, 8, 8)) == 0.0);
    CHECK_THROWS_AS(Grid::radial({2, 1.0, 16}), InvalidArgument);
    CHECK_THROWS_AS(Grid::radial({3, 1.0, 8}), InvalidArgument);
    CHECK_THROWS_AS(Grid::tensor3({1.0, 8}), InvalidArgument);
}

TEST_CASE("Gaussian L2 norm matches the closed form") {
    // |exp(-|x|^2/(2 w^2))|_2 = (pi w^2)^{3/4} in R^3
    const double w = 0.5, exact = std::pow(pi * w * w, 0.75);
    const auto r = Grid::radial({3, 8.0, 2048});
    CHECK(lp_norm(gaussian(r, w), r, 2.0) == doctest::Approx(exact).epsilon(1e-5));
    const auto t = Grid::tensor3({4.0, 64});
    CHECK(lp_norm(gaussian(t, w), t, 2.0) == doctest::Approx(exact).epsilon(1e-4));
    CHECK(lp_norm(gaussian(t, w), t, INFINITY) == 1.0);
    CHECK_THROWS_AS(lp_norm(gaussian(t, w), t, 0.5), InvalidArgument);
}

TEST_CASE("radial gradient of sin(pi r)") {
    const auto g = Grid::radial({3, 1.0, 2048});
    std::vector<double> u(g.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(pi * g.radius(i));
    const auto grad = gradient(u, g);
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(grad.data[i] - pi * std::cos(pi * g.radius(i))));
    CHECK(err <= 1e-5);
}

TEST_CASE("tensor gradient of a quadratic is exact") {
    const auto g = Grid::tensor3({1.0, 16});
    std::vector<double> u(g.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto x = g.point(i);
        u[i] = x[0] * x[0] + 2 * x[1] - x[2] * x[1];
    }
    const auto grad = gradient(u, g);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto x = g.point(i);
        CHECK(grad.data[3 * i] == doctest::Approx(2 * x[0]).epsilon(1e-12));
        CHECK(grad.data[3 * i + 1] == doctest::Approx(2 - x[2]).epsilon(1e-12));
        CHECK(grad.data[3 * i + 2] == doctest::Approx(-x[1]).scale(1.0).epsilon(1e-12));
    }
}

TEST_CASE("discrete eigenmode decays by the exact step factor") {
    // cos(pi x / 2L) per axis is a Dirichlet eigenvector of the 7-point Laplacian
    const double L = 1.0, dt = 0.01;
    const int n = 16;
    const auto g = Grid::tensor3({L, n});
    const double h = g.spacing();
    const auto f = sample_state(g, 0.0, [&](std::span<const double> x) {
        return std::cos(pi * x[0] / (2 * L)) * std::cos(pi * x[1] / (2 * L)) * std::cos(pi * x[2] / (2 * L));
    });
    const double lambda = 3.0 * 4.0 / (h * h) * std::pow(std::sin(pi / (2.0 * n)), 2);
    const auto traj = evolve(DriftSource::zero(g), g, 0.0, 3 * dt, f, dt);
    const double factor = std::pow(1.0 / (1.0 + dt * lambda), 3);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(traj.states.back().values[i] == doctest::Approx(factor * f.values[i]).epsilon(1e-8).scale(1.0));

    // damping adds the reaction coefficient to the eigenvalue
    SolverOptions opts;
    opts.damping_coef = 2.0;
    opts.damping_g = TimeProfile::constant(1.5);
    const auto damped = evolve(DriftSource::zero(g), g, 0.0, dt, f, dt, opts);
    const double dfac = 1.0 / (1.0 + dt * (lambda + 3.0));
    const std::size_t mid = g.index(n / 2, n / 2, n / 2);
    CHECK(damped.states.back().values[mid] == doctest::Approx(dfac * f.values[mid]).epsilon(1e-8));
}

TEST_CASE("upwind steps are M-matrices for arbitrary drift samples") {
    const auto r = Grid::radial({3, 2.0, 64});
    const auto t = Grid::tensor3({1.0, 16});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        VectorField br{1, std::vector<double>(r.size())};
        for (std::size_t i = 0; i < r.size(); ++i) br.data[i] = 200.0 * (rng::uniform(seed, "br", i) - 0.5);
        StepOperator op(r, 0.05);
        op.assemble(br);
        CHECK(op.is_m_matrix());
        VectorField bt{3, std::vector<double>(3 * t.size())};
        for (std::size_t i = 0; i < bt.data.size(); ++i) bt.data[i] = 200.0 * (rng::uniform(seed, "bt", i) - 0.5);
        StepOperator ot(t, 0.05);
        ot.assemble(bt, 0.3);
        CHECK(ot.is_m_matrix());
    }
}

TEST_CASE("steps preserve positivity and never raise the sup") {
    const auto g = Grid::radial({3, 4.0, 256});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::vector<double> f(g.size());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng::uniform(seed, "f", i);
        const auto field = drift::scaled(1.0 + seed, drift::hardy(3, 1.0));
        const auto src = exact_source(field, g);
        const auto traj = evolve(src, g, 0.0, 0.05, make_state(g, 0.0, f), 0.01);
        double prev = sup(traj.states.front().values);
        for (const auto& st : traj.states) {
            for (double v : st.values) CHECK(v >= 0.0);
            CHECK(sup(st.values) <= prev * (1.0 + 1e-12));
            prev = sup(st.values);
        }
    }
}

TEST_CASE("centered advection reduces to diffusion for zero drift") {
    const auto g = Grid::radial({3, 4.0, 128});
    const auto f = make_state(g, 0.0, gaussian(g, 0.5));
    SolverOptions centered;
    centered.advection = Advection::centered;
    const auto a = evolve(DriftSource::zero(g), g, 0.0, 0.1, f, 0.01);
    const auto b = evolve(DriftSource::zero(g), g, 0.0, 0.1, f, 0.01, centered);
    CHECK(a.states.back().values == b.states.back().values);
    const auto t = Grid::tensor3({1.0, 16});
    StepOperator op(t, 0.1);
    CHECK_THROWS_AS(op.assemble(VectorField{3, std::vector<double>(3 * t.size())}, 0.0, Advection::centered),
                    InvalidArgument);
}

TEST_CASE("step count and state checks") {
    CHECK(step_count(0.0, 1.0, 0.1) == 10);
    CHECK(step_count(0.25, 0.25, 0.1) == 0);
    CHECK_THROWS_AS(step_count(0.0, 1.0, 0.3), InvalidArgument);
    CHECK_THROWS_AS(step_count(1.0, 0.0, 0.1), InvalidArgument);
    const auto g = Grid::radial({3, 1.0, 16});
    CHECK_THROWS_AS(make_state(g, 0.0, {1.0, 2.0}), InvalidArgument);
    std::vector<double> bad(g.size(), 0.0);
    bad[1] = NAN;
    CHECK_THROWS_AS(make_state(g, 0.0, bad), InvalidArgument);
    CHECK(make_state(g, 0.0, std::vector<double>(g.size(), 1.0)).values.back() == 0.0);
}

TEST_CASE("state times lie on the step lattice") {
    const auto g = Grid::radial({3, 4.0, 64});
    const auto traj = evolve(DriftSource::zero(g), g, 0.3, 0.7, make_state(g, 0.3, gaussian(g, 0.5)), 0.1);
    REQUIRE(traj.states.size() == 5);
    for (std::size_t k = 0; k < traj.states.size(); ++k) CHECK(traj.states[k].time == 0.3 + k * 0.1);
    CHECK_NOTHROW(traj.at(0.5));
    CHECK_THROWS(traj.at(0.55));
}

TEST_CASE("mixed norms") {
    const auto g = Grid::radial({3, 4.0, 128});
    const auto f = make_state(g, 0.0, gaussian(g, 0.5));
    Trajectory traj;
    traj.step = 0.5;
    traj.states = {f, {0.5, f.values}, {1.0, f.values}};
    const double n2 = lp_norm(f, g, 2.0);
    // constant in time: L^p(0, 1) of a constant is the constant
    CHECK(mixed_norm(traj, g, 0.0, 1.0, 3.0, 2.0) == doctest::Approx(n2).epsilon(1e-14));
    CHECK(mixed_norm(traj, g, 0.0, 0.5, 1.0, 2.0) == doctest::Approx(0.5 * n2).epsilon(1e-14));
    CHECK(mixed_norm(traj, g, 0.0, 1.0, INFINITY, 2.0) == n2);
    const std::vector<double> times{0.0, 1.0}, vals{0.0, 1.0};
    // trapezoid of x^2 on two nodes: (0 + 1)/2
    CHECK(time_norm(times, vals, 0.0, 1.0, 2.0) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("binary trajectories reload bit-exactly") {
    for (const auto& g : {Grid::radial({4, 3.0, 40}), Grid::tensor3({1.0, 16})}) {
        Trajectory traj;
        traj.s = 0.125;
        traj.step = 1.0 / 3.0;
        for (int k = 0; k < 3; ++k) {
            std::vector<double> v(g.size());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = rng::uniform(k, "v", i) * 1e-300 * (i % 3 ? 1e300 : 1.0);
            traj.states.push_back({0.125 + k / 3.0, v});
        }
        std::stringstream ss;
        write_binary(ss, traj, g);
        const auto back = read_binary(ss);
        CHECK(back.kind == g.kind());
        CHECK(back.d == g.dimension());
        CHECK(back.n == g.n());
        CHECK(back.extent == g.extent());
        CHECK(back.spacing == g.spacing());
        CHECK(back.traj.s == traj.s);
        CHECK(back.traj.step == traj.step);
        REQUIRE(back.traj.states.size() == traj.states.size());
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            CHECK(back.traj.states[k].time == traj.states[k].time);
            CHECK(std::memcmp(back.traj.states[k].values.data(), traj.states[k].values.data(),
                              g.size() * sizeof(double)) == 0);
        }
        std::string bytes = ss.str();
        std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
        CHECK_THROWS_AS(read_binary(truncated), InvalidArgument);
        bytes[0] = 'X';
        std::stringstream bad(bytes);
        CHECK_THROWS_AS(read_binary(bad), InvalidArgument);
    }
}

TEST_CASE("CSV export") {
    Trajectory traj;
    traj.states = {{0.0, {1.0, 0.5, 0.0}}};
    std::ostringstream os;
    write_csv(os, traj);
    CHECK(os.str() == "time,node,value\n0,0,1\n0,1,0.5\n0,2,0\n");
}
