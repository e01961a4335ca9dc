#include "fellerlab/constants.hpp"
#include "fellerlab/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace feller;
namespace c = feller::constants;

TEST_CASE("omega at small q and its limit") {
    CHECK(c::omega(2.0) == 1.0);
    CHECK(c::omega(3.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(c::omega(c::kInf) == 0.5);
    CHECK(c::omega(1e9) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK_THROWS_AS(c::omega(1.5), InvalidArgument);
}

TEST_CASE("omega decreases in q") {
    double prev = c::omega(2.0);
    for (double q = 2.25; q < 200.0; q *= 1.3) {
        const double w = c::omega(q);
        CHECK(w < prev);
        CHECK(w > 0.5);
        prev = w;
    }
}

TEST_CASE("smallness threshold in d = 3 is 16/81") {
    CHECK(std::abs(c::beta_threshold(3) - 16.0 / 81.0) <= 1e-15);
    // 4 omega_d^2 / d^2 shrinks with the dimension
    for (int d = 4; d <= 10; ++d) CHECK(c::beta_threshold(d) < c::beta_threshold(d - 1));
    CHECK_THROWS_AS(c::beta_threshold(2), InvalidArgument);
}

TEST_CASE("Lp threshold") {
    CHECK(c::lp_threshold(1.0) == 2.0);
    CHECK(c::lp_threshold(0.0) == 1.0);
    CHECK(c::lp_threshold(0.04) == doctest::Approx(1.0 / 0.9).epsilon(1e-15));
    CHECK_THROWS_AS(c::lp_threshold(4.0), InvalidArgument);
    CHECK_THROWS_AS(c::lp_threshold(-0.1), InvalidArgument);
}

TEST_CASE("LPS class membership") {
    CHECK(c::lps_in_F0(c::kInf, c::kInf, 3));
    CHECK(c::lps_in_F0(3.0, c::kInf, 3));
    CHECK_FALSE(c::lps_in_F0(2.0, c::kInf, 3));
    CHECK(c::lps_in_F0(6.0, 4.0, 3));   // 1/2 + 1/2
    CHECK_FALSE(c::lps_in_F0(5.0, 4.0, 3));
}

TEST_CASE("coefficient admissibility agrees with the positive M margin") {
    for (double q : {2.0, 2.5, 3.0, 5.0, 10.0})
        for (double beta = 0.0; beta < 1.0; beta += 0.01) {
            const auto pc = c::proof_coefficients(q, beta, 16.0);
            if (std::abs(pc.M_margin) < 1e-12) continue;  // exactly on the threshold
            CHECK(pc.admissible == (pc.M_margin > 0.0));
            CHECK(pc.kappa_star == doctest::Approx((q - 1.0) / 2.0));
            CHECK(pc.N == doctest::Approx(1.0 - std::sqrt(beta) / 2.0));
        }
    const auto zero = c::proof_coefficients(2.0, 0.0, c::kInf);
    CHECK(zero.degenerate);
    CHECK(zero.gamma_star == 0.0);
    CHECK(zero.eta_star == 0.0);
    CHECK_THROWS_AS(c::proof_coefficients(c::kInf, 0.01, 8.0), InvalidArgument);
}

TEST_CASE("iteration exponent k") {
    CHECK(c::iteration_exponent_k(0.04, 2.0) == doctest::Approx(std::log2(2.5)).epsilon(1e-14));
    // beta = 0, p0 = 2: 4/4 = 1 = 2/2^k gives k = 1
    CHECK(c::iteration_exponent_k(0.0, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(c::iteration_exponent_k(3.9, 1.1), InvalidArgument);
    CHECK_THROWS_AS(c::iteration_exponent_k(0.0, 1.0), InvalidArgument);
}

TEST_CASE("iteration exponents for beta = 0.04, p0 = 2, sigma' = 1.25, d = 3") {
    const auto mp = c::moser_params(0.04, 2.0, 1.25, 3, 60);
    CHECK(mp.alpha == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(mp.p_seq[0] == doctest::Approx(3.6).epsilon(1e-15));
    CHECK(mp.k == doctest::Approx(std::log2(2.5)).epsilon(1e-14));
    CHECK(mp.a == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(mp.gamma_inf_bound == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(std::abs(mp.Gamma_bound - 4.059) < 5e-4);
    for (int l = 0; l < 60; ++l)
        CHECK(std::abs(mp.p_seq[l] - mp.p_recurrence[l]) <= 1e-12 * mp.p_recurrence[l]);
    CHECK(mp.sandwich_holds);
    CHECK(mp.alpha_bound_holds);
    CHECK(mp.gamma_bound_holds);
    CHECK(mp.Gamma_bound_holds);
}

TEST_CASE("iteration sequences are monotone") {
    const auto mp = c::moser_params(0.04, 2.0, 1.25, 3, 40);
    for (int l = 1; l < 40; ++l) {
        CHECK(mp.p_seq[l] > mp.p_seq[l - 1]);
        CHECK(mp.gamma_seq[l] < mp.gamma_seq[l - 1]);
        CHECK(mp.alpha_seq[l] > mp.alpha_seq[l - 1]);
    }
    // the statement-form limit uses (d-2)/d in place of (d-2+2 alpha)/d and is larger
    CHECK(mp.gamma_statement > mp.gamma_inf_bound);
}

TEST_CASE("iteration exponents reject out-of-range sigma'") {
    CHECK_THROWS_AS(c::moser_params(0.04, 2.0, 1.0, 3, 10), InvalidArgument);
    CHECK_THROWS_AS(c::moser_params(0.04, 2.0, 3.0 / 1.8, 3, 10), InvalidArgument);
    CHECK_THROWS_AS(c::moser_params(0.04, 1.05, 1.25, 3, 10), InvalidArgument);
}

TEST_CASE("damping transform") {
    CHECK(c::damping_h(2.0, TimeProfile::constant(3.0), 0.5) == doctest::Approx(-3.0));
    CHECK(c::damping_h(2.0, TimeProfile::zero(), 0.5) == 0.0);
    CHECK(c::damping_h(0.0, TimeProfile::constant(3.0), 0.5) == 0.0);
    // integrable singularity at 0: int_0^t s^{-1/2} = 2 sqrt(t)
    const auto g = TimeProfile::closed_form([](double t) { return 1.0 / std::sqrt(t); }, 0.0);
    CHECK(c::damping_h(1.0, g, 0.25) == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK_THROWS_AS(c::damping_h(-1.0, g, 0.25), InvalidArgument);
}
