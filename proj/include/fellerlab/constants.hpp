#pragma once

// Closed-form constants, thresholds and exponent sequences of the
// form-bounded drift theory. Everything here is a pure function.

#include "fellerlab/time_profile.hpp"

#include <limits>
#include <vector>

namespace feller::constants {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// omega_q = (q-1)/(2q-3); q = inf gives the limit 1/2.
double omega(double q);

/// Smallness threshold 4 omega_d^2 / d^2 on the form-bound for dimension d >= 3.
double beta_threshold(int d);

/// (1 - sqrt(beta/4))^{-1}: L^p contraction holds for p above this.
double lp_threshold(double beta);

/// Ladyzhenskaya-Prodi-Serrin test d/p + 2/q <= 1 (p, q may be inf).
bool lps_in_F0(double p, double q, int d);

struct ProofCoefficients {
    double eta_star = 0.0;    // q sqrt(beta + 1/m) / 4
    double kappa_star = 0.0;  // (q-1)/2
    double gamma_star = 0.0;  // q sqrt(beta) / (q-1)
    double N = 0.0;           // 1 - sqrt(beta)/2
    double M_margin = 0.0;    // q-1 - (q sqrt(beta)/2)(2q-3)
    bool admissible = false;  // sqrt(beta) < (2/q) omega_q
    bool degenerate = false;  // beta == 0: gamma_star vanishes, use the drift-free path
};

/// Coefficient selection of the gradient a priori estimate. m may be kInf.
ProofCoefficients proof_coefficients(double q, double beta, double m);

/// Smallest k solving 4(p0-1)/p0^2 - 2 sqrt(beta)/p0 = 2/p0^k. Throws if the
/// left side is not positive or p0 <= 1.
double iteration_exponent_k(double beta, double p0);

struct MoserParams {
    int d = 3;
    double beta = 0.0;
    double p0 = 0.0;
    double sigma_prime = 0.0;
    double alpha = 0.0;  // fixed to 2/(d+2)
    double k = 0.0;
    double a = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;

    // index l-1 holds the value for l = 1..L
    std::vector<double> p_seq;          // closed form
    std::vector<double> p_recurrence;   // sigma'(p_{l+1} - 2) = p_l d/(d-2+2 alpha)
    std::vector<double> alpha_seq;      // from the defining sums
    std::vector<double> gamma_seq;      // from the defining products
    std::vector<double> Gamma_root_seq; // Gamma_l^{1/2k}

    double alpha_sup_bound = 0.0;
    double gamma_inf_bound = 0.0;   // proof version
    double gamma_statement = 0.0;   // statement version, uses sigma'(d-2)/d
    double Gamma_bound = 0.0;       // bound on Gamma_l^{1/2k}

    bool sandwich_holds = false;    // c1 a^l <= p_l <= c2 a^l for all computed l
    bool alpha_bound_holds = false;
    bool gamma_bound_holds = false;
    bool Gamma_bound_holds = false;
};

/// Exponent bookkeeping of the Moser-type iteration, first L terms.
MoserParams moser_params(double beta, double p0, double sigma_prime, int d, int L);

/// h(t) = -coef * int_0^t g.
double damping_h(double coef, const TimeProfile& g, double t);

}  // namespace feller::constants
