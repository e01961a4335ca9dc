#include "fellerlab/constants.hpp"

#include "fellerlab/error.hpp"

#include <cmath>

namespace feller::constants {

double omega(double q) {
    require(q >= 2.0, "omega: q must be >= 2");
    if (std::isinf(q)) return 0.5;
    return (q - 1.0) / (2.0 * q - 3.0);
}

double beta_threshold(int d) {
    require(d >= 3, "beta_threshold: d must be >= 3");
    const double w = omega(static_cast<double>(d));
    return 4.0 * w * w / (static_cast<double>(d) * d);
}

double lp_threshold(double beta) {
    require(beta >= 0.0 && beta < 4.0, "lp_threshold: beta must lie in [0, 4)");
    return 1.0 / (1.0 - std::sqrt(beta / 4.0));
}

bool lps_in_F0(double p, double q, int d) {
    require(p >= 2.0 && q >= 2.0, "lps_in_F0: p and q must be >= 2");
    require(d >= 3, "lps_in_F0: d must be >= 3");
    const double lhs = (std::isinf(p) ? 0.0 : d / p) + (std::isinf(q) ? 0.0 : 2.0 / q);
    return lhs <= 1.0;
}

ProofCoefficients proof_coefficients(double q, double beta, double m) {
    require(q >= 2.0 && std::isfinite(q), "proof_coefficients: q must be finite and >= 2");
    require(beta >= 0.0, "proof_coefficients: beta must be >= 0");
    require(m >= 1.0, "proof_coefficients: m must be >= 1 or inf");
    const double inv_m = std::isinf(m) ? 0.0 : 1.0 / m;
    const double sb = std::sqrt(beta);

    ProofCoefficients c;
    c.eta_star = q * std::sqrt(beta + inv_m) / 4.0;
    c.kappa_star = (q - 1.0) / 2.0;
    c.gamma_star = q * sb / (q - 1.0);
    c.N = 1.0 - sb / 2.0;
    c.M_margin = q - 1.0 - (q * sb / 2.0) * (2.0 * q - 3.0);
    c.admissible = sb < (2.0 / q) * omega(q);
    c.degenerate = beta == 0.0;
    return c;
}

double iteration_exponent_k(double beta, double p0) {
    require(beta >= 0.0, "iteration_exponent_k: beta must be >= 0");
    require(p0 > 1.0, "iteration_exponent_k: p0 must exceed 1");
    const double lhs = 4.0 * (p0 - 1.0) / (p0 * p0) - 2.0 * std::sqrt(beta) / p0;
    require(lhs > 0.0, "iteration_exponent_k: 4(p0-1)/p0^2 - 2 sqrt(beta)/p0 must be positive");
    // p0^k = 2 / lhs
    return std::log(2.0 / lhs) / std::log(p0);
}

MoserParams moser_params(double beta, double p0, double sigma_prime, int d, int L) {
    require(d >= 3, "moser_params: d must be >= 3");
    require(L >= 1, "moser_params: L must be >= 1");
    require(beta >= 0.0 && beta < 4.0, "moser_params: beta must lie in [0, 4)");
    require(p0 > 2.0 / (2.0 - std::sqrt(beta)), "moser_params: p0 must exceed 2/(2 - sqrt(beta))");

    MoserParams mp;
    mp.d = d;
    mp.beta = beta;
    mp.p0 = p0;
    mp.sigma_prime = sigma_prime;
    const double dd = d;
    mp.alpha = 2.0 / (dd + 2.0);
    const double denom = dd - 2.0 + 2.0 * mp.alpha;  // d - 2 + 2 alpha
    require(sigma_prime > 1.0 && sigma_prime < dd / denom,
            "moser_params: sigma' must lie in (1, d/(d-2+2 alpha))");

    mp.k = iteration_exponent_k(beta, p0);
    require(mp.k > 1.0, "moser_params: resulting k must exceed 1");

    const double a = dd / (sigma_prime * denom);
    mp.a = a;
    const double r = p0 / sigma_prime;

    mp.p_seq.resize(L);
    mp.p_recurrence.resize(L);
    for (int l = 1; l <= L; ++l) {
        mp.p_seq[l - 1] =
            (std::pow(a, l) * (r + 2.0) - std::pow(a, l - 1) * r - 2.0) / (a - 1.0);
    }
    mp.p_recurrence[0] = 2.0 + r;
    for (int l = 1; l < L; ++l) mp.p_recurrence[l] = 2.0 + mp.p_recurrence[l - 1] * a;

    const double p1 = mp.p_recurrence[0];
    mp.c1 = p1 / a;
    mp.c2 = mp.c1 / (a - 1.0);

    // Direct definitions: gamma_l = prod (1 - 2/p_j); alpha_l = sum_i (1/p_i) prod_{j>i} (1 - 2/p_j);
    // log Gamma_l^{1/2k} = sum_i (ln p_i / p_i) prod_{j>i} (1 - 2/p_j).
    mp.alpha_seq.resize(L);
    mp.gamma_seq.resize(L);
    mp.Gamma_root_seq.resize(L);
    double gamma = 1.0, alpha_l = 0.0, log_Gamma = 0.0;
    for (int l = 1; l <= L; ++l) {
        const double p = mp.p_recurrence[l - 1];
        const double f = 1.0 - 2.0 / p;
        gamma *= f;
        alpha_l = alpha_l * f + 1.0 / p;
        log_Gamma = log_Gamma * f + std::log(p) / p;
        mp.gamma_seq[l - 1] = gamma;
        mp.alpha_seq[l - 1] = alpha_l;
        mp.Gamma_root_seq[l - 1] = std::exp(log_Gamma);
    }

    mp.alpha_sup_bound = 1.0 / (r + 2.0 - p0 * denom / dd);
    const double s_proof = 1.0 - sigma_prime * denom / dd;
    mp.gamma_inf_bound = s_proof / (s_proof + 2.0 * sigma_prime / p0);
    const double s_stmt = 1.0 - sigma_prime * (dd - 2.0) / dd;
    mp.gamma_statement = s_stmt / (s_stmt + 2.0 * sigma_prime / p0);
    mp.Gamma_bound = std::pow(std::pow(mp.c1, 1.0 / (a - 1.0)) * std::pow(mp.c2, a / (a - 1.0)),
                              1.0 / mp.c2);

    // Relative slack of a few ulps: the limits are attained asymptotically.
    constexpr double ulp_slack = 1e-12;
    mp.sandwich_holds = true;
    mp.alpha_bound_holds = true;
    mp.gamma_bound_holds = true;
    mp.Gamma_bound_holds = true;
    for (int l = 1; l <= L; ++l) {
        const double p = mp.p_seq[l - 1];
        const double al = std::pow(a, l);
        if (p < mp.c1 * al * (1.0 - ulp_slack) || p > mp.c2 * al * (1.0 + ulp_slack))
            mp.sandwich_holds = false;
        if (mp.alpha_seq[l - 1] > mp.alpha_sup_bound * (1.0 + ulp_slack)) mp.alpha_bound_holds = false;
        if (mp.gamma_seq[l - 1] < mp.gamma_inf_bound * (1.0 - ulp_slack)) mp.gamma_bound_holds = false;
        if (mp.Gamma_root_seq[l - 1] > mp.Gamma_bound * (1.0 + ulp_slack)) mp.Gamma_bound_holds = false;
    }
    return mp;
}

double damping_h(double coef, const TimeProfile& g, double t) {
    require(coef >= 0.0, "damping_h: coefficient must be >= 0");
    require(t >= 0.0, "damping_h: t must be >= 0");
    if (t == 0.0 || coef == 0.0) return 0.0;
    return -coef * g.integral(0.0, t);
}

}  // namespace feller::constants
