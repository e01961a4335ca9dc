#pragma once

// Catalog of singular drift fields b(t, x) on R^d, d >= 3, with their
// known form-bound data and the explicit non-uniqueness solution.

#include "fellerlab/time_profile.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace feller {

class DriftField;
using DriftPtr = std::shared_ptr<const DriftField>;

namespace drift {

struct Zero {};
/// c * e, e = (1, ..., 1).
struct Constant { double c = 0.0; };
/// a (x - x0) / |x - x0|^2.
struct Hardy { double a = 1.0; std::vector<double> x0; };
/// C1 y/|y|^2 + C2 z/|z|^2 with x = (y, z), y in R^n, z in R^m, n + m = d.
struct Split { double C1 = 0.0; double C2 = 0.0; int n = 0; int m = 0; };
/// C 1{1-delta <= |x| < 1+delta} ||x| - 1|^{-a} e.
struct Annulus { double C = 1.0; double delta = 0.5; double a_exp = 0.25; };
/// a2 |t - t0|^{-1/2} (log(e + |t - t0|^{-1}))^{-(1+eps)/2} e.
struct TimeLog { double a2 = 1.0; double t0 = 0.0; double eps = 1.0; };
/// 2 kappa alpha (-ln t)^{alpha-1} x/|x|^2 for 0 < t < 1.
struct LogCounterexample { double kappa = 2.0; double alpha_exp = 1.0; };
struct Scaled { double c = 1.0; DriftPtr inner; };
struct Sum { std::vector<DriftPtr> parts; };

using Kind = std::variant<Zero, Constant, Hardy, Split, Annulus, TimeLog, LogCounterexample, Scaled, Sum>;

enum class Provenance { hardy_inequality, scaling, lps_subcritical, unknown };

const char* to_string(Provenance p);

struct FormBoundInfo {
    std::optional<double> beta;          // absent when unknown
    TimeProfile g;                       // zero unless a time weight is needed
    Provenance provenance = Provenance::unknown;
    std::optional<double> lower_bound;   // known lower bound on any admissible beta
    bool heuristic = false;              // sums: (sqrt b1 + sqrt b2)^2 upper bound
    std::string note;
};

}  // namespace drift

/// Immutable drift field. Evaluation is pure and thread-safe.
class DriftField {
public:
    DriftField(int d, drift::Kind kind);

    int dimension() const noexcept { return d_; }
    const drift::Kind& kind() const noexcept { return kind_; }
    bool time_dependent() const;
    std::string describe() const;

    /// Writes b(t, x) into out (size d). Throws DomainError on the singular locus.
    void eval(double t, std::span<const double> x, std::span<double> out) const;
    std::vector<double> eval(double t, std::span<const double> x) const;
    bool on_singular_locus(double t, std::span<const double> x) const;

private:
    void accumulate(double t, std::span<const double> x, double scale, std::span<double> out) const;

    int d_;
    drift::Kind kind_;
};

namespace drift {

// Validating constructors (throw InvalidArgument naming the violated range).
DriftPtr zero(int d);
DriftPtr constant(int d, double c);
DriftPtr hardy(int d, double a, std::vector<double> x0 = {});
DriftPtr split(int d, double C1, double C2, int n);
DriftPtr annulus(int d, double C, double delta, double a_exp);
DriftPtr time_log(int d, double a2, double t0, double eps);
DriftPtr log_counterexample(int d, double kappa, double alpha_exp);
DriftPtr scaled(double c, DriftPtr inner);
DriftPtr sum(std::vector<DriftPtr> parts);
/// Hardy part plus the logarithmic time singularity along e.
DriftPtr admissible(int d, double a1, std::vector<double> x0, double a2, double t0, double eps);

FormBoundInfo known_form_bound(const DriftField& field);

/// (4 pi t)^{-d/2} exp(-kappa (-ln t)^alpha - |x|^2/(4t)), 0 < t < 1.
double explicit_solution(double kappa, double alpha_exp, int d, double t, std::span<const double> x);
double explicit_solution_radial(double kappa, double alpha_exp, int d, double t, double r);
/// sup over x of explicit_solution, attained at x = 0.
double supnorm_decay(double kappa, double alpha_exp, int d, double t);

}  // namespace drift
}  // namespace feller
