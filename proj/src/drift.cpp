#include "fellerlab/drift.hpp"

#include "fellerlab/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace feller {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double time_log_factor(const drift::TimeLog& k, double t) {
    const double tau = std::abs(t - k.t0);
    return std::pow(tau, -0.5) * std::pow(std::log(std::numbers::e + 1.0 / tau), -(1.0 + k.eps) / 2.0);
}

}  // namespace

const char* drift::to_string(Provenance p) {
    switch (p) {
    case Provenance::hardy_inequality: return "hardy_inequality";
    case Provenance::scaling: return "scaling";
    case Provenance::lps_subcritical: return "lps_subcritical";
    case Provenance::unknown: return "unknown";
    }
    return "unknown";
}

DriftField::DriftField(int d, drift::Kind kind) : d_(d), kind_(std::move(kind)) {
    require(d >= 3, "drift: dimension d must be >= 3");
}

bool DriftField::time_dependent() const {
    return std::visit(overloaded{
                          [](const drift::TimeLog&) { return true; },
                          [](const drift::LogCounterexample& k) { return k.alpha_exp != 1.0; },
                          [](const drift::Scaled& k) { return k.inner->time_dependent(); },
                          [](const drift::Sum& k) {
                              for (const auto& p : k.parts)
                                  if (p->time_dependent()) return true;
                              return false;
                          },
                          [](const auto&) { return false; },
                      },
                      kind_);
}

std::string DriftField::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const drift::Zero&) { os << "zero"; },
                   [&](const drift::Constant& k) { os << "constant(c=" << k.c << ")"; },
                   [&](const drift::Hardy& k) { os << "hardy(a=" << k.a << ")"; },
                   [&](const drift::Split& k) {
                       os << "split(C1=" << k.C1 << ";C2=" << k.C2 << ";n=" << k.n << ";m=" << k.m << ")";
                   },
                   [&](const drift::Annulus& k) {
                       os << "annulus(C=" << k.C << ";delta=" << k.delta << ";a=" << k.a_exp << ")";
                   },
                   [&](const drift::TimeLog& k) {
                       os << "time_log(a2=" << k.a2 << ";t0=" << k.t0 << ";eps=" << k.eps << ")";
                   },
                   [&](const drift::LogCounterexample& k) {
                       os << "log_counterexample(kappa=" << k.kappa << ";alpha=" << k.alpha_exp << ")";
                   },
                   [&](const drift::Scaled& k) { os << "scaled(c=" << k.c << ";" << k.inner->describe() << ")"; },
                   [&](const drift::Sum& k) {
                       os << "sum(";
                       for (std::size_t i = 0; i < k.parts.size(); ++i)
                           os << (i ? ";" : "") << k.parts[i]->describe();
                       os << ")";
                   },
               },
               kind_);
    return os.str();
}

bool DriftField::on_singular_locus(double t, std::span<const double> x) const {
    return std::visit(
        overloaded{
            [&](const drift::Hardy& k) {
                double s = 0.0;
                for (int i = 0; i < d_; ++i) {
                    const double c = k.x0.empty() ? 0.0 : k.x0[i];
                    s += (x[i] - c) * (x[i] - c);
                }
                return s == 0.0;
            },
            [&](const drift::Split& k) {
                const bool y0 = k.C1 != 0.0 && norm2(x.subspan(0, k.n)) == 0.0;
                const bool z0 = k.C2 != 0.0 && k.m > 0 && norm2(x.subspan(k.n, k.m)) == 0.0;
                return y0 || z0;
            },
            [&](const drift::Annulus& k) { return k.C != 0.0 && std::sqrt(norm2(x)) == 1.0; },
            [&](const drift::TimeLog& k) { return k.a2 != 0.0 && t == k.t0; },
            [&](const drift::LogCounterexample&) { return !(t > 0.0 && t < 1.0) || norm2(x) == 0.0; },
            [&](const drift::Scaled& k) { return k.inner->on_singular_locus(t, x); },
            [&](const drift::Sum& k) {
                for (const auto& p : k.parts)
                    if (p->on_singular_locus(t, x)) return true;
                return false;
            },
            [](const auto&) { return false; },
        },
        kind_);
}

void DriftField::eval(double t, std::span<const double> x, std::span<double> out) const {
    require(static_cast<int>(x.size()) == d_ && static_cast<int>(out.size()) == d_,
            "drift eval: point and output must have dimension d");
    if (on_singular_locus(t, x)) throw DomainError("drift eval on singular locus: " + describe());
    for (double& o : out) o = 0.0;
    accumulate(t, x, 1.0, out);
}

std::vector<double> DriftField::eval(double t, std::span<const double> x) const {
    std::vector<double> out(d_);
    eval(t, x, out);
    return out;
}

void DriftField::accumulate(double t, std::span<const double> x, double scale, std::span<double> out) const {
    std::visit(overloaded{
                   [&](const drift::Zero&) {},
                   [&](const drift::Constant& k) {
                       for (double& o : out) o += scale * k.c;
                   },
                   [&](const drift::Hardy& k) {
                       double s = 0.0;
                       for (int i = 0; i < d_; ++i) {
                           const double c = k.x0.empty() ? 0.0 : k.x0[i];
                           s += (x[i] - c) * (x[i] - c);
                       }
                       for (int i = 0; i < d_; ++i) {
                           const double c = k.x0.empty() ? 0.0 : k.x0[i];
                           out[i] += scale * k.a * (x[i] - c) / s;
                       }
                   },
                   [&](const drift::Split& k) {
                       if (k.C1 != 0.0) {
                           const double sy = norm2(x.subspan(0, k.n));
                           for (int i = 0; i < k.n; ++i) out[i] += scale * k.C1 * x[i] / sy;
                       }
                       if (k.C2 != 0.0 && k.m > 0) {
                           const double sz = norm2(x.subspan(k.n, k.m));
                           for (int i = k.n; i < d_; ++i) out[i] += scale * k.C2 * x[i] / sz;
                       }
                   },
                   [&](const drift::Annulus& k) {
                       const double r = std::sqrt(norm2(x));
                       if (r >= 1.0 - k.delta && r < 1.0 + k.delta) {
                           const double v = k.C * std::pow(std::abs(r - 1.0), -k.a_exp);
                           for (double& o : out) o += scale * v;
                       }
                   },
                   [&](const drift::TimeLog& k) {
                       if (k.a2 == 0.0) return;
                       const double v = k.a2 * time_log_factor(k, t);
                       for (double& o : out) o += scale * v;
                   },
                   [&](const drift::LogCounterexample& k) {
                       const double coef = 2.0 * k.kappa * k.alpha_exp * std::pow(-std::log(t), k.alpha_exp - 1.0);
                       const double s = norm2(x);
                       for (int i = 0; i < d_; ++i) out[i] += scale * coef * x[i] / s;
                   },
                   [&](const drift::Scaled& k) { k.inner->accumulate(t, x, scale * k.c, out); },
                   [&](const drift::Sum& k) {
                       for (const auto& p : k.parts) p->accumulate(t, x, scale, out);
                   },
               },
               kind_);
}

namespace drift {

DriftPtr zero(int d) { return std::make_shared<const DriftField>(d, Zero{}); }

DriftPtr constant(int d, double c) {
    require(std::isfinite(c), "constant: c must be finite");
    return std::make_shared<const DriftField>(d, Constant{c});
}

DriftPtr hardy(int d, double a, std::vector<double> x0) {
    require(std::isfinite(a), "hardy: a must be finite");
    require(x0.empty() || static_cast<int>(x0.size()) == d, "hardy: x0 must have dimension d");
    return std::make_shared<const DriftField>(d, Hardy{a, std::move(x0)});
}

DriftPtr split(int d, double C1, double C2, int n) {
    require(n >= 1 && n <= d, "split: n must lie in [1, d]");
    const int m = d - n;
    require(m > 0 || C2 == 0.0, "split: C2 must be 0 when m = 0");
    require(std::isfinite(C1) && std::isfinite(C2), "split: C1, C2 must be finite");
    return std::make_shared<const DriftField>(d, Split{C1, C2, n, m});
}

DriftPtr annulus(int d, double C, double delta, double a_exp) {
    require(delta > 0.0 && delta < 1.0, "annulus: delta must lie in (0, 1)");
    require(a_exp > 0.0 && a_exp < 0.5, "annulus: a_exp must lie in (0, 1/2)");
    require(std::isfinite(C), "annulus: C must be finite");
    return std::make_shared<const DriftField>(d, Annulus{C, delta, a_exp});
}

DriftPtr time_log(int d, double a2, double t0, double eps) {
    require(t0 >= 0.0, "time_log: t0 must be >= 0");
    require(eps > 0.0, "time_log: eps must be > 0");
    require(std::isfinite(a2), "time_log: a2 must be finite");
    return std::make_shared<const DriftField>(d, TimeLog{a2, t0, eps});
}

DriftPtr log_counterexample(int d, double kappa, double alpha_exp) {
    require(kappa > 0.0, "log_counterexample: kappa must be > 0");
    require(alpha_exp >= 1.0, "log_counterexample: alpha must be >= 1");
    return std::make_shared<const DriftField>(d, LogCounterexample{kappa, alpha_exp});
}

DriftPtr scaled(double c, DriftPtr inner) {
    require(inner != nullptr, "scaled: inner field required");
    require(std::isfinite(c) && c != 0.0, "scaled: c must be finite and nonzero");
    const int d = inner->dimension();
    return std::make_shared<const DriftField>(d, Scaled{c, std::move(inner)});
}

DriftPtr sum(std::vector<DriftPtr> parts) {
    require(!parts.empty(), "sum: at least one part required");
    const int d = parts.front()->dimension();
    for (const auto& p : parts) require(p && p->dimension() == d, "sum: parts must share dimension");
    return std::make_shared<const DriftField>(d, Sum{std::move(parts)});
}

DriftPtr admissible(int d, double a1, std::vector<double> x0, double a2, double t0, double eps) {
    return sum({hardy(d, a1, std::move(x0)), time_log(d, a2, t0, eps)});
}

FormBoundInfo known_form_bound(const DriftField& field) {
    const int d = field.dimension();
    const double hardy_const = std::pow(2.0 / (d - 2.0), 2);
    return std::visit(
        overloaded{
            [&](const Zero&) {
                FormBoundInfo info;
                info.beta = 0.0;
                info.provenance = Provenance::lps_subcritical;
                return info;
            },
            [&](const Constant& k) {
                FormBoundInfo info;
                info.beta = 0.0;
                info.g = TimeProfile::constant(k.c * k.c * d);
                info.provenance = Provenance::lps_subcritical;
                info.note = "bounded field: |b|^2 absorbed into g";
                return info;
            },
            [&](const Hardy& k) {
                FormBoundInfo info;
                info.beta = k.a * k.a * hardy_const;
                info.provenance = Provenance::hardy_inequality;
                return info;
            },
            [&](const Split& k) {
                FormBoundInfo info;
                auto part = [](double C, int n) -> std::optional<double> {
                    if (C == 0.0) return 0.0;
                    if (n < 3) return std::nullopt;
                    return C * C * std::pow(2.0 / (n - 2.0), 2);
                };
                const auto b1 = part(k.C1, k.n);
                const auto b2 = part(k.C2, k.m);
                if (!b1 || !b2) {
                    info.note = "subspace of dimension < 3 carries a nonzero coefficient: no Hardy bound";
                    return info;
                }
                const double s = std::sqrt(*b1) + std::sqrt(*b2);
                info.beta = s * s;
                info.provenance = Provenance::hardy_inequality;
                info.heuristic = *b1 > 0.0 && *b2 > 0.0;
                if (info.heuristic) info.note = "sum of subspace Hardy bounds";
                return info;
            },
            [&](const Annulus&) {
                FormBoundInfo info;
                info.note = "form-bounded with an unspecified beta; estimate numerically";
                return info;
            },
            [&](const TimeLog& k) {
                FormBoundInfo info;
                info.beta = 0.0;
                const double c = k.a2 * k.a2 * d;
                const TimeLog kk = k;
                info.g = TimeProfile::closed_form(
                    [c, kk](double t) {
                        if (t == kk.t0) return std::numeric_limits<double>::infinity();
                        const double f = time_log_factor(kk, t);
                        return c * f * f;
                    },
                    k.t0, "time_log");
                info.provenance = Provenance::lps_subcritical;
                info.note = "g(t) = |b(t)|^2 = d a2^2 |t-t0|^{-1} (log(e+|t-t0|^{-1}))^{-1-eps}";
                return info;
            },
            [&](const LogCounterexample& k) {
                FormBoundInfo info;
                if (k.alpha_exp == 1.0 && k.kappa > d / 2.0) {
                    info.lower_bound = 4.0 * d * d / ((d - 2.0) * (d - 2.0));
                    info.note = "admissible only with beta > 4d^2/(d-2)^2";
                } else if (k.alpha_exp > 1.0) {
                    info.note = "time singularity too strong: not form-bounded for any beta";
                }
                return info;
            },
            [&](const Scaled& k) {
                FormBoundInfo inner = known_form_bound(*k.inner);
                const double c2 = k.c * k.c;
                if (inner.beta) {
                    inner.beta = *inner.beta * c2;
                    inner.g = inner.g.scaled(c2);
                    inner.provenance = Provenance::scaling;
                }
                if (inner.lower_bound) inner.lower_bound = *inner.lower_bound * c2;
                return inner;
            },
            [&](const Sum& k) {
                FormBoundInfo info;
                double s = 0.0;
                TimeProfile g;
                int nonzero = 0;
                for (const auto& p : k.parts) {
                    const auto pi = known_form_bound(*p);
                    if (!pi.beta) {
                        info.note = "sum with a part of unknown form-bound";
                        return info;
                    }
                    s += std::sqrt(*pi.beta);
                    g = g + pi.g;
                    if (*pi.beta > 0.0 || !pi.g.is_zero()) ++nonzero;
                }
                info.beta = s * s;
                info.g = g;
                info.provenance = Provenance::hardy_inequality;
                info.heuristic = nonzero > 1;
                info.note = "sum rule (sqrt b1 + sqrt b2)^2 is an upper-bound heuristic";
                return info;
            },
        },
        field.kind());
}

double explicit_solution(double kappa, double alpha_exp, int d, double t, std::span<const double> x) {
    require(static_cast<int>(x.size()) == d, "explicit_solution: point must have dimension d");
    return explicit_solution_radial(kappa, alpha_exp, d, t, std::sqrt(norm2(x)));
}

double explicit_solution_radial(double kappa, double alpha_exp, int d, double t, double r) {
    require(t > 0.0 && t < 1.0, "explicit_solution: t must lie in (0, 1)");
    require(kappa > 0.0 && alpha_exp >= 1.0 && d >= 3, "explicit_solution: parameters out of range");
    return std::pow(4.0 * std::numbers::pi * t, -d / 2.0) *
           std::exp(-kappa * std::pow(-std::log(t), alpha_exp) - r * r / (4.0 * t));
}

double supnorm_decay(double kappa, double alpha_exp, int d, double t) {
    return explicit_solution_radial(kappa, alpha_exp, d, t, 0.0);
}

}  // namespace drift
}  // namespace feller
