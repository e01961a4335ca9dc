#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace feller {

/// A nonnegative, locally integrable weight g(t) on [0, inf). Either
/// identically zero, a closed form (possibly with one integrable
/// singularity), or samples integrated by the trapezoid rule.
class TimeProfile {
public:
    TimeProfile() = default;  // g == 0

    static TimeProfile zero() { return {}; }
    static TimeProfile constant(double c);
    static TimeProfile closed_form(std::function<double(double)> g,
                                   std::optional<double> singular_at = std::nullopt,
                                   std::string label = "closed_form");
    /// Piecewise-linear interpolant of (time, value) samples; times strictly increasing.
    static TimeProfile sampled(std::vector<double> times, std::vector<double> values);

    bool is_zero() const noexcept { return kind_ == Kind::zero; }
    const std::string& label() const noexcept { return label_; }
    std::optional<double> singular_at() const noexcept { return singular_at_; }

    double operator()(double t) const;
    /// Integral over [a, b], a <= b. Closed forms use tanh-sinh quadrature split at the singularity.
    double integral(double a, double b) const;

    TimeProfile scaled(double c) const;
    friend TimeProfile operator+(const TimeProfile& lhs, const TimeProfile& rhs);

private:
    enum class Kind { zero, closed, sampled };
    Kind kind_ = Kind::zero;
    std::function<double(double)> fn_;
    std::optional<double> singular_at_;
    std::vector<double> times_, values_;
    std::string label_ = "zero";
};

}  // namespace feller
