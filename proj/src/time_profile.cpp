#include "fellerlab/time_profile.hpp"

#include "fellerlab/error.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>

namespace feller {

TimeProfile TimeProfile::constant(double c) {
    if (c == 0.0) return {};
    return closed_form([c](double) { return c; }, std::nullopt, "constant");
}

TimeProfile TimeProfile::closed_form(std::function<double(double)> g,
                                     std::optional<double> singular_at, std::string label) {
    TimeProfile p;
    p.kind_ = Kind::closed;
    p.fn_ = std::move(g);
    p.singular_at_ = singular_at;
    p.label_ = std::move(label);
    return p;
}

TimeProfile TimeProfile::sampled(std::vector<double> times, std::vector<double> values) {
    require(times.size() == values.size() && times.size() >= 2,
            "sampled profile needs at least two (time, value) pairs");
    for (std::size_t i = 1; i < times.size(); ++i)
        require(times[i] > times[i - 1], "sampled profile times must increase strictly");
    TimeProfile p;
    p.kind_ = Kind::sampled;
    p.times_ = std::move(times);
    p.values_ = std::move(values);
    p.label_ = "sampled";
    return p;
}

double TimeProfile::operator()(double t) const {
    switch (kind_) {
    case Kind::zero:
        return 0.0;
    case Kind::closed:
        return fn_(t);
    case Kind::sampled: {
        if (t <= times_.front()) return values_.front();
        if (t >= times_.back()) return values_.back();
        auto it = std::upper_bound(times_.begin(), times_.end(), t);
        const auto j = static_cast<std::size_t>(it - times_.begin());
        const double w = (t - times_[j - 1]) / (times_[j] - times_[j - 1]);
        return (1.0 - w) * values_[j - 1] + w * values_[j];
    }
    }
    return 0.0;
}

namespace {

double integrate_smooth(const std::function<double(double)>& f, double a, double b) {
    if (b <= a) return 0.0;
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, a, b);
}

}  // namespace

double TimeProfile::integral(double a, double b) const {
    require(a <= b, "TimeProfile::integral: need a <= b");
    switch (kind_) {
    case Kind::zero:
        return 0.0;
    case Kind::closed: {
        if (singular_at_ && *singular_at_ > a && *singular_at_ < b)
            return integrate_smooth(fn_, a, *singular_at_) + integrate_smooth(fn_, *singular_at_, b);
        return integrate_smooth(fn_, a, b);
    }
    case Kind::sampled: {
        // trapezoid over the piecewise-linear interpolant, clipped to [a, b]
        std::vector<double> knots{a};
        for (double t : times_)
            if (t > a && t < b) knots.push_back(t);
        knots.push_back(b);
        double sum = 0.0;
        for (std::size_t i = 1; i < knots.size(); ++i)
            sum += 0.5 * (knots[i] - knots[i - 1]) * ((*this)(knots[i]) + (*this)(knots[i - 1]));
        return sum;
    }
    }
    return 0.0;
}

TimeProfile TimeProfile::scaled(double c) const {
    if (is_zero() || c == 0.0) return {};
    if (kind_ == Kind::sampled) {
        auto v = values_;
        for (double& x : v) x *= c;
        return sampled(times_, std::move(v));
    }
    auto f = fn_;
    return closed_form([f, c](double t) { return c * f(t); }, singular_at_, label_);
}

TimeProfile operator+(const TimeProfile& lhs, const TimeProfile& rhs) {
    if (lhs.is_zero()) return rhs;
    if (rhs.is_zero()) return lhs;
    auto singular = lhs.singular_at_ ? lhs.singular_at_ : rhs.singular_at_;
    return TimeProfile::closed_form([lhs, rhs](double t) { return lhs(t) + rhs(t); }, singular,
                                    lhs.label_ + "+" + rhs.label_);
}

}  // namespace feller
