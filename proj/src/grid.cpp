#include "fellerlab/grid.hpp"

#include "fellerlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace feller {

double unit_sphere_area(int d) {
    return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

Grid Grid::radial(const RadialSpec& spec) {
    require(spec.d >= 3, "radial grid: d must be >= 3");
    require(spec.n >= 16, "radial grid: n must be >= 16");
    require(spec.r_max > 0.0 && std::isfinite(spec.r_max), "radial grid: r_max must be positive");

    Grid g;
    g.kind_ = GridKind::radial;
    g.d_ = spec.d;
    g.n_ = spec.n;
    g.h_ = spec.r_max / spec.n;
    g.extent_ = spec.r_max;
    g.weights_.resize(spec.n + 1);
    g.boundary_.assign(spec.n + 1, 0);
    g.boundary_[spec.n] = 1;

    const double area = unit_sphere_area(spec.d);
    const double d = spec.d;
    for (int i = 0; i <= spec.n; ++i) {
        const double lo = std::max(0.0, (i - 0.5) * g.h_);
        const double hi = std::min(spec.r_max, (i + 0.5) * g.h_);
        g.weights_[i] = area * (std::pow(hi, d) - std::pow(lo, d)) / d;
    }
    return g;
}

Grid Grid::tensor3(const Tensor3Spec& spec) {
    require(spec.n >= 16, "tensor3 grid: n must be >= 16");
    require(spec.L > 0.0 && std::isfinite(spec.L), "tensor3 grid: L must be positive");

    Grid g;
    g.kind_ = GridKind::tensor3;
    g.d_ = 3;
    g.n_ = spec.n;
    g.h_ = 2.0 * spec.L / spec.n;
    g.extent_ = spec.L;
    const std::size_t m = spec.n + 1;
    g.weights_.resize(m * m * m);
    g.boundary_.assign(m * m * m, 0);

    auto w1 = [&](int i) { return (i == 0 || i == spec.n) ? 0.5 * g.h_ : g.h_; };
    for (int i = 0; i <= spec.n; ++i)
        for (int j = 0; j <= spec.n; ++j)
            for (int k = 0; k <= spec.n; ++k) {
                const auto id = g.index(i, j, k);
                g.weights_[id] = w1(i) * w1(j) * w1(k);
                const bool face = i == 0 || j == 0 || k == 0 || i == spec.n || j == spec.n || k == spec.n;
                g.boundary_[id] = face ? 1 : 0;
            }
    return g;
}

double Grid::radius(std::size_t node) const {
    if (kind_ == GridKind::radial) return static_cast<double>(node) * h_;
    std::array<double, 3> x{};
    point(node, x);
    return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

void Grid::point(std::size_t node, std::span<double> x) const {
    if (kind_ == GridKind::radial) {
        const double r = static_cast<double>(node) * h_;
        const double c = r / std::sqrt(static_cast<double>(d_));
        for (int i = 0; i < d_; ++i) x[i] = c;
        return;
    }
    const std::size_t m = n_ + 1;
    const auto k = static_cast<int>(node % m);
    const auto j = static_cast<int>((node / m) % m);
    const auto i = static_cast<int>(node / (m * m));
    x[0] = coord(i);
    x[1] = coord(j);
    x[2] = coord(k);
}

std::vector<double> Grid::point(std::size_t node) const {
    std::vector<double> x(d_);
    point(node, x);
    return x;
}

double Grid::volume() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
}

std::string Grid::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (kind_ == GridKind::radial)
        os << "radial(d=" << d_ << ";r_max=" << extent_ << ";n=" << n_ << ")";
    else
        os << "tensor3(L=" << extent_ << ";n=" << n_ << ")";
    return os.str();
}

std::vector<double> VectorField::magnitude() const {
    std::vector<double> out(nodes());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (int c = 0; c < components; ++c) s += data[i * components + c] * data[i * components + c];
        out[i] = std::sqrt(s);
    }
    return out;
}

double VectorField::sup_magnitude() const {
    double m = 0.0;
    for (double v : magnitude()) m = std::max(m, v);
    return m;
}

const ScalarState& Trajectory::at(double t) const {
    const double tol = std::max(step, 1e-300) * 1e-6;
    for (const auto& st : states)
        if (std::abs(st.time - t) <= tol) return st;
    throw InvalidArgument("trajectory has no state at the requested time");
}

}  // namespace feller
