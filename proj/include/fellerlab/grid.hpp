#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace feller {

/// Radially symmetric problem in R^d: nodes r_i = i h, i = 0..n, h = r_max/n.
/// r = 0 is a symmetry point, r = r_max carries Dirichlet-zero data.
struct RadialSpec {
    int d = 3;
    double r_max = 1.0;
    int n = 256;
};

/// Cube [-L, L]^3: nodes x_i = -L + i h, i = 0..n per axis, h = 2L/n.
/// The faces carry Dirichlet-zero data.
struct Tensor3Spec {
    double L = 1.0;
    int n = 32;
};

enum class GridKind { radial, tensor3 };

class Grid {
public:
    static Grid radial(const RadialSpec& spec);
    static Grid tensor3(const Tensor3Spec& spec);

    GridKind kind() const noexcept { return kind_; }
    int dimension() const noexcept { return d_; }
    int n() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    double extent() const noexcept { return extent_; }  // r_max or L
    std::size_t size() const noexcept { return weights_.size(); }
    /// Number of stored components of a grid vector field: 1 (radial) or 3.
    int vector_components() const noexcept { return kind_ == GridKind::radial ? 1 : 3; }

    /// Quadrature weight of each node (dual-cell volume in R^d).
    std::span<const double> weights() const noexcept { return weights_; }
    bool is_boundary(std::size_t node) const noexcept { return boundary_[node] != 0; }
    double radius(std::size_t node) const;  // |x| of the node

    /// Physical point in R^d of a node. Radial nodes sit on the probe ray r * e/|e|.
    void point(std::size_t node, std::span<double> x) const;
    std::vector<double> point(std::size_t node) const;

    std::size_t index(int i, int j, int k) const noexcept {
        return (static_cast<std::size_t>(i) * (n_ + 1) + j) * (n_ + 1) + k;
    }
    double coord(int i) const noexcept { return kind_ == GridKind::radial ? i * h_ : -extent_ + i * h_; }

    /// Total measure of the discretized domain (sum of weights).
    double volume() const;
    std::string describe() const;

    bool same_layout(const Grid& other) const noexcept {
        return kind_ == other.kind_ && d_ == other.d_ && n_ == other.n_ && h_ == other.h_;
    }

private:
    Grid() = default;

    GridKind kind_ = GridKind::radial;
    int d_ = 3;
    int n_ = 0;
    double h_ = 0.0;
    double extent_ = 0.0;
    std::vector<double> weights_;
    std::vector<unsigned char> boundary_;
};

/// Surface area of the unit sphere in R^d.
double unit_sphere_area(int d);

/// Per-node vector samples, node-major: data[node * components + c].
struct VectorField {
    int components = 1;
    std::vector<double> data;

    std::size_t nodes() const noexcept { return components ? data.size() / components : 0; }
    std::span<const double> at(std::size_t node) const {
        return std::span<const double>(data).subspan(node * components, components);
    }
    std::vector<double> magnitude() const;
    double sup_magnitude() const;
};

struct ScalarState {
    double time = 0.0;
    std::vector<double> values;
};

struct Trajectory {
    double s = 0.0;
    double step = 0.0;
    std::vector<ScalarState> states;

    double end_time() const { return states.empty() ? s : states.back().time; }
    /// State whose time is within step/1e6 of t; throws if none.
    const ScalarState& at(double t) const;
};

}  // namespace feller
