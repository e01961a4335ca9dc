#include "fellerlab/approximation.hpp"

#include "fellerlab/error.hpp"

#include <cmath>
#include <sstream>

namespace feller {

namespace {

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Probe-ray unit vector e/|e| in R^d.
double ray_component(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / std::sqrt(static_cast<double>(v.size()));
}

template <class Eval>
VectorField sample(const DriftField& field, const Grid& grid, Eval&& eval) {
    require(field.dimension() == grid.dimension(), "drift and grid dimensions differ");
    const int comps = grid.vector_components();
    VectorField out{comps, std::vector<double>(grid.size() * comps, 0.0)};
    const auto n = static_cast<long long>(grid.size());
    const int d = grid.dimension();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        std::vector<double> x(d), b(d);
        grid.point(static_cast<std::size_t>(i), x);
        eval(std::span<const double>(x), std::span<double>(b));
        if (comps == 1) out.data[i] = ray_component(b);
        else
            for (int c = 0; c < 3; ++c) out.data[i * 3 + c] = b[c];
    }
    return out;
}

double bump(double r2_over_w2) {
    const double s = 1.0 - r2_over_w2;
    return s > 0.0 ? s * s * s * s : 0.0;
}

}  // namespace

void truncate(const DriftField& field, double m, double t, std::span<const double> x, std::span<double> out) {
    require(m >= 1.0, "truncate: m must be >= 1");
    for (double& o : out) o = 0.0;
    if (t > m || norm(x) > m || field.on_singular_locus(t, x)) return;
    field.eval(t, x, out);
    if (!(norm(out) <= m))
        for (double& o : out) o = 0.0;
}

std::vector<double> truncate(const DriftField& field, double m, double t, std::span<const double> x) {
    std::vector<double> out(field.dimension());
    truncate(field, m, t, x, out);
    return out;
}

VectorField sample_exact(const DriftField& field, const Grid& grid, double t) {
    return sample(field, grid, [&](std::span<const double> x, std::span<double> b) {
        if (field.on_singular_locus(t, x)) {
            for (double& v : b) v = 0.0;
            return;
        }
        field.eval(t, x, b);
    });
}

VectorField sample_truncated(const DriftField& field, double m, const Grid& grid, double t) {
    return sample(field, grid, [&](std::span<const double> x, std::span<double> b) { truncate(field, m, t, x, b); });
}

double auto_width(double m, const Grid& grid) { return std::max(1.0 / m, 2.0 * grid.spacing()); }

kernels::ConvolutionKernel3 bump_kernel3(double width, double h) {
    kernels::ConvolutionKernel3 k;
    const int r = static_cast<int>(std::ceil(width / h));
    double mass = 0.0;
    for (int i = -r; i <= r; ++i)
        for (int j = -r; j <= r; ++j)
            for (int l = -r; l <= r; ++l) {
                const double w = bump((i * i + j * j + l * l) * h * h / (width * width));
                if (w <= 0.0) continue;
                k.offsets.push_back({i, j, l});
                k.weights.push_back(w);
                mass += w;
            }
    for (double& w : k.weights) w /= mass;
    return k;
}

kernels::ConvolutionKernel1 bump_kernel1(double width, double h) {
    kernels::ConvolutionKernel1 k;
    k.radius = static_cast<int>(std::ceil(width / h));
    double mass = 0.0;
    for (int o = -k.radius; o <= k.radius; ++o) {
        k.weights.push_back(bump(o * o * h * h / (width * width)));
        mass += k.weights.back();
    }
    for (double& w : k.weights) w /= mass;
    return k;
}

MollifiedDrift mollify(DriftPtr field, double m, const Grid& grid, double t, std::optional<double> width) {
    require(field != nullptr, "mollify: field required");
    require(m >= 1.0, "mollify: m must be >= 1");
    const double h = grid.spacing();
    const double w = width.value_or(auto_width(m, grid));
    require(w >= 2.0 * h * (1.0 - 1e-12), "mollify: width below 2 grid spacings (under-resolved smoothing)");
    MollifiedDrift out;
    out.source = field;
    out.m = m;
    out.width = w;
    out.time = t;
    const VectorField raw = sample_truncated(*field, m, grid, t);
    out.samples.components = raw.components;
    out.samples.data.assign(raw.data.size(), 0.0);
    if (grid.kind() == GridKind::radial)
        kernels::omp::convolve1(bump_kernel1(w, h), raw.data, raw.components, out.samples.data);
    else
        kernels::omp::convolve3(bump_kernel3(w, h), grid.n() + 1, raw.data, raw.components, out.samples.data);
    return out;
}

DriftSource mollified_source(DriftPtr field, double m, const Grid& grid, std::optional<double> width) {
    require(field != nullptr, "mollified_source: field required");
    // Validate once up front so configuration errors surface before any solve.
    (void)mollify(field, m, grid, 0.0, width);
    std::ostringstream label;
    label << "mollified(" << field->describe() << ";m=" << m << ")";
    return {field->time_dependent(),
            [field, m, &grid, width](double t) { return mollify(field, m, grid, t, width).samples; }, label.str()};
}

DriftSource exact_source(DriftPtr field, const Grid& grid) {
    require(field != nullptr, "exact_source: field required");
    return {field->time_dependent(), [field, &grid](double t) { return sample_exact(*field, grid, t); },
            field->describe()};
}

double c1_error(const DriftField& field, double m, const Grid& grid, const Shell& region,
                std::span<const double> times, std::optional<double> width) {
    require(region.r_hi > region.r_lo && region.r_lo >= 0.0, "c1_error: empty region");
    require(!times.empty(), "c1_error: at least one time slice required");
    // The shared_ptr is only needed to record the source; alias without ownership.
    const DriftPtr alias(DriftPtr{}, &field);
    const auto w = grid.weights();
    const int d = grid.dimension();
    double total = 0.0;
    bool any = false;
    for (double t : times) {
        const auto moll = mollify(alias, m, grid, t, width);
        const auto exact = sample_exact(field, grid, t);
        std::vector<double> x(d);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double r = grid.radius(i);
            if (r < region.r_lo || r > region.r_hi) continue;
            grid.point(i, x);
            if (field.on_singular_locus(t, x)) continue;
            any = true;
            double e2 = 0.0;
            for (int c = 0; c < moll.samples.components; ++c) {
                const double diff = moll.samples.at(i)[c] - exact.at(i)[c];
                e2 += diff * diff;
            }
            total += w[i] * e2;
        }
    }
    require(any, "c1_error: region contains no grid nodes");
    return std::sqrt(total / static_cast<double>(times.size()));
}

double c2_margin(const MollifiedDrift& moll, const Grid& grid, double beta, const FormBoundOptions& opts) {
    const auto rep = estimate_beta(moll.samples, grid, opts);
    return rep.beta_hat - (beta + 1.0 / moll.m);
}

}  // namespace feller
