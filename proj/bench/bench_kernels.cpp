// Serial reference kernels against their OpenMP versions on matching inputs.

#include "fellerlab/kernels.hpp"
#include "fellerlab/random.hpp"

#include <benchmark/benchmark.h>

#include <string_view>
#include <vector>

namespace {

std::vector<double> noise(std::size_t n, std::string_view label) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = feller::rng::uniform(7, label, i) - 0.5;
    return v;
}

// Diagonally dominant operator shaped like an implicit heat step.
feller::kernels::Stencil7 heat_stencil(int m) {
    feller::kernels::Stencil7 op;
    op.resize(m);
    for (std::size_t i = 0; i < op.size(); ++i) {
        op.diag[i] = 1.0 + 6.0 * 10.0;
        for (auto& p : op.pull) p[i] = 10.0;
    }
    return op;
}

namespace K = feller::kernels;

template <class Sum>
void reduce_bench(benchmark::State& state, Sum sum) {
    const auto x = noise(static_cast<std::size_t>(state.range(0)), "b1");
    for (auto _ : state) benchmark::DoNotOptimize(sum(x));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_dot_serial(benchmark::State& s) {
    const auto y = noise(static_cast<std::size_t>(s.range(0)), "b2");
    reduce_bench(s, [&](const std::vector<double>& x) { return K::serial::dot(x, y); });
}
void BM_dot_omp(benchmark::State& s) {
    const auto y = noise(static_cast<std::size_t>(s.range(0)), "b2");
    reduce_bench(s, [&](const std::vector<double>& x) { return K::omp::dot(x, y); });
}
void BM_max_abs_serial(benchmark::State& s) {
    reduce_bench(s, [](const std::vector<double>& x) { return K::serial::max_abs(x); });
}
void BM_max_abs_omp(benchmark::State& s) {
    reduce_bench(s, [](const std::vector<double>& x) { return K::omp::max_abs(x); });
}

template <bool Parallel>
void BM_stencil_apply(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const auto op = heat_stencil(m);
    const auto x = noise(op.size(), "b3");
    std::vector<double> y(op.size());
    for (auto _ : state) {
        if constexpr (Parallel) K::omp::apply(op, x, y);
        else K::serial::apply(op, x, y);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(op.size()));
}

template <bool Parallel>
void BM_red_black(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const auto op = heat_stencil(m);
    const auto rhs = noise(op.size(), "b4");
    std::vector<double> x(op.size(), 0.0);
    for (auto _ : state) {
        for (int color = 0; color < 2; ++color) {
            if constexpr (Parallel) K::omp::red_black_sweep(op, rhs, x, color);
            else K::serial::red_black_sweep(op, rhs, x, color);
        }
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(op.size()));
}

}  // namespace

BENCHMARK(BM_dot_serial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_dot_omp)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_max_abs_serial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_max_abs_omp)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_stencil_apply<false>)->Arg(49)->Arg(97);
BENCHMARK(BM_stencil_apply<true>)->Arg(49)->Arg(97);
BENCHMARK(BM_red_black<false>)->Arg(49)->Arg(97);
BENCHMARK(BM_red_black<true>)->Arg(49)->Arg(97);

BENCHMARK_MAIN();
