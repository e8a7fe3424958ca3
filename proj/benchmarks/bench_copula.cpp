#include "ampute/copula.hpp"
#include "ampute/normal.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace ampute;

namespace {

void BM_sample_independence(benchmark::State& state) {
    const auto spec = CopulaSpec::independence(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto s = sample(spec, 1000, 42);
        benchmark::DoNotOptimize(s.values.data().data());
    }
    state.SetItemsProcessed(state.iterations() * 1000 * state.range(0));
}
BENCHMARK(BM_sample_independence)->Arg(2)->Arg(11)->Arg(64);

void BM_sample_homogeneous_gauss(benchmark::State& state) {
    const auto spec = CopulaSpec::homogeneous_gauss(0.7181, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto s = sample(spec, 1000, 42);
        benchmark::DoNotOptimize(s.values.data().data());
    }
    state.SetItemsProcessed(state.iterations() * 1000 * state.range(0));
}
BENCHMARK(BM_sample_homogeneous_gauss)->Arg(2)->Arg(11)->Arg(64);

void BM_sample_gauss_threaded(benchmark::State& state) {
    const auto spec = CopulaSpec::homogeneous_gauss(0.5, 11);
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto s = sample(spec, 100000, 42, threads);
        benchmark::DoNotOptimize(s.values.data().data());
    }
    state.SetItemsProcessed(state.iterations() * 100000 * 11);
}
BENCHMARK(BM_sample_gauss_threaded)->Arg(1)->Arg(2)->Arg(4);

void BM_bivariate_normal_cdf(benchmark::State& state) {
    double x = -2.0;
    for (auto _ : state) {
        x += 1e-6;
        benchmark::DoNotOptimize(bivariate_norm_cdf(x, 0.3, 0.7181));
    }
}
BENCHMARK(BM_bivariate_normal_cdf);

void BM_survival_cdf_expansion(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const auto spec = CopulaSpec::convex_combination(0.4, CopulaSpec::comonotone(dim),
                                                     CopulaSpec::independence(dim));
    std::vector<double> p(static_cast<std::size_t>(dim), 0.3);
    for (auto _ : state)
        benchmark::DoNotOptimize(survival_cdf_by_inclusion_exclusion(spec, p));
}
BENCHMARK(BM_survival_cdf_expansion)->Arg(4)->Arg(8)->Arg(12);

} // namespace
