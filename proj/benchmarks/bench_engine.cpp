#include "ampute/engine.hpp"
#include "ampute/rng.hpp"

#include <benchmark/benchmark.h>

using namespace ampute;

namespace {

CompleteDataset synthetic(int rows, int cols) {
    CompleteDataset y;
    y.values = Matrix(rows, cols);
    RngStream rng(7, StreamPurpose::RowSample, 999);
    for (int j = 0; j < cols; ++j) y.columns.push_back("v" + std::to_string(j));
    for (auto& v : y.values.data()) v = rng.uniform();
    return y;
}

void BM_ampute_rows_iid(benchmark::State& state) {
    const int rows = static_cast<int>(state.range(0));
    const auto y = synthetic(rows, 11);
    const MissProbMatrix p(rows, 11, 1.0 / 3.0);
    const auto spec = CopulaSpec::homogeneous_gauss(0.7181, 11);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto r = ampute_rows_iid(y, p, spec, ++seed);
        benchmark::DoNotOptimize(r.mask.data().data());
    }
    state.SetItemsProcessed(state.iterations() * rows * 11);
}
BENCHMARK(BM_ampute_rows_iid)->Arg(32)->Arg(1000)->Arg(100000);

void BM_ampute_mechanism_suicide(benchmark::State& state) {
    const auto y = synthetic(32, 11);
    const auto model = presets::mnar_suicide(11, 1.0 / 3.0, 0.05, 0.0, 1.0);
    const auto spec = CopulaSpec::comonotone(11);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto r = ampute_mechanism(y, model, spec, ++seed);
        benchmark::DoNotOptimize(r.mask.data().data());
    }
}
BENCHMARK(BM_ampute_mechanism_suicide);

void BM_ampute_monotone_mixture(benchmark::State& state) {
    const auto y = synthetic(32, 11);
    const MonotoneMixtureSpec spec{1.0 / 3.0, 4.0, 1.0, CopulaSpec::comonotone(32)};
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto r = ampute_monotone_mixture(y, spec, ++seed);
        benchmark::DoNotOptimize(r.mask.data().data());
    }
}
BENCHMARK(BM_ampute_monotone_mixture);

} // namespace
