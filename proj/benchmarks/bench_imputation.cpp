#include "ampute/engine.hpp"
#include "ampute/imputation.hpp"
#include "ampute/rng.hpp"

#include <benchmark/benchmark.h>

using namespace ampute;

namespace {

AmputedDataset amputed_fixture(int rows, int cols) {
    CompleteDataset y;
    y.values = Matrix(rows, cols);
    RngStream rng(5, StreamPurpose::RowSample, 999);
    for (int j = 0; j < cols; ++j) y.columns.push_back("v" + std::to_string(j));
    for (auto& v : y.values.data()) v = rng.uniform();
    const MissProbMatrix p(rows, cols, 1.0 / 3.0);
    return ampute_rows_iid(y, p, CopulaSpec::comonotone(cols), 31).data;
}

void BM_pmm_impute(benchmark::State& state) {
    const auto x = amputed_fixture(32, 11);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto out = pmm_impute(x, PmmOptions{5, 5, 5}, ++seed);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_pmm_impute);

void BM_bias_study_complete_case(benchmark::State& state) {
    BiasStudyConfig cfg;
    CompleteDataset y;
    y.values = Matrix(32, 11);
    RngStream rng(5, StreamPurpose::RowSample, 999);
    for (int j = 0; j < 11; ++j) y.columns.push_back("v" + std::to_string(j));
    for (auto& v : y.values.data()) v = rng.uniform();
    cfg.data = y;
    cfg.target_column = 6;
    cfg.replications = 200;
    cfg.mechanisms.push_back({"mcar", presets::mcar(11, 1.0 / 3.0), CopulaSpec::comonotone(11)});
    cfg.seed = 1;
    for (auto _ : state) {
        auto res = run_bias_study(cfg);
        benchmark::DoNotOptimize(res.samples.data());
    }
}
BENCHMARK(BM_bias_study_complete_case);

} // namespace
