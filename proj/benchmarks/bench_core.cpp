#include <benchmark/benchmark.h>

#include "plantedrank/detect.hpp"
#include "plantedrank/lowdeg.hpp"
#include "plantedrank/peel.hpp"
#include "plantedrank/rank.hpp"
#include "plantedrank/support.hpp"

namespace pr = plantedrank;

namespace {

pr::ObservationMatrix sample_null(int n, int d, std::uint64_t seed) {
    return pr::sample_observations(pr::Matrix(n, d, 0.0), seed);
}

void BM_SubmatrixScan(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int m = static_cast<int>(state.range(1));
    const pr::ObservationMatrix y = sample_null(n, n, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(pr::stat_submatrix_scan(y, m, 0.05).statistic);
    state.SetComplexityN(n);
}
BENCHMARK(BM_SubmatrixScan)->Args({64, 1})->Args({64, 2})->Args({128, 2})->Args({48, 3});

void BM_IsotonicProjection(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    pr::Rng rng(7);
    pr::Matrix a(n, n);
    for (double& v : a.data) v = 3.0 * rng.uniform01() - 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(pr::project_isotonic(a).data.data());
}
BENCHMARK(BM_IsotonicProjection)->Arg(64)->Arg(256)->Arg(1024);

void BM_Peel(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    pr::Rng rng(11);
    const pr::Matrix sorted =
        pr::gen_isotonic(n, n, rng.next_u64(), pr::IsotonicKind::ColumnSortedUniform);
    const pr::Permutation pi(rng.permutation(n));
    const pr::Matrix m = pr::apply_row_permutation(sorted, pi, false);
    for (auto _ : state) benchmark::DoNotOptimize(pr::peel(m, 4).lhs);
}
BENCHMARK(BM_Peel)->Arg(64)->Arg(256);

void BM_SpectralRank(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const pr::ObservationMatrix y = sample_null(n, n, 3);
    for (auto _ : state) benchmark::DoNotOptimize(pr::rank_spectral(y).perm.size());
}
BENCHMARK(BM_SpectralRank)->Arg(64)->Arg(256);

void BM_RankBlock(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const pr::ObservationMatrix y = sample_null(n, n, 5);
    for (auto _ : state) benchmark::DoNotOptimize(pr::rank_block(y, 0.05).size());
}
BENCHMARK(BM_RankBlock)->Arg(64)->Arg(256)->Arg(1024);

void BM_TemplateCatalog(benchmark::State& state) {
    const int degree = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            pr::enumerate_templates(degree, pr::TemplateVariant::Detection).entries.size());
}
BENCHMARK(BM_TemplateCatalog)->Arg(3)->Arg(4)->Arg(5);

void BM_AdvLowDegree(benchmark::State& state) {
    pr::PriorSpec prior;
    prior.kind = pr::PriorSpec::Kind::DetectionUniform;
    prior.n = 1024;
    prior.d = 1024;
    prior.lambda = 0.1;
    prior.kn = 64;
    prior.kd = 64;
    const auto catalog =
        pr::enumerate_templates(static_cast<int>(state.range(0)), pr::TemplateVariant::Detection);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            pr::adv_low_degree(catalog, prior, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_AdvLowDegree)->Arg(3)->Arg(5);

}  // namespace
