#include <benchmark/benchmark.h>

#include "fracrit/functionals.hpp"
#include "fracrit/morrey.hpp"
#include "fracrit/random_field.hpp"
#include "fracrit/spectral.hpp"

using namespace fracrit;

namespace {

const FracParams p14(1, 0.25);

Field sample(int M) {
    const GridSpec g{1, 50.0, M};
    Rng rng = derived_rng(1, 0);
    return random_smooth_field(g, p14.s, rng);
}

void BM_FracLaplacian(benchmark::State& st) {
    const Field u = sample(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(frac_laplacian(u, p14));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_FracLaplacian)->RangeMultiplier(4)->Range(1024, 65536);

void BM_HsNorm2(benchmark::State& st) {
    const Field u = sample(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(hs_norm2(u, p14));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_HsNorm2)->RangeMultiplier(4)->Range(1024, 65536);

void BM_DualNorm(benchmark::State& st) {
    const Field u = sample(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(dual_norm(u, p14));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_DualNorm)->RangeMultiplier(4)->Range(1024, 65536);

void BM_MorreyNorm(benchmark::State& st) {
    const Field u = sample(static_cast<int>(st.range(0)));
    const MorreySpec ms = MorreySpec::make(u.grid(), p14);
    for (auto _ : st) benchmark::DoNotOptimize(morrey_norm(u, ms));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_MorreyNorm)->RangeMultiplier(4)->Range(1024, 65536);

void BM_GradientI(benchmark::State& st) {
    const Field u = sample(static_cast<int>(st.range(0)));
    const ProblemData d(p14, Field(u.grid(), 1.0), 0.1 * u);
    for (auto _ : st) benchmark::DoNotOptimize(gradient_I(d, u));
}
BENCHMARK(BM_GradientI)->Arg(4096)->Arg(16384);

} // namespace

BENCHMARK_MAIN();
