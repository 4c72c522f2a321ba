#include <benchmark/benchmark.h>

#include "generators.hpp"
#include "gitseg/edt.hpp"
#include "gitseg/metrics.hpp"
#include "gitseg/preprocess.hpp"
#include "gitseg/rle.hpp"

namespace {

using gitseg::testing::Engine;

void BM_SquaredEdt(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Engine rng(1);
    const auto v = gitseg::testing::blob_volume(rng, n, n, n, 6);
    for (auto _ : state) benchmark::DoNotOptimize(gitseg::squared_edt(v));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
}
BENCHMARK(BM_SquaredEdt)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_HausdorffFastFullSize(benchmark::State& state) {
    Engine rng(2);
    const auto a = gitseg::testing::blob_volume(rng, 320, 384, 144, 8);
    const auto b = gitseg::testing::blob_volume(rng, 320, 384, 144, 8);
    for (auto _ : state) benchmark::DoNotOptimize(gitseg::hausdorff_fast(a, b));
}
BENCHMARK(BM_HausdorffFastFullSize)->Unit(benchmark::kMillisecond)->Iterations(3);

template <bool Fast>
void BM_Hausdorff64(benchmark::State& state) {
    Engine rng(3);
    const auto a = gitseg::testing::blob_volume(rng, 64, 64, 64, 4);
    const auto b = gitseg::testing::blob_volume(rng, 64, 64, 64, 4);
    for (auto _ : state) {
        if constexpr (Fast) {
            benchmark::DoNotOptimize(gitseg::hausdorff_fast(a, b));
        } else {
            benchmark::DoNotOptimize(gitseg::hausdorff_brute(a, b));
        }
    }
}
BENCHMARK(BM_Hausdorff64<true>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Hausdorff64<false>)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_RleRoundTrip(benchmark::State& state) {
    Engine rng(4);
    const auto m = gitseg::testing::random_mask(rng, 320, 384);
    for (auto _ : state) {
        const auto text = gitseg::encode_rle(m);
        benchmark::DoNotOptimize(gitseg::decode_rle(text, 320, 384));
    }
}
BENCHMARK(BM_RleRoundTrip);

void BM_AugmentDefault(benchmark::State& state) {
    Engine rng(5);
    std::vector<double> px(266 * 266);
    for (auto& p : px) p = gitseg::testing::real(rng, 0, 1);
    const gitseg::Sample s(gitseg::NormalizedImage(266, 266, px),
                           {gitseg::testing::random_mask(rng, 266, 266), gitseg::testing::random_mask(rng, 266, 266),
                            gitseg::testing::random_mask(rng, 266, 266)},
                           gitseg::make_slice_key("case1", 1, 1));
    gitseg::AugmentationSpec spec;
    spec.elastic_prob = 1.0;
    spec.dropout_prob = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gitseg::augment(s, spec));
        ++spec.seed;
    }
}
BENCHMARK(BM_AugmentDefault)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
