#include "abcid/abc_engine.hpp"
#include "abcid/binding.hpp"
#include "abcid/rng.hpp"
#include "abcid/series_models.hpp"
#include "abcid/summaries.hpp"

#include <benchmark/benchmark.h>

using namespace abcid;

static void BM_PhiloxBlock(benchmark::State& state) {
    rng::Philox4x32::Counter c{0, 0, 0, 0};
    for (auto _ : state) {
        ++c[0];
        benchmark::DoNotOptimize(rng::Philox4x32::generate(c, {1, 2}));
    }
    state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(BM_PhiloxBlock);

static void BM_NormalDraws(benchmark::State& state) {
    rng::Stream s(1, rng::Purpose::simulate, 0);
    for (auto _ : state) benchmark::DoNotOptimize(s.normal());
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NormalDraws);

static void BM_SimulateMa2(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t k = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_ma2({0.6, 0.2}, n, 1, k++));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateMa2)->Arg(5000)->Arg(1000000);

static void BM_IntegrateLv(benchmark::State& state) {
    const auto cfg = LvConfig{}.with_points(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(integrate_lv(cfg));
}
BENCHMARK(BM_IntegrateLv)->Arg(500)->Arg(2000);

static void BM_Eta5Statistics(benchmark::State& state) {
    const auto y = simulate_ma2({0.6, 0.2}, static_cast<std::size_t>(state.range(0)), 2);
    const auto set = stats::StatisticSet::named("eta5");
    for (auto _ : state) benchmark::DoNotOptimize(stats::evaluate_statistic_set(set, y));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Eta5Statistics)->Arg(5000);

static void BM_RejectionAbc(benchmark::State& state) {
    const auto y = simulate_ma2({0.6, 0.2}, 500, 3);
    abc::AbcConfig cfg;
    cfg.n_draws = static_cast<std::size_t>(state.range(0));
    cfg.tolerance = abc::Tolerance::quantile(0.01);
    cfg.seed = 4;
    const auto disc = abc::Discrepancy::on_statistics(stats::StatisticSet::named("eta2"));
    for (auto _ : state) benchmark::DoNotOptimize(abc::run_rejection_abc(y, ModelSpec{}, disc, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RejectionAbc)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_Kde(benchmark::State& state) {
    rng::Stream s(5, rng::Purpose::prior, 0);
    std::vector<double> v(static_cast<std::size_t>(state.range(0)));
    for (auto& x : v) x = s.normal();
    for (auto _ : state) benchmark::DoNotOptimize(abc::kde(v));
}
BENCHMARK(BM_Kde)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

static void BM_PreimageOlsGrid(benchmark::State& state) {
    const auto b = binding::BindingFunction::ols_ar2_on_ma2();
    const auto target = b(std::vector<double>{0.5, 0.5});
    const auto region = binding::Region::default_for(b);
    for (auto _ : state) benchmark::DoNotOptimize(binding::solve_preimage(b, target, region));
}
BENCHMARK(BM_PreimageOlsGrid)->Unit(benchmark::kMillisecond);

static void BM_PreimageMa2Quartic(benchmark::State& state) {
    const auto b = binding::BindingFunction::ma2_acov(1);
    const auto target = b(std::vector<double>{0.6, 0.2});
    const auto region = binding::Region::ma2_triangle();
    for (auto _ : state) benchmark::DoNotOptimize(binding::solve_preimage(b, target, region));
}
BENCHMARK(BM_PreimageMa2Quartic);

static void BM_InjectivityMa2(benchmark::State& state) {
    const auto b = binding::BindingFunction::ma2_acov(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(binding::check_injectivity_analytic(b, binding::Region::ma2_triangle(), 0.05, 1e-2));
}
BENCHMARK(BM_InjectivityMa2)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
