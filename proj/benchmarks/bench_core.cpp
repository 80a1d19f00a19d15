#include <benchmark/benchmark.h>

#include <array>
#include <vector>

#include "posauth/channel.hpp"
#include "posauth/dataset.hpp"
#include "posauth/decision_tree.hpp"
#include "posauth/experiments.hpp"
#include "posauth/localizer.hpp"
#include "posauth/regressor.hpp"
#include "posauth/scenario.hpp"

using namespace posauth;

namespace {

Dataset small_dataset(std::size_t slots) {
  DatasetConfig cfg;
  cfg.lq_max_db = 4.0;
  cfg.slots_per_lq = slots;
  return generate_dataset(cfg, ChannelParams{}, 11);
}

void BM_SelectRsus(benchmark::State& state) {
  const Scenario scenario = build_road_scenario(ScenarioConfig{});
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_rsus(scenario, Vec2(x, 10.0), 3));
    x = x > 2999.0 ? 0.0 : x + 7.0;
  }
}
BENCHMARK(BM_SelectRsus);

void BM_Locate(benchmark::State& state) {
  const Scenario scenario = build_road_scenario(ScenarioConfig{});
  const ChannelParams channel;
  const Vec2 tx(450.0, 10.0);
  const auto anchors = select_rsus(scenario, tx, 3);
  RandomStream rng(5);
  for (auto _ : state) {
    std::array<ToaObservation, 3> toas;
    for (std::size_t j = 0; j < 3; ++j) toas[j] = observe_toa(rng, anchors[j], tx, {10.0}, channel);
    benchmark::DoNotOptimize(locate(anchors, toas, channel));
  }
}
BENCHMARK(BM_Locate);

void BM_TreeFit(benchmark::State& state) {
  const Dataset data = small_dataset(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_decision_tree(data, TreeParams{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.rows.size()));
}
BENCHMARK(BM_TreeFit)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SvrFit(benchmark::State& state) {
  const Dataset data = small_dataset(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_svr(data, SvrParams{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.rows.size()));
}
BENCHMARK(BM_SvrFit)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SimulateAuthentication(benchmark::State& state) {
  const Regressor model = fit_decision_tree(small_dataset(500), TreeParams{});
  ExperimentConfig cfg;
  cfg.sweep.trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_authentication(cfg, model, 10.0, 1.0, 3));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateAuthentication)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
