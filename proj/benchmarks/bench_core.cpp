#include <benchmark/benchmark.h>

#include <vector>

#include "mfr/ekf_gains.hpp"
#include "mfr/game.hpp"
#include "mfr/selectors.hpp"
#include "mfr/simulation.hpp"

namespace {

using namespace mfr;

void BM_GainLadder(benchmark::State& state) {
  const std::vector<RadarSite> sites = {{0, -10, 0}, {1, 3, 0}, {2, 10, 0}};
  NoiseModel noise;
  noise.range_coeff = Eigen::MatrixXd::Constant(3, 1, 2.0);
  TrackEstimate t;
  t.state << 1.0, 6.0, 0.5, 0.1;
  t.cov = StateMatrix::Identity() * 0.01;
  const int beams = static_cast<int>(state.range(0));
  const std::vector<BeamAllocation> alloc = {{0, beams}, {1, beams}, {2, beams}};
  for (auto _ : state) benchmark::DoNotOptimize(gain_ladder(t, alloc, noise, sites));
  state.SetItemsProcessed(state.iterations() * 3 * beams);
}
BENCHMARK(BM_GainLadder)->Arg(1)->Arg(2)->Arg(4);

// Full NE enumeration of the frozen three-radar EKF game (1000 profiles).
void BM_EnumerateNashFrozen(benchmark::State& state) {
  ScenarioConfig c = load_preset("table12");
  c.freeze_dynamics = true;
  const FrozenGame frozen(c, StrategyMode::distinct);
  for (auto _ : state) {
    // A fresh game each round so the gain cache starts cold.
    const Game game(frozen.game().spec(), frozen.gains());
    benchmark::DoNotOptimize(enumerate_nash(game));
  }
}
BENCHMARK(BM_EnumerateNashFrozen)->Unit(benchmark::kMillisecond);

// Exhaustive optimum as the joint space grows: N radars, T = 5, m = 2.
void BM_BestProfileExhaustive(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const GainTable table = GainTable::uniform(5, {1.0, 0.6, 0.35, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 5e-4});
  GameSpec spec;
  spec.topology = TopologySpec::full(n, 5);
  spec.weights = InterestMatrix::ones(n, 5);
  spec.beams = 2;
  const Game game(spec, table);
  for (auto _ : state) benchmark::DoNotOptimize(best_profile_exhaustive(game));
  state.counters["profiles"] = static_cast<double>(game.joint_size());
}
BENCHMARK(BM_BestProfileExhaustive)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_LcbrdStep(benchmark::State& state) {
  SelectorState s;
  s.current = {1, 0, 1, 0, 0, 0, 0, 0, 0, 0};
  s.rng = Substream(StreamDomain::test, {1});
  const std::vector<std::size_t> obs = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const std::vector<int> counts = {3, 1, 2, 0, 1, 2, 1, 0, 2, 1};
  const std::vector<double> score = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  for (auto _ : state) benchmark::DoNotOptimize(lcbrd_step(s, counts, score, {obs, 0.5, 0.0}));
}
BENCHMARK(BM_LcbrdStep);

void BM_RegretUpdateAndDraw(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<StrategyRow> rows(n, StrategyRow(n, 0));
  for (std::size_t k = 0; k < n; ++k) rows[k][k] = 1;
  SelectorState s;
  rm_initialize(s, rows, rows[0]);
  s.rng = Substream(StreamDomain::test, {2});
  Substream u(StreamDomain::test, {3});
  std::vector<double> cf(n);
  for (auto _ : state) {
    for (auto& v : cf) v = u.uniform();
    rm_regret_update(s, cf[s.current_index], cf, 0.5);
    benchmark::DoNotOptimize(rm_strategy_draw(s, rows, 2.0 * static_cast<double>(n)));
  }
}
BENCHMARK(BM_RegretUpdateAndDraw)->Arg(10)->Arg(15)->Arg(120);

// One realization of the three-radar scenario, end to end.
void BM_RunRealization(benchmark::State& state) {
  ScenarioConfig c = load_preset("table12");
  c.horizon = 200;
  const SelectorKind kinds[] = {SelectorKind::lcbrd, SelectorKind::regret_matching, SelectorKind::exhaustive_centralized};
  const SelectorParams sel = default_selector(kinds[state.range(0)]);
  state.SetLabel(sel.display_name());
  for (auto _ : state) benchmark::DoNotOptimize(run_realization(c, sel, 0));
}
BENCHMARK(BM_RunRealization)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
