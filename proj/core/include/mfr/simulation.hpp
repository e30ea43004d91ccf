#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mfr/ekf_gains.hpp"
#include "mfr/filtering.hpp"
#include "mfr/game.hpp"
#include "mfr/scenario.hpp"
#include "mfr/selectors.hpp"

namespace mfr {

/// One scan of one realization.
struct MetricsRecord {
  std::int64_t scan = 0;
  /// sum_i sum_j w_ij Tr(P_ij) over every radar's posterior tracks.
  double metric = 0.0;
  std::vector<double> utilities;
  StrategyProfile profile;
  /// Whether the played profile is a pure NE of the scan's game; unset when
  /// recording was skipped.
  std::optional<bool> nash;
  /// Largest average regret over radars; regret matching only.
  std::optional<double> max_avg_regret;
  /// Radars whose LC-BRD revert fired at the end of this scan.
  std::vector<bool> reverted;
};

/// Everything the engine knows at the end of a scan. References are valid
/// only during the hook call.
struct ScanSnapshot {
  std::size_t realization;
  std::int64_t scan;
  const std::vector<TargetState>& truth;
  /// [radar][target]
  const std::vector<std::vector<TrackEstimate>>& predicted;
  const std::vector<std::vector<TrackEstimate>>& posterior;
  const Game& game;
  const GainProvider& gains;
  const std::vector<SelectorState>& selectors;
  const MetricsRecord& record;
};

using ScanHook = std::function<void(const ScanSnapshot&)>;

/// Runs one realization of `selector` on `config`. All randomness is keyed
/// by (config.seed, realization, ...), so two selectors run with the same
/// config see the same truth trajectories and measurement noise draws.
std::vector<MetricsRecord> run_realization(const ScenarioConfig& config, const SelectorParams& selector,
                                           std::size_t realization, const ScanHook& hook = {});
inline std::vector<MetricsRecord> run_realization(const ScenarioConfig& config, std::size_t realization) {
  return run_realization(config, config.selector, realization);
}

/// Pointwise mean over realizations.
struct AggregateRecord {
  std::int64_t scan = 0;
  double metric = 0.0;
  std::vector<double> utilities;
  /// Fraction of realizations whose profile was an NE.
  std::optional<double> nash_fraction;
  std::optional<double> max_avg_regret;
};

struct MonteCarloResult {
  SelectorParams selector;
  /// Empty when run with keep_realizations = false.
  std::vector<std::vector<MetricsRecord>> realizations;
  std::vector<AggregateRecord> mean;
  /// Mean metric over the last tail_window scans.
  double tail_metric = 0.0;
};

struct MonteCarloOptions {
  int jobs = 1;
  bool keep_realizations = true;
};

/// Realizations run on up to `jobs` threads and are merged by index, so the
/// result does not depend on the thread count.
MonteCarloResult run_monte_carlo(const ScenarioConfig& config, const SelectorParams& selector,
                                 const MonteCarloOptions& options = {});

std::vector<AggregateRecord> aggregate(const std::vector<std::vector<MetricsRecord>>& realizations);
double tail_mean(const std::vector<AggregateRecord>& mean, int window);

/// First scan after which the NE fraction stays at or above `level`.
std::optional<std::int64_t> convergence_scan(const std::vector<AggregateRecord>& mean, double level = 0.95);

/// The selectors to compare: config.compare, or just config.selector.
std::vector<SelectorParams> compared_selectors(const ScenarioConfig& config);

/// Paired comparison: every selector sees the same noise substreams.
std::vector<MonteCarloResult> compare_strategies(const ScenarioConfig& config,
                                                 const std::vector<SelectorParams>& selectors,
                                                 const MonteCarloOptions& options = {});

struct SweepRow {
  double spread = 1.0;
  /// Tail metric per compared selector, in compare order.
  std::vector<double> tail;
  /// tail[numerator] / tail[denominator].
  double ratio = 0.0;
};

/// Repeats compare_strategies with the range coefficients regenerated at
/// each spread of config.sweep.
std::vector<SweepRow> run_sweep(const ScenarioConfig& config, const MonteCarloOptions& options = {});

/// Prior used by the frozen mode: truth as the state, F P0 F^T + Q as the
/// covariance.
TrackEstimate frozen_prior(const ScenarioConfig& config, std::size_t target);

/// Gain provider of the frozen game (or the abstract table), with radar
/// i's predicted track of every target set to the frozen prior.
class FrozenGame {
 public:
  FrozenGame(const ScenarioConfig& config, StrategyMode mode);
  FrozenGame(const FrozenGame&) = delete;
  FrozenGame& operator=(const FrozenGame&) = delete;
  const Game& game() const { return game_; }
  const GainProvider& gains() const { return *gains_; }
  /// Largest single-beam gain.
  double max_single_beam_gain() const;

 private:
  NoiseModel noise_;
  std::vector<RadarSite> sites_;
  std::unique_ptr<GainProvider> gains_;
  Game game_;
};

}  // namespace mfr
