#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfr/game.hpp"
#include "mfr/random.hpp"

namespace mfr {

enum class SelectorKind {
  lcbrd,
  regret_matching,
  standalone,
  random_k,
  approx_centralized,
  exhaustive_centralized,
  /// Never transmits; useful as an open-loop reference.
  idle,
};

std::string to_string(SelectorKind kind);
/// Throws ConfigError on an unknown name.
SelectorKind selector_kind_from_string(const std::string& name);

/// Which targets a radar considers "more accurate" when LC-BRD breaks a
/// count tie.
enum class AccuracyRule {
  /// Smaller range-noise coefficient b[i][j] is better.
  range_coeff,
  /// Larger marginal filter gain of the radar's next beam is better.
  marginal_gain,
};

enum class StepRule {
  /// theta_k = theta.
  fixed,
  /// theta_k = 1/k, the plain running average.
  harmonic,
};

enum class MuRule {
  /// mu = mu_scale |S_i| g, g a discounted envelope of the radar's largest
  /// single-beam gain.
  adaptive,
  /// Same formula with g taken once at the first scan.
  initial,
};

enum class InitRule { greedy, random };

struct SelectorParams {
  SelectorKind kind = SelectorKind::lcbrd;
  /// Shown in output file names and summaries; defaults to the kind name.
  std::string label;
  StrategyMode mode = StrategyMode::distinct;
  InitRule init = InitRule::greedy;

  // LC-BRD
  double alpha = 0.5;
  double epsilon = 0.0;
  bool revert = true;
  /// Reinitialize every this many scans; 0 disables.
  int reinit_period = 0;
  AccuracyRule accuracy = AccuracyRule::marginal_gain;

  // Regret matching
  double theta = 0.5;
  StepRule step = StepRule::fixed;
  /// Explicit mu; overrides `mu_rule` when set.
  std::optional<double> mu;
  MuRule mu_rule = MuRule::adaptive;
  double mu_scale = 2.0;

  // Baselines: random redraw / centralized replanning period.
  int period = 10;

  std::string display_name() const { return label.empty() ? to_string(kind) : label; }
};

/// Per-radar persistent selector state.
struct SelectorState {
  std::size_t radar_id = 0;
  StrategyRow current;
  /// Row played on the scan before `current` (LC-BRD revert target).
  StrategyRow previous;
  std::optional<double> prev_utility;
  /// Set by a revert: the next LC-BRD step keeps the row unchanged.
  bool skip_next = false;

  /// Regret matching: index of `current` in the radar's strategy list,
  /// average regrets D and the last mixed strategy.
  std::size_t current_index = 0;
  Eigen::MatrixXd regret;
  std::vector<double> mixed;
  std::uint64_t updates = 0;

  Substream rng;
};

/// Indices of the m most accurate targets in `observable` (lowest score
/// first, ties by lower index).
StrategyRow greedy_row(std::span<const std::size_t> observable, std::span<const double> score,
                       std::size_t targets, int beams);
/// Uniform m-subset (distinct) or m-multiset of `observable`.
StrategyRow random_row(std::span<const std::size_t> observable, std::size_t targets, int beams,
                       StrategyMode mode, Substream& rng);

struct LcbrdContext {
  std::span<const std::size_t> observable;
  double alpha = 0.5;
  double epsilon = 0.0;
};

/// One LC-BRD step for a single radar.
///
/// `counts[j]` is m_j as heard through the radar's neighborhood on the
/// previous scan (own beams included); `score[j]` ranks accuracy, lower
/// meaning more accurate. The step first splits any duplicate own beams onto
/// the emptiest unselected target. Then, with probability alpha, it moves at
/// most one beam: from the fullest selected target to the emptiest
/// unselected one when their counts differ by two or more, or when they
/// differ by one and the destination is more accurate. With probability
/// epsilon the radar instead jumps to a uniformly random row.
StrategyRow lcbrd_step(SelectorState& state, std::span<const int> counts, std::span<const double> score,
                       const LcbrdContext& ctx);

/// End-of-scan revert check: when `utility` fell below the previous scan's,
/// the next row is the previous scan's row and the next step is skipped.
/// Returns true when a revert happened.
bool lcbrd_revert(SelectorState& state, double utility);
/// Same check against an explicit reference: the utility the previous
/// scan's profile earns in the current scan's game. Stationary games give
/// the same answer as the one-argument form; moving targets no longer make
/// every scan look like a loss.
bool lcbrd_revert(SelectorState& state, double utility, double reference);

/// Resets LC-BRD memory and installs `row` as the current strategy.
void lcbrd_reinitialize(SelectorState& state, StrategyRow row);

/// Prepares a regret-matching state over `strategies`, starting at `row`.
void rm_initialize(SelectorState& state, const std::vector<StrategyRow>& strategies, const StrategyRow& row);

/// Average-regret recursion for one scan.
///
///   D(s, s') <- D(s, s') + theta * (1[s = played] (u(s') - u(played)) - D(s, s'))
///
/// Rows other than the played one decay toward zero; with theta = 1/k this
/// is exactly the running average over all k scans.
void rm_regret_update(SelectorState& state, double realized_utility, std::span<const double> counterfactuals,
                      double theta);

/// Step size for the scan about to be folded in.
double rm_theta(const SelectorParams& params, std::uint64_t update_number);

/// pi(s') = max(D(s, s'), 0) / mu for s' != s, pi(s) takes the rest.
/// Throws MuViolationError when pi(s) would not be positive.
std::vector<double> rm_mixed_strategy(const SelectorState& state, double mu);

/// Draws the next row from rm_mixed_strategy and makes it current.
StrategyRow rm_strategy_draw(SelectorState& state, const std::vector<StrategyRow>& strategies, double mu);

/// u_i(s', s_-i) for every s' in the radar's strategy list.
std::vector<double> counterfactual_utilities(const Game& game, const StrategyProfile& profile, std::size_t radar);

/// max over s != s' of D(s, s'); zero for a fresh state.
double max_average_regret(const SelectorState& state);

struct BaselineContext {
  std::int64_t scan = 0;
  int beams = 1;
  std::size_t targets = 0;
  std::span<const std::size_t> observable;
  int period = 10;
  StrategyMode mode = StrategyMode::distinct;
  /// Centralized kinds: the plan computed this scan or earlier.
  const StrategyProfile* plan = nullptr;
};

/// Non-learning selectors.
///
/// standalone cycles through the observable targets m at a time, wrapping
/// around; random_k redraws a uniform row when scan % period == 0;
/// centralized kinds copy their row of `plan`; idle returns all zeros.
StrategyRow baseline_step(SelectorKind kind, SelectorState& state, const BaselineContext& ctx);

/// Observed frequencies of joint profiles.
class EmpiricalDistribution {
 public:
  void record(const StrategyProfile& profile);
  std::uint64_t total() const { return total_; }
  double frequency(const StrategyProfile& profile) const;
  const std::map<std::string, std::uint64_t>& counts() const { return counts_; }

  /// Largest expected gain any radar could get by replacing a recommended
  /// row s with s' whenever it is told s. A correlated equilibrium has
  /// violation <= 0.
  double correlated_violation(const Game& game) const;

 private:
  std::map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

}  // namespace mfr
