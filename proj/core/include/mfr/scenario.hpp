#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfr/game.hpp"
#include "mfr/kinematics.hpp"
#include "mfr/selectors.hpp"

namespace mfr {

enum class GainMode { ekf, abstract };

enum class NashRecording {
  /// Record when the summed strategy-space size is small enough to be cheap.
  automatic,
  always,
  never,
};

/// How the range-noise coefficients were produced. Kept so that sweeps can
/// regenerate the matrix at a different spread from the same draws.
struct RangeCoeffSource {
  enum class Kind { explicit_matrix, uniform, spread } kind = Kind::explicit_matrix;
  double low = 1.0;
  double high = 4.5;
  double spread = 1.0;
  std::uint64_t seed = 0;
};

/// Noise-variance sweep: tail metrics of every compared selector at each
/// spread, plus numerator / denominator selector ratio.
struct SweepSpec {
  std::vector<double> spreads;
  std::string numerator;
  std::string denominator;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::vector<RadarSite> radars;
  std::vector<TargetState> targets;
  double update_time = 0.25;      // s
  double process_noise = 2.5e-5;  // km^2/s^3
  NoiseModel noise;
  RangeCoeffSource range_coeff_source;
  int beams = 2;
  TopologySpec topology;
  InterestMatrix weights;
  SelectorParams selector;
  /// Selectors run side by side by `compare`; empty means just `selector`.
  std::vector<SelectorParams> compare;
  std::optional<SweepSpec> sweep;
  int horizon = 200;
  int realizations = 100;
  std::uint64_t seed = 1;
  Eigen::Vector4d init_cov_diag = Eigen::Vector4d::Constant(0.01);
  double init_position_std = 0.05;  // km
  double init_velocity_std = 0.05;  // km/s
  GainMode gain_mode = GainMode::ekf;
  /// Abstract mode: per-target gain increments.
  std::vector<std::vector<double>> gain_table;
  /// Static targets and a fixed prior every scan, so each scan plays the
  /// same game.
  bool freeze_dynamics = false;
  /// Scans at the end of the horizon averaged into the tail metric.
  int tail_window = 50;
  NashRecording record_nash = NashRecording::automatic;
  std::uint64_t enumeration_cap = 10'000'000;

  std::size_t radar_count() const { return radars.size(); }
  std::size_t target_count() const { return targets.size(); }
  MotionModel motion() const { return {update_time, process_noise}; }
  GameSpec game_spec(StrategyMode mode) const;
  GainTable abstract_gains() const;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Selector defaults that depend on the kind (multiset for regret matching,
/// period 1 for exhaustive search, ...).
SelectorParams default_selector(SelectorKind kind);

/// Selector from a name ("lcbrd", "rm", "eps_lcbrd", ...) or a YAML flow map
/// such as "{kind: lcbrd, epsilon: 0.1}". Errors name `path`.
SelectorParams parse_selector_text(const std::string& text, const std::string& path = "selector");

/// Range coefficients drawn iid uniform in [low, high].
Eigen::MatrixXd range_coeff_uniform(std::uint64_t seed, std::size_t radars, std::size_t targets, double low,
                                    double high);
/// Range coefficients whose max / min is exactly `spread`: the same uniform
/// draws affinely mapped onto [1, spread].
Eigen::MatrixXd range_coeff_spread(std::uint64_t seed, std::size_t radars, std::size_t targets, double spread);

/// Copy of `config` with its range coefficients regenerated at `spread`.
ScenarioConfig with_spread(const ScenarioConfig& config, double spread);

ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
/// YAML text that parses back to an equal configuration, with every default
/// and the resolved range coefficients written out.
std::string dump_scenario(const ScenarioConfig& config);

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
ScenarioConfig load_preset(const std::string& name);

}  // namespace mfr
