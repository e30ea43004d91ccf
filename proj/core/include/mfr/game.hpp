#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mfr {

/// Beams per target for one radar; length equals the number of targets.
using StrategyRow = std::vector<int>;

/// distinct: one beam on each of m different targets.
/// multiset: m beams on any targets, repeats allowed.
enum class StrategyMode { distinct, multiset };

/// N x T beam-allocation matrix; the joint action of one scan.
class StrategyProfile {
 public:
  StrategyProfile() = default;
  StrategyProfile(std::size_t radars, std::size_t targets);
  static StrategyProfile from_rows(const std::vector<StrategyRow>& rows);

  std::size_t radars() const { return radars_; }
  std::size_t targets() const { return targets_; }

  int operator()(std::size_t radar, std::size_t target) const { return beams_[radar * targets_ + target]; }
  int& operator()(std::size_t radar, std::size_t target) { return beams_[radar * targets_ + target]; }

  std::span<const int> row(std::size_t radar) const {
    return {beams_.data() + radar * targets_, targets_};
  }
  StrategyRow row_copy(std::size_t radar) const;
  void set_row(std::size_t radar, std::span<const int> row);
  int row_sum(std::size_t radar) const;
  /// Sum of column `target` over all radars.
  int column_sum(std::size_t target) const;

  bool operator==(const StrategyProfile&) const = default;

  /// "a,b,c;d,e,f" with rows separated by ';'.
  std::string to_string() const;
  static StrategyProfile parse(const std::string& text);

 private:
  std::size_t radars_ = 0;
  std::size_t targets_ = 0;
  std::vector<int> beams_;
};

/// Observability and communication structure. Every neighborhood contains
/// the radar itself; lists are kept sorted ascending.
struct TopologySpec {
  std::size_t targets = 0;
  std::vector<std::vector<std::size_t>> observable;  // T_i
  std::vector<std::vector<std::size_t>> neighbors;   // N_i

  static TopologySpec full(std::size_t radars, std::size_t targets);
  /// Same observability, but every radar hears only itself.
  TopologySpec isolated() const;

  std::size_t radars() const { return neighbors.size(); }
  bool observes(std::size_t radar, std::size_t target) const;
  bool hears(std::size_t radar, std::size_t other) const;
  bool is_full() const;
  /// Throws ConfigError with a "topology..." field path.
  void validate() const;
};

/// Per-radar target weights. Every row needs a positive entry.
struct InterestMatrix {
  Eigen::MatrixXd w;

  static InterestMatrix ones(std::size_t radars, std::size_t targets);
  double operator()(std::size_t radar, std::size_t target) const {
    return w(static_cast<Eigen::Index>(radar), static_cast<Eigen::Index>(target));
  }
  bool all_ones() const;
  void validate(std::size_t radars, std::size_t targets) const;
};

/// Tracking accuracy gain of `observer`'s track of `target` when the radars
/// it hears spend `beams[l]` beams on that target (zero for radars outside
/// the observer's neighborhood).
class GainProvider {
 public:
  virtual ~GainProvider() = default;
  virtual double gain(std::size_t observer, std::size_t target, std::span<const int> beams) const = 0;
};

/// Abstract gains: target j's gain with c measurements is the sum of its
/// first c increments, regardless of which radar took them.
class GainTable final : public GainProvider {
 public:
  explicit GainTable(std::vector<std::vector<double>> increments);
  /// Every target shares `increments`.
  static GainTable uniform(std::size_t targets, std::vector<double> increments);

  std::size_t targets() const { return increments_.size(); }
  const std::vector<double>& increments(std::size_t target) const { return increments_[target]; }
  double gain_of_count(std::size_t target, int count) const;

  /// Increments positive and strictly decreasing in p.
  bool satisfies_assumptions() const;
  /// All targets share the same increments.
  bool is_case_a() const;
  /// Targets pairwise distinct at every level and
  /// min_j dg_j(p) > max_j dg_j(p+1).
  bool is_case_b() const;

  double gain(std::size_t observer, std::size_t target, std::span<const int> beams) const override;

 private:
  std::vector<std::vector<double>> increments_;
};

/// Sum of s[l][target] over l in N_radar.
int measurement_count(const StrategyProfile& profile, const TopologySpec& topology, std::size_t radar,
                      std::size_t target);

/// sum_j w[i][j] * gain_j(m_j(i)). Direct evaluation, no caching.
double utility(const StrategyProfile& profile, std::size_t radar, const GainProvider& gains,
               const TopologySpec& topology, const InterestMatrix& weights);

double social_welfare(const StrategyProfile& profile, const GainProvider& gains,
                      const TopologySpec& topology, const InterestMatrix& weights);

/// Rows in lexicographic order of their target index lists. Throws
/// ContractError when distinct mode has fewer observable targets than beams.
std::vector<StrategyRow> enumerate_strategies(std::size_t radar, int beams, const TopologySpec& topology,
                                              StrategyMode mode);

struct GameSpec {
  TopologySpec topology;
  InterestMatrix weights;
  int beams = 1;
  StrategyMode mode = StrategyMode::distinct;
  std::uint64_t enumeration_cap = 10'000'000;
};

/// Strategy lists for every radar; shareable across per-scan games.
struct StrategySpaces {
  std::vector<std::vector<StrategyRow>> rows;

  static std::shared_ptr<const StrategySpaces> build(const GameSpec& spec);
};

/// Utility comparisons treat differences below this as ties.
inline constexpr double kUtilityTolerance = 1e-9;

struct Deviation {
  std::size_t radar = 0;
  StrategyRow row;
  double improvement = 0.0;
};

struct NashCheck {
  bool is_nash = true;
  /// Largest unilateral improvement found, if any strategy beats the
  /// current one at all (improvement may be within tolerance).
  std::optional<Deviation> best_deviation;
};

class GainCache;

/// A normal-form track-selection game over a fixed gain provider.
///
/// Gains are memoized per (observer, target, beams-heard) so repeated
/// utility evaluations during enumeration cost a table lookup. Not safe for
/// concurrent use; give each thread its own Game.
class Game {
 public:
  Game(GameSpec spec, const GainProvider& gains);
  Game(GameSpec spec, const GainProvider& gains, std::shared_ptr<const StrategySpaces> spaces);
  ~Game();
  Game(Game&&) noexcept;
  Game& operator=(Game&&) noexcept;

  const GameSpec& spec() const { return spec_; }
  std::size_t radars() const { return spec_.topology.radars(); }
  std::size_t targets() const { return spec_.topology.targets; }
  const std::vector<StrategyRow>& strategies(std::size_t radar) const { return spaces_->rows[radar]; }
  /// Product of strategy-space sizes, saturating at UINT64_MAX.
  std::uint64_t joint_size() const;

  double utility(const StrategyProfile& profile, std::size_t radar) const;
  double welfare(const StrategyProfile& profile) const;
  /// u_radar(s', s_-radar) for every s' in the radar's strategy list.
  std::vector<double> counterfactuals(const StrategyProfile& profile, std::size_t radar) const;

  /// Profile built from one strategy index per radar.
  StrategyProfile profile_from_indices(std::span<const std::size_t> indices) const;

  struct Visit {
    std::span<const std::size_t> indices;
    double welfare;
    /// Only computed when the enumeration asked for it.
    bool is_nash;
  };
  /// Visits every joint profile in lexicographic strategy-index order
  /// (radar 0 most significant). Throws InstanceTooLargeError above the cap.
  void for_each_profile(bool want_nash, const std::function<void(const Visit&)>& fn) const;

 private:
  using Codes = std::vector<std::uint64_t>;
  Codes codes_of(const StrategyProfile& profile) const;
  double utility_from_codes(std::size_t radar, const Codes& codes) const;
  double utility_with_row(std::size_t radar, const Codes& codes, std::size_t from_index, std::size_t to_index) const;
  void init_fields();

  GameSpec spec_;
  const GainProvider* gains_;
  std::shared_ptr<const StrategySpaces> spaces_;
  std::unique_ptr<GainCache> cache_;
  unsigned bits_ = 1;
  std::vector<std::uint64_t> neighbor_masks_;
  // contributions_[l][s * T + j] = row_s[j] << (bits * l)
  std::vector<std::vector<std::uint64_t>> contributions_;
};

/// No radar has a unilateral deviation improving its utility by more than
/// kUtilityTolerance.
NashCheck is_pure_nash(const StrategyProfile& profile, const Game& game);

/// Every pure NE of the game's joint strategy space.
std::vector<StrategyProfile> enumerate_nash(const Game& game);

struct PoaReport {
  double optimum_welfare = 0.0;
  StrategyProfile optimum;
  std::size_t nash_count = 0;
  std::optional<double> worst_nash_welfare;
  std::optional<StrategyProfile> worst_nash;
  /// Unset when the game has no pure NE.
  std::optional<double> price_of_anarchy;
};

PoaReport price_of_anarchy(const Game& game);

/// argmax of social welfare; near-ties (kUtilityTolerance) keep the first
/// profile in enumeration order, i.e. the lexicographically smallest tuple
/// of per-radar target lists.
StrategyProfile best_profile_exhaustive(const Game& game);

}  // namespace mfr
