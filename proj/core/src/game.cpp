#include "mfr/game.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "mfr/errors.hpp"

namespace mfr {

// ---------------------------------------------------------------------------
// StrategyProfile

StrategyProfile::StrategyProfile(std::size_t radars, std::size_t targets)
    : radars_(radars), targets_(targets), beams_(radars * targets, 0) {}

StrategyProfile StrategyProfile::from_rows(const std::vector<StrategyRow>& rows) {
  const std::size_t t = rows.empty() ? 0 : rows.front().size();
  StrategyProfile p(rows.size(), t);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != t) throw ContractError("ragged strategy profile rows");
    p.set_row(i, rows[i]);
  }
  return p;
}

StrategyRow StrategyProfile::row_copy(std::size_t radar) const {
  auto r = row(radar);
  return {r.begin(), r.end()};
}

void StrategyProfile::set_row(std::size_t radar, std::span<const int> r) {
  if (r.size() != targets_) throw ContractError("strategy row has wrong length");
  std::copy(r.begin(), r.end(), beams_.begin() + static_cast<std::ptrdiff_t>(radar * targets_));
}

int StrategyProfile::row_sum(std::size_t radar) const {
  int s = 0;
  for (int b : row(radar)) s += b;
  return s;
}

int StrategyProfile::column_sum(std::size_t target) const {
  int s = 0;
  for (std::size_t i = 0; i < radars_; ++i) s += (*this)(i, target);
  return s;
}

std::string StrategyProfile::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < radars_; ++i) {
    if (i) out << ';';
    for (std::size_t j = 0; j < targets_; ++j) {
      if (j) out << ',';
      out << (*this)(i, j);
    }
  }
  return out.str();
}

StrategyProfile StrategyProfile::parse(const std::string& text) {
  std::vector<StrategyRow> rows;
  std::stringstream rows_in(text);
  std::string row_text;
  while (std::getline(rows_in, row_text, ';')) {
    StrategyRow row;
    std::stringstream cells(row_text);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(cell, &used);
      } catch (const std::exception&) {
        throw ConfigError("profile", "not an integer: '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos || v < 0) {
        throw ConfigError("profile", "expected a nonnegative integer, got '" + cell + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("profile", "empty profile");
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw ConfigError("profile", "rows have different lengths");
  }
  return from_rows(rows);
}

// ---------------------------------------------------------------------------
// Topology, interests

TopologySpec TopologySpec::full(std::size_t radars, std::size_t targets) {
  TopologySpec t;
  t.targets = targets;
  std::vector<std::size_t> all_targets(targets);
  for (std::size_t j = 0; j < targets; ++j) all_targets[j] = j;
  std::vector<std::size_t> all_radars(radars);
  for (std::size_t i = 0; i < radars; ++i) all_radars[i] = i;
  t.observable.assign(radars, all_targets);
  t.neighbors.assign(radars, all_radars);
  return t;
}

TopologySpec TopologySpec::isolated() const {
  TopologySpec t = *this;
  for (std::size_t i = 0; i < t.neighbors.size(); ++i) t.neighbors[i] = {i};
  return t;
}

bool TopologySpec::observes(std::size_t radar, std::size_t target) const {
  const auto& o = observable[radar];
  return std::binary_search(o.begin(), o.end(), target);
}

bool TopologySpec::hears(std::size_t radar, std::size_t other) const {
  const auto& n = neighbors[radar];
  return std::binary_search(n.begin(), n.end(), other);
}

bool TopologySpec::is_full() const {
  for (std::size_t i = 0; i < radars(); ++i) {
    if (observable[i].size() != targets || neighbors[i].size() != radars()) return false;
  }
  return true;
}

void TopologySpec::validate() const {
  const std::size_t n = neighbors.size();
  if (observable.size() != n) {
    throw ConfigError("topology.observable", "expected one target list per radar");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string at = "[" + std::to_string(i) + "]";
    if (!std::is_sorted(observable[i].begin(), observable[i].end()) ||
        std::adjacent_find(observable[i].begin(), observable[i].end()) != observable[i].end()) {
      throw ConfigError("topology.observable" + at, "must be strictly ascending");
    }
    for (std::size_t j : observable[i]) {
      if (j >= targets) throw ConfigError("topology.observable" + at, "target index out of range");
    }
    if (!std::is_sorted(neighbors[i].begin(), neighbors[i].end()) ||
        std::adjacent_find(neighbors[i].begin(), neighbors[i].end()) != neighbors[i].end()) {
      throw ConfigError("topology.neighbors" + at, "must be strictly ascending");
    }
    for (std::size_t l : neighbors[i]) {
      if (l >= n) throw ConfigError("topology.neighbors" + at, "radar index out of range");
    }
    if (!hears(i, i)) throw ConfigError("topology.neighbors" + at, "must contain the radar itself");
  }
}

InterestMatrix InterestMatrix::ones(std::size_t radars, std::size_t targets) {
  return {Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(radars), static_cast<Eigen::Index>(targets))};
}

bool InterestMatrix::all_ones() const { return (w.array() == 1.0).all(); }

void InterestMatrix::validate(std::size_t radars, std::size_t targets) const {
  if (static_cast<std::size_t>(w.rows()) != radars || static_cast<std::size_t>(w.cols()) != targets) {
    throw ConfigError("weights", "expected a " + std::to_string(radars) + "x" + std::to_string(targets) +
                                     " matrix");
  }
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    bool positive = false;
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (!(w(i, j) >= 0.0) || !std::isfinite(w(i, j))) {
        throw ConfigError("weights[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                          "must be finite and >= 0");
      }
      positive = positive || w(i, j) > 0.0;
    }
    if (!positive) throw ConfigError("weights[" + std::to_string(i) + "]", "needs a positive entry");
  }
}

// ---------------------------------------------------------------------------
// GainTable

GainTable::GainTable(std::vector<std::vector<double>> increments) : increments_(std::move(increments)) {}

GainTable GainTable::uniform(std::size_t targets, std::vector<double> increments) {
  return GainTable(std::vector<std::vector<double>>(targets, increments));
}

double GainTable::gain_of_count(std::size_t target, int count) const {
  const auto& inc = increments_.at(target);
  if (count < 0 || static_cast<std::size_t>(count) > inc.size()) {
    throw ContractError("gain table for target " + std::to_string(target) + " has " +
                        std::to_string(inc.size()) + " increments, asked for " + std::to_string(count));
  }
  double g = 0.0;
  for (int p = 0; p < count; ++p) g += inc[static_cast<std::size_t>(p)];
  return g;
}

bool GainTable::satisfies_assumptions() const {
  for (const auto& inc : increments_) {
    for (std::size_t p = 0; p < inc.size(); ++p) {
      if (!(inc[p] > 0.0)) return false;
      if (p + 1 < inc.size() && !(inc[p] > inc[p + 1])) return false;
    }
  }
  return true;
}

bool GainTable::is_case_a() const {
  for (const auto& inc : increments_) {
    if (inc != increments_.front()) return false;
  }
  return true;
}

bool GainTable::is_case_b() const {
  if (increments_.empty()) return false;
  std::size_t levels = increments_.front().size();
  for (const auto& inc : increments_) levels = std::min(levels, inc.size());
  for (std::size_t p = 0; p < levels; ++p) {
    for (std::size_t a = 0; a < increments_.size(); ++a) {
      for (std::size_t b = a + 1; b < increments_.size(); ++b) {
        if (increments_[a][p] == increments_[b][p]) return false;
      }
    }
    if (p + 1 < levels) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (const auto& inc : increments_) {
        lo = std::min(lo, inc[p]);
        hi = std::max(hi, inc[p + 1]);
      }
      if (!(lo > hi)) return false;
    }
  }
  return true;
}

double GainTable::gain(std::size_t, std::size_t target, std::span<const int> beams) const {
  int count = 0;
  for (int b : beams) count += b;
  return gain_of_count(target, count);
}

// ---------------------------------------------------------------------------
// Direct evaluation

int measurement_count(const StrategyProfile& profile, const TopologySpec& topology, std::size_t radar,
                      std::size_t target) {
  int count = 0;
  for (std::size_t l : topology.neighbors[radar]) count += profile(l, target);
  return count;
}

double utility(const StrategyProfile& profile, std::size_t radar, const GainProvider& gains,
               const TopologySpec& topology, const InterestMatrix& weights) {
  std::vector<int> beams(profile.radars(), 0);
  double u = 0.0;
  for (std::size_t j = 0; j < profile.targets(); ++j) {
    std::fill(beams.begin(), beams.end(), 0);
    for (std::size_t l : topology.neighbors[radar]) beams[l] = profile(l, j);
    u += weights(radar, j) * gains.gain(radar, j, beams);
  }
  return u;
}

double social_welfare(const StrategyProfile& profile, const GainProvider& gains,
                      const TopologySpec& topology, const InterestMatrix& weights) {
  double w = 0.0;
  for (std::size_t i = 0; i < profile.radars(); ++i) w += utility(profile, i, gains, topology, weights);
  return w;
}

std::vector<StrategyRow> enumerate_strategies(std::size_t radar, int beams, const TopologySpec& topology,
                                              StrategyMode mode) {
  const auto& obs = topology.observable.at(radar);
  const std::size_t n = obs.size();
  if (beams < 0) throw ContractError("negative beam budget");
  if (mode == StrategyMode::distinct && n < static_cast<std::size_t>(beams)) {
    throw ContractError("radar " + std::to_string(radar) + " observes " + std::to_string(n) +
                        " targets, fewer than its " + std::to_string(beams) + " beams");
  }
  if (mode == StrategyMode::multiset && n == 0 && beams > 0) {
    throw ContractError("radar " + std::to_string(radar) + " observes no targets");
  }
  std::vector<StrategyRow> rows;
  // Nondecreasing (multiset) or increasing (distinct) index sequences.
  std::vector<std::size_t> pick(static_cast<std::size_t>(beams));
  const std::size_t step = mode == StrategyMode::distinct ? 1 : 0;
  for (std::size_t b = 0; b < pick.size(); ++b) pick[b] = b * step;
  if (beams == 0) {
    rows.emplace_back(topology.targets, 0);
    return rows;
  }
  const std::size_t m = pick.size();
  while (true) {
    StrategyRow row(topology.targets, 0);
    for (std::size_t idx : pick) row[obs[idx]] += 1;
    rows.push_back(std::move(row));
    // Advance: find the rightmost position that can still grow.
    std::size_t pos = m;
    while (pos > 0) {
      --pos;
      const std::size_t limit = mode == StrategyMode::distinct ? n - (m - pos) : n - 1;
      if (pick[pos] < limit) break;
      if (pos == 0) return rows;
    }
    if (pick[pos] >= (mode == StrategyMode::distinct ? n - (m - pos) : n - 1)) return rows;
    ++pick[pos];
    for (std::size_t b = pos + 1; b < m; ++b) pick[b] = pick[b - 1] + step;
  }
}

std::shared_ptr<const StrategySpaces> StrategySpaces::build(const GameSpec& spec) {
  auto spaces = std::make_shared<StrategySpaces>();
  for (std::size_t i = 0; i < spec.topology.radars(); ++i) {
    spaces->rows.push_back(enumerate_strategies(i, spec.beams, spec.topology, spec.mode));
  }
  return spaces;
}

// ---------------------------------------------------------------------------
// GainCache

// Memo of provider gains keyed by a packed beams-heard code: radar l's beam
// count on the target occupies bits [bits*l, bits*(l+1)).
class GainCache {
 public:
  GainCache(const GainProvider& provider, std::size_t radars, std::size_t targets, unsigned bits)
      : provider_(&provider),
        radars_(radars),
        targets_(targets),
        bits_(bits),
        dense_(bits * radars <= kDenseBits),
        tables_(radars * targets),
        maps_(dense_ ? 0 : radars * targets),
        scratch_(radars, 0) {}

  double get(std::size_t observer, std::size_t target, std::uint64_t code) {
    const std::size_t slot = observer * targets_ + target;
    if (dense_) {
      auto& table = tables_[slot];
      if (table.empty()) table.assign(std::size_t{1} << (bits_ * radars_), kUnset);
      double& v = table[code];
      if (std::isnan(v)) v = evaluate(observer, target, code);
      return v;
    }
    auto& map = maps_[slot];
    auto it = map.find(code);
    if (it != map.end()) return it->second;
    const double v = evaluate(observer, target, code);
    map.emplace(code, v);
    return v;
  }

 private:
  static constexpr unsigned kDenseBits = 14;
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

  double evaluate(std::size_t observer, std::size_t target, std::uint64_t code) {
    const std::uint64_t field = (std::uint64_t{1} << bits_) - 1;
    for (std::size_t l = 0; l < radars_; ++l) {
      scratch_[l] = static_cast<int>((code >> (bits_ * l)) & field);
    }
    const double g = provider_->gain(observer, target, scratch_);
    if (!std::isfinite(g)) throw NumericalError("gain provider returned a non-finite gain");
    return g;
  }

  const GainProvider* provider_;
  std::size_t radars_;
  std::size_t targets_;
  unsigned bits_;
  bool dense_;
  std::vector<std::vector<double>> tables_;
  std::vector<std::unordered_map<std::uint64_t, double>> maps_;
  std::vector<int> scratch_;
};

// ---------------------------------------------------------------------------
// Game

Game::Game(GameSpec spec, const GainProvider& gains)
    : Game(spec, gains, StrategySpaces::build(spec)) {}

Game::Game(GameSpec spec, const GainProvider& gains, std::shared_ptr<const StrategySpaces> spaces)
    : spec_(std::move(spec)), gains_(&gains), spaces_(std::move(spaces)) {
  spec_.topology.validate();
  if (spaces_->rows.size() != radars()) throw ContractError("strategy spaces do not match radar count");
  init_fields();
}

Game::~Game() = default;
Game::Game(Game&&) noexcept = default;
Game& Game::operator=(Game&&) noexcept = default;

void Game::init_fields() {
  int max_entry = std::max(spec_.beams, 1);
  for (const auto& rows : spaces_->rows) {
    for (const auto& row : rows) {
      for (int b : row) max_entry = std::max(max_entry, b);
    }
  }
  bits_ = static_cast<unsigned>(std::bit_width(static_cast<unsigned>(max_entry)));
  if (bits_ * radars() > 63) throw ContractError("too many radars to pack beam codes");
  const std::uint64_t field = (std::uint64_t{1} << bits_) - 1;
  neighbor_masks_.assign(radars(), 0);
  for (std::size_t i = 0; i < radars(); ++i) {
    for (std::size_t l : spec_.topology.neighbors[i]) neighbor_masks_[i] |= field << (bits_ * l);
  }
  contributions_.assign(radars(), {});
  for (std::size_t l = 0; l < radars(); ++l) {
    const auto& rows = spaces_->rows[l];
    auto& c = contributions_[l];
    c.resize(rows.size() * targets());
    for (std::size_t s = 0; s < rows.size(); ++s) {
      for (std::size_t j = 0; j < targets(); ++j) {
        c[s * targets() + j] = static_cast<std::uint64_t>(rows[s][j]) << (bits_ * l);
      }
    }
  }
  cache_ = std::make_unique<GainCache>(*gains_, radars(), targets(), bits_);
}

std::uint64_t Game::joint_size() const {
  std::uint64_t size = 1;
  for (const auto& rows : spaces_->rows) {
    const std::uint64_t n = rows.size();
    if (n != 0 && size > std::numeric_limits<std::uint64_t>::max() / n) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    size *= n;
  }
  return size;
}

Game::Codes Game::codes_of(const StrategyProfile& profile) const {
  if (profile.radars() != radars() || profile.targets() != targets()) {
    throw ContractError("profile dimensions do not match the game");
  }
  const std::uint64_t field = (std::uint64_t{1} << bits_) - 1;
  Codes codes(targets(), 0);
  for (std::size_t l = 0; l < radars(); ++l) {
    for (std::size_t j = 0; j < targets(); ++j) {
      const int b = profile(l, j);
      if (b < 0 || static_cast<std::uint64_t>(b) > field) {
        throw ContractError("beam count " + std::to_string(b) + " outside the game's range");
      }
      codes[j] |= static_cast<std::uint64_t>(b) << (bits_ * l);
    }
  }
  return codes;
}

double Game::utility_from_codes(std::size_t radar, const Codes& codes) const {
  const std::uint64_t mask = neighbor_masks_[radar];
  double u = 0.0;
  for (std::size_t j = 0; j < targets(); ++j) {
    const double w = spec_.weights(radar, j);
    if (w == 0.0) continue;
    u += w * cache_->get(radar, j, codes[j] & mask);
  }
  return u;
}

double Game::utility_with_row(std::size_t radar, const Codes& codes, std::size_t from_index,
                              std::size_t to_index) const {
  const std::uint64_t mask = neighbor_masks_[radar];
  const auto& c = contributions_[radar];
  const std::size_t t = targets();
  double u = 0.0;
  for (std::size_t j = 0; j < t; ++j) {
    const double w = spec_.weights(radar, j);
    if (w == 0.0) continue;
    const std::uint64_t code = codes[j] - c[from_index * t + j] + c[to_index * t + j];
    u += w * cache_->get(radar, j, code & mask);
  }
  return u;
}

double Game::utility(const StrategyProfile& profile, std::size_t radar) const {
  return utility_from_codes(radar, codes_of(profile));
}

double Game::welfare(const StrategyProfile& profile) const {
  const Codes codes = codes_of(profile);
  double w = 0.0;
  for (std::size_t i = 0; i < radars(); ++i) w += utility_from_codes(i, codes);
  return w;
}

std::vector<double> Game::counterfactuals(const StrategyProfile& profile, std::size_t radar) const {
  Codes codes = codes_of(profile);
  // Remove the radar's own field so each candidate row can be added in.
  const std::uint64_t field = ((std::uint64_t{1} << bits_) - 1) << (bits_ * radar);
  for (auto& c : codes) c &= ~field;
  const auto& rows = strategies(radar);
  std::vector<double> out(rows.size());
  const auto& c = contributions_[radar];
  Codes trial(codes.size());
  for (std::size_t s = 0; s < rows.size(); ++s) {
    for (std::size_t j = 0; j < targets(); ++j) trial[j] = codes[j] + c[s * targets() + j];
    out[s] = utility_from_codes(radar, trial);
  }
  return out;
}

StrategyProfile Game::profile_from_indices(std::span<const std::size_t> indices) const {
  StrategyProfile p(radars(), targets());
  for (std::size_t i = 0; i < radars(); ++i) p.set_row(i, strategies(i).at(indices[i]));
  return p;
}

void Game::for_each_profile(bool want_nash, const std::function<void(const Visit&)>& fn) const {
  const std::uint64_t size = joint_size();
  if (size > spec_.enumeration_cap) throw InstanceTooLargeError(size, spec_.enumeration_cap);
  const std::size_t n = radars();
  const std::size_t t = targets();
  for (std::size_t i = 0; i < n; ++i) {
    if (strategies(i).empty()) return;
  }
  std::vector<std::size_t> idx(n, 0);
  Codes codes(t, 0);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t j = 0; j < t; ++j) codes[j] += contributions_[l][j];
  }
  std::vector<double> utilities(n);
  while (true) {
    double welfare = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      utilities[i] = utility_from_codes(i, codes);
      welfare += utilities[i];
    }
    bool nash = false;
    if (want_nash) {
      nash = true;
      for (std::size_t i = 0; i < n && nash; ++i) {
        const std::size_t count = strategies(i).size();
        for (std::size_t s = 0; s < count; ++s) {
          if (s == idx[i]) continue;
          if (utility_with_row(i, codes, idx[i], s) > utilities[i] + kUtilityTolerance) {
            nash = false;
            break;
          }
        }
      }
    }
    fn(Visit{idx, welfare, nash});

    // Odometer increment, last radar fastest.
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      const auto& c = contributions_[pos];
      const std::size_t old = idx[pos];
      const std::size_t next = old + 1 < strategies(pos).size() ? old + 1 : 0;
      for (std::size_t j = 0; j < t; ++j) codes[j] = codes[j] - c[old * t + j] + c[next * t + j];
      idx[pos] = next;
      if (next != 0) break;
      if (pos == 0) return;
    }
  }
}

// ---------------------------------------------------------------------------
// Equilibrium analysis

NashCheck is_pure_nash(const StrategyProfile& profile, const Game& game) {
  NashCheck check;
  for (std::size_t i = 0; i < game.radars(); ++i) {
    const double current = game.utility(profile, i);
    const std::vector<double> cf = game.counterfactuals(profile, i);
    const auto& rows = game.strategies(i);
    for (std::size_t s = 0; s < rows.size(); ++s) {
      const double improvement = cf[s] - current;
      if (improvement <= 0.0) continue;
      if (!check.best_deviation || improvement > check.best_deviation->improvement) {
        check.best_deviation = Deviation{i, rows[s], improvement};
      }
    }
  }
  check.is_nash = !check.best_deviation || check.best_deviation->improvement <= kUtilityTolerance;
  return check;
}

std::vector<StrategyProfile> enumerate_nash(const Game& game) {
  std::vector<StrategyProfile> out;
  game.for_each_profile(true, [&](const Game::Visit& v) {
    if (v.is_nash) out.push_back(game.profile_from_indices(v.indices));
  });
  return out;
}

PoaReport price_of_anarchy(const Game& game) {
  PoaReport report;
  bool have_opt = false;
  std::vector<std::size_t> opt_idx;
  std::vector<std::size_t> worst_idx;
  double worst = 0.0;
  game.for_each_profile(true, [&](const Game::Visit& v) {
    if (!have_opt || v.welfare > report.optimum_welfare + kUtilityTolerance) {
      have_opt = true;
      report.optimum_welfare = v.welfare;
      opt_idx.assign(v.indices.begin(), v.indices.end());
    }
    if (v.is_nash) {
      if (report.nash_count == 0 || v.welfare < worst - kUtilityTolerance) {
        worst = v.welfare;
        worst_idx.assign(v.indices.begin(), v.indices.end());
      }
      ++report.nash_count;
    }
  });
  if (have_opt) report.optimum = game.profile_from_indices(opt_idx);
  if (report.nash_count > 0) {
    report.worst_nash_welfare = worst;
    report.worst_nash = game.profile_from_indices(worst_idx);
    if (worst > 0.0) report.price_of_anarchy = report.optimum_welfare / worst;
  }
  return report;
}

StrategyProfile best_profile_exhaustive(const Game& game) {
  bool have = false;
  double best = 0.0;
  std::vector<std::size_t> best_idx;
  game.for_each_profile(false, [&](const Game::Visit& v) {
    if (!have || v.welfare > best + kUtilityTolerance) {
      have = true;
      best = v.welfare;
      best_idx.assign(v.indices.begin(), v.indices.end());
    }
  });
  if (!have) throw ContractError("empty strategy space");
  return game.profile_from_indices(best_idx);
}

}  // namespace mfr
