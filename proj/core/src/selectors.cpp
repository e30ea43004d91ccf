#include "mfr/selectors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include "mfr/errors.hpp"

namespace mfr {

namespace {

struct KindName {
  SelectorKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {SelectorKind::lcbrd, "lcbrd"},
    {SelectorKind::regret_matching, "rm"},
    {SelectorKind::standalone, "standalone"},
    {SelectorKind::random_k, "random"},
    {SelectorKind::approx_centralized, "approx_centralized"},
    {SelectorKind::exhaustive_centralized, "exhaustive"},
    {SelectorKind::idle, "idle"},
};

// Fullest selected target; ties go to the lowest index.
std::optional<std::size_t> fullest_selected(const StrategyRow& row, std::span<const int> counts,
                                            std::span<const std::size_t> observable) {
  std::optional<std::size_t> best;
  for (std::size_t j : observable) {
    if (row[j] == 0) continue;
    if (!best || counts[j] > counts[*best]) best = j;
  }
  return best;
}

// Emptiest unselected target; ties go to the most accurate, then lowest index.
std::optional<std::size_t> emptiest_unselected(const StrategyRow& row, std::span<const int> counts,
                                               std::span<const double> score,
                                               std::span<const std::size_t> observable) {
  std::optional<std::size_t> best;
  for (std::size_t j : observable) {
    if (row[j] != 0) continue;
    if (!best || counts[j] < counts[*best] || (counts[j] == counts[*best] && score[j] < score[*best])) {
      best = j;
    }
  }
  return best;
}

void move_beam(StrategyRow& row, std::vector<int>& counts, std::size_t from, std::size_t to) {
  --row[from];
  ++row[to];
  --counts[from];
  ++counts[to];
}

}  // namespace

std::string to_string(SelectorKind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

SelectorKind selector_kind_from_string(const std::string& name) {
  for (const auto& k : kKindNames) {
    if (name == k.name) return k.kind;
  }
  if (name == "regret_matching") return SelectorKind::regret_matching;
  if (name == "random_k") return SelectorKind::random_k;
  if (name == "exhaustive_centralized") return SelectorKind::exhaustive_centralized;
  throw ConfigError("selector.kind", "unknown selector '" + name + "'");
}

StrategyRow greedy_row(std::span<const std::size_t> observable, std::span<const double> score,
                       std::size_t targets, int beams) {
  std::vector<std::size_t> order(observable.begin(), observable.end());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  StrategyRow row(targets, 0);
  if (order.empty()) return row;
  for (int b = 0; b < beams; ++b) row[order[static_cast<std::size_t>(b) % order.size()]] += 1;
  return row;
}

StrategyRow random_row(std::span<const std::size_t> observable, std::size_t targets, int beams,
                       StrategyMode mode, Substream& rng) {
  StrategyRow row(targets, 0);
  if (observable.empty()) return row;
  if (mode == StrategyMode::distinct) {
    std::vector<std::size_t> picked;
    std::sample(observable.begin(), observable.end(), std::back_inserter(picked),
                static_cast<std::ptrdiff_t>(beams), rng);
    for (std::size_t j : picked) row[j] = 1;
    return row;
  }
  // Uniform over multisets: stars and bars, choose bar positions as a subset.
  const std::size_t n = observable.size();
  std::vector<std::size_t> slots(n - 1 + static_cast<std::size_t>(beams));
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  std::vector<std::size_t> bars;
  std::sample(slots.begin(), slots.end(), std::back_inserter(bars), static_cast<std::ptrdiff_t>(n - 1), rng);
  std::size_t target = 0;
  std::size_t bar = 0;
  for (std::size_t pos = 0; pos < slots.size(); ++pos) {
    if (bar < bars.size() && bars[bar] == pos) {
      ++target;
      ++bar;
    } else {
      row[observable[target]] += 1;
    }
  }
  return row;
}

StrategyRow lcbrd_step(SelectorState& state, std::span<const int> counts_in, std::span<const double> score,
                       const LcbrdContext& ctx) {
  state.previous = state.current;
  if (state.skip_next) {
    state.skip_next = false;
    return state.current;
  }
  StrategyRow row = state.current;
  std::vector<int> counts(counts_in.begin(), counts_in.end());

  // s1: spread duplicate beams.
  for (std::size_t j : ctx.observable) {
    while (row[j] > 1) {
      std::optional<std::size_t> dest;
      for (std::size_t l : ctx.observable) {
        if (row[l] == 0 && (!dest || counts[l] < counts[*dest])) dest = l;
      }
      if (!dest) break;
      move_beam(row, counts, j, *dest);
    }
  }

  if (ctx.epsilon > 0.0 && state.rng.bernoulli(ctx.epsilon)) {
    int beams = 0;
    for (int b : row) beams += b;
    row = random_row(ctx.observable, row.size(), beams, StrategyMode::distinct, state.rng);
  } else if (state.rng.bernoulli(ctx.alpha)) {
    // s2: at most one beam moves.
    const auto src = fullest_selected(row, counts, ctx.observable);
    const auto dst = emptiest_unselected(row, counts, score, ctx.observable);
    if (src && dst) {
      const int gap = counts[*src] - counts[*dst];
      if (gap >= 2) {
        move_beam(row, counts, *src, *dst);
      } else if (gap == 1) {
        // Among the fullest selected targets give up the least accurate.
        std::size_t worst = *src;
        for (std::size_t j : ctx.observable) {
          if (row[j] > 0 && counts[j] == counts[*src] && score[j] > score[worst]) worst = j;
        }
        if (score[*dst] < score[worst]) move_beam(row, counts, worst, *dst);
      }
    }
  }
  state.current = row;
  return row;
}

bool lcbrd_revert(SelectorState& state, double utility) {
  if (!state.prev_utility) {
    state.prev_utility = utility;
    return false;
  }
  return lcbrd_revert(state, utility, *state.prev_utility);
}

bool lcbrd_revert(SelectorState& state, double utility, double reference) {
  const bool revert = utility < reference - kUtilityTolerance && !state.previous.empty();
  if (revert) {
    state.current = state.previous;
    state.skip_next = true;
  }
  state.prev_utility = utility;
  return revert;
}

void lcbrd_reinitialize(SelectorState& state, StrategyRow row) {
  state.current = std::move(row);
  state.previous.clear();
  state.prev_utility.reset();
  state.skip_next = false;
}

void rm_initialize(SelectorState& state, const std::vector<StrategyRow>& strategies, const StrategyRow& row) {
  const auto it = std::find(strategies.begin(), strategies.end(), row);
  if (it == strategies.end()) throw ContractError("initial row is not in the radar's strategy list");
  const auto n = static_cast<Eigen::Index>(strategies.size());
  state.current = row;
  state.current_index = static_cast<std::size_t>(it - strategies.begin());
  state.regret = Eigen::MatrixXd::Zero(n, n);
  state.mixed.assign(strategies.size(), 0.0);
  state.mixed[state.current_index] = 1.0;
  state.updates = 0;
}

void rm_regret_update(SelectorState& state, double realized_utility, std::span<const double> counterfactuals,
                      double theta) {
  const auto n = state.regret.rows();
  if (static_cast<std::size_t>(n) != counterfactuals.size()) {
    throw ContractError("counterfactual vector does not match the regret matrix");
  }
  const auto s = static_cast<Eigen::Index>(state.current_index);
  state.regret *= (1.0 - theta);
  for (Eigen::Index t = 0; t < n; ++t) {
    if (t == s) continue;
    state.regret(s, t) += theta * (counterfactuals[static_cast<std::size_t>(t)] - realized_utility);
  }
  ++state.updates;
}

double rm_theta(const SelectorParams& params, std::uint64_t update_number) {
  if (params.step == StepRule::harmonic) return 1.0 / static_cast<double>(std::max<std::uint64_t>(1, update_number));
  return params.theta;
}

std::vector<double> rm_mixed_strategy(const SelectorState& state, double mu) {
  const auto n = static_cast<std::size_t>(state.regret.rows());
  const auto s = static_cast<Eigen::Index>(state.current_index);
  std::vector<double> pi(n, 0.0);
  double sum = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (t == state.current_index) continue;
    const double r = std::max(state.regret(s, static_cast<Eigen::Index>(t)), 0.0);
    pi[t] = r / mu;
    sum += r;
  }
  if (!(mu > sum)) throw MuViolationError(sum, mu);
  double rest = 1.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (t != state.current_index) rest -= pi[t];
  }
  pi[state.current_index] = rest;
  return pi;
}

StrategyRow rm_strategy_draw(SelectorState& state, const std::vector<StrategyRow>& strategies, double mu) {
  state.mixed = rm_mixed_strategy(state, mu);
  std::discrete_distribution<std::size_t> pick(state.mixed.begin(), state.mixed.end());
  state.current_index = pick(state.rng);
  state.current = strategies.at(state.current_index);
  return state.current;
}

std::vector<double> counterfactual_utilities(const Game& game, const StrategyProfile& profile, std::size_t radar) {
  return game.counterfactuals(profile, radar);
}

double max_average_regret(const SelectorState& state) {
  const auto n = state.regret.rows();
  double best = 0.0;
  bool any = false;
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index t = 0; t < n; ++t) {
      if (s == t) continue;
      if (!any || state.regret(s, t) > best) best = state.regret(s, t);
      any = true;
    }
  }
  return any ? best : 0.0;
}

StrategyRow baseline_step(SelectorKind kind, SelectorState& state, const BaselineContext& ctx) {
  StrategyRow row(ctx.targets, 0);
  switch (kind) {
    case SelectorKind::standalone: {
      const std::size_t n = ctx.observable.size();
      if (n == 0) break;
      const auto m = static_cast<std::size_t>(ctx.beams);
      const auto start = static_cast<std::size_t>(ctx.scan) * m;
      for (std::size_t b = 0; b < m; ++b) row[ctx.observable[(start + b) % n]] += 1;
      break;
    }
    case SelectorKind::random_k:
      if (ctx.period <= 0 || ctx.scan % ctx.period == 0 || state.current.size() != ctx.targets) {
        row = random_row(ctx.observable, ctx.targets, ctx.beams, ctx.mode, state.rng);
      } else {
        row = state.current;
      }
      break;
    case SelectorKind::approx_centralized:
    case SelectorKind::exhaustive_centralized:
      if (ctx.plan == nullptr) throw ContractError("centralized selector needs a plan");
      row = ctx.plan->row_copy(state.radar_id);
      break;
    case SelectorKind::idle:
      break;
    default:
      throw ContractError("baseline_step called with a learning selector");
  }
  state.previous = state.current;
  state.current = row;
  return row;
}

void EmpiricalDistribution::record(const StrategyProfile& profile) {
  ++counts_[profile.to_string()];
  ++total_;
}

double EmpiricalDistribution::frequency(const StrategyProfile& profile) const {
  if (total_ == 0) return 0.0;
  const auto it = counts_.find(profile.to_string());
  return it == counts_.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total_);
}

double EmpiricalDistribution::correlated_violation(const Game& game) const {
  if (total_ == 0) return 0.0;
  const std::size_t n = game.radars();
  std::vector<Eigen::MatrixXd> gain(n);
  std::vector<std::map<StrategyRow, std::size_t>> index(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rows = game.strategies(i);
    const auto size = static_cast<Eigen::Index>(rows.size());
    gain[i] = Eigen::MatrixXd::Zero(size, size);
    for (std::size_t s = 0; s < rows.size(); ++s) index[i][rows[s]] = s;
  }
  for (const auto& [text, count] : counts_) {
    const StrategyProfile p = StrategyProfile::parse(text);
    const double eta = static_cast<double>(count) / static_cast<double>(total_);
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = index[i].find(p.row_copy(i));
      if (it == index[i].end()) throw ContractError("recorded row outside the strategy list");
      const auto s = static_cast<Eigen::Index>(it->second);
      const std::vector<double> cf = game.counterfactuals(p, i);
      for (std::size_t t = 0; t < cf.size(); ++t) {
        gain[i](s, static_cast<Eigen::Index>(t)) += eta * (cf[t] - cf[static_cast<std::size_t>(s)]);
      }
    }
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& g : gain) {
    if (g.size() > 0) worst = std::max(worst, g.maxCoeff());
  }
  return worst;
}

}  // namespace mfr
