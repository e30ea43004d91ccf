#include "mfr/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "mfr/errors.hpp"

namespace mfr {

namespace {

constexpr std::size_t kNashRecordingLimit = 2000;

double largest_single_gain(const GainProvider& gains, const TopologySpec& topology, std::size_t observer) {
  if (const auto* ekf = dynamic_cast<const FilterGainProvider*>(&gains)) {
    return ekf->max_single_beam_gain(topology, observer);
  }
  const auto& table = dynamic_cast<const GainTable&>(gains);
  double best = 0.0;
  for (std::size_t l : topology.neighbors[observer]) {
    for (std::size_t j : topology.observable[l]) best = std::max(best, table.gain_of_count(j, 1));
  }
  return best;
}

// Accuracy score for LC-BRD, lower is better.
std::vector<double> accuracy_scores(AccuracyRule rule, const ScenarioConfig& config, std::size_t radar,
                                    const GainProvider& gains, const TopologySpec& topology,
                                    const StrategyProfile& previous) {
  const std::size_t t = config.target_count();
  std::vector<double> score(t);
  if (rule == AccuracyRule::range_coeff) {
    for (std::size_t j = 0; j < t; ++j) {
      score[j] = config.noise.range_coeff(static_cast<Eigen::Index>(radar), static_cast<Eigen::Index>(j));
    }
    return score;
  }
  std::vector<int> beams(config.radar_count(), 0);
  for (std::size_t j = 0; j < t; ++j) {
    std::fill(beams.begin(), beams.end(), 0);
    for (std::size_t l : topology.neighbors[radar]) beams[l] = previous(l, j);
    const double with = gains.gain(radar, j, beams);
    double marginal = 0.0;
    if (beams[radar] > 0) {
      beams[radar] -= 1;
      marginal = with - gains.gain(radar, j, beams);
    } else {
      beams[radar] += 1;
      marginal = gains.gain(radar, j, beams) - with;
    }
    score[j] = -marginal;
  }
  return score;
}

StrategyRow initial_row(const SelectorParams& params, const ScenarioConfig& config, std::size_t radar,
                        Substream& rng) {
  const auto& obs = config.topology.observable[radar];
  if (params.init == InitRule::random) {
    return random_row(obs, config.target_count(), config.beams, params.mode, rng);
  }
  std::vector<double> score(config.target_count());
  for (std::size_t j = 0; j < score.size(); ++j) {
    score[j] = config.noise.range_coeff(static_cast<Eigen::Index>(radar), static_cast<Eigen::Index>(j));
  }
  return greedy_row(obs, score, config.target_count(), config.beams);
}

class Engine {
 public:
  Engine(const ScenarioConfig& config, const SelectorParams& params, std::size_t realization)
      : config_(config),
        params_(params),
        r_(realization),
        n_(config.radar_count()),
        t_(config.target_count()),
        motion_(config.motion()),
        topology_(params.kind == SelectorKind::standalone ? config.topology.isolated() : config.topology) {
    spec_ = config.game_spec(params.mode);
    spec_.topology = topology_;
    spaces_ = StrategySpaces::build(spec_);
    if (params.kind == SelectorKind::approx_centralized || params.kind == SelectorKind::exhaustive_centralized) {
      plan_spec_ = config.game_spec(StrategyMode::distinct);
      plan_spaces_ = StrategySpaces::build(plan_spec_);
    }
    std::size_t space_total = 0;
    for (const auto& rows : spaces_->rows) space_total += rows.size();
    record_nash_ = config.record_nash == NashRecording::always ||
                   (config.record_nash == NashRecording::automatic && space_total <= kNashRecordingLimit);
    if (config.gain_mode == GainMode::abstract) table_.emplace(config.gain_table);
  }

  std::vector<MetricsRecord> run(const ScanHook& hook) {
    init_state();
    std::vector<MetricsRecord> records;
    records.reserve(static_cast<std::size_t>(config_.horizon));
    for (std::int64_t k = 0; k < config_.horizon; ++k) records.push_back(scan(k, hook));
    return records;
  }

 private:
  void init_state() {
    truth_ = config_.targets;
    const StateMatrix p0 = config_.init_cov_diag.asDiagonal();
    std::vector<TrackEstimate> guesses(t_);
    for (std::size_t j = 0; j < t_; ++j) {
      Substream rng(StreamDomain::initial_guess, {config_.seed, r_, j});
      StateVector noise;
      noise << config_.init_position_std * rng.normal(), config_.init_position_std * rng.normal(),
          config_.init_velocity_std * rng.normal(), config_.init_velocity_std * rng.normal();
      guesses[j] = {j, 0, config_.targets[j].x + noise, p0};
    }
    tracks_.assign(n_, guesses);
    if (config_.freeze_dynamics) {
      for (std::size_t j = 0; j < t_; ++j) frozen_.push_back(frozen_prior(config_, j));
    }
    selectors_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      auto& s = selectors_[i];
      s.radar_id = i;
      s.rng = Substream(StreamDomain::selector, {config_.seed, r_, i});
      s.current = initial_row(params_, config_, i, s.rng);
      if (params_.kind == SelectorKind::regret_matching) rm_initialize(s, spaces_->rows[i], s.current);
    }
  }

  StrategyProfile select(std::int64_t k, const Game& game, const GainProvider& gains) {
    StrategyProfile profile(n_, t_);
    if (k == 0 && params_.kind != SelectorKind::standalone && params_.kind != SelectorKind::random_k &&
        params_.kind != SelectorKind::approx_centralized && params_.kind != SelectorKind::exhaustive_centralized &&
        params_.kind != SelectorKind::idle) {
      for (std::size_t i = 0; i < n_; ++i) profile.set_row(i, selectors_[i].current);
      return profile;
    }
    switch (params_.kind) {
      case SelectorKind::lcbrd: {
        const bool reinit = params_.reinit_period > 0 && k % params_.reinit_period == 0;
        for (std::size_t i = 0; i < n_; ++i) {
          auto& s = selectors_[i];
          const auto score = accuracy_scores(params_.accuracy, config_, i, gains, topology_, previous_);
          const auto& obs = config_.topology.observable[i];
          if (reinit) {
            lcbrd_reinitialize(s, params_.init == InitRule::random
                                      ? random_row(obs, t_, config_.beams, StrategyMode::distinct, s.rng)
                                      : greedy_row(obs, score, t_, config_.beams));
          } else {
            std::vector<int> counts(t_);
            for (std::size_t j = 0; j < t_; ++j) counts[j] = measurement_count(previous_, topology_, i, j);
            lcbrd_step(s, counts, score, {obs, params_.alpha, params_.epsilon});
          }
          profile.set_row(i, s.current);
        }
        break;
      }
      case SelectorKind::regret_matching:
        for (std::size_t i = 0; i < n_; ++i) {
          auto& s = selectors_[i];
          profile.set_row(i, rm_strategy_draw(s, game.strategies(i), mu(i, game, gains)));
        }
        break;
      case SelectorKind::approx_centralized:
      case SelectorKind::exhaustive_centralized:
        if (k % params_.period == 0 || !plan_) plan_ = centralized_plan(gains);
        [[fallthrough]];
      default:
        for (std::size_t i = 0; i < n_; ++i) {
          BaselineContext ctx{k, config_.beams, t_, config_.topology.observable[i], params_.period, params_.mode,
                              plan_ ? &*plan_ : nullptr};
          profile.set_row(i, baseline_step(params_.kind, selectors_[i], ctx));
        }
    }
    return profile;
  }

  // A plan is held for `period` scans, so it maximizes the gain accumulated
  // over that window rather than over the planning scan alone.
  StrategyProfile centralized_plan(const GainProvider& gains) const {
    const auto* ekf = dynamic_cast<const FilterGainProvider*>(&gains);
    if (params_.kind == SelectorKind::exhaustive_centralized || !ekf || params_.period == 1) {
      return best_profile_exhaustive(Game(plan_spec_, gains, plan_spaces_));
    }
    std::vector<std::vector<TrackEstimate>> predicted(n_, std::vector<TrackEstimate>(t_));
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < t_; ++j) predicted[i][j] = ekf->predicted(i, j);
    }
    const HorizonGainProvider horizon(std::move(predicted), motion_, config_.noise, config_.radars,
                                      params_.period);
    return best_profile_exhaustive(Game(plan_spec_, horizon, plan_spaces_));
  }

  double mu(std::size_t radar, const Game& game, const GainProvider& gains) {
    if (params_.mu) return *params_.mu;
    double g = 0.0;
    if (params_.mu_rule == MuRule::initial) {
      if (initial_gain_.empty()) {
        initial_gain_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) initial_gain_[i] = largest_single_gain(gains, topology_, i);
      }
      g = initial_gain_[radar];
    } else {
      // Regrets are discounted averages of utility differences, so they can
      // lag a shrinking gain scale by the same discount. Tracking the
      // discounted envelope of the gain keeps mu above the regret sum.
      if (gain_envelope_.empty()) gain_envelope_.assign(n_, 0.0);
      const auto& s = selectors_[radar];
      const double decay = s.updates == 0 ? 0.0 : 1.0 - rm_theta(params_, s.updates);
      gain_envelope_[radar] = std::max(largest_single_gain(gains, topology_, radar), decay * gain_envelope_[radar]);
      g = gain_envelope_[radar];
    }
    return params_.mu_scale * static_cast<double>(game.strategies(radar).size()) * g;
  }

  MetricsRecord scan(std::int64_t k, const ScanHook& hook) {
    // 1. truth
    if (!config_.freeze_dynamics) {
      for (std::size_t j = 0; j < t_; ++j) {
        Substream rng(StreamDomain::process_noise, {config_.seed, r_, static_cast<std::uint64_t>(k), j});
        truth_[j] = propagate(truth_[j], motion_, rng);
      }
    }
    // 2. prediction
    std::vector<std::vector<TrackEstimate>> predicted(n_, std::vector<TrackEstimate>(t_));
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < t_; ++j) {
        predicted[i][j] = config_.freeze_dynamics ? frozen_[j] : predict(tracks_[i][j], motion_);
        predicted[i][j].scan = k;
      }
    }
    std::optional<FilterGainProvider> ekf;
    const GainProvider* gains = nullptr;
    if (table_) {
      gains = &*table_;
    } else {
      ekf.emplace(predicted, config_.noise, config_.radars);
      gains = &*ekf;
    }
    const Game game(spec_, *gains, spaces_);

    // 3. selection
    const StrategyProfile profile = select(k, game, *gains);

    // 4-6. measure, share, fuse
    std::vector<std::vector<Measurement>> taken(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < t_; ++j) {
        for (int b = 0; b < profile(i, j); ++b) {
          Substream rng(StreamDomain::measurement_noise,
                        {config_.seed, r_, static_cast<std::uint64_t>(k), i, j, static_cast<std::uint64_t>(b)});
          taken[i].push_back(observe(config_.radars[i], j, truth_[j], config_.noise, k, rng));
        }
      }
    }
    std::vector<std::vector<TrackEstimate>> posterior(n_, std::vector<TrackEstimate>(t_));
    std::vector<Measurement> batch;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < t_; ++j) {
        batch.clear();
        for (std::size_t l : topology_.neighbors[i]) {
          for (const auto& z : taken[l]) {
            if (z.target_id == j) batch.push_back(z);
          }
        }
        try {
          posterior[i][j] = update_cyclic(predicted[i][j], batch, config_.noise, config_.radars);
        } catch (const NumericalError& e) {
          throw NumericalError("scan " + std::to_string(k) + ", radar " + std::to_string(i) + ", target " +
                               std::to_string(j) + ": " + e.what());
        }
      }
    }

    // 7. utilities, learning updates, metrics
    MetricsRecord rec;
    rec.scan = k;
    rec.profile = profile;
    rec.utilities.resize(n_);
    rec.reverted.assign(n_, false);
    for (std::size_t i = 0; i < n_; ++i) rec.utilities[i] = game.utility(profile, i);
    if (params_.kind == SelectorKind::lcbrd && params_.revert) {
      for (std::size_t i = 0; i < n_; ++i) {
        rec.reverted[i] = previous_.radars() == n_
                              ? lcbrd_revert(selectors_[i], rec.utilities[i], game.utility(previous_, i))
                              : lcbrd_revert(selectors_[i], rec.utilities[i]);
      }
    }
    if (params_.kind == SelectorKind::regret_matching) {
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n_; ++i) {
        auto& s = selectors_[i];
        const auto cf = counterfactual_utilities(game, profile, i);
        rm_regret_update(s, rec.utilities[i], cf, rm_theta(params_, s.updates + 1));
        worst = std::max(worst, max_average_regret(s));
      }
      rec.max_avg_regret = worst;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < t_; ++j) {
        rec.metric += config_.weights(i, j) * posterior[i][j].cov.trace();
      }
    }
    if (record_nash_) rec.nash = is_pure_nash(profile, game).is_nash;

    if (hook) hook(ScanSnapshot{r_, k, truth_, predicted, posterior, game, *gains, selectors_, rec});

    if (!config_.freeze_dynamics) tracks_ = std::move(posterior);
    previous_ = profile;
    return rec;
  }

  const ScenarioConfig& config_;
  const SelectorParams& params_;
  std::size_t r_;
  std::size_t n_;
  std::size_t t_;
  MotionModel motion_;
  TopologySpec topology_;
  GameSpec spec_;
  std::shared_ptr<const StrategySpaces> spaces_;
  GameSpec plan_spec_;
  std::shared_ptr<const StrategySpaces> plan_spaces_;
  std::optional<StrategyProfile> plan_;
  bool record_nash_ = false;
  std::optional<GainTable> table_;

  std::vector<TargetState> truth_;
  std::vector<std::vector<TrackEstimate>> tracks_;
  std::vector<TrackEstimate> frozen_;
  std::vector<SelectorState> selectors_;
  StrategyProfile previous_;
  std::vector<double> initial_gain_;
  std::vector<double> gain_envelope_;
};

}  // namespace

std::vector<MetricsRecord> run_realization(const ScenarioConfig& config, const SelectorParams& selector,
                                           std::size_t realization, const ScanHook& hook) {
  return Engine(config, selector, realization).run(hook);
}

std::vector<AggregateRecord> aggregate(const std::vector<std::vector<MetricsRecord>>& realizations) {
  std::vector<AggregateRecord> mean;
  if (realizations.empty()) return mean;
  const double count = static_cast<double>(realizations.size());
  const std::size_t scans = realizations.front().size();
  for (std::size_t k = 0; k < scans; ++k) {
    AggregateRecord a;
    a.scan = realizations.front()[k].scan;
    a.utilities.assign(realizations.front()[k].utilities.size(), 0.0);
    double nash = 0.0;
    double regret = 0.0;
    bool has_nash = true;
    bool has_regret = true;
    for (const auto& run : realizations) {
      const MetricsRecord& rec = run.at(k);
      a.metric += rec.metric;
      for (std::size_t i = 0; i < a.utilities.size(); ++i) a.utilities[i] += rec.utilities[i];
      has_nash = has_nash && rec.nash.has_value();
      if (rec.nash) nash += *rec.nash ? 1.0 : 0.0;
      has_regret = has_regret && rec.max_avg_regret.has_value();
      if (rec.max_avg_regret) regret += *rec.max_avg_regret;
    }
    a.metric /= count;
    for (double& u : a.utilities) u /= count;
    if (has_nash) a.nash_fraction = nash / count;
    if (has_regret) a.max_avg_regret = regret / count;
    mean.push_back(std::move(a));
  }
  return mean;
}

double tail_mean(const std::vector<AggregateRecord>& mean, int window) {
  if (mean.empty()) return 0.0;
  const std::size_t w = std::min(mean.size(), static_cast<std::size_t>(std::max(window, 1)));
  double sum = 0.0;
  for (std::size_t k = mean.size() - w; k < mean.size(); ++k) sum += mean[k].metric;
  return sum / static_cast<double>(w);
}

std::optional<std::int64_t> convergence_scan(const std::vector<AggregateRecord>& mean, double level) {
  std::optional<std::int64_t> since;
  for (const auto& a : mean) {
    if (!a.nash_fraction) return std::nullopt;
    if (*a.nash_fraction >= level) {
      if (!since) since = a.scan;
    } else {
      since.reset();
    }
  }
  return since;
}

MonteCarloResult run_monte_carlo(const ScenarioConfig& config, const SelectorParams& selector,
                                 const MonteCarloOptions& options) {
  const auto count = static_cast<std::size_t>(config.realizations);
  std::vector<std::vector<MetricsRecord>> runs(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < count; r = next++) {
      try {
        runs[r] = run_realization(config, selector, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  const auto jobs = static_cast<std::size_t>(std::clamp(options.jobs, 1, 256));
  if (jobs == 1 || count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(jobs, count); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  MonteCarloResult result;
  result.selector = selector;
  result.mean = aggregate(runs);
  result.tail_metric = tail_mean(result.mean, config.tail_window);
  if (options.keep_realizations) result.realizations = std::move(runs);
  return result;
}

std::vector<SelectorParams> compared_selectors(const ScenarioConfig& config) {
  return config.compare.empty() ? std::vector<SelectorParams>{config.selector} : config.compare;
}

std::vector<MonteCarloResult> compare_strategies(const ScenarioConfig& config,
                                                 const std::vector<SelectorParams>& selectors,
                                                 const MonteCarloOptions& options) {
  std::vector<MonteCarloResult> results;
  for (const auto& s : selectors) results.push_back(run_monte_carlo(config, s, options));
  return results;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& config, const MonteCarloOptions& options) {
  if (!config.sweep) throw ConfigError("sweep", "scenario has no sweep section");
  const auto selectors = compared_selectors(config);
  auto index_of = [&](const std::string& label) {
    for (std::size_t s = 0; s < selectors.size(); ++s) {
      if (selectors[s].display_name() == label) return s;
    }
    throw ConfigError("sweep", "unknown selector label '" + label + "'");
  };
  const std::size_t num = index_of(config.sweep->numerator);
  const std::size_t den = index_of(config.sweep->denominator);
  MonteCarloOptions lean = options;
  lean.keep_realizations = false;
  std::vector<SweepRow> rows;
  for (double spread : config.sweep->spreads) {
    const ScenarioConfig at = with_spread(config, spread);
    SweepRow row;
    row.spread = spread;
    for (const auto& r : compare_strategies(at, selectors, lean)) row.tail.push_back(r.tail_metric);
    row.ratio = row.tail[num] / row.tail[den];
    rows.push_back(std::move(row));
  }
  return rows;
}

TrackEstimate frozen_prior(const ScenarioConfig& config, std::size_t target) {
  const MotionModel motion = config.motion();
  TrackEstimate prior;
  prior.target_id = target;
  prior.state = config.targets.at(target).x;
  const StateMatrix p0 = config.init_cov_diag.asDiagonal();
  prior.cov = symmetrize(motion.transition() * p0 * motion.transition().transpose() + motion.process_covariance());
  return prior;
}

namespace {

std::unique_ptr<GainProvider> frozen_provider(const ScenarioConfig& config, const NoiseModel& noise,
                                              const std::vector<RadarSite>& sites) {
  if (config.gain_mode == GainMode::abstract) return std::make_unique<GainTable>(config.gain_table);
  std::vector<TrackEstimate> prior;
  for (std::size_t j = 0; j < config.target_count(); ++j) prior.push_back(frozen_prior(config, j));
  return std::make_unique<FilterGainProvider>(std::vector(config.radar_count(), prior), noise, sites);
}

}  // namespace

FrozenGame::FrozenGame(const ScenarioConfig& config, StrategyMode mode)
    : noise_(config.noise),
      sites_(config.radars),
      gains_(frozen_provider(config, noise_, sites_)),
      game_(config.game_spec(mode), *gains_) {}

double FrozenGame::max_single_beam_gain() const {
  double best = 0.0;
  for (std::size_t i = 0; i < game_.radars(); ++i) {
    best = std::max(best, largest_single_gain(*gains_, game_.spec().topology, i));
  }
  return best;
}

}  // namespace mfr
