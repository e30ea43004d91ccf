#include "mfr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>
#include <utility>

#include <yaml-cpp/yaml.h>

#include "mfr/errors.hpp"

namespace mfr {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& bundled_scenarios();
}

namespace {

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t index) { return path + "[" + std::to_string(index) + "]"; }

void check_keys(const YAML::Node& node, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) throw ConfigError(path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(at(path, key), "unknown field");
    }
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& path, const char* what) {
  if (!node.IsScalar()) throw ConfigError(path, std::string("expected ") + what);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, std::string("expected ") + what + ", got '" + node.Scalar() + "'");
  }
}

double number(const YAML::Node& node, const std::string& path) {
  const double v = scalar<double>(node, path, "a number");
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

int integer(const YAML::Node& node, const std::string& path) { return scalar<int>(node, path, "an integer"); }

bool boolean(const YAML::Node& node, const std::string& path) { return scalar<bool>(node, path, "true or false"); }

std::string text(const YAML::Node& node, const std::string& path) {
  return scalar<std::string>(node, path, "a string");
}

std::vector<double> number_list(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) throw ConfigError(path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(number(node[i], at(path, i)));
  return out;
}

std::vector<std::size_t> index_list(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) throw ConfigError(path, "expected a list of indices");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const int v = integer(node[i], at(path, i));
    if (v < 0) throw ConfigError(at(path, i), "must be >= 0");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

Eigen::MatrixXd matrix(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence() || node.size() == 0) throw ConfigError(path, "expected a list of rows");
  const auto rows = node.size();
  const auto first = number_list(node[0], at(path, std::size_t{0}));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(first.size()));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = number_list(node[r], at(path, r));
    if (row.size() != first.size()) throw ConfigError(at(path, r), "rows have different lengths");
    for (std::size_t c = 0; c < row.size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
  }
  return m;
}

template <class E>
E choice(const YAML::Node& node, const std::string& path, std::initializer_list<std::pair<std::string_view, E>> options) {
  const std::string v = text(node, path);
  std::string names;
  for (const auto& [name, value] : options) {
    if (v == name) return value;
    names += names.empty() ? std::string(name) : ", " + std::string(name);
  }
  throw ConfigError(path, "expected one of " + names + ", got '" + v + "'");
}

const std::initializer_list<std::pair<std::string_view, StrategyMode>> kModes = {
    {"distinct", StrategyMode::distinct}, {"multiset", StrategyMode::multiset}};
const std::initializer_list<std::pair<std::string_view, InitRule>> kInits = {{"greedy", InitRule::greedy},
                                                                             {"random", InitRule::random}};
const std::initializer_list<std::pair<std::string_view, AccuracyRule>> kAccuracy = {
    {"range_coeff", AccuracyRule::range_coeff}, {"marginal_gain", AccuracyRule::marginal_gain}};
const std::initializer_list<std::pair<std::string_view, StepRule>> kSteps = {{"fixed", StepRule::fixed},
                                                                           {"harmonic", StepRule::harmonic}};
const std::initializer_list<std::pair<std::string_view, MuRule>> kMuRules = {{"adaptive", MuRule::adaptive},
                                                                           {"initial", MuRule::initial}};
const std::initializer_list<std::pair<std::string_view, NashRecording>> kNash = {
    {"auto", NashRecording::automatic}, {"always", NashRecording::always}, {"never", NashRecording::never}};

template <class E>
std::string name_of(E value, std::initializer_list<std::pair<std::string_view, E>> options) {
  for (const auto& [name, v] : options) {
    if (v == value) return std::string(name);
  }
  return "?";
}

SelectorParams parse_selector(const YAML::Node& node, const std::string& path) {
  if (node.IsScalar()) {
    const std::string name = text(node, path);
    if (name == "eps_lcbrd") {
      SelectorParams p = default_selector(SelectorKind::lcbrd);
      p.epsilon = 0.02;
      p.label = name;
      return p;
    }
    return default_selector(selector_kind_from_string(name));
  }
  check_keys(node, path,
             {"kind", "label", "mode", "init", "alpha", "epsilon", "revert", "reinit_period", "accuracy", "theta",
              "step", "mu", "mu_rule", "mu_scale", "period"});
  if (!node["kind"]) throw ConfigError(at(path, "kind"), "missing");
  SelectorParams p;
  try {
    p = parse_selector(node["kind"], at(path, "kind"));
  } catch (const ConfigError& e) {
    throw ConfigError(at(path, "kind"), e.what());
  }
  if (node["label"]) p.label = text(node["label"], at(path, "label"));
  if (node["mode"]) p.mode = choice(node["mode"], at(path, "mode"), kModes);
  if (node["init"]) p.init = choice(node["init"], at(path, "init"), kInits);
  if (node["alpha"]) p.alpha = number(node["alpha"], at(path, "alpha"));
  if (node["epsilon"]) p.epsilon = number(node["epsilon"], at(path, "epsilon"));
  if (node["revert"]) p.revert = boolean(node["revert"], at(path, "revert"));
  if (node["reinit_period"]) p.reinit_period = integer(node["reinit_period"], at(path, "reinit_period"));
  if (node["accuracy"]) p.accuracy = choice(node["accuracy"], at(path, "accuracy"), kAccuracy);
  if (node["theta"]) p.theta = number(node["theta"], at(path, "theta"));
  if (node["step"]) p.step = choice(node["step"], at(path, "step"), kSteps);
  if (node["mu"]) {
    if (node["mu"].IsScalar() && node["mu"].Scalar() == "auto") {
      p.mu.reset();
    } else {
      p.mu = number(node["mu"], at(path, "mu"));
    }
  }
  if (node["mu_rule"]) p.mu_rule = choice(node["mu_rule"], at(path, "mu_rule"), kMuRules);
  if (node["mu_scale"]) p.mu_scale = number(node["mu_scale"], at(path, "mu_scale"));
  if (node["period"]) p.period = integer(node["period"], at(path, "period"));
  return p;
}

void validate_selector(const SelectorParams& p, const std::string& path) {
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw ConfigError(at(path, "alpha"), "must be in (0, 1]");
  if (!(p.epsilon >= 0.0 && p.epsilon < 1.0)) throw ConfigError(at(path, "epsilon"), "must be in [0, 1)");
  if (p.reinit_period < 0) throw ConfigError(at(path, "reinit_period"), "must be >= 0");
  if (!(p.theta > 0.0 && p.theta <= 1.0)) throw ConfigError(at(path, "theta"), "must be in (0, 1]");
  if (p.mu && !(*p.mu > 0.0)) throw ConfigError(at(path, "mu"), "must be > 0");
  if (!(p.mu_scale > 0.0)) throw ConfigError(at(path, "mu_scale"), "must be > 0");
  if (p.period < 1) throw ConfigError(at(path, "period"), "must be >= 1");
}

std::vector<std::vector<std::size_t>> parse_sets(const YAML::Node& node, const std::string& path, std::size_t count,
                                                 std::size_t universe) {
  std::vector<std::size_t> all(universe);
  for (std::size_t i = 0; i < universe; ++i) all[i] = i;
  if (!node || (node.IsScalar() && node.Scalar() == "full")) return std::vector(count, all);
  if (!node.IsSequence()) throw ConfigError(path, "expected 'full' or one index list per radar");
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    auto set = index_list(node[i], at(path, i));
    std::sort(set.begin(), set.end());
    out.push_back(std::move(set));
  }
  return out;
}

void emit_matrix(YAML::Emitter& out, const Eigen::MatrixXd& m) {
  out << YAML::BeginSeq;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out << YAML::Flow << YAML::BeginSeq;
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << m(r, c);
    out << YAML::EndSeq;
  }
  out << YAML::EndSeq;
}

void emit_selector(YAML::Emitter& out, const SelectorParams& p) {
  out << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << to_string(p.kind);
  if (!p.label.empty()) out << YAML::Key << "label" << YAML::Value << p.label;
  out << YAML::Key << "mode" << YAML::Value << name_of(p.mode, kModes);
  out << YAML::Key << "init" << YAML::Value << name_of(p.init, kInits);
  out << YAML::Key << "alpha" << YAML::Value << p.alpha;
  out << YAML::Key << "epsilon" << YAML::Value << p.epsilon;
  out << YAML::Key << "revert" << YAML::Value << p.revert;
  out << YAML::Key << "reinit_period" << YAML::Value << p.reinit_period;
  out << YAML::Key << "accuracy" << YAML::Value << name_of(p.accuracy, kAccuracy);
  out << YAML::Key << "theta" << YAML::Value << p.theta;
  out << YAML::Key << "step" << YAML::Value << name_of(p.step, kSteps);
  out << YAML::Key << "mu" << YAML::Value;
  if (p.mu) {
    out << *p.mu;
  } else {
    out << "auto";
  }
  out << YAML::Key << "mu_rule" << YAML::Value << name_of(p.mu_rule, kMuRules);
  out << YAML::Key << "mu_scale" << YAML::Value << p.mu_scale;
  out << YAML::Key << "period" << YAML::Value << p.period;
  out << YAML::EndMap;
}

void emit_sets(YAML::Emitter& out, const std::vector<std::vector<std::size_t>>& sets) {
  out << YAML::BeginSeq;
  for (const auto& s : sets) out << YAML::Flow << s;
  out << YAML::EndSeq;
}

Eigen::MatrixXd uniform_draws(std::uint64_t seed, std::size_t radars, std::size_t targets) {
  Eigen::MatrixXd u(static_cast<Eigen::Index>(radars), static_cast<Eigen::Index>(targets));
  for (std::size_t i = 0; i < radars; ++i) {
    for (std::size_t j = 0; j < targets; ++j) {
      Substream rng(StreamDomain::range_coefficients, {seed, i, j});
      u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.uniform();
    }
  }
  return u;
}

}  // namespace

SelectorParams default_selector(SelectorKind kind) {
  SelectorParams p;
  p.kind = kind;
  switch (kind) {
    case SelectorKind::regret_matching:
      p.mode = StrategyMode::multiset;
      break;
    case SelectorKind::exhaustive_centralized:
      p.period = 1;
      break;
    default:
      break;
  }
  return p;
}

Eigen::MatrixXd range_coeff_uniform(std::uint64_t seed, std::size_t radars, std::size_t targets, double low,
                                    double high) {
  return (low + (high - low) * uniform_draws(seed, radars, targets).array()).matrix();
}

Eigen::MatrixXd range_coeff_spread(std::uint64_t seed, std::size_t radars, std::size_t targets, double spread) {
  const Eigen::MatrixXd u = uniform_draws(seed, radars, targets);
  const double lo = u.minCoeff();
  const double hi = u.maxCoeff();
  Eigen::MatrixXd b = Eigen::MatrixXd::Ones(u.rows(), u.cols());
  if (hi > lo) b = (1.0 + (spread - 1.0) * ((u.array() - lo) / (hi - lo))).matrix();
  return b;
}

ScenarioConfig with_spread(const ScenarioConfig& config, double spread) {
  ScenarioConfig out = config;
  const std::uint64_t seed =
      config.range_coeff_source.kind == RangeCoeffSource::Kind::explicit_matrix ? config.seed
                                                                                : config.range_coeff_source.seed;
  out.range_coeff_source = {RangeCoeffSource::Kind::spread, 1.0, spread, spread, seed};
  out.noise.range_coeff = range_coeff_spread(seed, config.radar_count(), config.target_count(), spread);
  return out;
}

GameSpec ScenarioConfig::game_spec(StrategyMode mode) const {
  GameSpec spec;
  spec.topology = topology;
  spec.weights = weights;
  spec.beams = beams;
  spec.mode = mode;
  spec.enumeration_cap = enumeration_cap;
  return spec;
}

GainTable ScenarioConfig::abstract_gains() const { return GainTable(gain_table); }

void ScenarioConfig::validate() const {
  const std::size_t n = radar_count();
  const std::size_t t = target_count();
  if (n == 0) throw ConfigError("radars", "need at least one radar");
  if (t == 0) throw ConfigError("targets", "need at least one target");
  for (std::size_t i = 0; i < n; ++i) {
    if (radars[i].id != i) throw ConfigError(at("radars", i), "radar ids must be contiguous from 0");
    if (!std::isfinite(radars[i].x) || !std::isfinite(radars[i].y)) {
      throw ConfigError(at("radars", i), "coordinates must be finite");
    }
  }
  for (std::size_t j = 0; j < t; ++j) {
    if (!targets[j].finite()) throw ConfigError(at("targets", j), "state must be finite");
  }
  if (!(update_time > 0.0)) throw ConfigError("motion.update_time", "must be > 0");
  if (!(process_noise >= 0.0)) throw ConfigError("motion.process_noise", "must be >= 0");
  noise.validate(n, t);
  if (beams < 1) throw ConfigError("beams", "must be >= 1");
  if (static_cast<std::size_t>(beams) >= t) {
    throw ConfigError("beams", "must be smaller than the number of targets (" + std::to_string(t) + ")");
  }
  if (topology.radars() != n || topology.targets != t) {
    throw ConfigError("topology", "dimensions do not match radars and targets");
  }
  topology.validate();
  weights.validate(n, t);
  if (horizon < 1) throw ConfigError("horizon", "must be >= 1");
  if (realizations < 1) throw ConfigError("realizations", "must be >= 1");
  if (!(init_cov_diag.array() > 0.0).all() || !init_cov_diag.allFinite()) {
    throw ConfigError("init_cov", "entries must be finite and > 0");
  }
  if (!(init_position_std >= 0.0)) throw ConfigError("init_state_noise.position", "must be >= 0");
  if (!(init_velocity_std >= 0.0)) throw ConfigError("init_state_noise.velocity", "must be >= 0");
  if (tail_window < 1) throw ConfigError("tail_window", "must be >= 1");
  validate_selector(selector, "selector");
  std::set<std::string> labels;
  for (std::size_t c = 0; c < compare.size(); ++c) {
    validate_selector(compare[c], at("compare", c));
    if (!labels.insert(compare[c].display_name()).second) {
      throw ConfigError(at("compare", c), "duplicate selector label '" + compare[c].display_name() + "'");
    }
  }
  auto check_space = [&](const SelectorParams& p, const std::string& path) {
    if (p.mode != StrategyMode::distinct) return;
    for (std::size_t i = 0; i < n; ++i) {
      if (topology.observable[i].size() < static_cast<std::size_t>(beams)) {
        throw ConfigError(path, "radar " + std::to_string(i) + " observes fewer targets than its beams");
      }
    }
  };
  check_space(selector, "selector.mode");
  for (std::size_t c = 0; c < compare.size(); ++c) check_space(compare[c], at(at("compare", c), "mode"));
  if (sweep) {
    if (sweep->spreads.empty()) throw ConfigError("sweep.spreads", "must not be empty");
    for (std::size_t s = 0; s < sweep->spreads.size(); ++s) {
      if (!(sweep->spreads[s] >= 1.0)) throw ConfigError(at("sweep.spreads", s), "must be >= 1");
    }
    for (const auto* key : {&sweep->numerator, &sweep->denominator}) {
      if (!labels.count(*key)) {
        throw ConfigError(key == &sweep->numerator ? "sweep.numerator" : "sweep.denominator",
                          "'" + *key + "' is not a compared selector label");
      }
    }
  }
  if (gain_mode == GainMode::abstract) {
    if (gain_table.size() != t) throw ConfigError("gain_table", "need one increment list per target");
    const auto needed = n * static_cast<std::size_t>(beams);
    for (std::size_t j = 0; j < t; ++j) {
      if (gain_table[j].size() < needed) {
        throw ConfigError(at("gain_table", j), "needs at least N*m = " + std::to_string(needed) + " increments");
      }
      for (std::size_t p = 0; p < gain_table[j].size(); ++p) {
        if (!std::isfinite(gain_table[j][p])) throw ConfigError(at(at("gain_table", j), p), "must be finite");
      }
    }
  }
}

SelectorParams parse_selector_text(const std::string& text, const std::string& path) {
  YAML::Node node;
  try {
    node = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(path, std::string("YAML parse error: ") + e.what());
  }
  if (!node || node.IsNull()) throw ConfigError(path, "empty selector");
  SelectorParams p = parse_selector(node, path);
  validate_selector(p, path);
  return p;
}

ScenarioConfig parse_scenario(const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(source);
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("YAML parse error: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("", "scenario must be a mapping");
  check_keys(root, "",
             {"name", "radars", "targets", "motion", "noise", "beams", "topology", "weights", "selector", "compare",
              "sweep", "horizon", "realizations", "seed", "init_cov", "init_state_noise", "gain_mode", "gain_table",
              "freeze_dynamics", "tail_window", "record_nash", "enumeration_cap"});
  ScenarioConfig c;
  if (root["name"]) c.name = text(root["name"], "name");
  if (root["seed"]) c.seed = scalar<std::uint64_t>(root["seed"], "seed", "a nonnegative integer");

  if (!root["radars"] || !root["radars"].IsSequence()) throw ConfigError("radars", "expected a list of [x, y]");
  for (std::size_t i = 0; i < root["radars"].size(); ++i) {
    const auto xy = number_list(root["radars"][i], at("radars", i));
    if (xy.size() != 2) throw ConfigError(at("radars", i), "expected [x, y]");
    c.radars.push_back({i, xy[0], xy[1]});
  }
  if (!root["targets"] || !root["targets"].IsSequence()) {
    throw ConfigError("targets", "expected a list of [x, y, vx, vy]");
  }
  for (std::size_t j = 0; j < root["targets"].size(); ++j) {
    const auto s = number_list(root["targets"][j], at("targets", j));
    if (s.size() != 4) throw ConfigError(at("targets", j), "expected [x, y, vx, vy]");
    TargetState ts;
    ts.x << s[0], s[1], s[2], s[3];
    c.targets.push_back(ts);
  }
  const std::size_t n = c.radar_count();
  const std::size_t t = c.target_count();

  if (const auto m = root["motion"]) {
    check_keys(m, "motion", {"update_time", "process_noise"});
    if (m["update_time"]) c.update_time = number(m["update_time"], "motion.update_time");
    if (m["process_noise"]) c.process_noise = number(m["process_noise"], "motion.process_noise");
  }

  c.noise.range_coeff = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
  c.range_coeff_source.seed = c.seed;
  if (const auto nz = root["noise"]) {
    check_keys(nz, "noise", {"sigma_azimuth", "sigma_range", "range_coeff"});
    if (nz["sigma_azimuth"]) c.noise.sigma_azimuth = number(nz["sigma_azimuth"], "noise.sigma_azimuth");
    if (nz["sigma_range"]) c.noise.sigma_range = number(nz["sigma_range"], "noise.sigma_range");
    if (const auto rc = nz["range_coeff"]) {
      const std::string path = "noise.range_coeff";
      if (rc.IsMap()) {
        check_keys(rc, path, {"uniform", "spread", "seed"});
        auto& src = c.range_coeff_source;
        if (rc["seed"]) src.seed = scalar<std::uint64_t>(rc["seed"], at(path, "seed"), "a nonnegative integer");
        if (rc["uniform"] && rc["spread"]) throw ConfigError(path, "give either 'uniform' or 'spread'");
        if (rc["uniform"]) {
          const auto lh = number_list(rc["uniform"], at(path, "uniform"));
          if (lh.size() != 2 || !(lh[0] <= lh[1])) throw ConfigError(at(path, "uniform"), "expected [low, high]");
          src.kind = RangeCoeffSource::Kind::uniform;
          src.low = lh[0];
          src.high = lh[1];
          c.noise.range_coeff = range_coeff_uniform(src.seed, n, t, src.low, src.high);
        } else if (rc["spread"]) {
          src.kind = RangeCoeffSource::Kind::spread;
          src.spread = number(rc["spread"], at(path, "spread"));
          if (!(src.spread >= 1.0)) throw ConfigError(at(path, "spread"), "must be >= 1");
          c.noise.range_coeff = range_coeff_spread(src.seed, n, t, src.spread);
        } else {
          throw ConfigError(path, "expected 'uniform' or 'spread'");
        }
      } else {
        c.noise.range_coeff = matrix(rc, path);
      }
    }
  }

  if (root["beams"]) c.beams = integer(root["beams"], "beams");

  c.topology.targets = t;
  if (const auto topo = root["topology"]) {
    if (topo.IsScalar() && topo.Scalar() == "full") {
      c.topology = TopologySpec::full(n, t);
    } else {
      check_keys(topo, "topology", {"observable", "neighbors"});
      c.topology.observable = parse_sets(topo["observable"], "topology.observable", n, t);
      c.topology.neighbors = parse_sets(topo["neighbors"], "topology.neighbors", n, n);
    }
  } else {
    c.topology = TopologySpec::full(n, t);
  }

  c.weights = InterestMatrix::ones(n, t);
  if (const auto w = root["weights"]) {
    if (!(w.IsScalar() && w.Scalar() == "ones")) c.weights.w = matrix(w, "weights");
  }

  if (root["selector"]) c.selector = parse_selector(root["selector"], "selector");
  if (const auto cmp = root["compare"]) {
    if (!cmp.IsSequence()) throw ConfigError("compare", "expected a list of selectors");
    for (std::size_t i = 0; i < cmp.size(); ++i) c.compare.push_back(parse_selector(cmp[i], at("compare", i)));
  }
  if (const auto sw = root["sweep"]) {
    check_keys(sw, "sweep", {"spreads", "numerator", "denominator"});
    SweepSpec s;
    if (!sw["spreads"]) throw ConfigError("sweep.spreads", "missing");
    s.spreads = number_list(sw["spreads"], "sweep.spreads");
    if (!sw["numerator"]) throw ConfigError("sweep.numerator", "missing");
    if (!sw["denominator"]) throw ConfigError("sweep.denominator", "missing");
    s.numerator = text(sw["numerator"], "sweep.numerator");
    s.denominator = text(sw["denominator"], "sweep.denominator");
    c.sweep = s;
  }

  if (root["horizon"]) c.horizon = integer(root["horizon"], "horizon");
  if (root["realizations"]) c.realizations = integer(root["realizations"], "realizations");
  if (const auto p0 = root["init_cov"]) {
    const auto d = number_list(p0, "init_cov");
    if (d.size() != 4) throw ConfigError("init_cov", "expected the four diagonal variances");
    c.init_cov_diag << d[0], d[1], d[2], d[3];
  }
  if (const auto g = root["init_state_noise"]) {
    check_keys(g, "init_state_noise", {"position", "velocity"});
    if (g["position"]) c.init_position_std = number(g["position"], "init_state_noise.position");
    if (g["velocity"]) c.init_velocity_std = number(g["velocity"], "init_state_noise.velocity");
  }
  if (root["gain_mode"]) {
    c.gain_mode = choice(root["gain_mode"], "gain_mode",
                         {std::pair<std::string_view, GainMode>{"ekf", GainMode::ekf}, {"abstract", GainMode::abstract}});
  }
  if (const auto gt = root["gain_table"]) {
    if (gt.IsMap()) {
      check_keys(gt, "gain_table", {"uniform"});
      c.gain_table.assign(t, number_list(gt["uniform"], "gain_table.uniform"));
    } else if (gt.IsSequence()) {
      for (std::size_t j = 0; j < gt.size(); ++j) c.gain_table.push_back(number_list(gt[j], at("gain_table", j)));
    } else {
      throw ConfigError("gain_table", "expected {uniform: [...]} or one list per target");
    }
  }
  if (root["freeze_dynamics"]) c.freeze_dynamics = boolean(root["freeze_dynamics"], "freeze_dynamics");
  if (root["tail_window"]) c.tail_window = integer(root["tail_window"], "tail_window");
  if (root["record_nash"]) c.record_nash = choice(root["record_nash"], "record_nash", kNash);
  if (root["enumeration_cap"]) {
    c.enumeration_cap = scalar<std::uint64_t>(root["enumeration_cap"], "enumeration_cap", "a positive integer");
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open scenario file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string dump_scenario(const ScenarioConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.name;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "radars" << YAML::Value << YAML::BeginSeq;
  for (const auto& r : c.radars) out << YAML::Flow << std::vector<double>{r.x, r.y};
  out << YAML::EndSeq;
  out << YAML::Key << "targets" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : c.targets) out << YAML::Flow << std::vector<double>{s.x(0), s.x(1), s.x(2), s.x(3)};
  out << YAML::EndSeq;
  out << YAML::Key << "motion" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "update_time" << YAML::Value << c.update_time;
  out << YAML::Key << "process_noise" << YAML::Value << c.process_noise;
  out << YAML::EndMap;
  out << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "sigma_azimuth" << YAML::Value << c.noise.sigma_azimuth;
  out << YAML::Key << "sigma_range" << YAML::Value << c.noise.sigma_range;
  out << YAML::Key << "range_coeff" << YAML::Value;
  emit_matrix(out, c.noise.range_coeff);
  out << YAML::EndMap;
  out << YAML::Key << "beams" << YAML::Value << c.beams;
  out << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "observable" << YAML::Value;
  emit_sets(out, c.topology.observable);
  out << YAML::Key << "neighbors" << YAML::Value;
  emit_sets(out, c.topology.neighbors);
  out << YAML::EndMap;
  out << YAML::Key << "weights" << YAML::Value;
  emit_matrix(out, c.weights.w);
  out << YAML::Key << "selector" << YAML::Value;
  emit_selector(out, c.selector);
  if (!c.compare.empty()) {
    out << YAML::Key << "compare" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : c.compare) emit_selector(out, s);
    out << YAML::EndSeq;
  }
  if (c.sweep) {
    out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "spreads" << YAML::Value << YAML::Flow << c.sweep->spreads;
    out << YAML::Key << "numerator" << YAML::Value << c.sweep->numerator;
    out << YAML::Key << "denominator" << YAML::Value << c.sweep->denominator;
    out << YAML::EndMap;
  }
  out << YAML::Key << "horizon" << YAML::Value << c.horizon;
  out << YAML::Key << "realizations" << YAML::Value << c.realizations;
  out << YAML::Key << "init_cov" << YAML::Value << YAML::Flow
      << std::vector<double>{c.init_cov_diag(0), c.init_cov_diag(1), c.init_cov_diag(2), c.init_cov_diag(3)};
  out << YAML::Key << "init_state_noise" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "position" << YAML::Value << c.init_position_std;
  out << YAML::Key << "velocity" << YAML::Value << c.init_velocity_std;
  out << YAML::EndMap;
  out << YAML::Key << "gain_mode" << YAML::Value << (c.gain_mode == GainMode::ekf ? "ekf" : "abstract");
  if (!c.gain_table.empty()) {
    out << YAML::Key << "gain_table" << YAML::Value << YAML::BeginSeq;
    for (const auto& inc : c.gain_table) out << YAML::Flow << inc;
    out << YAML::EndSeq;
  }
  out << YAML::Key << "freeze_dynamics" << YAML::Value << c.freeze_dynamics;
  out << YAML::Key << "tail_window" << YAML::Value << c.tail_window;
  out << YAML::Key << "record_nash" << YAML::Value << name_of(c.record_nash, kNash);
  out << YAML::Key << "enumeration_cap" << YAML::Value << c.enumeration_cap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, body] : detail::bundled_scenarios()) names.emplace_back(name);
  return names;
}

ScenarioConfig load_preset(const std::string& name) {
  for (const auto& [preset, body] : detail::bundled_scenarios()) {
    if (preset == name) return parse_scenario(std::string(body));
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("preset", "unknown preset '" + name + "' (known: " + known + ")");
}

}  // namespace mfr
