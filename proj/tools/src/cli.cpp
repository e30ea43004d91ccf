#include "mfrcli/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mfr/errors.hpp"
#include "mfr/metrics_io.hpp"
#include "mfr/scenario.hpp"
#include "mfr/simulation.hpp"

namespace mfrcli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string scenario;
  std::string preset;
  std::vector<std::string> selectors;
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;
  std::optional<int> realizations;
  std::string out;
  int jobs = 1;
  bool per_realization = false;
  std::string check_profile;
  std::string mode = "distinct";
  std::size_t max_nash = 20;
};

void add_common(CLI::App& cmd, Options& o) {
  auto* scn = cmd.add_option("--scenario", o.scenario, "Scenario file (YAML)");
  auto* pre = cmd.add_option("--preset", o.preset, "Bundled scenario name");
  scn->excludes(pre);
  pre->excludes(scn);
  cmd.add_option("--seed", o.seed, "Override the scenario seed");
  cmd.add_option("--out", o.out, std::string("Output directory (default: $") + kOutDirEnv + " or ./mfrgame_out)");
}

void add_sim(CLI::App& cmd, Options& o) {
  cmd.add_option("--horizon", o.horizon, "Override the number of scans")->check(CLI::PositiveNumber);
  cmd.add_option("--realizations", o.realizations, "Override the number of realizations")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--jobs", o.jobs, "Worker threads for realizations")->check(CLI::Range(1, 256));
}

mfr::ScenarioConfig load(const Options& o) {
  if (o.scenario.empty() && o.preset.empty()) throw mfr::ConfigError("", "give --scenario or --preset");
  mfr::ScenarioConfig c = o.preset.empty() ? mfr::load_scenario(o.scenario) : mfr::load_preset(o.preset);
  if (o.seed) c.seed = *o.seed;
  if (o.horizon) c.horizon = *o.horizon;
  if (o.realizations) c.realizations = *o.realizations;
  c.validate();
  return c;
}

fs::path out_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "mfrgame_out";
}

std::string command_line(const std::vector<std::string>& args) {
  std::string s = "mfrgame";
  for (const auto& a : args) s += " " + a;
  return s;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

void write_manifest(const fs::path& dir, const mfr::ScenarioConfig& config, const std::vector<std::string>& args,
                    std::vector<std::string> files) {
  mfr::write_text(dir / "manifest.yaml", mfr::manifest_yaml(config, command_line(args), files));
}

int cmd_run(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  mfr::ScenarioConfig config = load(o);
  if (o.selectors.size() > 1) throw mfr::ConfigError("--selector", "run takes a single selector");
  if (!o.selectors.empty()) config.selector = mfr::parse_selector_text(o.selectors.front(), "--selector");
  config.compare.clear();
  config.validate();

  const auto result = mfr::run_monte_carlo(config, config.selector, {o.jobs, o.per_realization});
  const fs::path dir = out_dir(o);
  const std::string stem = mfr::file_stem(config.selector.display_name());
  std::vector<std::string> files{stem + "_aggregate.csv"};
  mfr::write_text(dir / files.back(), mfr::aggregate_csv(result.mean));
  for (std::size_t r = 0; r < result.realizations.size(); ++r) {
    files.push_back(stem + "_realization_" + std::to_string(r) + ".csv");
    mfr::write_text(dir / files.back(), mfr::realization_csv(result.realizations[r]));
  }
  write_manifest(dir, config, args, files);

  const auto conv = mfr::convergence_scan(result.mean);
  out << "selector: " << config.selector.display_name() << '\n'
      << "final_metric: " << fmt(result.mean.back().metric) << '\n'
      << "tail_metric: " << fmt(result.tail_metric) << '\n'
      << "convergence_scan: " << (conv ? std::to_string(*conv) : std::string("none")) << '\n'
      << "output: " << dir.string() << '\n';
  return kOk;
}

std::vector<mfr::SelectorParams> selected(const Options& o, const mfr::ScenarioConfig& config) {
  if (o.selectors.empty()) return mfr::compared_selectors(config);
  std::vector<mfr::SelectorParams> list;
  for (std::size_t s = 0; s < o.selectors.size(); ++s) {
    list.push_back(mfr::parse_selector_text(o.selectors[s], "--selector[" + std::to_string(s) + "]"));
  }
  return list;
}

int cmd_compare(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  mfr::ScenarioConfig config = load(o);
  config.compare = selected(o, config);
  config.validate();
  const auto results = mfr::compare_strategies(config, config.compare, {o.jobs, false});
  const fs::path dir = out_dir(o);
  std::vector<std::string> files;
  for (const auto& r : results) {
    files.push_back(mfr::file_stem(r.selector.display_name()) + "_aggregate.csv");
    mfr::write_text(dir / files.back(), mfr::aggregate_csv(r.mean));
  }
  files.push_back("compare_summary.csv");
  mfr::write_text(dir / files.back(), mfr::compare_summary_csv(results));
  write_manifest(dir, config, args, files);

  std::vector<std::size_t> order(results.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return results[a].tail_metric < results[b].tail_metric; });
  out << std::left << std::setw(24) << "selector" << "tail_metric\n";
  for (const auto& r : results) out << std::setw(24) << r.selector.display_name() << fmt(r.tail_metric) << '\n';
  out << "ordering (best first):";
  for (std::size_t k = 0; k < order.size(); ++k) {
    out << (k ? " < " : " ") << results[order[k]].selector.display_name();
  }
  out << "\noutput: " << dir.string() << '\n';
  return kOk;
}

int cmd_sweep(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  mfr::ScenarioConfig config = load(o);
  if (!o.selectors.empty()) config.compare = selected(o, config);
  config.validate();
  if (!config.sweep) throw mfr::ConfigError("sweep", "scenario has no sweep section");
  const auto rows = mfr::run_sweep(config, {o.jobs, false});
  std::vector<std::string> labels;
  for (const auto& s : mfr::compared_selectors(config)) labels.push_back(s.display_name());
  const fs::path dir = out_dir(o);
  mfr::write_text(dir / "sweep.csv", mfr::sweep_csv(rows, labels));
  write_manifest(dir, config, args, {"sweep.csv"});
  out << "spread  ratio (" << config.sweep->numerator << " / " << config.sweep->denominator << ")\n";
  for (const auto& r : rows) out << std::left << std::setw(8) << fmt(r.spread) << fmt(r.ratio) << '\n';
  out << "output: " << dir.string() << '\n';
  return kOk;
}

int cmd_analyze(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  const mfr::ScenarioConfig config = load(o);
  const auto mode = o.mode == "multiset" ? mfr::StrategyMode::multiset : mfr::StrategyMode::distinct;
  const mfr::FrozenGame frozen(config, mode);
  const mfr::Game& game = frozen.game();

  std::ostringstream report;
  report << "scenario: " << config.name << '\n'
         << "mode: " << o.mode << '\n'
         << "joint_profiles: " << game.joint_size() << '\n';
  if (config.gain_mode == mfr::GainMode::abstract) {
    const auto table = config.abstract_gains();
    report << "case_a: " << (table.is_case_a() ? "yes" : "no") << '\n'
           << "case_b: " << (table.is_case_b() ? "yes" : "no") << '\n';
  }
  report << "max_single_beam_gain: " << fmt(frozen.max_single_beam_gain()) << '\n';

  const auto poa = mfr::price_of_anarchy(game);
  report << "optimum_welfare: " << fmt(poa.optimum_welfare) << '\n'
         << "optimum_profile: " << poa.optimum.to_string() << '\n'
         << "nash_count: " << poa.nash_count << '\n';
  if (poa.worst_nash_welfare) {
    report << "worst_nash_welfare: " << fmt(*poa.worst_nash_welfare) << '\n'
           << "worst_nash_profile: " << poa.worst_nash->to_string() << '\n';
  }
  report << "price_of_anarchy: " << (poa.price_of_anarchy ? fmt(*poa.price_of_anarchy) : std::string("undefined"))
         << '\n';
  const auto nash = mfr::enumerate_nash(game);
  report << "nash_profiles:" << (nash.size() > o.max_nash ? " (first " + std::to_string(o.max_nash) + ")" : "")
         << '\n';
  for (std::size_t k = 0; k < std::min(nash.size(), o.max_nash); ++k) report << "  " << nash[k].to_string() << '\n';

  if (!o.check_profile.empty()) {
    const auto profile = mfr::StrategyProfile::parse(o.check_profile);
    if (profile.radars() != game.radars() || profile.targets() != game.targets()) {
      throw mfr::ConfigError("--check-profile", "expected " + std::to_string(game.radars()) + " rows of " +
                                                    std::to_string(game.targets()) + " entries");
    }
    for (std::size_t i = 0; i < game.radars(); ++i) {
      const auto& rows = game.strategies(i);
      const auto row = profile.row_copy(i);
      if (std::find(rows.begin(), rows.end(), row) == rows.end()) {
        throw mfr::ConfigError("--check-profile", "row " + std::to_string(i) + " is not a strategy of radar " +
                                                      std::to_string(i));
      }
    }
    const auto check = mfr::is_pure_nash(profile, game);
    report << "check_profile: " << profile.to_string() << '\n'
           << "check_profile_welfare: " << fmt(game.welfare(profile)) << '\n'
           << "check_profile_nash: " << (check.is_nash ? "yes" : "no") << '\n';
    if (check.best_deviation) {
      std::string row;
      for (std::size_t j = 0; j < check.best_deviation->row.size(); ++j) {
        row += (j ? "," : "") + std::to_string(check.best_deviation->row[j]);
      }
      report << "improving_deviation: radar " << check.best_deviation->radar << " -> " << row << " (+"
             << fmt(check.best_deviation->improvement) << ")\n";
    }
  }

  const fs::path dir = out_dir(o);
  mfr::write_text(dir / "analysis.txt", report.str());
  write_manifest(dir, config, args, {"analysis.txt"});
  out << report.str();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Game-theoretic beam allocation for networked multifunction radars"};
  app.name("mfrgame");
  app.require_subcommand(1);
  Options o;

  auto* run_cmd = app.add_subcommand("run", "Monte-Carlo run of one selector");
  add_common(*run_cmd, o);
  add_sim(*run_cmd, o);
  run_cmd->add_option("--selector", o.selectors, "Selector name or YAML map")->expected(1);
  run_cmd->add_flag("--per-realization", o.per_realization, "Also write one CSV per realization");

  auto* compare_cmd = app.add_subcommand("compare", "Paired comparison of several selectors");
  add_common(*compare_cmd, o);
  add_sim(*compare_cmd, o);
  compare_cmd->add_option("--selector", o.selectors, "Selector to compare (repeatable)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Noise-spread sweep");
  add_common(*sweep_cmd, o);
  add_sim(*sweep_cmd, o);
  sweep_cmd->add_option("--selector", o.selectors, "Selector to compare (repeatable)");

  auto* analyze_cmd = app.add_subcommand("analyze", "Equilibrium analysis of the frozen game");
  add_common(*analyze_cmd, o);
  analyze_cmd->add_option("--check-profile", o.check_profile, "Profile to test, rows ';'-separated");
  analyze_cmd->add_option("--mode", o.mode, "Strategy space")->check(CLI::IsMember({"distinct", "multiset"}));
  analyze_cmd->add_option("--max-nash", o.max_nash, "Equilibria to list");

  app.add_subcommand("presets", "List bundled scenarios");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(o, args, out);
    if (*compare_cmd) return cmd_compare(o, args, out);
    if (*sweep_cmd) return cmd_sweep(o, args, out);
    if (*analyze_cmd) return cmd_analyze(o, args, out);
    for (const auto& name : mfr::preset_names()) out << name << '\n';
    return kOk;
  } catch (const mfr::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const mfr::InstanceTooLargeError& e) {
    err << "instance too large: " << e.what() << '\n';
    return kInstanceTooLarge;
  } catch (const mfr::NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const mfr::CovarianceError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const mfr::DegenerateGeometryError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const mfr::MuViolationError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace mfrcli
