#include "mfr/metrics_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "mfr/errors.hpp"

namespace mfr {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void utility_header(std::ostringstream& out, std::size_t radars) {
  for (std::size_t i = 0; i < radars; ++i) out << ",u_" << i;
}

}  // namespace

std::string realization_csv(const std::vector<MetricsRecord>& records) {
  std::ostringstream out;
  const std::size_t n = records.empty() ? 0 : records.front().utilities.size();
  out << "k,metric";
  utility_header(out, n);
  out << ",nash_flag,max_avg_regret,profile\n";
  for (const auto& r : records) {
    out << r.scan << ',' << num(r.metric);
    for (double u : r.utilities) out << ',' << num(u);
    out << ',';
    if (r.nash) out << (*r.nash ? 1 : 0);
    out << ',';
    if (r.max_avg_regret) out << num(*r.max_avg_regret);
    out << ",\"" << r.profile.to_string() << "\"\n";
  }
  return out.str();
}

std::string aggregate_csv(const std::vector<AggregateRecord>& mean) {
  std::ostringstream out;
  const std::size_t n = mean.empty() ? 0 : mean.front().utilities.size();
  out << "k,metric";
  utility_header(out, n);
  out << ",nash_fraction,max_avg_regret\n";
  for (const auto& a : mean) {
    out << a.scan << ',' << num(a.metric);
    for (double u : a.utilities) out << ',' << num(u);
    out << ',';
    if (a.nash_fraction) out << num(*a.nash_fraction);
    out << ',';
    if (a.max_avg_regret) out << num(*a.max_avg_regret);
    out << '\n';
  }
  return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::vector<std::string>& labels) {
  std::ostringstream out;
  out << "spread";
  for (const auto& l : labels) out << ",tail_" << file_stem(l);
  out << ",ratio\n";
  for (const auto& row : rows) {
    out << num(row.spread);
    for (double t : row.tail) out << ',' << num(t);
    out << ',' << num(row.ratio) << '\n';
  }
  return out.str();
}

std::string compare_summary_csv(const std::vector<MonteCarloResult>& results) {
  std::vector<std::size_t> order(results.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return results[a].tail_metric < results[b].tail_metric; });
  std::vector<std::size_t> rank(results.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
  std::ostringstream out;
  out << "selector,tail_metric,rank\n";
  for (std::size_t s = 0; s < results.size(); ++s) {
    out << results[s].selector.display_name() << ',' << num(results[s].tail_metric) << ',' << rank[s] << '\n';
  }
  return out.str();
}

std::string manifest_yaml(const ScenarioConfig& config, const std::string& command,
                          const std::vector<std::string>& files) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "csv_schema" << YAML::Value << kCsvSchemaVersion;
  out << YAML::Key << "command" << YAML::Value << command;
  out << YAML::Key << "files" << YAML::Value << YAML::BeginSeq;
  for (const auto& f : files) out << f;
  out << YAML::EndSeq;
  out << YAML::Key << "scenario" << YAML::Value << YAML::Load(dump_scenario(config));
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string file_stem(const std::string& label) {
  std::string s = label;
  for (char& c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '-' || c == '.';
    if (!ok) c = '_';
  }
  return s.empty() ? "selector" : s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error("failed writing " + path.string());
}

}  // namespace mfr
