#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mfr/scenario.hpp"
#include "mfr/simulation.hpp"

namespace mfr {

/// Bumped whenever a column is added, removed or renamed.
inline constexpr int kCsvSchemaVersion = 1;

/// Columns: k, metric, u_0..u_{N-1}, nash_flag, max_avg_regret, profile.
/// Missing values are empty fields; numbers use 17 significant digits so
/// files round-trip exactly.
std::string realization_csv(const std::vector<MetricsRecord>& records);

/// Columns: k, metric, u_0..u_{N-1}, nash_fraction, max_avg_regret.
std::string aggregate_csv(const std::vector<AggregateRecord>& mean);

/// Columns: spread, one tail column per selector label, ratio.
std::string sweep_csv(const std::vector<SweepRow>& rows, const std::vector<std::string>& labels);

/// Columns: selector, tail_metric, rank (1 = lowest metric).
std::string compare_summary_csv(const std::vector<MonteCarloResult>& results);

/// YAML manifest: schema version, command, file list and the fully resolved
/// scenario.
std::string manifest_yaml(const ScenarioConfig& config, const std::string& command,
                          const std::vector<std::string>& files);

/// Labels usable as file-name stems.
std::string file_stem(const std::string& label);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mfr
