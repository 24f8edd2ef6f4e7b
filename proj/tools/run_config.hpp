#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cs/experiments.hpp"
#include "json.hpp"

namespace cs {

struct RunConfig {
  std::uint64_t seed = 0;
  std::vector<ExperimentConfig> experiments;
};

// Command-line overrides; they win over every config value.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> quadrature_order;
  std::optional<double> fd_step;
  std::optional<double> tol;
};

// Parses TOML text; throws ConfigInvalid on syntax errors, unknown keys or
// failed validation (after overrides are applied).
RunConfig parse_config(const std::string& text, const Overrides& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

nlohmann::json config_echo(const RunConfig& config);
nlohmann::json row_json(const ReportRow& row);
nlohmann::json report_json(const RunConfig& config, const std::vector<ReportRow>& rows);

// One CSV per experiment kind present: report_<kind>.csv with columns
// id, seed, <value names of the kind>, residual, tolerance, passed, seconds.
std::vector<std::filesystem::path> write_csv(const std::filesystem::path& dir, const std::vector<ReportRow>& rows);

// Runs every experiment, writes report.json and the CSV files into out_dir.
// Returns 0 when all rows pass, 1 otherwise; ConfigInvalid propagates.
int run_and_report(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

void print_catalog(std::ostream& os);

}  // namespace cs
