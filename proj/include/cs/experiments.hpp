#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cs/liealg.hpp"
#include "cs/quadrature.hpp"

namespace cs {

enum class ExperimentKind {
  CsAction,
  GaugeDefect,
  FlatSearch,
  AbForm,
  MomentMap,
  EquivariantCheck,
  Prequantum,
  Pillowcase,
  HighDegreeFlatness,
};

std::string_view to_string(ExperimentKind k);
// Throws ConfigInvalid for an unknown name.
ExperimentKind parse_experiment_kind(const std::string& name);
std::vector<ExperimentKind> all_experiment_kinds();

// One experiment of a run. Unset fields take per-kind defaults (see defaults_for).
struct ExperimentConfig {
  std::string id;
  ExperimentKind kind = ExperimentKind::CsAction;
  std::optional<std::string> group;  // "U1", "SU2", "SU3", "SU4"
  std::optional<int> degree;         // polynomial degree r
  std::optional<std::string> cycle;  // built-in chain name
  QuadratureSpec q;
  std::optional<double> tol;
  std::map<std::string, double> params;  // kind-specific numeric knobs
};

// Fills unset fields and missing params with the kind's defaults.
ExperimentConfig defaults_for(ExperimentConfig c);

// Throws ConfigInvalid when a name fails to resolve, a tolerance is not
// positive, or a param is unknown for the kind.
void validate(const ExperimentConfig& c);

struct ReportRow {
  std::string id;
  std::string kind;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, double>> values;  // fixed names per kind
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string error;  // library error text when the run threw
  double seconds = 0.0;
};

// Value column names of a kind, in report order.
std::vector<std::string> value_names(ExperimentKind k);

// Seed for one experiment: a named substream of the run seed.
std::uint64_t substream_seed(std::uint64_t run_seed, const std::string& id);

// Runs one validated experiment. Library errors become failed rows.
ReportRow run_experiment(const ExperimentConfig& c, std::uint64_t run_seed);

struct CatalogEntry {
  std::string category;  // chart, cycle, group, polynomial, toy-bundle, winding-map, experiment
  std::string name;
  std::string description;
};

std::vector<CatalogEntry> builtin_catalog();
// True when `name` resolves in `category`.
bool resolves(const std::string& category, const std::string& name);

}  // namespace cs
