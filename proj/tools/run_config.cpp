#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "cs/errors.hpp"
#include "toml.hpp"

namespace cs {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::ConfigInvalid, msg); }

double number(const toml::node& node, const std::string& where) {
  if (auto v = node.value<double>()) return *v;
  invalid(where + " must be a number");
}

int integer(const toml::node& node, const std::string& where) {
  if (auto v = node.value<std::int64_t>()) return static_cast<int>(*v);
  invalid(where + " must be an integer");
}

std::string text(const toml::node& node, const std::string& where) {
  if (auto v = node.value<std::string>()) return *v;
  invalid(where + " must be a string");
}

QuadratureSpec read_quadrature(const toml::table& t, QuadratureSpec q, const std::string& where) {
  for (const auto& [key, node] : t) {
    const std::string k(key.str());
    if (k == "order") {
      q.order = integer(node, where + ".order");
    } else if (k == "fd_step") {
      q.fd_step = number(node, where + ".fd_step");
    } else {
      invalid("unknown key '" + k + "' in " + where);
    }
  }
  return q;
}

ExperimentConfig read_experiment(const toml::table& t, const QuadratureSpec& q0, std::size_t index) {
  const std::string where = "experiment[" + std::to_string(index) + "]";
  ExperimentConfig c;
  c.q = q0;
  bool have_kind = false;
  for (const auto& [key, node] : t) {
    const std::string k(key.str());
    if (k == "id") {
      c.id = text(node, where + ".id");
    } else if (k == "kind") {
      c.kind = parse_experiment_kind(text(node, where + ".kind"));
      have_kind = true;
    } else if (k == "group") {
      c.group = text(node, where + ".group");
    } else if (k == "degree") {
      c.degree = integer(node, where + ".degree");
    } else if (k == "cycle") {
      c.cycle = text(node, where + ".cycle");
    } else if (k == "tol") {
      c.tol = number(node, where + ".tol");
    } else if (k == "quadrature") {
      if (!node.is_table()) invalid(where + ".quadrature must be a table");
      c.q = read_quadrature(*node.as_table(), c.q, where + ".quadrature");
    } else if (k == "params") {
      if (!node.is_table()) invalid(where + ".params must be a table");
      for (const auto& [pk, pv] : *node.as_table()) {
        const std::string name(pk.str());
        c.params[name] = number(pv, where + ".params." + name);
      }
    } else {
      invalid("unknown key '" + k + "' in " + where);
    }
  }
  if (!have_kind) invalid(where + " needs a kind");
  if (c.id.empty()) c.id = std::string(to_string(c.kind)) + "-" + std::to_string(index);
  return c;
}

std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

RunConfig parse_config(const std::string& source, const Overrides& overrides) {
  toml::table root;
  try {
    root = toml::parse(source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    invalid(os.str());
  }

  RunConfig out;
  QuadratureSpec q;
  std::optional<double> global_tol;
  for (const auto& [key, node] : root) {
    const std::string k(key.str());
    if (k == "seed") {
      const auto v = node.value<std::int64_t>();
      if (!v || *v < 0) invalid("seed must be a non-negative integer");
      out.seed = static_cast<std::uint64_t>(*v);
    } else if (k == "quadrature") {
      if (!node.is_table()) invalid("quadrature must be a table");
      q = read_quadrature(*node.as_table(), q, "quadrature");
    } else if (k == "tol") {
      global_tol = number(node, "tol");
    } else if (k != "experiment") {
      invalid("unknown top-level key '" + k + "'");
    }
  }

  if (const auto* list = root["experiment"].as_array()) {
    std::size_t i = 0;
    for (const auto& node : *list) {
      if (!node.is_table()) invalid("experiment entries must be tables");
      auto c = read_experiment(*node.as_table(), q, i++);
      if (!c.tol && global_tol) c.tol = global_tol;
      out.experiments.push_back(std::move(c));
    }
  } else if (root.contains("experiment")) {
    invalid("experiment must be an array of tables ([[experiment]])");
  }

  if (overrides.seed) out.seed = *overrides.seed;
  std::set<std::string> ids;
  for (auto& c : out.experiments) {
    if (overrides.quadrature_order) c.q.order = *overrides.quadrature_order;
    if (overrides.fd_step) c.q.fd_step = *overrides.fd_step;
    if (overrides.tol) c.tol = *overrides.tol;
    if (!ids.insert(c.id).second) invalid("duplicate experiment id '" + c.id + "'");
    validate(c);
  }
  return out;
}

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) invalid("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

nlohmann::json config_echo(const RunConfig& config) {
  nlohmann::json exps = nlohmann::json::array();
  for (const auto& raw : config.experiments) {
    const auto c = defaults_for(raw);
    nlohmann::json e{{"id", c.id},
                     {"kind", std::string(to_string(c.kind))},
                     {"group", *c.group},
                     {"degree", *c.degree},
                     {"tol", *c.tol},
                     {"quadrature", {{"order", c.q.order}, {"fd_step", c.q.fd_step}}},
                     {"params", c.params}};
    if (c.cycle) e["cycle"] = *c.cycle;
    exps.push_back(std::move(e));
  }
  return {{"seed", config.seed}, {"experiments", exps}};
}

nlohmann::json row_json(const ReportRow& row) {
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& [k, v] : row.inputs) inputs[k] = v;
  nlohmann::json values = nlohmann::json::object();
  for (const auto& [k, v] : row.values) values[k] = v;
  nlohmann::json j{{"id", row.id},
                   {"kind", row.kind},
                   {"seed", row.seed},
                   {"inputs", inputs},
                   {"values", values},
                   {"residual", row.residual},
                   {"tolerance", row.tolerance},
                   {"passed", row.passed},
                   {"seconds", row.seconds}};
  if (!row.error.empty()) j["error"] = row.error;
  return j;
}

nlohmann::json report_json(const RunConfig& config, const std::vector<ReportRow>& rows) {
  nlohmann::json list = nlohmann::json::array();
  int passed = 0;
  for (const auto& r : rows) {
    list.push_back(row_json(r));
    passed += r.passed ? 1 : 0;
  }
  return {{"config_echo", config_echo(config)},
          {"rows", list},
          {"summary", {{"passed", passed}, {"failed", static_cast<int>(rows.size()) - passed}}}};
}

std::vector<std::filesystem::path> write_csv(const std::filesystem::path& dir, const std::vector<ReportRow>& rows) {
  std::map<std::string, std::vector<const ReportRow*>> by_kind;
  for (const auto& r : rows) by_kind[r.kind].push_back(&r);
  std::vector<std::filesystem::path> written;
  for (const auto& [kind, list] : by_kind) {
    const auto path = dir / ("report_" + kind + ".csv");
    std::ofstream out(path);
    if (!out) invalid("cannot write '" + path.string() + "'");
    out << "id,seed";
    for (const auto& name : value_names(parse_experiment_kind(kind))) out << ',' << name;
    out << ",residual,tolerance,passed,seconds\n";
    for (const auto* r : list) {
      out << r->id << ',' << r->seed;
      for (const auto& [name, v] : r->values) out << ',' << csv_number(v);
      out << ',' << csv_number(r->residual) << ',' << csv_number(r->tolerance) << ',' << (r->passed ? "true" : "false")
          << ',' << csv_number(r->seconds) << '\n';
    }
    written.push_back(path);
  }
  return written;
}

int run_and_report(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log) {
  std::vector<ReportRow> rows;
  for (const auto& c : config.experiments) {
    rows.push_back(run_experiment(c, config.seed));
    const auto& r = rows.back();
    log << (r.passed ? "PASS " : "FAIL ") << r.id << " (" << r.kind << ") residual " << r.residual << " tol "
        << r.tolerance << " [" << std::fixed << std::setprecision(2) << r.seconds << " s]" << std::defaultfloat;
    if (!r.error.empty()) log << " error: " << r.error;
    log << '\n';
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) invalid("cannot create output directory '" + out_dir.string() + "'");
  std::ofstream json_out(out_dir / "report.json");
  if (!json_out) invalid("cannot write report.json in '" + out_dir.string() + "'");
  json_out << report_json(config, rows).dump(2) << '\n';
  write_csv(out_dir, rows);

  std::vector<std::string> failed;
  for (const auto& r : rows) {
    if (!r.passed) failed.push_back(r.id);
  }
  if (failed.empty()) return 0;
  log << "CheckFailed:";
  for (const auto& id : failed) log << ' ' << id;
  log << '\n';
  return 1;
}

void print_catalog(std::ostream& os) {
  std::string current;
  for (const auto& e : builtin_catalog()) {
    if (e.category != current) {
      current = e.category;
      os << current << ":\n";
    }
    os << "  " << std::left << std::setw(24) << e.name << ' ' << e.description << '\n';
  }
}

}  // namespace cs
