#include "qbc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "qbc/attacks.hpp"
#include "qbc/protocols.hpp"
#include "qbc/qmath.hpp"
#include "qbc/rng.hpp"

#ifndef QBC_BUILD_ID
#define QBC_BUILD_ID "unknown"
#endif

namespace qbc::cli {

namespace {

constexpr double kPi = 3.14159265358979323846;

const std::vector<std::string> kExperiments = {
    "bcjl-honest", "bcjl-attack", "script-attack", "fidelity-sweep", "two-party"};

std::string bool_cell(bool v) { return v ? "1" : "0"; }

struct RowBuilder {
  const std::vector<std::string>& columns;
  std::vector<std::string> cells;

  explicit RowBuilder(const std::vector<std::string>& cols)
      : columns(cols), cells(cols.size()) {}

  void set(const std::string& name, std::string value) {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) {
        cells[i] = std::move(value);
        return;
      }
    throw std::logic_error("unknown column " + name);
  }
};

void set_common(RowBuilder& row, const ExperimentConfig& config, const std::string& kind) {
  row.set("experiment", config.experiment);
  row.set("row", kind);
  row.set("seed", std::to_string(config.master_seed));
  row.set("build", build_id());
}

}  // namespace

std::string build_id() { return QBC_BUILD_ID; }

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// --- config ---------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "experiment") c.experiment = value.get<std::string>();
      else if (key == "n") c.n = value.get<int>();
      else if (key == "k") c.k = value.get<int>();
      else if (key == "epsilon") c.epsilon = value.get<double>();
      else if (key == "trials") c.trials = value.get<int>();
      else if (key == "sweep_points") c.sweep_points = value.get<int>();
      else if (key == "x_domain") c.x_domain = value.get<int>();
      else if (key == "y_domain") c.y_domain = value.get<int>();
      else if (key == "f") c.f_kind = value.get<std::string>();
      else if (key == "seed") c.master_seed = value.get<std::uint64_t>();
      else if (key == "out") c.out_path = value.get<std::string>();
      else if (key == "format") c.format = value.get<std::string>();
      else throw ConfigError("unknown config field: " + key);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config field has the wrong type: " + key);
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

void ExperimentConfig::validate() const {
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) ==
      kExperiments.end())
    throw ConfigError("experiment must be one of bcjl-honest, bcjl-attack, "
                      "script-attack, fidelity-sweep, two-party (field: experiment)");
  if (trials < 1) throw ConfigError("trials must be ≥ 1 (field: trials)");
  if (sweep_points < 1) throw ConfigError("sweep_points must be ≥ 1 (field: sweep_points)");
  if (!(epsilon >= 0.0 && epsilon < 0.5))
    throw ConfigError("epsilon must lie in [0, 0.5) (field: epsilon)");
  if (format != "csv" && format != "jsonl")
    throw ConfigError("format must be csv or jsonl (field: format)");
  if (experiment == "two-party") {
    if (x_domain < 1 || y_domain < 1)
      throw ConfigError("domains must be positive (field: x_domain/y_domain)");
    if (f_kind != "equality" && f_kind != "constant" && f_kind != "random")
      throw ConfigError("f must be equality, constant, or random (field: f)");
    if (f_kind == "equality" && x_domain != y_domain)
      throw ConfigError("equality table needs x_domain == y_domain (field: f)");
  }
}

// --- runners --------------------------------------------------------------------

namespace {

ResultTable run_bcjl_honest(const ExperimentConfig& config) {
  ResultTable t;
  t.columns = {"experiment", "row", "seed", "build", "trial", "committed_bit",
               "accepted", "codeword_ok", "error_rate_ok", "parity_ok",
               "matched", "errors", "n", "k", "epsilon", "kn_ratio",
               "acceptance_rate"};
  const protocols::BcjlParams params{config.n, config.k, config.epsilon, 1.4};
  const RngStream master(config.master_seed);

  std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(config.trials));
  std::vector<int> accepted(static_cast<std::size_t>(config.trials), 0);

#pragma omp parallel for schedule(dynamic)
  for (int trial = 0; trial < config.trials; ++trial) {
    RngStream stream = master.derive(static_cast<std::uint64_t>(trial));
    const int bit = trial & 1;
    const auto outcome = protocols::bcjl_run(params, bit, true, stream);
    RowBuilder row(t.columns);
    set_common(row, config, "trial");
    row.set("trial", std::to_string(trial));
    row.set("committed_bit", std::to_string(bit));
    row.set("accepted", bool_cell(outcome.accepted));
    row.set("codeword_ok", bool_cell(outcome.codeword_ok));
    row.set("error_rate_ok", bool_cell(outcome.error_rate_ok));
    row.set("parity_ok", bool_cell(outcome.parity_ok));
    row.set("matched", std::to_string(outcome.matched));
    row.set("errors", std::to_string(outcome.errors));
    rows[static_cast<std::size_t>(trial)] = std::move(row.cells);
    accepted[static_cast<std::size_t>(trial)] = outcome.accepted ? 1 : 0;
  }
  t.rows = std::move(rows);

  int total = 0;
  for (int a : accepted) total += a;
  RowBuilder summary(t.columns);
  set_common(summary, config, "summary");
  summary.set("n", std::to_string(config.n));
  summary.set("k", std::to_string(config.k));
  summary.set("epsilon", format_double(config.epsilon));
  summary.set("kn_ratio", format_double(static_cast<double>(config.k) / config.n));
  summary.set("acceptance_rate",
              format_double(static_cast<double>(total) / config.trials));
  t.rows.push_back(std::move(summary.cells));
  return t;
}

ResultTable run_bcjl_attack(const ExperimentConfig& config) {
  ResultTable t;
  t.columns = {"experiment", "row", "seed", "build", "trial", "open0_pass",
               "open1_pass", "both_pass", "n", "k", "epsilon", "r",
               "fidelity", "delta", "achieved_overlap", "acceptance_probability",
               "detection_probability", "u_dim", "open0_rate", "open1_rate",
               "both_rate"};
  const protocols::BcjlParams params{config.n, config.k, config.epsilon, 1.4};
  RngStream master(config.master_seed);
  const auto attack = attacks::bcjl_epr_attack(params, master);

  // Opening trials draw from their own root so their keys cannot collide
  // with the streams the attack construction derives from `master`.
  const RngStream trial_root = master.derive(0x0be7);
  int c0 = 0, c1 = 0, cb = 0;
  for (int trial = 0; trial < config.trials; ++trial) {
    RngStream s0 = trial_root.derive(2 * static_cast<std::uint64_t>(trial));
    RngStream s1 = trial_root.derive(2 * static_cast<std::uint64_t>(trial) + 1);
    const bool p0 = attacks::bcjl_epr_open_trial(attack, 0, s0);
    const bool p1 = attacks::bcjl_epr_open_trial(attack, 1, s1);
    c0 += p0;
    c1 += p1;
    cb += p0 && p1;
    RowBuilder row(t.columns);
    set_common(row, config, "trial");
    row.set("trial", std::to_string(trial));
    row.set("open0_pass", bool_cell(p0));
    row.set("open1_pass", bool_cell(p1));
    row.set("both_pass", bool_cell(p0 && p1));
    t.rows.push_back(std::move(row.cells));
  }

  RowBuilder summary(t.columns);
  set_common(summary, config, "summary");
  summary.set("n", std::to_string(config.n));
  summary.set("k", std::to_string(config.k));
  summary.set("epsilon", format_double(config.epsilon));
  summary.set("r", bits_to_hex(attack.r));
  summary.set("fidelity", format_double(attack.report.fidelity));
  summary.set("delta", format_double(attack.report.delta));
  summary.set("achieved_overlap", format_double(attack.report.achieved_overlap));
  summary.set("acceptance_probability",
              format_double(attack.report.acceptance_probability));
  summary.set("detection_probability",
              format_double(attack.report.detection_probability));
  summary.set("u_dim", std::to_string(attack.report.u_dim));
  summary.set("open0_rate", format_double(static_cast<double>(c0) / config.trials));
  summary.set("open1_rate", format_double(static_cast<double>(c1) / config.trials));
  summary.set("both_rate", format_double(static_cast<double>(cb) / config.trials));
  t.rows.push_back(std::move(summary.cells));
  return t;
}

ResultTable run_script_attack(const ExperimentConfig& config) {
  ResultTable t;
  t.columns = {"experiment", "row", "seed", "build", "trial", "fidelity", "delta",
               "achieved_overlap", "acceptance_probability", "detection_probability",
               "overlap_minus_fidelity", "max_abs_mismatch"};
  const RngStream master(config.master_seed);

  std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(config.trials));
  std::vector<double> mismatch(static_cast<std::size_t>(config.trials), 0.0);

#pragma omp parallel for schedule(dynamic)
  for (int trial = 0; trial < config.trials; ++trial) {
    RngStream stream = master.derive(static_cast<std::uint64_t>(trial));
    const auto script = protocols::make_random_script(2, 1, stream);
    const auto report = attacks::run_commitment_attack(script);
    RowBuilder row(t.columns);
    set_common(row, config, "trial");
    row.set("trial", std::to_string(trial));
    row.set("fidelity", format_double(report.fidelity));
    row.set("delta", format_double(report.delta));
    row.set("achieved_overlap", format_double(report.achieved_overlap));
    row.set("acceptance_probability", format_double(report.acceptance_probability));
    row.set("detection_probability", format_double(report.detection_probability));
    row.set("overlap_minus_fidelity",
            format_double(report.achieved_overlap - report.fidelity));
    rows[static_cast<std::size_t>(trial)] = std::move(row.cells);
    mismatch[static_cast<std::size_t>(trial)] =
        std::abs(report.achieved_overlap - report.fidelity);
  }
  t.rows = std::move(rows);

  RowBuilder summary(t.columns);
  set_common(summary, config, "summary");
  summary.set("max_abs_mismatch",
              format_double(*std::max_element(mismatch.begin(), mismatch.end())));
  t.rows.push_back(std::move(summary.cells));
  return t;
}

ResultTable run_fidelity_sweep(const ExperimentConfig& config) {
  ResultTable t;
  t.columns = {"experiment", "row", "seed", "build", "point", "theta", "fidelity",
               "delta", "achieved_overlap", "acceptance_probability",
               "detection_probability", "mean_fidelity", "mean_detection"};
  const int points = config.sweep_points;
  double sum_f = 0.0, sum_d = 0.0;
  for (int p = 0; p < points; ++p) {
    const double theta =
        points == 1 ? 0.0 : (kPi / 2.0) * static_cast<double>(p) / (points - 1);
    const auto script = protocols::make_interpolating_script(theta);
    const auto report = attacks::run_commitment_attack(script);
    sum_f += report.fidelity;
    sum_d += report.detection_probability;
    RowBuilder row(t.columns);
    set_common(row, config, "trial");
    row.set("point", std::to_string(p));
    row.set("theta", format_double(theta));
    row.set("fidelity", format_double(report.fidelity));
    row.set("delta", format_double(report.delta));
    row.set("achieved_overlap", format_double(report.achieved_overlap));
    row.set("acceptance_probability", format_double(report.acceptance_probability));
    row.set("detection_probability", format_double(report.detection_probability));
    t.rows.push_back(std::move(row.cells));
  }
  RowBuilder summary(t.columns);
  set_common(summary, config, "summary");
  summary.set("mean_fidelity", format_double(sum_f / points));
  summary.set("mean_detection", format_double(sum_d / points));
  t.rows.push_back(std::move(summary.cells));
  return t;
}

ResultTable run_two_party(const ExperimentConfig& config) {
  ResultTable t;
  t.columns = {"experiment", "row", "seed", "build", "x", "y", "f_true",
               "f_recovered", "match", "alice_independence_dev", "all_match"};
  RngStream master(config.master_seed);

  protocols::FunctionTable table = [&]() {
    if (config.f_kind == "constant")
      return protocols::FunctionTable::constant(config.x_domain, config.y_domain, 0);
    if (config.f_kind == "random") {
      RngStream fr = master.derive(0xf);
      return protocols::FunctionTable::random(config.x_domain, config.y_domain, 4, fr);
    }
    return protocols::FunctionTable::equality(config.x_domain);
  }();

  bool all_match = true;
  for (int x = 0; x < table.x_domain; ++x) {
    // Independence of Alice's view across y, for this x.
    double dev = 0.0;
    const auto base = reduced_density(protocols::two_party_protocol(table, x, 0), {0});
    for (int y = 1; y < table.y_domain; ++y) {
      const auto rho = reduced_density(protocols::two_party_protocol(table, x, y), {0});
      dev = std::max(dev, (rho.matrix() - base.matrix()).cwiseAbs().maxCoeff());
    }
    const auto recovered = attacks::two_party_attack(table, x, 0);
    for (const auto& [y, value] : recovered) {
      const bool ok = value == table.at(x, y);
      all_match = all_match && ok;
      RowBuilder row(t.columns);
      set_common(row, config, "trial");
      row.set("x", std::to_string(x));
      row.set("y", std::to_string(y));
      row.set("f_true", std::to_string(table.at(x, y)));
      row.set("f_recovered", std::to_string(value));
      row.set("match", bool_cell(ok));
      row.set("alice_independence_dev", format_double(dev));
      t.rows.push_back(std::move(row.cells));
    }
  }
  RowBuilder summary(t.columns);
  set_common(summary, config, "summary");
  summary.set("all_match", bool_cell(all_match));
  t.rows.push_back(std::move(summary.cells));
  return t;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment == "bcjl-honest") return run_bcjl_honest(config);
  if (config.experiment == "bcjl-attack") return run_bcjl_attack(config);
  if (config.experiment == "script-attack") return run_script_attack(config);
  if (config.experiment == "fidelity-sweep") return run_fidelity_sweep(config);
  return run_two_party(config);
}

// --- formats --------------------------------------------------------------------

std::string csv_quote(const std::string& field) {
  const bool needs = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_table(const ResultTable& table, std::ostream& os, const std::string& format) {
  if (format == "csv") {
    for (std::size_t i = 0; i < table.columns.size(); ++i)
      os << (i ? "," : "") << csv_quote(table.columns[i]);
    os << "\r\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_quote(row[i]);
      os << "\r\n";
    }
    return;
  }
  if (format == "jsonl") {
    for (const auto& row : table.rows) {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t i = 0; i < table.columns.size(); ++i) obj[table.columns[i]] = row[i];
      os << obj.dump() << '\n';
    }
    return;
  }
  throw ConfigError("format must be csv or jsonl (field: format)");
}

ResultTable read_csv(std::istream& is) {
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
    } else {
      field += c;
    }
  }
  if (!field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }

  ResultTable t;
  if (records.empty()) return t;
  t.columns = records.front();
  t.rows.assign(records.begin() + 1, records.end());
  return t;
}

namespace {

std::optional<double> cell_as_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

int column_index(const ResultTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace

std::string summarize(const ResultTable& table) {
  if (table.rows.empty()) throw ConfigError("empty table: nothing to report");
  std::ostringstream out;

  if (table.rows.size() == 1) {
    // Single row: echo it.
    for (std::size_t i = 0; i < table.columns.size(); ++i)
      if (i < table.rows[0].size() && !table.rows[0][i].empty())
        out << table.columns[i] << " = " << table.rows[0][i] << '\n';
    return out.str();
  }

  out << table.rows.size() << " rows\n";
  for (const std::string name :
       {"acceptance_probability", "detection_probability", "acceptance_rate",
        "fidelity", "open0_rate", "open1_rate", "both_rate", "all_match"}) {
    const int ci = column_index(table, name);
    if (ci < 0) continue;
    double mn = 0, mx = 0, sum = 0;
    int count = 0;
    for (const auto& row : table.rows) {
      if (ci >= static_cast<int>(row.size())) continue;
      const auto v = cell_as_double(row[static_cast<std::size_t>(ci)]);
      if (!v) continue;
      if (count == 0) mn = mx = *v;
      mn = std::min(mn, *v);
      mx = std::max(mx, *v);
      sum += *v;
      ++count;
    }
    if (count == 0) continue;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-24s mean %-14.8g min %-14.8g max %-14.8g\n",
                  name.c_str(), sum / count, mn, mx);
    out << buf;
  }

  // δ–detection curve, sorted by δ ascending.
  const int cd = column_index(table, "delta");
  const int cp = column_index(table, "detection_probability");
  if (cd >= 0 && cp >= 0) {
    std::vector<std::pair<double, double>> curve;
    for (const auto& row : table.rows) {
      if (cd >= static_cast<int>(row.size()) || cp >= static_cast<int>(row.size()))
        continue;
      const auto d = cell_as_double(row[static_cast<std::size_t>(cd)]);
      const auto p = cell_as_double(row[static_cast<std::size_t>(cp)]);
      if (d && p) curve.emplace_back(*d, *p);
    }
    if (!curve.empty()) {
      std::sort(curve.begin(), curve.end());
      out << "delta        detection\n";
      for (const auto& [d, p] : curve) {
        char buf[80];
        std::snprintf(buf, sizeof(buf), "%-12.6f %-12.6f\n", d, p);
        out << buf;
      }
    }
  }
  return out.str();
}

}  // namespace qbc::cli
