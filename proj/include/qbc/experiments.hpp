#ifndef QBC_EXPERIMENTS_HPP
#define QBC_EXPERIMENTS_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbc::cli {

/// Invalid configuration; the CLI exits with status 1 and the message names
/// the offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ExperimentConfig {
  std::string experiment;  // bcjl-honest | bcjl-attack | script-attack |
                           // fidelity-sweep | two-party
  int n = 25;
  int k = 13;
  double epsilon = 0.0;
  int trials = 1;
  int sweep_points = 9;
  int x_domain = 8;
  int y_domain = 8;
  std::string f_kind = "equality";  // equality | constant | random
  std::uint64_t master_seed = 0;
  std::string out_path;       // empty → stdout
  std::string format = "csv"; // csv | jsonl

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);

  void validate() const;
};

/// Flat result table; all cells are preformatted strings so output bytes
/// depend only on the computed values.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string build_id();

/// Deterministic given config.master_seed: one row per trial/sweep point
/// plus one aggregate summary row. Trials run in parallel; rows are
/// buffered in trial order.
ResultTable run_experiment(const ExperimentConfig& config);

/// format "csv": RFC-4180, one header row. format "jsonl": one JSON object
/// per row, all values as strings.
void write_table(const ResultTable& table, std::ostream& os, const std::string& format);

ResultTable read_csv(std::istream& is);

/// Human-readable digest: acceptance/detection statistics and the
/// δ–detection curve sorted by δ ascending. Throws ConfigError on an empty
/// table.
std::string summarize(const ResultTable& table);

std::string csv_quote(const std::string& field);
std::string format_double(double v);

}  // namespace qbc::cli

#endif
