#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qbc/attacks.hpp"
#include "qbc/experiments.hpp"
#include "qbc/protocols.hpp"
#include "qbc/types.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& seed_override,
            const std::string& out_override, const std::string& format_override) {
  auto config = qbc::cli::ExperimentConfig::from_json_file(config_path);
  if (!seed_override.empty()) config.master_seed = std::stoull(seed_override);
  if (!out_override.empty()) config.out_path = out_override;
  if (!format_override.empty()) config.format = format_override;
  config.validate();

  const auto table = qbc::cli::run_experiment(config);
  if (config.out_path.empty()) {
    qbc::cli::write_table(table, std::cout, config.format);
  } else {
    std::ofstream out(config.out_path, std::ios::binary);
    if (!out)
      throw qbc::cli::ConfigError("cannot open output file: " + config.out_path);
    qbc::cli::write_table(table, out, config.format);
  }
  std::cerr << qbc::cli::summarize(table);
  return 0;
}

int cmd_report(const std::string& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw qbc::cli::ConfigError("cannot open results file: " + csv_path);
  const auto table = qbc::cli::read_csv(in);
  std::cout << qbc::cli::summarize(table);
  return 0;
}

int cmd_demo() {
  std::cout << "Single-qubit BB84-style commitment, attacked.\n"
            << "Commit phase: Alice prepares (|0>|enc(b,0)> + |1>|enc(b,1)>)/sqrt(2)\n"
            << "and sends the photon; the basis record stays entangled at her side.\n"
            << "She always commits b = 0, then decides at opening time.\n\n";
  const auto script = qbc::protocols::make_bb84_commit_script();
  const auto report = qbc::attacks::run_commitment_attack(script);
  std::cout << "Opening as b = 1 after the local rotation:\n"
            << report.to_kv()
            << "\nDetection probability is 1 - fidelity^2 of Bob's two views;"
            << "\nhad the scheme been perfectly concealing it would be zero.\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum bit commitment protocols and their purification attacks"};
  app.require_subcommand(1);

  std::string config_path, seed_override, out_override, format_override, csv_path;

  auto* run = app.add_subcommand("run", "run an experiment described by a JSON config");
  run->add_option("config", config_path, "path to the JSON config")->required();
  run->add_option("--seed", seed_override, "override the master seed");
  run->add_option("--out", out_override, "override the output path");
  run->add_option("--format", format_override, "override the output format (csv|jsonl)");

  auto* report = app.add_subcommand("report", "summarize a results CSV");
  report->add_option("results", csv_path, "path to a results CSV")->required();

  auto* demo = app.add_subcommand("demo", "single-qubit attack walkthrough");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(config_path, seed_override, out_override, format_override);
    if (report->parsed()) return cmd_report(csv_path);
    if (demo->parsed()) return cmd_demo();
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const qbc::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const qbc::CapViolation& e) {
    std::cerr << "cap violation: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
