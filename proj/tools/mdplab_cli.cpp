// Command-line front end: loads a scenario (file or built-in), runs its
// experiment block, emits the report as json or csv, and exits 0 only if
// every verdict holds.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "mdplab/mdplab.hpp"

namespace {

void print_summary(const mdplab::ExperimentReport& report, std::ostream& os) {
  os << report.scenario << " " << report.kind << " seed=" << report.seed << "\n";
  for (const auto& run : report.runs) {
    os << (run.failed ? "  [err ] " : run.holds ? "  [ ok ] " : "  [FAIL] ") << run.id;
    if (!std::isnan(run.lhs)) os << "  lhs=" << mdplab::fmt_double(run.lhs);
    if (!std::isnan(run.rhs)) os << " rhs=" << mdplab::fmt_double(run.rhs);
    if (!std::isnan(run.tv_jump)) os << " tv=" << mdplab::fmt_double(run.tv_jump);
    if (!std::isnan(run.value_gap)) os << " gap=" << mdplab::fmt_double(run.value_gap);
    if (run.failed) os << "  error: " << run.error;
    os << "\n";
  }
  if (report.expected_checked) {
    os << "  self-test: " << (report.expected_pass ? "pass" : "FAIL") << "\n";
    for (const auto& f : report.expected_failures) os << "    " << f << "\n";
  }
  os << "verdict: " << (report.ok() ? "PASS" : "FAIL") << " (" << report.n_holds() << "/"
     << report.n_runs() << " hold)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mdplab: finite-MDP laboratory for reward-perturbation experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and report its verdicts");
  std::string scenario_path;
  std::string format = "json";
  std::string out_path;
  std::string builtin;
  std::uint64_t seed_value = 0;
  bool list_builtins = false;
  run->add_option("scenario", scenario_path, "Path to a scenario JSON file");
  run->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--out", out_path, "Write the report to this path");
  auto* seed_opt = run->add_option("--seed", seed_value, "Override the scenario seed");
  run->add_flag("--list-builtins", list_builtins, "List built-in scenarios and exit");
  run->add_option("--builtin", builtin, "Run a built-in scenario by name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (list_builtins) {
    for (const auto& name : mdplab::builtin_names()) std::cout << name << "\n";
    return 0;
  }

  if (scenario_path.empty() == builtin.empty()) {
    std::cerr << "usage error: provide exactly one of a scenario path or --builtin <name>\n";
    return 2;
  }

  try {
    mdplab::ScenarioFile scenario = builtin.empty() ? mdplab::load_scenario(scenario_path)
                                                    : mdplab::load_builtin(builtin);
    std::optional<std::uint64_t> seed;
    if (seed_opt->count() > 0) seed = seed_value;

    mdplab::ExperimentReport report = mdplab::run_experiment(scenario, seed);
    const mdplab::ReportFormat fmt =
        format == "csv" ? mdplab::ReportFormat::csv : mdplab::ReportFormat::json;

    if (!out_path.empty()) {
      mdplab::write_report(report, fmt, out_path);
      print_summary(report, std::cout);
    } else {
      std::cout << (fmt == mdplab::ReportFormat::json ? mdplab::report_json_string(report)
                                                      : mdplab::report_csv_string(report));
      print_summary(report, std::cerr);
    }
    return report.ok() ? 0 : 1;
  } catch (const mdplab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
