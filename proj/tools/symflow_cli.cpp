#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "symflow/scenario.hpp"

namespace {

// exit codes: 0 all thresholds pass, 1 threshold failure, 2 parse error,
// 3 integration failure
constexpr int kExitPass = 0;
constexpr int kExitThreshold = 1;
constexpr int kExitParse = 2;
constexpr int kExitIntegration = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symflow: integrable flows on matrix Lie algebras"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  double dt_override = -1.0;
  double t_end_override = -1.0;
  std::int64_t seed_override = -1;

  CLI::App* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("scenario", scenario_path, "scenario config file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--dt", dt_override, "override the time step");
  run->add_option("--t-end", t_end_override, "override the horizon");
  run->add_option("--seed", seed_override, "override the RNG seed");

  std::string kind;
  std::size_t list_n = 3;
  int list_eps = 1;
  CLI::App* list = app.add_subcommand("list-invariants", "list invariants for a kind");
  list->add_option("kind", kind, "scenario kind")->required();
  list->add_option("--n", list_n, "dimension n");
  list->add_option("--eps", list_eps, "curvature sign");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const std::string& name : symflow::list_invariants(kind, list_n, list_eps, 1.0))
        std::cout << name << "\n";
      return kExitPass;
    }

    symflow::Scenario sc = symflow::parse_scenario_file(scenario_path);
    if (dt_override > 0.0) sc.dt = dt_override;
    if (t_end_override > 0.0) sc.t_end = t_end_override;
    if (seed_override >= 0) sc.seed = static_cast<std::uint64_t>(seed_override);

    symflow::RunResult result = symflow::run_scenario(sc);

    std::filesystem::create_directories(out_dir);
    {
      std::ofstream csv(std::filesystem::path(out_dir) / "trajectory.csv");
      symflow::write_trajectory_csv(result.traj, result.state_labels, csv);
    }
    {
      std::ofstream json(std::filesystem::path(out_dir) / "report.json");
      symflow::write_report_json(result, sc, json);
    }

    for (const auto& row : result.drift.rows) {
      double thr = result.resolved_thresholds.at(row.name);
      std::cout << (row.max_rel_drift <= thr ? "pass " : "FAIL ") << row.name
                << " rel_drift=" << row.max_rel_drift << " threshold=" << thr << "\n";
    }
    for (const auto& name : result.check_names) {
      double v = result.check_values.at(name);
      double thr = result.check_thresholds.at(name);
      std::cout << (std::abs(v) <= thr ? "pass " : "FAIL ") << name << " value=" << v
                << " threshold=" << thr << "\n";
    }
    return result.pass ? kExitPass : kExitThreshold;
  } catch (const symflow::ParseError& e) {
    std::cerr << "parse error";
    if (e.line > 0) std::cerr << " at line " << e.line;
    if (!e.field.empty()) std::cerr << " (field '" << e.field << "')";
    std::cerr << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const symflow::IntegrationError& e) {
    std::cerr << "integration failure: " << e.what() << "\n";
    return kExitIntegration;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIntegration;
  }
}
