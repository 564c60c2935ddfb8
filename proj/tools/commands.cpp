#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>

#include <CLI11.hpp>

#include "radner/errors.hpp"

namespace radner::cli {

namespace {

using nlohmann::json;

// Maps exceptions to exit codes so every command reports failures the same way.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSolveError;
  }
}

EquilibriumSolution inject_fault(const EquilibriumSolution& solution, const std::string& fault) {
  const int I = solution.num_agents();
  if (fault == "drift") return solution.with_drift_shift(I - 1, 1e-3);
  if (fault == "tau") {
    RankOrdering ordering = solution.ordering();
    auto& tau = ordering.tau[static_cast<std::size_t>(I - 1)];
    tau = tau + 0.05 < solution.horizon() ? tau + 0.05 : tau - 0.05;
    return EquilibriumSolution(solution.spec(), solution.model(), std::move(ordering));
  }
  throw SpecError("unknown fault '" + fault + "' (expected tau or drift)");
}

}  // namespace

std::size_t resolve_grid(std::optional<std::size_t> flag, const Scenario& scenario) {
  if (flag) {
    if (*flag < 2) throw ScenarioError("", "--grid must be at least 2");
    return *flag;
  }
  if (scenario.grid) return *scenario.grid;
  if (const char* env = std::getenv("RADNER_GRID"); env && *env) {
    char* end = nullptr;
    const long long value = std::strtoll(env, &end, 10);
    if (*end != '\0' || value < 2) throw ScenarioError("", "RADNER_GRID must be an integer >= 2");
    return static_cast<std::size_t>(value);
  }
  return kDefaultGridSize;
}

int cmd_solve(const std::filesystem::path& scenario, const std::optional<std::filesystem::path>& output,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(scenario);
    const EquilibriumSolution solution = solve(s.spec, s.model);
    for (const auto& w : solution.warnings()) err << "warning: " << w << '\n';
    const std::string text = solution_summary(solution).dump(2) + "\n";
    if (output) {
      write_files(output->has_parent_path() ? output->parent_path() : std::filesystem::path("."),
                  {{output->filename().string(), text}});
    } else {
      out << text;
    }
    return static_cast<int>(kOk);
  });
}

int cmd_verify(const std::filesystem::path& scenario, const VerifyOptions& options, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(scenario);
    const std::size_t grid = resolve_grid(options.grid, s);
    if (options.with_oracle && options.oracle_n < 50) throw ScenarioError("", "--oracle-n must be at least 50");
    EquilibriumSolution solution = solve(s.spec, s.model);
    if (!options.inject_fault.empty()) solution = inject_fault(solution, options.inject_fault);

    const VerificationReport report = run_all_checks(solution, grid);
    json doc = report_json(report);
    bool passed = report.passed();
    if (options.with_oracle) {
      json certs = json::array();
      for (int j = 1; j <= solution.num_agents(); ++j) {
        const auto cert = deviation_oracle(solution, j, options.oracle_n);
        const double a = solution.ordering().a[static_cast<std::size_t>(j)];
        const bool ok = cert.passed() &&
                        cert.max_deviation <= 2.0 * std::max(1.0, std::abs(a)) / static_cast<double>(cert.N);
        passed = passed && ok;
        certs.push_back(certificate_json(cert, solution.ordering().agent[static_cast<std::size_t>(j)], ok));
      }
      doc["oracle"] = certs;
    }
    doc["passed"] = passed;
    doc["grid"] = grid;
    doc["warnings"] = solution.warnings();
    out << doc.dump(2) << '\n';
    return static_cast<int>(passed ? kOk : kVerificationFailed);
  });
}

int cmd_figures(const std::filesystem::path& scenario, const std::filesystem::path& outdir, FigureOptions options,
                std::optional<std::size_t> grid, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(scenario);
    options.grid = resolve_grid(grid, s);
    write_files(outdir, figure_files(s, options));
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const std::filesystem::path& scenario, const SweepOptions& options, const std::filesystem::path& outdir,
              std::ostream& err) {
  return guarded(err, [&] {
    if (!(options.lambda_min > 0.0) || !(options.lambda_max > options.lambda_min) || options.steps < 3) {
      throw ScenarioError("", "sweep needs 0 < lambda-min < lambda-max and steps >= 3");
    }
    const Scenario s = load_scenario(scenario);
    const auto lambdas = lambda_grid(options.lambda_min, options.lambda_max, options.steps);
    const SweepResult sweep = lambda_sweep(s.spec, s.model, lambdas);
    const auto kinks = kink_points(sweep);
    write_files(outdir, {{"sweep.csv", sweep_csv(sweep)}, {"kinks.json", kinks_json(sweep, kinks).dump(2) + "\n"}});
    return static_cast<int>(kOk);
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radner equilibrium solver and verifier for targeted trading with transaction costs", "radner"};
  app.require_subcommand(1);

  std::filesystem::path scenario;
  std::function<int()> action;

  auto* solve_cmd = app.add_subcommand("solve", "Solve a scenario and write the solution summary (JSON)");
  std::optional<std::filesystem::path> output;
  solve_cmd->add_option("scenario", scenario, "Scenario JSON file")->required();
  solve_cmd->add_option("-o,--output", output, "Output file (default: standard output)");
  solve_cmd->callback([&] { action = [&] { return cmd_solve(scenario, output, out, err); }; });

  auto* verify_cmd = app.add_subcommand("verify", "Run every equilibrium check; report JSON on standard output");
  VerifyOptions verify;
  verify_cmd->add_option("scenario", scenario, "Scenario JSON file")->required();
  verify_cmd->add_option("--grid", verify.grid, "Evaluation grid size");
  verify_cmd->add_flag("--with-oracle", verify.with_oracle, "Also certify optimality with the discrete oracle");
  verify_cmd->add_option("--oracle-n", verify.oracle_n, "Oracle grid intervals")->capture_default_str();
  verify_cmd->add_option("--inject-fault", verify.inject_fault, "Testing only: corrupt the solution (tau|drift)")
      ->group("");
  verify_cmd->callback([&] { action = [&] { return cmd_verify(scenario, verify, out, err); }; });

  auto* figures_cmd = app.add_subcommand("figures", "Write the five figure CSV files");
  std::filesystem::path outdir = ".";
  FigureOptions figures;
  std::optional<std::size_t> figures_grid;
  std::vector<double> lambda_pair;
  std::optional<double> lambda_max;
  figures_cmd->add_option("scenario", scenario, "Scenario JSON file")->required();
  figures_cmd->add_option("--outdir", outdir, "Output directory")->capture_default_str();
  figures_cmd->add_option("--agents", figures.agents, "Agents (1-based) for fig3")->delimiter(',');
  figures_cmd->add_option("--lambda-pair", lambda_pair, "Two lambdas for fig4")->delimiter(',')->expected(2);
  figures_cmd->add_option("--lambda-max", lambda_max, "Upper lambda for fig5 (default 10 lambda)");
  figures_cmd->add_option("--steps", figures.steps, "Lambda points for fig5")->capture_default_str();
  figures_cmd->add_option("--grid", figures_grid, "Evaluation grid size");
  figures_cmd->callback([&] {
    action = [&] {
      if (lambda_pair.size() == 2) figures.lambda_pair = std::make_pair(lambda_pair[0], lambda_pair[1]);
      figures.lambda_max = lambda_max;
      return cmd_figures(scenario, outdir, figures, figures_grid, err);
    };
  });

  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep lambda; write sweep.csv and kinks.json");
  SweepOptions sweep;
  std::filesystem::path sweep_outdir = ".";
  sweep_cmd->add_option("scenario", scenario, "Scenario JSON file")->required();
  sweep_cmd->add_option("--lambda-min", sweep.lambda_min, "Smallest lambda")->required();
  sweep_cmd->add_option("--lambda-max", sweep.lambda_max, "Largest lambda")->required();
  sweep_cmd->add_option("--steps", sweep.steps, "Number of lambda points")->required();
  sweep_cmd->add_option("--outdir", sweep_outdir, "Output directory")->capture_default_str();
  sweep_cmd->callback([&] { action = [&] { return cmd_sweep(scenario, sweep, sweep_outdir, err); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  return action ? action() : kInputError;
}

}  // namespace radner::cli
