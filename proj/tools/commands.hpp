#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "output.hpp"

namespace radner::cli {

enum ExitCode : int {
  kOk = 0,
  kSolveError = 1,
  kInputError = 2,
  kVerificationFailed = 3,
};

/// Evaluation grid size: explicit flag, then the scenario's `grid`, then the
/// RADNER_GRID environment variable, then 2001.
std::size_t resolve_grid(std::optional<std::size_t> flag, const Scenario& scenario);

struct VerifyOptions {
  std::optional<std::size_t> grid;
  bool with_oracle = false;
  std::size_t oracle_n = 400;
  /// Test hook: "tau" shifts tau^(I-1) by 0.05, "drift" adds 1e-3 to the last regime's drift.
  std::string inject_fault;
};

struct SweepOptions {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::size_t steps = 0;
};

int cmd_solve(const std::filesystem::path& scenario, const std::optional<std::filesystem::path>& output,
              std::ostream& out, std::ostream& err);
int cmd_verify(const std::filesystem::path& scenario, const VerifyOptions& options, std::ostream& out,
               std::ostream& err);
int cmd_figures(const std::filesystem::path& scenario, const std::filesystem::path& outdir, FigureOptions options,
                std::optional<std::size_t> grid, std::ostream& err);
int cmd_sweep(const std::filesystem::path& scenario, const SweepOptions& options, const std::filesystem::path& outdir,
              std::ostream& err);

/// Parses argv and dispatches to a subcommand; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace radner::cli
