#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "radner/oracle.hpp"
#include "radner/statics.hpp"
#include "radner/verification.hpp"
#include "scenario.hpp"

namespace radner::cli {

/// 17 significant digits, locale independent; -0 prints as 0.
std::string format_double(double value);

/// Header row plus one row per entry of `rows`, '\n' line endings.
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

nlohmann::json solution_summary(const EquilibriumSolution& solution);
nlohmann::json report_json(const VerificationReport& report);
nlohmann::json certificate_json(const OptimalityCertificate& cert, std::size_t agent, bool passed);

struct FigureOptions {
  /// 1-based agent numbers for fig3; empty selects 6, 8, 11, 12, 14 when
  /// present and every agent otherwise.
  std::vector<std::size_t> agents;
  /// Lambdas for fig4; default (lambda / 2, lambda).
  std::optional<std::pair<double, double>> lambda_pair;
  /// Upper end of fig5's lambda grid; default 10 lambda.
  std::optional<double> lambda_max;
  std::size_t steps = 200;
  std::size_t grid = kDefaultGridSize;
};

/// File name -> content for the five figure CSVs.
std::map<std::string, std::string> figure_files(const Scenario& scenario, const FigureOptions& options);

std::string sweep_csv(const SweepResult& sweep);
nlohmann::json kinks_json(const SweepResult& sweep, std::span<const double> kinks);

/// Writes every file to a temporary name first and renames once all writes
/// succeeded, so a failure leaves no partial output behind.
void write_files(const std::filesystem::path& dir, const std::map<std::string, std::string>& files);

}  // namespace radner::cli
