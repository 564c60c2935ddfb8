#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "radner/equilibrium.hpp"
#include "radner/trajectory.hpp"

namespace radner::cli {

/// Scenario rejected; `pointer` is the JSON pointer of the offending value
/// ("" for the document itself).
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string pointer, const std::string& message)
      : std::runtime_error(pointer.empty() ? message : pointer + ": " + message), pointer_(std::move(pointer)) {}

  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct Scenario {
  MarketSpec spec;
  TrajectoryModel model;
  std::optional<std::size_t> grid;
};

/// Validates and converts a scenario document:
///
///   {
///     "horizon": 1, "lambda": 0.2, "supply": 0, "dividend_mean": 0,
///     "agents": [{"target": -300, "endowment": 0}, ...],
///     "kappa": {"type": "constant", "value": 0.1} | {"type": "table", "points": [...]},
///     "gamma": {"type": "twap"} | {"type": "table", "points": [...]},
///     "grid": 2001
///   }
///
/// dividend_mean, endowment and grid are optional; unknown keys are rejected.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace radner::cli
