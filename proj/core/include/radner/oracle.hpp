#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "radner/equilibrium.hpp"

namespace radner {

/// Share positions on a time grid t_0 = 0 < ... < t_N = T, with the position
/// held just before trading starts.
struct DiscreteStrategy {
  std::vector<double> times;
  std::vector<double> positions;
  double initial_position = 0.0;

  /// |theta_0 - theta_{0-}| + sum_k |theta_{k+1} - theta_k|
  double total_variation() const;
};

/// One agent's deterministic optimization problem against a fixed drift:
///
///   J(theta) = int theta mu dt - lambda TV(theta)
///              - 1/2 int kappa (gamma a + theta_{0-} - theta)^2 dt.
struct AgentProblem {
  double lambda = 0.0;
  double relative_target = 0.0;
  double initial_position = 0.0;
  std::function<double(double)> drift;
  std::function<double(double)> kappa;
  std::function<double(double)> gamma;
};

AgentProblem agent_problem(const EquilibriumSolution& solution, int rank);

/// Trapezoid quadrature of both integrals on the strategy's grid, exact TV.
double discrete_objective(const AgentProblem& problem, const DiscreteStrategy& strategy);

/// N + 1 uniform points on [0, T] with every breakpoint in (0, T) inserted.
std::vector<double> oracle_grid(const EquilibriumSolution& solution, std::size_t N);

/// theta^(j) sampled on `times`, optionally with a different stop time.
DiscreteStrategy sample_candidate(const EquilibriumSolution& solution, int rank, std::span<const double> times,
                                  std::optional<double> stop_time = std::nullopt);

/// Continuous-time objective of the candidate theta^(j) (stop time optionally
/// replaced), integrated exactly piece by piece.
double continuous_objective(const EquilibriumSolution& solution, int rank,
                            std::optional<double> stop_time = std::nullopt);

struct OracleOptions {
  /// Stop once a full sweep changes J by at most tol * max(1, |J|).
  double tolerance = 1e-13;
  std::size_t max_sweeps = 1'000'000;
};

struct OracleResult {
  DiscreteStrategy optimum;
  double objective = 0.0;
  std::size_t sweeps = 0;
  bool converged = false;
};

/// Maximizes the (concave) discrete objective by coordinate ascent. Each sweep
/// visits every position (closed-form update against both TV neighbours) and
/// then every increment theta_k - theta_{k-1} (closed-form soft threshold on
/// the suffix block), which lets fused plateaus move as a whole.
/// `start` defaults to the no-trade strategy. Throws SpecError when the grid
/// is not strictly increasing or the tolerance exceeds 1e-10.
OracleResult maximize(const AgentProblem& problem, std::span<const double> times,
                      std::optional<std::span<const double>> start = std::nullopt, const OracleOptions& options = {});

struct OptimalityCertificate {
  int rank = 0;
  std::size_t N = 0;
  double oracle_objective = 0.0;
  double candidate_objective = 0.0;
  /// J(oracle) - J(candidate); >= 0 up to round-off.
  double gap = 0.0;
  /// max_k |theta_oracle - theta_candidate|
  double max_deviation = 0.0;
  /// Largest gap attributable to discretization: 0.1 lambda T max(1, |a|) / N.
  double allowance = 0.0;
  std::size_t sweeps = 0;
  bool converged = false;

  bool passed() const { return converged && gap >= -1e-12 && gap <= allowance; }
};

/// Optimality certificate for rank j on oracle_grid(N). Requires N >= 50.
OptimalityCertificate deviation_oracle(const EquilibriumSolution& solution, int rank, std::size_t N,
                                       const OracleOptions& options = {},
                                       std::optional<double> stop_time = std::nullopt);

}  // namespace radner
