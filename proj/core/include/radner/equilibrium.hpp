#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "radner/ranking.hpp"
#include "radner/trajectory.hpp"

namespace radner {

/// Market inputs. Agent order is the alphabetical order; agent i is reported
/// as i + 1 in every output.
struct MarketSpec {
  double horizon = 1.0;
  double lambda = 0.0;
  double supply = 0.0;
  double dividend_mean = 0.0;
  std::vector<AgentSpec> agents;

  /// Throws SpecError on non-finite values, lambda <= 0, horizon <= 0 or I < 2.
  void validate() const;
  double total_endowment() const;
  /// True when the endowments add up to the supply (within 1e-9 scale).
  bool endowments_clear() const;
};

/// The candidate equilibrium: ordering, drift, strategies and the first-order
/// condition processes, all evaluated lazily from their closed forms.
///
/// Regimes: regime j (0 <= j <= I-2) is [tau^(j), tau^(j+1)) with tau^(0) = 0,
/// and regime I-1 is [tau^(I-1), T]. A time belongs to the regime counting the
/// stop times at or before it, so empty regimes are skipped automatically.
class EquilibriumSolution {
 public:
  EquilibriumSolution(MarketSpec spec, TrajectoryModel model, RankOrdering ordering);

  const MarketSpec& spec() const { return spec_; }
  const TrajectoryModel& model() const { return model_; }
  const RankOrdering& ordering() const { return ordering_; }
  int num_agents() const { return ordering_.num_agents; }
  double horizon() const { return model_.horizon(); }
  double lambda() const { return spec_.lambda; }

  /// Distinct stop times (deduplicated at 1e-12), ascending.
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  int regime_at(double t) const;
  /// mu_t / kappa(t) = -(gamma(t) s_j + o_j) in the regime containing t.
  double drift_over_kappa(double t) const;
  /// Same, forcing the formula of `regime` (used for one-sided limits).
  double drift_over_kappa_in_regime(int regime, double t) const;
  double drift(double t) const;
  /// Per-regime coefficients: mu / kappa = -(gamma * slope + offset).
  double regime_slope(int regime) const;
  double regime_offset(int regime) const;

  /// theta^(j)_t, frozen after tau^(j).
  double strategy(int rank, double t) const;
  /// theta^(j)_t with the stop time replaced by `stop_time`.
  double strategy_with_stop(int rank, double t, double stop_time) const;
  double strategy_for_agent(std::size_t agent, double t) const;

  /// Gamma^(j)_t = A^(j) G(t v tau^(j), tau^(j)).
  double gamma_process(int rank, double t) const;
  /// Y^(j)_t.
  double foc_process(int rank, double t) const;

  /// int_t^T mu_u du, regime by regime.
  double drift_integral(double t) const;
  double initial_price() const { return s0_; }
  /// E[D] - int_t^T mu_u du; equals S_0 at t = 0 and E[D] at T.
  double price_skeleton(double t) const;

  /// Copy whose drift is shifted by delta on one regime (fault injection).
  EquilibriumSolution with_drift_shift(int regime, double delta) const;

 private:
  void check_rank(int rank) const;
  void check_regime(int regime) const;

  MarketSpec spec_;
  TrajectoryModel model_;
  RankOrdering ordering_;
  std::vector<int> rank_of_agent_;
  std::vector<double> slope_;
  std::vector<double> offset_;
  std::vector<double> drift_shift_;
  std::vector<double> breakpoints_;
  std::vector<std::string> warnings_;
  double s0_ = 0.0;
};

/// Builds the ordering and assembles the solution. Throws SpecError for an
/// invalid spec or when the model horizon differs from spec.horizon.
EquilibriumSolution solve(const MarketSpec& spec, const TrajectoryModel& model,
                          TieBreak tie_break = TieBreak::canonical);

}  // namespace radner
