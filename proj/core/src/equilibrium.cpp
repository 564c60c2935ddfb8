#include "radner/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "radner/errors.hpp"

namespace radner {

void MarketSpec::validate() const {
  if (!std::isfinite(horizon) || horizon <= 0.0) throw SpecError("horizon must be finite and positive");
  if (!std::isfinite(lambda) || lambda <= 0.0) throw SpecError("lambda must be finite and positive");
  if (!std::isfinite(supply)) throw SpecError("supply must be finite");
  if (!std::isfinite(dividend_mean)) throw SpecError("dividend_mean must be finite");
  if (agents.size() < 2) throw SpecError("at least 2 agents are required");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (!std::isfinite(agents[i].target) || !std::isfinite(agents[i].endowment)) {
      throw SpecError("agent " + std::to_string(i + 1) + " has a non-finite target or endowment");
    }
  }
}

double MarketSpec::total_endowment() const {
  double total = 0.0;
  for (const auto& agent : agents) total += agent.endowment;
  return total;
}

bool MarketSpec::endowments_clear() const {
  return std::abs(total_endowment() - supply) <= 1e-9 * (1.0 + std::abs(supply));
}

EquilibriumSolution::EquilibriumSolution(MarketSpec spec, TrajectoryModel model, RankOrdering ordering)
    : spec_(std::move(spec)), model_(std::move(model)), ordering_(std::move(ordering)) {
  const int I = ordering_.num_agents;
  if (I != static_cast<int>(spec_.agents.size())) throw SpecError("ordering does not match the agent count");
  if (std::abs(model_.horizon() - spec_.horizon) > 1e-12 * spec_.horizon) {
    throw SpecError("model horizon differs from the market horizon");
  }
  rank_of_agent_ = ordering_.rank_of_agent();

  const auto& tau = ordering_.tau;
  const auto& A = ordering_.A;
  slope_.assign(static_cast<std::size_t>(I), 0.0);
  offset_.assign(static_cast<std::size_t>(I), 0.0);
  drift_shift_.assign(static_cast<std::size_t>(I), 0.0);
  double offset = 0.0;
  for (int j = 0; j <= I - 1; ++j) {
    const auto r = static_cast<std::size_t>(j);
    if (j >= 1 && j <= I - 2) offset += model_.gamma(tau[r]) * A[r] / static_cast<double>(I - j);
    offset_[r] = offset;
    slope_[r] = j <= I - 2 ? ordering_.a_sigma_geq[r + 1] / static_cast<double>(I - j)
                           : ordering_.a_sigma_geq[r] / 2.0;
  }

  for (int j = 1; j <= I - 1; ++j) breakpoints_.push_back(tau[static_cast<std::size_t>(j)]);
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end(),
                                 [](double x, double y) { return std::abs(x - y) <= 1e-12; }),
                     breakpoints_.end());

  // S_0 = E[D] + a_Sigma^{>=1}/I int kappa gamma - sum_j A^(j) F(tau^(j)) / (I-j)
  double correction = 0.0;
  for (int j = 1; j <= I - 2; ++j) {
    const auto r = static_cast<std::size_t>(j);
    const double level = ordering_.c[r] ? *ordering_.c[r] * spec_.lambda : A[r] * model_.capital_f(0.0);
    correction += level / static_cast<double>(I - j);
  }
  s0_ = spec_.dividend_mean + ordering_.a_sigma_geq[1] / static_cast<double>(I) * model_.kappa_gamma_integral(0.0) -
        correction;

  if (!spec_.endowments_clear()) {
    warnings_.push_back("endowments sum to " + std::to_string(spec_.total_endowment()) + " but supply is " +
                        std::to_string(spec_.supply) + "; markets cannot clear");
  }
}

void EquilibriumSolution::check_rank(int rank) const {
  if (rank < 1 || rank > num_agents()) throw DomainError("rank " + std::to_string(rank) + " out of range");
}

void EquilibriumSolution::check_regime(int regime) const {
  if (regime < 0 || regime > num_agents() - 1) throw DomainError("regime " + std::to_string(regime) + " out of range");
}

int EquilibriumSolution::regime_at(double t) const {
  if (!(t >= 0.0 && t <= horizon())) throw DomainError("time " + std::to_string(t) + " outside [0, T]");
  const auto first = ordering_.tau.begin() + 1;
  const auto last = ordering_.tau.begin() + num_agents();  // ranks 1..I-1
  return static_cast<int>(std::upper_bound(first, last, t) - first);
}

double EquilibriumSolution::regime_slope(int regime) const {
  check_regime(regime);
  return slope_[static_cast<std::size_t>(regime)];
}

double EquilibriumSolution::regime_offset(int regime) const {
  check_regime(regime);
  return offset_[static_cast<std::size_t>(regime)];
}

double EquilibriumSolution::drift_over_kappa_in_regime(int regime, double t) const {
  check_regime(regime);
  const auto r = static_cast<std::size_t>(regime);
  return -(model_.gamma(t) * slope_[r] + offset_[r]) + drift_shift_[r] / model_.kappa(t);
}

double EquilibriumSolution::drift_over_kappa(double t) const {
  return drift_over_kappa_in_regime(regime_at(t), t);
}

double EquilibriumSolution::drift(double t) const { return model_.kappa(t) * drift_over_kappa(t); }

double EquilibriumSolution::strategy_with_stop(int rank, double t, double stop_time) const {
  check_rank(rank);
  const auto r = static_cast<std::size_t>(rank);
  const double s = std::min(t, stop_time);
  return ordering_.endowment[r] + drift_over_kappa(s) + model_.gamma(s) * ordering_.a[r];
}

double EquilibriumSolution::strategy(int rank, double t) const {
  check_rank(rank);
  return strategy_with_stop(rank, t, ordering_.tau[static_cast<std::size_t>(rank)]);
}

double EquilibriumSolution::strategy_for_agent(std::size_t agent, double t) const {
  if (agent >= rank_of_agent_.size()) throw DomainError("agent index out of range");
  return strategy(rank_of_agent_[agent], t);
}

double EquilibriumSolution::gamma_process(int rank, double t) const {
  check_rank(rank);
  const auto r = static_cast<std::size_t>(rank);
  const double tau = ordering_.tau[r];
  return ordering_.A[r] * model_.kernel(std::max(t, tau), tau);
}

double EquilibriumSolution::foc_process(int rank, double t) const {
  check_rank(rank);
  const int I = num_agents();
  if (rank >= I - 1) return gamma_process(rank, t);
  double y = static_cast<double>(I - rank + 1) / static_cast<double>(I - rank) * gamma_process(rank, t);
  for (int k = rank + 1; k <= I - 2; ++k) y += gamma_process(k, t) / static_cast<double>(I - k);
  return y;
}

double EquilibriumSolution::drift_integral(double t) const {
  const int start = regime_at(t);
  const int I = num_agents();
  double total = 0.0;
  for (int j = start; j <= I - 1; ++j) {
    const auto r = static_cast<std::size_t>(j);
    const double lo = std::max(t, ordering_.tau[r]);
    const double hi = j <= I - 2 ? ordering_.tau[r + 1] : horizon();
    if (hi <= lo) continue;
    const double kg = model_.kappa_gamma_integral(lo) - model_.kappa_gamma_integral(hi);
    const double k = model_.kappa_integral(lo) - model_.kappa_integral(hi);
    total += -(slope_[r] * kg + offset_[r] * k) + drift_shift_[r] * (hi - lo);
  }
  return total;
}

double EquilibriumSolution::price_skeleton(double t) const { return spec_.dividend_mean - drift_integral(t); }

EquilibriumSolution EquilibriumSolution::with_drift_shift(int regime, double delta) const {
  check_regime(regime);
  EquilibriumSolution copy = *this;
  copy.drift_shift_[static_cast<std::size_t>(regime)] += delta;
  return copy;
}

EquilibriumSolution solve(const MarketSpec& spec, const TrajectoryModel& model, TieBreak tie_break) {
  spec.validate();
  if (std::abs(model.horizon() - spec.horizon) > 1e-12 * spec.horizon) {
    throw SpecError("model horizon differs from the market horizon");
  }
  RankOrdering ordering = build_ordering(spec.agents, spec.lambda, model, tie_break);
  return EquilibriumSolution(spec, model, std::move(ordering));
}

}  // namespace radner
