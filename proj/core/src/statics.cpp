#include "radner/statics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "radner/errors.hpp"

namespace radner {

namespace {

MarketSpec with_lambda(MarketSpec spec, double lambda) {
  spec.lambda = lambda;
  return spec;
}

std::vector<bool> active_set(const RankOrdering& o) {
  std::vector<bool> active(o.tau.size(), false);
  for (std::size_t j = 1; j < o.tau.size(); ++j) active[j] = o.tau[j] > 0.0;
  return active;
}

}  // namespace

bool SweepResult::permutation_constant() const {
  return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.matches_induction; });
}

std::vector<double> lambda_grid(double lambda_max, std::size_t steps) {
  if (!(lambda_max > 0.0) || steps < 1) throw SpecError("lambda grid needs lambda_max > 0 and steps >= 1");
  std::vector<double> grid(steps);
  for (std::size_t k = 1; k <= steps; ++k) grid[k - 1] = lambda_max * static_cast<double>(k) / static_cast<double>(steps);
  return grid;
}

std::vector<double> lambda_grid(double lambda_min, double lambda_max, std::size_t steps) {
  if (!(lambda_min > 0.0) || !(lambda_max > lambda_min) || steps < 2) {
    throw SpecError("lambda grid needs 0 < lambda_min < lambda_max and steps >= 2");
  }
  std::vector<double> grid(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    grid[k] = lambda_min + (lambda_max - lambda_min) * static_cast<double>(k) / static_cast<double>(steps - 1);
  }
  grid.back() = lambda_max;
  return grid;
}

SweepResult lambda_sweep(const MarketSpec& spec, const TrajectoryModel& model, std::span<const double> lambdas) {
  if (lambdas.empty()) throw SpecError("lambda sweep needs at least one value");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!std::isfinite(lambdas[k]) || lambdas[k] <= 0.0) throw SpecError("lambda values must be finite and positive");
    if (k > 0 && !(lambdas[k] > lambdas[k - 1])) throw SpecError("lambda values must be strictly increasing");
  }
  with_lambda(spec, lambdas.front()).validate();

  SweepResult sweep{spec, model, fast_rank(relative_targets(spec.agents)), {}, {}};
  for (double lambda : lambdas) {
    const EquilibriumSolution solution = solve_at(sweep, lambda);
    const RankOrdering induction = build_ordering(spec.agents, lambda, model);
    SweepPoint point;
    point.lambda = lambda;
    point.s0 = solution.initial_price();
    point.tau = solution.ordering().tau;
    point.c = solution.ordering().c;
    point.active = active_set(solution.ordering());
    point.active_count = static_cast<std::size_t>(std::count(point.active.begin(), point.active.end(), true));
    point.matches_induction = same_up_to_ties(induction, sweep.permutation);

    const auto perm = induction.permutation();
    const auto it = std::find(sweep.permutations.begin(), sweep.permutations.end(), perm);
    point.permutation_id = static_cast<std::size_t>(it - sweep.permutations.begin());
    if (it == sweep.permutations.end()) sweep.permutations.push_back(perm);
    sweep.points.push_back(std::move(point));
  }
  return sweep;
}

EquilibriumSolution solve_at(const SweepResult& sweep, double lambda) {
  MarketSpec spec = with_lambda(sweep.spec, lambda);
  spec.validate();
  RankOrdering ordering = ordering_from_permutation(spec.agents, sweep.permutation, lambda, sweep.model);
  return EquilibriumSolution(std::move(spec), sweep.model, std::move(ordering));
}

std::vector<double> kink_points(const SweepResult& sweep, double tolerance) {
  std::vector<double> kinks;
  const auto& points = sweep.points;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const auto& left = points[k];
    const auto& right = points[k + 1];
    for (std::size_t j = 1; j < left.active.size(); ++j) {
      if (left.active[j] == right.active[j]) continue;
      // Rank j switches between the two grid points; keep `lo` on the left state.
      double lo = left.lambda;
      double hi = right.lambda;
      while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        const bool active = solve_at(sweep, mid).ordering().tau[j] > 0.0;
        if (active == left.active[j]) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      kinks.push_back(0.5 * (lo + hi));
    }
  }
  std::sort(kinks.begin(), kinks.end());
  std::vector<double> merged;
  for (double k : kinks) {
    if (merged.empty() || k - merged.back() > tolerance) merged.push_back(k);
  }
  return merged;
}

double max_second_difference(const SweepResult& sweep, std::span<const double> kinks) {
  const auto& p = sweep.points;
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < p.size(); ++k) {
    const bool straddles = std::any_of(kinks.begin(), kinks.end(), [&](double kink) {
      return kink >= p[k - 1].lambda && kink <= p[k + 1].lambda;
    });
    if (straddles) continue;
    worst = std::max(worst, std::abs(p[k + 1].s0 - 2.0 * p[k].s0 + p[k - 1].s0));
  }
  return worst;
}

std::vector<SlopeEntry> slope_table(const EquilibriumSolution& solution) {
  const auto& model = solution.model();
  if (!model.gamma_differentiable()) {
    throw UnsupportedError("drift slopes need a differentiable gamma (TWAP or a single-slope table)");
  }
  const int I = solution.num_agents();
  const auto& tau = solution.ordering().tau;
  std::vector<SlopeEntry> table;
  for (int j = 0; j <= I - 1; ++j) {
    SlopeEntry entry;
    entry.regime = j;
    entry.t_begin = tau[static_cast<std::size_t>(j)];
    entry.t_end = j <= I - 2 ? tau[static_cast<std::size_t>(j + 1)] : solution.horizon();
    const double mid = 0.5 * (entry.t_begin + entry.t_end);
    entry.slope = -*model.gamma_derivative(mid) * solution.regime_slope(j);
    table.push_back(entry);
  }
  return table;
}

}  // namespace radner
