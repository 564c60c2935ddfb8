#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "radner/equilibrium.hpp"

namespace radner {

struct SweepPoint {
  double lambda = 0.0;
  double s0 = 0.0;
  /// Stop times by rank, slot 0 unused (as in RankOrdering).
  std::vector<double> tau;
  std::vector<std::optional<double>> c;
  /// active[j]: tau^(j) > 0, i.e. rank j trades at some point.
  std::vector<bool> active;
  std::size_t active_count = 0;
  /// Index into SweepResult::permutations of the ordering the induction builds at this lambda.
  std::size_t permutation_id = 0;
  /// The induction's own ordering agrees with the shared one up to ties.
  bool matches_induction = false;
};

struct SweepResult {
  MarketSpec spec;
  TrajectoryModel model;
  /// Rank order (fast_rank) shared by every point.
  std::vector<std::size_t> permutation;
  /// Distinct permutations produced by the induction across the sweep.
  std::vector<std::vector<std::size_t>> permutations;
  std::vector<SweepPoint> points;

  /// Every point's induction ordering matches the shared permutation up to ties.
  bool permutation_constant() const;
};

/// Solves the market at each lambda (strictly increasing, positive) with the
/// rank order fixed once by fast_rank; spec.lambda is ignored.
SweepResult lambda_sweep(const MarketSpec& spec, const TrajectoryModel& model, std::span<const double> lambdas);

/// lambda_k = lambda_max * k / steps, k = 1..steps.
std::vector<double> lambda_grid(double lambda_max, std::size_t steps);
/// Uniform grid from lambda_min to lambda_max inclusive (steps >= 2 points).
std::vector<double> lambda_grid(double lambda_min, double lambda_max, std::size_t steps);

/// Solution at an arbitrary lambda using the sweep's shared permutation.
EquilibriumSolution solve_at(const SweepResult& sweep, double lambda);

/// Lambdas where the set of trading ranks changes, located by bisection to
/// `tolerance` inside each grid interval where the set differs. Ranks that
/// switch off at the same lambda (within tolerance) give one kink.
std::vector<double> kink_points(const SweepResult& sweep, double tolerance = 1e-8);

/// Largest |S0_{k+1} - 2 S0_k + S0_{k-1}| over interior grid points whose
/// neighbourhood [lambda_{k-1}, lambda_{k+1}] contains no kink. Meaningful on
/// a uniform lambda grid.
double max_second_difference(const SweepResult& sweep, std::span<const double> kinks);

struct SlopeEntry {
  int regime = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
  /// d/dt [mu / kappa] on the regime, at its midpoint.
  double slope = 0.0;
};

/// One entry per regime j = 0..I-1 (empty regimes included, so tables for
/// different lambdas align index by index). Throws UnsupportedError when
/// gamma is not differentiable.
std::vector<SlopeEntry> slope_table(const EquilibriumSolution& solution);

}  // namespace radner
