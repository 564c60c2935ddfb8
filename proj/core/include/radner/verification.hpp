#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "radner/equilibrium.hpp"

namespace radner {

struct CheckResult {
  std::string name;
  double max_violation = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  /// nullptr when no check has this name.
  const CheckResult* find(const std::string& name) const;
};

inline constexpr std::size_t kDefaultGridSize = 2001;

/// grid_size uniform points on [0, T] with every breakpoint inserted.
std::vector<double> evaluation_grid(const EquilibriumSolution& solution, std::size_t grid_size = kDefaultGridSize);

/// Integration nodes: model knots, breakpoints and the interval ends,
/// restricted to [t0, t1]. Between neighbours every equilibrium quantity is
/// polynomial in t, so Simpson's rule per piece is exact up to round-off.
std::vector<double> integration_breaks(const EquilibriumSolution& solution, double t0, double t1);

/// Composite Simpson over the integration breaks with `panels` panels per piece.
template <class F>
double integrate(const EquilibriumSolution& solution, double t0, double t1, F&& f, int panels = 4) {
  const auto breaks = integration_breaks(solution, t0, t1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double h = (breaks[i + 1] - breaks[i]) / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = breaks[i] + p * h;
      const double b = p + 1 == panels ? breaks[i + 1] : a + h;
      total += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
    }
  }
  return total;
}

// Individual checks; names match the report entries.
CheckResult check_tau_ordering(const EquilibriumSolution& solution);
CheckResult check_foc_bound(const EquilibriumSolution& solution, const std::vector<double>& grid);
CheckResult check_market_clearing(const EquilibriumSolution& solution, const std::vector<double>& grid);
CheckResult check_monotonicity(const EquilibriumSolution& solution, const std::vector<double>& grid);
CheckResult check_drift_continuity(const EquilibriumSolution& solution);
CheckResult check_foc_representation(const EquilibriumSolution& solution, int samples_per_rank = 20);
CheckResult check_reflection(const EquilibriumSolution& solution, const std::vector<double>& grid);
CheckResult check_sum_identity(const EquilibriumSolution& solution);
CheckResult check_c_identity(const EquilibriumSolution& solution);
CheckResult check_tail_constants(const EquilibriumSolution& solution);
CheckResult check_sign_lemma(const EquilibriumSolution& solution, const std::vector<double>& grid);
CheckResult check_terminal_foc(const EquilibriumSolution& solution);
CheckResult check_initial_price(const EquilibriumSolution& solution);

/// Runs every check above. Failures are report entries, never exceptions.
VerificationReport run_all_checks(const EquilibriumSolution& solution, std::size_t grid_size = kDefaultGridSize);

}  // namespace radner
