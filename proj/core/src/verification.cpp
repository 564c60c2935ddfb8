#include "radner/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace radner {

namespace {

CheckResult make(std::string name, double violation, double threshold) {
  return {std::move(name), violation, threshold, violation <= threshold};
}

double max_abs_target(const EquilibriumSolution& s) {
  double m = 0.0;
  for (int j = 1; j <= s.num_agents(); ++j) m = std::max(m, std::abs(s.ordering().a[static_cast<std::size_t>(j)]));
  return m;
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void insert_sorted(std::vector<double>& grid, double t, double tol) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), t);
  if (it != grid.end() && std::abs(*it - t) <= tol) return;
  if (it != grid.begin() && std::abs(*(it - 1) - t) <= tol) return;
  grid.insert(it, t);
}

}  // namespace

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<double> evaluation_grid(const EquilibriumSolution& solution, std::size_t grid_size) {
  const double T = solution.horizon();
  const std::size_t n = std::max<std::size_t>(grid_size, 2);
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = T * static_cast<double>(i) / static_cast<double>(n - 1);
  grid.back() = T;
  for (double b : solution.breakpoints()) insert_sorted(grid, b, 0.0);
  return grid;
}

std::vector<double> integration_breaks(const EquilibriumSolution& solution, double t0, double t1) {
  std::vector<double> breaks{t0, t1};
  for (double k : solution.model().knots()) {
    if (k > t0 && k < t1) breaks.push_back(k);
  }
  for (double b : solution.breakpoints()) {
    if (b > t0 && b < t1) breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return breaks;
}

CheckResult check_tau_ordering(const EquilibriumSolution& solution) {
  const auto& tau = solution.ordering().tau;
  const int I = solution.num_agents();
  double violation = std::max(0.0, -tau[1]);
  for (int j = 1; j < I; ++j) {
    violation = std::max(violation, tau[static_cast<std::size_t>(j)] - tau[static_cast<std::size_t>(j + 1)]);
  }
  const auto top = static_cast<std::size_t>(I);
  violation = std::max(violation, std::abs(tau[top - 1] - tau[top]));
  if (tau[top] >= solution.horizon()) violation = std::max(violation, tau[top] - solution.horizon() + 1.0);
  return make("tau_ordering", violation, 0.0);
}

CheckResult check_foc_bound(const EquilibriumSolution& solution, const std::vector<double>& grid) {
  double violation = 0.0;
  for (int j = 1; j <= solution.num_agents(); ++j) {
    for (double t : grid) {
      violation = std::max(violation, std::abs(solution.foc_process(j, t)) - solution.lambda());
    }
  }
  return make("foc_bound", std::max(0.0, violation), 1e-9);
}

CheckResult check_market_clearing(const EquilibriumSolution& solution, const std::vector<double>& grid) {
  const double n = solution.spec().supply;
  double violation = 0.0;
  for (double t : grid) {
    double total = 0.0;
    for (int j = 1; j <= solution.num_agents(); ++j) total += solution.strategy(j, t);
    violation = std::max(violation, std::abs(total - n));
  }
  return make("market_clearing", violation, 1e-9 * (1.0 + std::abs(n) + max_abs_target(solution)));
}

CheckResult check_monotonicity(const EquilibriumSolution& solution, const std::vector<double>& grid) {
  double violation = 0.0;
  for (int j = 1; j <= solution.num_agents(); ++j) {
    const double A = solution.ordering().A[static_cast<std::size_t>(j)];
    double previous = solution.strategy(j, grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double current = solution.strategy(j, grid[i]);
      const double step = current - previous;
      if (A >= 0.0) violation = std::max(violation, -step);
      if (A <= 0.0) violation = std::max(violation, step);
      previous = current;
    }
  }
  return make("monotonicity", std::max(0.0, violation), 1e-10);
}

CheckResult check_drift_continuity(const EquilibriumSolution& solution) {
  const auto& tau = solution.ordering().tau;
  const int I = solution.num_agents();
  double violation = 0.0;
  for (double b : solution.breakpoints()) {
    if (b <= 0.0) continue;
    int left = 0;
    for (int k = 1; k <= I - 1; ++k) {
      if (tau[static_cast<std::size_t>(k)] < b) ++left;
    }
    const int right = solution.regime_at(b);
    violation = std::max(violation, std::abs(solution.drift_over_kappa_in_regime(left, b) -
                                             solution.drift_over_kappa_in_regime(right, b)));
  }
  return make("drift_continuity", violation, 1e-9);
}

CheckResult check_foc_representation(const EquilibriumSolution& solution, int samples_per_rank) {
  const double T = solution.horizon();
  const auto& o = solution.ordering();
  const auto& model = solution.model();
  double violation = 0.0;
  for (int j = 1; j <= solution.num_agents(); ++j) {
    const auto r = static_cast<std::size_t>(j);
    for (int m = 0; m < samples_per_rank; ++m) {
      const double t = T * static_cast<double>(m) / static_cast<double>(samples_per_rank);
      const double rep = integrate(solution, t, T, [&](double u) {
        return model.kappa(u) * (solution.drift_over_kappa(u) + model.gamma(u) * o.a[r] + o.endowment[r] -
                                 solution.strategy(j, u));
      });
      violation = std::max(violation, std::abs(rep - solution.foc_process(j, t)));
    }
  }
  return make("foc_representation", violation, 1e-7);
}

CheckResult check_reflection(const EquilibriumSolution& solution, const std::vector<double>& grid) {
  const double lambda = solution.lambda();
  double violation = 0.0;
  for (int j = 1; j <= solution.num_agents(); ++j) {
    const double a = solution.ordering().a[static_cast<std::size_t>(j)];
    const double moving = 1e-10 * (1.0 + std::abs(a));
    double previous = solution.strategy(j, grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double current = solution.strategy(j, grid[i]);
      const double step = current - previous;
      previous = current;
      if (std::abs(step) <= moving) continue;
      const double level = step > 0.0 ? lambda : -lambda;
      violation = std::max({violation, std::abs(solution.foc_process(j, grid[i - 1]) - level),
                            std::abs(solution.foc_process(j, grid[i]) - level)});
    }
  }
  return make("reflection", violation, 1e-8);
}

CheckResult check_sum_identity(const EquilibriumSolution& solution) {
  const auto& o = solution.ordering();
  const int I = solution.num_agents();
  double violation = 0.0;
  for (int j = 1; j <= I - 2; ++j) {
    for (int m = 0; m <= I - j - 2; ++m) {
      double lhs = static_cast<double>(I - j + 1) / static_cast<double>(I - j) * o.A[static_cast<std::size_t>(j)];
      for (int k = j + 1; k <= j + m; ++k) lhs += o.A[static_cast<std::size_t>(k)] / static_cast<double>(I - k);
      const double rhs = o.a[static_cast<std::size_t>(j)] -
                         o.a_sigma_geq[static_cast<std::size_t>(j + m + 1)] / static_cast<double>(I - j - m);
      violation = std::max(violation, std::abs(lhs - rhs));
    }
  }
  return make("sum_identity", violation, 1e-12 * (1.0 + max_abs_target(solution)));
}

CheckResult check_c_identity(const EquilibriumSolution& solution) {
  const auto& o = solution.ordering();
  const auto& model = solution.model();
  double violation = 0.0;
  for (int j = 1; j <= solution.num_agents(); ++j) {
    const auto r = static_cast<std::size_t>(j);
    if (o.tau[r] > 0.0) {
      if (!o.c[r]) return make("c_identity", std::numeric_limits<double>::infinity(), 1e-9 * solution.lambda());
      violation = std::max(violation, std::abs(o.A[r] * model.capital_f(o.tau[r]) - *o.c[r] * solution.lambda()));
    }
  }
  return make("c_identity", violation, 1e-9 * solution.lambda());
}

CheckResult check_tail_constants(const EquilibriumSolution& solution) {
  const auto& o = solution.ordering();
  double violation = 0.0;
  for (int j = 1; j <= solution.num_agents() - 2; ++j) {
    const auto r = static_cast<std::size_t>(j);
    if (o.tau[r + 1] > 0.0) violation = std::max(violation, std::abs(o.tail_const[r] - o.tail_const_direct[r]));
  }
  return make("tail_constants", violation, 1e-9 * solution.lambda());
}

CheckResult check_sign_lemma(const EquilibriumSolution& solution, const std::vector<double>& grid) {
  const auto& o = solution.ordering();
  const double lambda = solution.lambda();
  const double tol = 1e-9 * (1.0 + max_abs_target(solution));
  double violation = 0.0;
  for (int j = 1; j <= solution.num_agents() - 1; ++j) {
    const auto r = static_cast<std::size_t>(j);
    if (o.tau[r] <= 0.0) continue;
    const double s = sign(o.A[r]);
    for (int i = 1; i < j; ++i) {
      // A >= 0: a^(j) >= a^(i); A <= 0: a^(j) <= a^(i)
      const double excess = s * (o.a[static_cast<std::size_t>(i)] - o.a[r]);
      violation = std::max(violation, excess > tol ? lambda + excess : 0.0);
    }
    for (double t : grid) {
      if (t > o.tau[r]) break;
      violation = std::max(violation, std::abs(solution.foc_process(j, t) - s * lambda));
    }
  }
  return make("sign_lemma", violation, 1e-9);
}

CheckResult check_terminal_foc(const EquilibriumSolution& solution) {
  double violation = 0.0;
  for (int j = 1; j <= solution.num_agents(); ++j) {
    violation = std::max(violation, std::abs(solution.foc_process(j, solution.horizon())));
  }
  return make("terminal_foc", violation, 1e-12);
}

CheckResult check_initial_price(const EquilibriumSolution& solution) {
  const double integral =
      integrate(solution, 0.0, solution.horizon(), [&](double u) { return solution.drift(u); });
  const double expected = solution.spec().dividend_mean - integral;
  return make("initial_price", std::abs(solution.initial_price() - expected),
              1e-8 * (1.0 + std::abs(solution.spec().dividend_mean)));
}

VerificationReport run_all_checks(const EquilibriumSolution& solution, std::size_t grid_size) {
  const auto grid = evaluation_grid(solution, grid_size);
  VerificationReport report;
  report.checks.push_back(check_tau_ordering(solution));
  report.checks.push_back(check_foc_bound(solution, grid));
  report.checks.push_back(check_market_clearing(solution, grid));
  report.checks.push_back(check_monotonicity(solution, grid));
  report.checks.push_back(check_drift_continuity(solution));
  report.checks.push_back(check_foc_representation(solution));
  report.checks.push_back(check_reflection(solution, grid));
  report.checks.push_back(check_sum_identity(solution));
  report.checks.push_back(check_c_identity(solution));
  report.checks.push_back(check_tail_constants(solution));
  report.checks.push_back(check_sign_lemma(solution, grid));
  report.checks.push_back(check_terminal_foc(solution));
  report.checks.push_back(check_initial_price(solution));
  return report;
}

}  // namespace radner
