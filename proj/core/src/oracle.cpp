#include "radner/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "radner/errors.hpp"
#include "radner/verification.hpp"

namespace radner {

namespace {

std::vector<double> trapezoid_weights(std::span<const double> times) {
  const std::size_t n = times.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = times[k + 1] - times[k];
    w[k] += 0.5 * h;
    w[k + 1] += 0.5 * h;
  }
  return w;
}

double soft_threshold(double z, double s) {
  if (z > s) return z - s;
  if (z < -s) return z + s;
  return 0.0;
}

// Data of the discrete problem: J = sum_k w_k (theta_k mu_k - kappa_k/2 (m_k - theta_k)^2) - lambda TV,
// rewritten per coordinate as -q_k/2 (theta_k - c_k)^2 + const.
struct Discretization {
  std::vector<double> w, mu, kappa, m, q, c;
  double lambda = 0.0;
  double theta0 = 0.0;

  Discretization(const AgentProblem& p, std::span<const double> times)
      : w(trapezoid_weights(times)), lambda(p.lambda), theta0(p.initial_position) {
    const std::size_t n = times.size();
    mu.resize(n);
    kappa.resize(n);
    m.resize(n);
    q.resize(n);
    c.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      mu[k] = p.drift(times[k]);
      kappa[k] = p.kappa(times[k]);
      m[k] = p.initial_position + p.gamma(times[k]) * p.relative_target;
      q[k] = w[k] * kappa[k];
      c[k] = m[k] + mu[k] / kappa[k];
    }
  }

  double objective(std::span<const double> theta) const {
    double smooth = 0.0;
    double tv = std::abs(theta[0] - theta0);
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const double gap = m[k] - theta[k];
      smooth += w[k] * (theta[k] * mu[k] - 0.5 * kappa[k] * gap * gap);
      if (k + 1 < theta.size()) tv += std::abs(theta[k + 1] - theta[k]);
    }
    return smooth - lambda * tv;
  }

  // One pass over the positions; each update maximizes over theta_k alone.
  void position_sweep(std::vector<double>& theta) const {
    const std::size_t n = theta.size();
    for (std::size_t k = 0; k < n; ++k) {
      const double left = k == 0 ? theta0 : theta[k - 1];
      if (k + 1 == n) {
        theta[k] = left + soft_threshold(c[k] - left, lambda / q[k]);
        continue;
      }
      const double lo = std::min(left, theta[k + 1]);
      const double hi = std::max(left, theta[k + 1]);
      const double up = c[k] - 2.0 * lambda / q[k];
      const double down = c[k] + 2.0 * lambda / q[k];
      if (up > hi) {
        theta[k] = up;
      } else if (down < lo) {
        theta[k] = down;
      } else {
        theta[k] = std::clamp(c[k], lo, hi);
      }
    }
  }

  // One pass over the increments d_k = theta_k - theta_{k-1}, k = N..0.
  // Changing d_k shifts the whole suffix theta_k..theta_N.
  void increment_sweep(std::vector<double>& theta, std::vector<double>& suffix_q) const {
    const std::size_t n = theta.size();
    double acc = 0.0;
    for (std::size_t k = n; k-- > 0;) {
      acc += q[k];
      suffix_q[k] = acc;
    }
    double gradient = 0.0;  // sum_{i>=k} q_i (c_i - theta_i), kept current
    std::vector<double>& shift = scratch_;
    shift.assign(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
      gradient += q[k] * (c[k] - theta[k]);
      const double d = theta[k] - (k == 0 ? theta0 : theta[k - 1]);
      const double updated = soft_threshold(d + gradient / suffix_q[k], lambda / suffix_q[k]);
      const double delta = updated - d;
      shift[k] = delta;
      gradient -= delta * suffix_q[k];
    }
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      total += shift[k];
      theta[k] += total;
    }
  }

  mutable std::vector<double> scratch_;
};

}  // namespace

double DiscreteStrategy::total_variation() const {
  if (positions.empty()) return 0.0;
  double tv = std::abs(positions.front() - initial_position);
  for (std::size_t k = 0; k + 1 < positions.size(); ++k) tv += std::abs(positions[k + 1] - positions[k]);
  return tv;
}

AgentProblem agent_problem(const EquilibriumSolution& solution, int rank) {
  if (rank < 1 || rank > solution.num_agents()) throw DomainError("rank out of range");
  const auto r = static_cast<std::size_t>(rank);
  const auto* s = &solution;
  AgentProblem p;
  p.lambda = solution.lambda();
  p.relative_target = solution.ordering().a[r];
  p.initial_position = solution.ordering().endowment[r];
  p.drift = [s](double t) { return s->drift(t); };
  p.kappa = [s](double t) { return s->model().kappa(t); };
  p.gamma = [s](double t) { return s->model().gamma(t); };
  return p;
}

double discrete_objective(const AgentProblem& problem, const DiscreteStrategy& strategy) {
  if (strategy.times.size() != strategy.positions.size() || strategy.times.size() < 2) {
    throw SpecError("strategy needs matching times and positions (at least 2)");
  }
  AgentProblem p = problem;
  p.initial_position = strategy.initial_position;
  return Discretization(p, strategy.times).objective(strategy.positions);
}

std::vector<double> oracle_grid(const EquilibriumSolution& solution, std::size_t N) {
  if (N < 1) throw SpecError("oracle grid needs N >= 1");
  const double T = solution.horizon();
  std::vector<double> grid(N + 1);
  for (std::size_t k = 0; k <= N; ++k) grid[k] = T * static_cast<double>(k) / static_cast<double>(N);
  grid.back() = T;
  for (double b : solution.breakpoints()) {
    if (b <= 0.0 || b >= T) continue;
    const auto it = std::lower_bound(grid.begin(), grid.end(), b);
    if (*it == b) continue;
    grid.insert(it, b);
  }
  return grid;
}

DiscreteStrategy sample_candidate(const EquilibriumSolution& solution, int rank, std::span<const double> times,
                                  std::optional<double> stop_time) {
  const double tau = stop_time ? std::clamp(*stop_time, 0.0, solution.horizon())
                               : solution.ordering().tau[static_cast<std::size_t>(rank)];
  DiscreteStrategy s;
  s.times.assign(times.begin(), times.end());
  s.initial_position = solution.ordering().endowment[static_cast<std::size_t>(rank)];
  s.positions.reserve(times.size());
  for (double t : times) s.positions.push_back(solution.strategy_with_stop(rank, t, tau));
  return s;
}

double continuous_objective(const EquilibriumSolution& solution, int rank, std::optional<double> stop_time) {
  const double T = solution.horizon();
  const auto r = static_cast<std::size_t>(rank);
  const double tau = stop_time ? std::clamp(*stop_time, 0.0, T) : solution.ordering().tau[r];
  const double a = solution.ordering().a[r];
  const double theta0 = solution.ordering().endowment[r];
  const auto& model = solution.model();
  auto integrand = [&](double t) {
    const double theta = solution.strategy_with_stop(rank, t, tau);
    const double gap = model.gamma(t) * a + theta0 - theta;
    return theta * solution.drift(t) - 0.5 * model.kappa(t) * gap * gap;
  };
  double smooth = integrate(solution, 0.0, tau, integrand) + integrate(solution, tau, T, integrand);
  // theta is monotone between consecutive breaks, so TV sums the piece increments.
  const auto breaks = integration_breaks(solution, 0.0, tau);
  double tv = std::abs(solution.strategy_with_stop(rank, 0.0, tau) - theta0);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    tv += std::abs(solution.strategy_with_stop(rank, breaks[i + 1], tau) -
                   solution.strategy_with_stop(rank, breaks[i], tau));
  }
  return smooth - solution.lambda() * tv;
}

OracleResult maximize(const AgentProblem& problem, std::span<const double> times,
                      std::optional<std::span<const double>> start, const OracleOptions& options) {
  if (times.size() < 2) throw SpecError("oracle grid needs at least 2 points");
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (!(times[k + 1] > times[k])) throw SpecError("oracle grid must be strictly increasing");
  }
  if (!(options.tolerance > 0.0 && options.tolerance <= 1e-10)) throw SpecError("oracle tolerance must be in (0, 1e-10]");
  if (start && start->size() != times.size()) throw SpecError("start strategy has the wrong length");

  const Discretization d(problem, times);
  std::vector<double> theta = start ? std::vector<double>(start->begin(), start->end())
                                    : std::vector<double>(times.size(), problem.initial_position);
  std::vector<double> suffix_q(times.size());

  OracleResult result;
  double previous = d.objective(theta);
  for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    d.position_sweep(theta);
    d.increment_sweep(theta, suffix_q);
    const double current = d.objective(theta);
    result.sweeps = sweep;
    if (std::abs(current - previous) <= options.tolerance * std::max(1.0, std::abs(current))) {
      result.converged = true;
      break;
    }
    previous = current;
  }
  result.objective = d.objective(theta);
  result.optimum.times.assign(times.begin(), times.end());
  result.optimum.positions = std::move(theta);
  result.optimum.initial_position = problem.initial_position;
  return result;
}

OptimalityCertificate deviation_oracle(const EquilibriumSolution& solution, int rank, std::size_t N,
                                       const OracleOptions& options, std::optional<double> stop_time) {
  if (N < 50) throw SpecError("deviation oracle needs N >= 50, got " + std::to_string(N));
  const AgentProblem problem = agent_problem(solution, rank);
  const auto times = oracle_grid(solution, N);
  const DiscreteStrategy candidate = sample_candidate(solution, rank, times, stop_time);
  const OracleResult best = maximize(problem, times, std::nullopt, options);

  OptimalityCertificate cert;
  cert.rank = rank;
  cert.N = N;
  cert.oracle_objective = best.objective;
  cert.candidate_objective = discrete_objective(problem, candidate);
  cert.gap = cert.oracle_objective - cert.candidate_objective;
  for (std::size_t k = 0; k < times.size(); ++k) {
    cert.max_deviation = std::max(cert.max_deviation, std::abs(best.optimum.positions[k] - candidate.positions[k]));
  }
  cert.allowance = 0.1 * solution.lambda() * solution.horizon() * std::max(1.0, std::abs(problem.relative_target)) /
                   static_cast<double>(N);
  cert.sweeps = best.sweeps;
  cert.converged = best.converged;
  return cert;
}

}  // namespace radner
