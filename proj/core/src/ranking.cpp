#include "radner/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "radner/errors.hpp"

namespace radner {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void validate_inputs(std::span<const AgentSpec> agents, double lambda) {
  if (agents.size() < 2) throw SpecError("at least 2 agents are required");
  if (!std::isfinite(lambda) || lambda <= 0.0) throw SpecError("lambda must be finite and positive");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (!std::isfinite(agents[i].target) || !std::isfinite(agents[i].endowment)) {
      throw SpecError("agent " + std::to_string(i + 1) + " has a non-finite target or endowment");
    }
  }
}

RankOrdering empty_ordering(int num_agents, double lambda) {
  const auto n = static_cast<std::size_t>(num_agents) + 1;
  RankOrdering o;
  o.num_agents = num_agents;
  o.lambda = lambda;
  o.agent.assign(n, 0);
  o.a.assign(n, 0.0);
  o.endowment.assign(n, 0.0);
  o.a_sigma_geq.assign(n, 0.0);
  o.A.assign(n, 0.0);
  o.tau.assign(n, 0.0);
  o.c.assign(n, std::nullopt);
  o.tail_const.assign(n, 0.0);
  o.tail_const_direct.assign(n, 0.0);
  return o;
}

// Ranks I-1 and I.
void place_base_pair(RankOrdering& o, std::span<const AgentSpec> agents, std::size_t first, std::size_t second,
                     double tau) {
  const int I = o.num_agents;
  const auto top = static_cast<std::size_t>(I);
  o.agent[top - 1] = first;
  o.agent[top] = second;
  o.a[top - 1] = agents[first].relative_target();
  o.a[top] = agents[second].relative_target();
  o.endowment[top - 1] = agents[first].endowment;
  o.endowment[top] = agents[second].endowment;
  o.a_sigma_geq[top - 1] = o.a[top - 1] + o.a[top];
  o.a_sigma_geq[top] = o.a[top];
  o.A[top - 1] = o.a[top - 1] - 0.5 * o.a_sigma_geq[top - 1];
  o.A[top] = -o.A[top - 1];
  o.tau[top - 1] = tau;
  o.tau[top] = tau;
  if (tau > 0.0) {
    o.c[top - 1] = sign(o.A[top - 1]);
    o.c[top] = -*o.c[top - 1];
  }
}

void place_rank(RankOrdering& o, int j, std::size_t agent, const AgentSpec& spec, double tau) {
  const int I = o.num_agents;
  const auto r = static_cast<std::size_t>(j);
  o.agent[r] = agent;
  o.a[r] = spec.relative_target();
  o.endowment[r] = spec.endowment;
  o.a_sigma_geq[r] = o.a[r] + o.a_sigma_geq[r + 1];
  o.A[r] = o.a[r] - o.a_sigma_geq[r] / static_cast<double>(I - j + 1);
  o.tau[r] = tau;
}

// sum_{k=j+1}^{I-2} c_k / (I-k); c_k taken from `c` (all present by construction).
double tail_sum(const std::vector<double>& c, int j, int I) {
  double s = 0.0;
  for (int k = j + 1; k <= I - 2; ++k) s += c[static_cast<std::size_t>(k)] / static_cast<double>(I - k);
  return s;
}

// c_j = (I-j)/(I-j+1) (sign(A^(j)) - sum_{k>j} c_k/(I-k))
double next_c(double A_j, double tail, int j, int I) {
  return static_cast<double>(I - j) / static_cast<double>(I - j + 1) * (sign(A_j) - tail);
}

struct Candidate {
  std::size_t index;
  double eta;
  double score;
};

// Picks among candidates (sorted by index) following the tie-break rule.
std::size_t select(const std::vector<Candidate>& cands, TieBreak tie_break) {
  double max_eta = -std::numeric_limits<double>::infinity();
  for (const auto& c : cands) max_eta = std::max(max_eta, c.eta);
  const double eta_tol = kTieTolerance * (1.0 + std::abs(max_eta));
  std::vector<const Candidate*> tied;
  for (const auto& c : cands) {
    if (c.eta >= max_eta - eta_tol) tied.push_back(&c);
  }
  switch (tie_break) {
    case TieBreak::lowest_index:
      return tied.front()->index;
    case TieBreak::highest_index:
      return tied.back()->index;
    case TieBreak::canonical:
      break;
  }
  double max_score = -std::numeric_limits<double>::infinity();
  for (const auto* c : tied) max_score = std::max(max_score, c->score);
  const double score_tol = kTieTolerance * (1.0 + std::abs(max_score));
  for (const auto* c : tied) {
    if (c->score >= max_score - score_tol) return c->index;
  }
  return tied.front()->index;
}

}  // namespace

std::vector<double> relative_targets(std::span<const AgentSpec> agents) {
  std::vector<double> a(agents.size());
  std::transform(agents.begin(), agents.end(), a.begin(), [](const AgentSpec& s) { return s.relative_target(); });
  return a;
}

std::vector<std::size_t> RankOrdering::permutation() const {
  return {agent.begin() + 1, agent.end()};
}

std::vector<int> RankOrdering::rank_of_agent() const {
  std::vector<int> rank(static_cast<std::size_t>(num_agents), 0);
  for (int j = 1; j <= num_agents; ++j) rank[agent[static_cast<std::size_t>(j)]] = j;
  return rank;
}

double eta_base(double a_i, double a_l, double lambda, const TrajectoryModel& model) {
  const double coefficient = std::abs(a_i - a_l) / 2.0;
  if (coefficient == 0.0) return 0.0;
  return model.invert_f(lambda / coefficient);
}

BasePair base_case(std::span<const double> a, double lambda, const TrajectoryModel& model, TieBreak tie_break) {
  if (a.size() < 2) throw SpecError("at least 2 agents are required");
  // Ordered pairs (i, l) encoded as i * I + l keep lexicographic order.
  const std::size_t I = a.size();
  std::vector<Candidate> pairs;
  pairs.reserve(I * (I - 1));
  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t l = 0; l < I; ++l) {
      if (i == l) continue;
      pairs.push_back({i * I + l, eta_base(a[i], a[l], lambda, model), std::abs(a[i] - a[l]) / 2.0});
    }
  }
  const std::size_t code = select(pairs, tie_break);
  const std::size_t first = code / I;
  const std::size_t second = code % I;
  return {first, second, eta_base(a[first], a[second], lambda, model)};
}

double eta_step(double a_i, int rank, int num_agents, double a_sigma_tail, double tail_const, double lambda,
                const TrajectoryModel& model, double t_cap) {
  if (rank < 1 || rank > num_agents - 2) throw DomainError("eta_step: rank outside 1..I-2");
  if (std::abs(tail_const) >= lambda) {
    throw InternalError("eta_step: tail constant " + std::to_string(tail_const) + " not below lambda");
  }
  const double b = a_i - a_sigma_tail / static_cast<double>(num_agents - rank);
  const double f0 = model.capital_f(0.0);
  double eta = 0.0;
  if (b > 0.0 && b * f0 + tail_const > lambda) {
    eta = model.invert_f((lambda - tail_const) / b);
  } else if (b < 0.0 && b * f0 + tail_const < -lambda) {
    eta = model.invert_f((lambda + tail_const) / -b);
  }
  if (eta > t_cap) {
    // Guaranteed mathematically; allow for inversion round-off only.
    if (eta - t_cap > 1e-9 * model.horizon()) {
      throw InternalError("eta_step: stop time " + std::to_string(eta) + " exceeds tau^(j+1) = " +
                          std::to_string(t_cap));
    }
    eta = t_cap;
  }
  return eta;
}

double eta_full_expression(double a_i, int rank, const RankOrdering& ordering, const TrajectoryModel& model,
                           double t) {
  const int I = ordering.num_agents;
  const int j = rank;
  if (j < 1 || j > I - 2) throw DomainError("eta_full_expression: rank outside 1..I-2");
  const double a_tail = ordering.a_sigma_geq[static_cast<std::size_t>(j + 1)];
  const double n_active = static_cast<double>(I - j + 1);
  double value = n_active / static_cast<double>(I - j) * (a_i - (a_i + a_tail) / n_active) * model.capital_f(t);
  for (int k = j + 1; k <= I - 2; ++k) {
    const auto r = static_cast<std::size_t>(k);
    value += ordering.A[r] / static_cast<double>(I - k) * model.capital_f(std::max(t, ordering.tau[r]));
  }
  return value;
}

RankOrdering build_ordering(std::span<const AgentSpec> agents, double lambda, const TrajectoryModel& model,
                            TieBreak tie_break) {
  validate_inputs(agents, lambda);
  const int I = static_cast<int>(agents.size());
  const auto a = relative_targets(agents);
  const double f0 = model.capital_f(0.0);

  RankOrdering o = empty_ordering(I, lambda);
  const BasePair base = base_case(a, lambda, model, tie_break);
  place_base_pair(o, agents, base.first, base.second, base.tau);

  std::vector<bool> placed(agents.size(), false);
  placed[base.first] = placed[base.second] = true;

  // c recursion run regardless of tau; equals c wherever tau > 0 and feeds
  // the lambda-free tie-break score elsewhere.
  std::vector<double> virtual_c(static_cast<std::size_t>(I) + 1, 0.0);

  for (int j = I - 2; j >= 1; --j) {
    const auto r = static_cast<std::size_t>(j);
    const double t_cap = o.tau[r + 1];
    const double a_tail = o.a_sigma_geq[r + 1];

    double tail = 0.0;
    double tail_direct = 0.0;
    for (int k = j + 1; k <= I - 2; ++k) {
      const auto rk = static_cast<std::size_t>(k);
      const double weight = 1.0 / static_cast<double>(I - k);
      tail += weight * (o.c[rk] ? *o.c[rk] * lambda : o.A[rk] * f0);
      tail_direct += weight * o.A[rk] * model.capital_f(o.tau[rk]);
    }
    o.tail_const[r] = tail;
    o.tail_const_direct[r] = tail_direct;
    const double virtual_tail = tail_sum(virtual_c, j, I);

    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      if (placed[i]) continue;
      const double b = a[i] - a_tail / static_cast<double>(I - j);
      // Once a later rank stops at 0 every earlier one does too.
      const double eta = t_cap > 0.0 ? eta_step(a[i], j, I, a_tail, tail, lambda, model, t_cap) : 0.0;
      cands.push_back({i, eta, selection_score(b, virtual_tail)});
    }
    const std::size_t chosen = select(cands, tie_break);
    const double eta = std::find_if(cands.begin(), cands.end(), [&](const Candidate& c) {
                         return c.index == chosen;
                       })->eta;
    place_rank(o, j, chosen, agents[chosen], eta);
    placed[chosen] = true;

    virtual_c[r] = next_c(o.A[r], virtual_tail, j, I);
    if (eta > 0.0) o.c[r] = next_c(o.A[r], tail / lambda, j, I);
  }
  return o;
}

RankOrdering ordering_from_permutation(std::span<const AgentSpec> agents, std::span<const std::size_t> permutation,
                                       double lambda, const TrajectoryModel& model) {
  validate_inputs(agents, lambda);
  const int I = static_cast<int>(agents.size());
  if (permutation.size() != agents.size()) throw SpecError("permutation length differs from agent count");
  std::vector<bool> seen(agents.size(), false);
  for (std::size_t i : permutation) {
    if (i >= agents.size() || seen[i]) throw SpecError("not a permutation of the agents");
    seen[i] = true;
  }

  RankOrdering o = empty_ordering(I, lambda);
  const std::size_t first = permutation[agents.size() - 2];
  const std::size_t second = permutation[agents.size() - 1];
  place_base_pair(o, agents, first, second,
                  eta_base(agents[first].relative_target(), agents[second].relative_target(), lambda, model));

  const double f0 = model.capital_f(0.0);
  for (int j = I - 2; j >= 1; --j) {
    const auto r = static_cast<std::size_t>(j);
    double tail = 0.0;
    double tail_direct = 0.0;
    for (int k = j + 1; k <= I - 2; ++k) {
      const auto rk = static_cast<std::size_t>(k);
      const double weight = 1.0 / static_cast<double>(I - k);
      tail += weight * (o.c[rk] ? *o.c[rk] * lambda : o.A[rk] * f0);
      tail_direct += weight * o.A[rk] * model.capital_f(o.tau[rk]);
    }
    o.tail_const[r] = tail;
    o.tail_const_direct[r] = tail_direct;
    const std::size_t agent = permutation[r - 1];
    const double a_i = agents[agent].relative_target();
    const double eta =
        o.tau[r + 1] > 0.0 ? eta_step(a_i, j, I, o.a_sigma_geq[r + 1], tail, lambda, model, o.tau[r + 1]) : 0.0;
    place_rank(o, j, agent, agents[agent], eta);
    if (eta > 0.0) o.c[r] = next_c(o.A[r], tail / lambda, j, I);
  }
  return o;
}

double selection_score(double b, double tail_sum) {
  if (b > 0.0) return b / (1.0 - tail_sum);
  if (b < 0.0) return -b / (1.0 + tail_sum);
  return 0.0;
}

std::vector<std::size_t> fast_rank(std::span<const double> a) {
  if (a.size() < 2) throw SpecError("at least 2 agents are required");
  const int I = static_cast<int>(a.size());
  const std::size_t n = a.size();

  std::vector<Candidate> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      if (i != l) pairs.push_back({i * n + l, std::abs(a[i] - a[l]) / 2.0, 0.0});
    }
  }
  // Largest spread, lexicographically smallest pair.
  const std::size_t code = select(pairs, TieBreak::lowest_index);

  std::vector<std::size_t> order(n);
  order[n - 2] = code / n;
  order[n - 1] = code % n;
  std::vector<bool> placed(n, false);
  placed[order[n - 2]] = placed[order[n - 1]] = true;

  std::vector<double> c(n + 1, 0.0);
  double a_tail = a[order[n - 2]] + a[order[n - 1]];
  for (int j = I - 2; j >= 1; --j) {
    const double s = tail_sum(c, j, I);
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < n; ++i) {
      if (placed[i]) continue;
      const double b = a[i] - a_tail / static_cast<double>(I - j);
      cands.push_back({i, selection_score(b, s), 0.0});
    }
    const std::size_t chosen = select(cands, TieBreak::lowest_index);
    const auto r = static_cast<std::size_t>(j);
    order[r - 1] = chosen;
    placed[chosen] = true;
    a_tail += a[chosen];
    const double A_j = a[chosen] - a_tail / static_cast<double>(I - j + 1);
    c[r] = next_c(A_j, s, j, I);
  }
  return order;
}

bool same_up_to_ties(const RankOrdering& ordering, std::span<const std::size_t> permutation, double tolerance) {
  const int I = ordering.num_agents;
  if (permutation.size() != static_cast<std::size_t>(I)) return false;
  int start = 1;
  while (start <= I) {
    int end = start;
    while (end + 1 <= I &&
           std::abs(ordering.tau[static_cast<std::size_t>(end + 1)] - ordering.tau[static_cast<std::size_t>(start)]) <=
               tolerance) {
      ++end;
    }
    std::vector<std::size_t> lhs;
    std::vector<std::size_t> rhs;
    for (int j = start; j <= end; ++j) {
      lhs.push_back(ordering.agent[static_cast<std::size_t>(j)]);
      rhs.push_back(permutation[static_cast<std::size_t>(j - 1)]);
    }
    std::sort(lhs.begin(), lhs.end());
    std::sort(rhs.begin(), rhs.end());
    if (lhs != rhs) return false;
    start = end + 1;
  }
  return true;
}

}  // namespace radner
