#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "radner/errors.hpp"
#include "radner/ranking.hpp"
#include "reference.hpp"

using namespace radner;
using namespace radner::testing;

namespace {

std::vector<AgentSpec> agents_of(const std::vector<double>& targets) {
  std::vector<AgentSpec> agents;
  for (double t : targets) agents.push_back({t, 0.0});
  return agents;
}

// Two-level scan: locate the first coarse grid point with |expr| <= lambda,
// then rescan the preceding cell finely. Resolution T / (coarse * fine).
double scan_eta(const std::function<double(double)>& expr, double lambda, double horizon) {
  constexpr int coarse = 20000;
  constexpr int fine = 20000;
  for (int i = 0; i <= coarse; ++i) {
    const double t = horizon * i / coarse;
    if (std::abs(expr(t)) > lambda) continue;
    if (i == 0) return 0.0;
    const double lo = horizon * (i - 1) / coarse;
    for (int k = 1; k <= fine; ++k) {
      const double s = lo + (t - lo) * k / fine;
      if (std::abs(expr(s)) <= lambda) return s;
    }
    return t;
  }
  return horizon;
}

const TrajectoryModel kModel = TrajectoryModel::twap(1.0, 0.1);

}  // namespace

TEST_CASE("eta_base examples") {
  CHECK(eta_base(5.0, 5.0, 0.3, kModel) == 0.0);
  const double eta = eta_base(-300.0, 290.0, 0.2, kModel);
  CHECK(eta == doctest::Approx(0.8835556).epsilon(1e-7));
  CHECK(std::abs(eta - (1.0 - std::sqrt(0.2 / 295.0 / 0.05))) < 1e-14);
  CHECK(eta_base(1.0, -1.0, 0.0125, kModel) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("base_case picks the extreme pair") {
  const auto a3 = relative_targets(agents_of(kReferenceTargets));
  const auto pair = base_case(a3, 0.2, kModel);
  CHECK(std::min(pair.first, pair.second) == 0);
  CHECK(std::max(pair.first, pair.second) == 19);

  const std::vector<double> equal(5, 3.0);
  const auto flat = base_case(equal, 0.1, kModel);
  CHECK(flat.first == 0);
  CHECK(flat.second == 1);
  CHECK(flat.tau == 0.0);

  const std::vector<double> sym{-1.0, 0.0, 1.0};
  const auto p = base_case(sym, 0.0125, kModel);
  CHECK(((p.first == 0 && p.second == 2) || (p.first == 2 && p.second == 0)));
  CHECK(p.tau == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(base_case(std::vector<double>{1.0}, 0.1, kModel), SpecError);
}

TEST_CASE("eta_step trivial cases and preconditions") {
  CHECK(eta_step(0.0, 1, 3, 0.0, 0.0, 0.05, kModel, 0.5) == 0.0);
  CHECK_THROWS_AS(eta_step(1.0, 1, 4, 0.0, 0.2, 0.2, kModel, 0.5), InternalError);
  CHECK_THROWS_AS(eta_step(1.0, 3, 4, 0.0, 0.0, 0.2, kModel, 0.5), DomainError);
  CHECK_THROWS_AS(eta_step(1.0, 0, 4, 0.0, 0.0, 0.2, kModel, 0.5), DomainError);
}

TEST_CASE("four-agent induction step agrees with the brute-force scan") {
  const auto agents = agents_of({-2.0, -1.0, 1.0, 2.0});
  const double lambda = 0.01;
  const auto o = build_ordering(agents, lambda, kModel);
  // Base: |(-2) - 2| / 2 F(t) = lambda  =>  (1 - t)^2 = 0.1.
  CHECK(o.tau[4] == doctest::Approx(1.0 - std::sqrt(0.1)).epsilon(1e-14));
  CHECK(o.a_sigma_geq[3] == doctest::Approx(0.0));

  // Candidate a_i = -1 at rank 2, scanned without the constant-tail reduction.
  const double step = eta_step(-1.0, 2, 4, o.a_sigma_geq[3], 0.0, lambda, kModel, o.tau[3]);
  const double scanned =
      scan_eta([&](double t) { return eta_full_expression(-1.0, 2, o, kModel, t); }, lambda, 1.0);
  CHECK(std::abs(step - scanned) < 1e-6);
  CHECK(step == doctest::Approx(1.0 - std::sqrt(0.2)).epsilon(1e-12));
  CHECK(o.tau[2] == doctest::Approx(step).epsilon(1e-14));
}

TEST_CASE("full expression edge values") {
  const auto o = build_ordering(agents_of({-1.0, 0.0, 1.0}), 0.0125, kModel);
  CHECK(eta_full_expression(0.0, 1, o, kModel, 0.0) == 0.0);
  CHECK(eta_full_expression(0.7, 1, o, kModel, 1.0) == 0.0);
  CHECK_THROWS_AS(eta_full_expression(0.0, 2, o, kModel, 0.0), DomainError);
}

TEST_CASE("twenty-agent ordering") {
  const auto agents = agents_of(kReferenceTargets);
  const auto o = build_ordering(agents, 0.2, kModel);
  const int I = 20;
  CHECK(std::min(o.agent[19], o.agent[20]) == 0);
  CHECK(std::max(o.agent[19], o.agent[20]) == 19);
  CHECK(o.tau[19] == o.tau[20]);
  CHECK(o.agent[1] == 9);  // agent 10, target 0
  CHECK(o.tau[1] == 0.0);
  CHECK_FALSE(o.c[1].has_value());

  // The first induction step solves |expression| = lambda exactly at its stop time.
  CHECK(std::abs(std::abs(eta_full_expression(o.a[18], 18, o, kModel, o.tau[18])) - 0.2) < 1e-9);
  CHECK(std::abs(std::abs(*o.c[18]) - 2.0 / 3.0) < 1e-15);
  CHECK(*o.c[19] == (o.A[19] > 0 ? 1.0 : -1.0));
  CHECK(*o.c[20] == -*o.c[19]);

  for (int j = 1; j < I; ++j) CHECK(o.tau[j] <= o.tau[j + 1]);
  for (int j = 1; j <= I; ++j) {
    if (o.tau[j] > 0.0) CHECK(std::abs(o.A[j] * kModel.capital_f(o.tau[j]) - *o.c[j] * 0.2) <= 1e-9 * 0.2);
  }
}

TEST_CASE("every induction step is the brute-force argmax") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 6; ++trial) {
    const auto s = random_scenario(rng, 3, 7);
    const auto agents = agents_of(s.targets);
    const auto o = build_ordering(agents, s.lambda, kModel);
    const int I = o.num_agents;
    for (int j = I - 2; j >= 1; --j) {
      // Reference: the scanned inf for every candidate still unranked at step j.
      double best = 0.0;
      for (int k = 1; k <= j; ++k) {
        const double a_k = o.a[k];
        best = std::max(best, scan_eta([&](double t) { return eta_full_expression(a_k, j, o, kModel, t); },
                                       s.lambda, 1.0));
      }
      CHECK(std::abs(o.tau[j] - best) < 1e-6);
    }
  }
}

TEST_CASE("hand-computed three-agent ordering") {
  const auto o = build_ordering(agents_of({-1.0, 0.0, 1.0}), 0.0125, kModel);
  CHECK(o.agent[1] == 1);
  CHECK(o.tau[1] == 0.0);
  CHECK(o.tau[2] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(o.tau[3] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(o.A[1] == 0.0);
  CHECK(std::abs(o.A[2]) == doctest::Approx(1.0));
  CHECK(o.A[3] == -o.A[2]);
}

TEST_CASE("equal targets and the two-agent market") {
  const auto flat = build_ordering(agents_of({4.0, 4.0, 4.0, 4.0}), 0.1, kModel);
  for (int j = 1; j <= 4; ++j) {
    CHECK(flat.tau[j] == 0.0);
    CHECK_FALSE(flat.c[j].has_value());
  }
  const auto two = build_ordering(agents_of({1.0, -1.0}), 0.025, kModel);
  CHECK(two.tau[1] == doctest::Approx(1.0 - std::sqrt(0.5)).epsilon(1e-14));
  CHECK(two.tau[1] == two.tau[2]);
}

TEST_CASE("invalid ordering inputs") {
  CHECK_THROWS_AS(build_ordering(agents_of({1.0}), 0.1, kModel), SpecError);
  CHECK_THROWS_AS(build_ordering(agents_of({1.0, 2.0}), 0.0, kModel), SpecError);
  CHECK_THROWS_AS(build_ordering(agents_of({1.0, std::numeric_limits<double>::quiet_NaN()}), 0.1, kModel),
                  SpecError);
  CHECK_THROWS_AS(fast_rank(std::vector<double>{1.0}), SpecError);
}

TEST_CASE("fast_rank examples") {
  const auto sym = fast_rank(std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(sym[0] == 1);

  const auto a3 = relative_targets(agents_of(kReferenceTargets));
  const auto perm = fast_rank(a3);
  for (double lambda : {0.1, 0.2}) {
    const auto o = build_ordering(agents_of(kReferenceTargets), lambda, kModel);
    CHECK(o.permutation() == perm);
  }

  const std::vector<double> equal(4, 2.0);
  const auto p = fast_rank(equal);
  CHECK(same_up_to_ties(build_ordering(agents_of(equal), 0.1, kModel), p));
}

TEST_CASE("ordering is lambda invariant and scale invariant") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = random_scenario(rng);
    const auto agents = agents_of(s.targets);
    const auto perm = fast_rank(relative_targets(agents));
    for (double lambda : {1e-3, s.lambda, 0.5, 5.0}) {
      const auto o = build_ordering(agents, lambda, kModel);
      CHECK(same_up_to_ties(o, perm));
      CHECK(o.permutation() == perm);
      CHECK(build_ordering(agents, lambda, kModel, TieBreak::lowest_index).tau == o.tau);
    }
    std::vector<double> scaled;
    for (double t : s.targets) scaled.push_back(3.7 * t);
    CHECK(fast_rank(scaled) == perm);
  }
}

TEST_CASE("tie-break rules change only the representative") {
  const auto agents = agents_of({-5.0, 2.0, 2.0, 2.0, 7.0, -5.0});
  for (double lambda : {0.01, 0.1}) {
    const auto lo = build_ordering(agents, lambda, kModel, TieBreak::lowest_index);
    const auto hi = build_ordering(agents, lambda, kModel, TieBreak::highest_index);
    const auto canon = build_ordering(agents, lambda, kModel);
    CHECK(lo.tau == hi.tau);
    CHECK(canon.tau == lo.tau);
    CHECK(same_up_to_ties(lo, hi.permutation()));
    CHECK(lo.permutation() != hi.permutation());
  }
}

TEST_CASE("fixed-permutation rebuild reproduces the induction") {
  const auto agents = agents_of(kReferenceTargets);
  const auto perm = fast_rank(relative_targets(agents));
  for (double lambda : {0.05, 0.2, 1.3}) {
    const auto direct = build_ordering(agents, lambda, kModel);
    const auto rebuilt = ordering_from_permutation(agents, perm, lambda, kModel);
    for (int j = 1; j <= 20; ++j) {
      CHECK(rebuilt.tau[j] == direct.tau[j]);
      CHECK(rebuilt.c[j] == direct.c[j]);
    }
  }
  const std::vector<std::size_t> bad{0, 0, 1};
  CHECK_THROWS_AS(ordering_from_permutation(agents_of({1.0, 2.0, 3.0}), bad, 0.1, kModel), SpecError);
}

TEST_CASE("tail constants agree with direct F evaluation") {
  const auto o = build_ordering(agents_of(kReferenceTargets), 0.1, kModel);
  for (int j = 1; j <= 18; ++j) {
    CHECK(std::abs(o.tail_const[j] - o.tail_const_direct[j]) < 1e-12);
    CHECK(std::abs(o.tail_const[j]) < 0.1);
  }
}

TEST_CASE("same_up_to_ties") {
  const auto o = build_ordering(agents_of({1.0, 1.0, -3.0, 5.0}), 0.05, kModel);
  auto perm = o.permutation();
  CHECK(same_up_to_ties(o, perm));
  std::swap(perm[2], perm[3]);  // ranks 3 and 4 always share a stop time
  CHECK(same_up_to_ties(o, perm));
  std::swap(perm[0], perm[3]);
  CHECK_FALSE(same_up_to_ties(o, perm));
}
