#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "radner/errors.hpp"
#include "radner/statics.hpp"
#include "reference.hpp"

using namespace radner;
using namespace radner::testing;

namespace {

const TrajectoryModel kModel = TrajectoryModel::twap(1.0, 0.1);

double scale_of(const SweepResult& sweep) {
  double m = 1.0;
  for (const auto& p : sweep.points) m = std::max(m, std::abs(p.s0));
  return m;
}

}  // namespace

TEST_CASE("antisymmetric market has flat S0 and one kink") {
  const auto grid = lambda_grid(0.1, 100);
  const auto sweep = lambda_sweep(make_spec({-1.0, 0.0, 1.0}, 0.1), kModel, grid);
  for (const auto& p : sweep.points) CHECK(p.s0 == 0.0);
  // Extremes stop at F^{-1}(lambda) and switch off once lambda reaches F(0) = kappa T / 2.
  const auto kinks = kink_points(sweep);
  REQUIRE(kinks.size() == 1);
  CHECK(kinks[0] == doctest::Approx(0.05).epsilon(1e-7));
  CHECK(max_second_difference(sweep, kinks) == 0.0);

  for (const auto& e : slope_table(solve_at(sweep, 0.02))) CHECK(e.slope == 0.0);
}

TEST_CASE("equal targets never trade") {
  const auto sweep = lambda_sweep(make_spec({5.0, 5.0, 5.0, 5.0}, 0.1), kModel, lambda_grid(1.0, 50));
  CHECK(kink_points(sweep).empty());
  for (const auto& p : sweep.points) CHECK(p.active_count == 0);
  CHECK(sweep.permutation_constant());
}

TEST_CASE("twenty-agent sweep") {
  const auto grid = lambda_grid(2.0, 200);
  const auto sweep = lambda_sweep(reference_spec(), kModel, grid);
  REQUIRE(sweep.points.size() == 200);
  CHECK(sweep.permutation_constant());
  CHECK(sweep.permutations.size() == 1);

  const auto kinks = kink_points(sweep);
  CHECK(!kinks.empty());
  CHECK(kinks.size() <= 19);
  CHECK(std::is_sorted(kinks.begin(), kinks.end()));
  CHECK(max_second_difference(sweep, kinks) <= 1e-9 * scale_of(sweep));

  // Stop times never increase with lambda; trading ranks only drop out.
  for (std::size_t k = 1; k < sweep.points.size(); ++k) {
    const auto& prev = sweep.points[k - 1];
    const auto& cur = sweep.points[k];
    CHECK(cur.active_count <= prev.active_count);
    for (std::size_t j = 1; j < cur.tau.size(); ++j) CHECK(cur.tau[j] <= prev.tau[j] + 1e-12);
  }
}

TEST_CASE("kinks separate different trading sets") {
  const auto sweep = lambda_sweep(reference_spec(), kModel, lambda_grid(2.0, 200));
  for (double k : kink_points(sweep)) {
    const auto below = solve_at(sweep, k - 1e-6).ordering();
    const auto above = solve_at(sweep, k + 1e-6).ordering();
    std::size_t on_below = 0;
    std::size_t on_above = 0;
    for (std::size_t j = 1; j < below.tau.size(); ++j) {
      on_below += below.tau[j] > 0.0;
      on_above += above.tau[j] > 0.0;
    }
    CHECK(on_above < on_below);
  }
}

TEST_CASE("sweep points match direct solves") {
  const std::vector<double> lambdas{0.03, 0.2, 0.55, 1.7};
  const auto sweep = lambda_sweep(reference_spec(), kModel, lambdas);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const auto direct = solve(reference_spec(lambdas[k]), kModel);
    const auto& p = sweep.points[k];
    CHECK(p.matches_induction);
    CHECK(std::abs(p.s0 - direct.initial_price()) <= 1e-9 * (1.0 + std::abs(p.s0)));
    const auto& tau = direct.ordering().tau;
    std::vector<double> a(tau.begin() + 1, tau.end());
    std::vector<double> b(p.tau.begin() + 1, p.tau.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(std::abs(a[j] - b[j]) <= 1e-12);
  }
}

TEST_CASE("slope tables do not depend on lambda") {
  const auto s1 = solve(reference_spec(0.1), kModel);
  const auto s2 = solve(reference_spec(0.2), kModel);
  const auto t1 = slope_table(s1);
  const auto t2 = slope_table(s2);
  REQUIRE(t1.size() == 20);
  REQUIRE(t2.size() == 20);
  for (std::size_t j = 0; j < t1.size(); ++j) {
    CHECK(t1[j].regime == static_cast<int>(j));
    CHECK(std::abs(t1[j].slope - t2[j].slope) <= 1e-10);
  }
  // Last regime: -(a_Sigma^{>=I-1} / 2) * gamma' with a_Sigma^{>=I-1} = -300 + 290.
  CHECK(t1.back().slope == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("slopes match finite differences of mu / kappa") {
  const auto s = solve(reference_spec(0.2), kModel);
  for (const auto& e : slope_table(s)) {
    if (e.t_end - e.t_begin < 1e-3) continue;
    const double h = 0.25 * (e.t_end - e.t_begin);
    const double mid = 0.5 * (e.t_begin + e.t_end);
    const double fd = (s.drift_over_kappa(mid + h) - s.drift_over_kappa(mid - h)) / (2.0 * h);
    CHECK(std::abs(fd - e.slope) <= 1e-8 * (1.0 + std::abs(e.slope)));
  }
}

TEST_CASE("statics preconditions") {
  const auto spec = reference_spec();
  const std::vector<double> unsorted{0.1, 0.05};
  const std::vector<double> negative{-0.1, 0.2};
  CHECK_THROWS_AS(lambda_sweep(spec, kModel, unsorted), SpecError);
  CHECK_THROWS_AS(lambda_sweep(spec, kModel, negative), SpecError);

  const TrajectoryModel kinked(1.0, ConstantKappa{0.1}, TabulatedGamma{{0.0, 0.3, 0.5, 0.65, 0.8, 0.9, 1.0}});
  CHECK_THROWS_AS(slope_table(solve(make_spec({-1.0, 2.0, 4.0}, 0.05), kinked)), UnsupportedError);

  const auto g = lambda_grid(0.5, 1.0, 6);
  REQUIRE(g.size() == 6);
  CHECK(g.front() == 0.5);
  CHECK(g.back() == 1.0);
  CHECK(lambda_grid(2.0, 4).front() == 0.5);
}
