#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace radner {

/// Penalty intensity kappa(t) = value on [0, T].
struct ConstantKappa {
  double value = 0.0;
};

/// Penalty intensity sampled on a uniform grid over [0, T], linearly interpolated.
struct TabulatedKappa {
  std::vector<double> samples;
};

/// gamma(t) = t / T.
struct TwapGamma {};

/// Target trajectory sampled on a uniform grid over [0, T], linearly interpolated.
/// Must start at 0, end at 1 and be strictly increasing.
struct TabulatedGamma {
  std::vector<double> samples;
};

using KappaSpec = std::variant<ConstantKappa, TabulatedKappa>;
using GammaSpec = std::variant<TwapGamma, TabulatedGamma>;

/// The shared penalty intensity kappa and intraday target trajectory gamma,
/// together with the integral kernel
///
///   G(t0, s) = int_{t0}^T kappa(u) (gamma(u) - gamma(s)) du,
///
/// its diagonal F(t) = G(t, t), and the inverse of the strictly decreasing F.
///
/// Constant kappa with TWAP gamma is evaluated in closed form. Any tabulated
/// component switches to composite Simpson quadrature on the union of the
/// sample grids (refined), which is exact for the piecewise-quadratic
/// integrand kappa * gamma produced by linear interpolation.
///
/// Immutable after construction; all member functions are safe to call
/// concurrently.
class TrajectoryModel {
 public:
  static constexpr std::size_t kDefaultFGridPoints = 4097;
  static constexpr std::size_t kDefaultRefinement = 4;
  static constexpr double kInversionTolerance = 1e-12;

  TrajectoryModel(double horizon, KappaSpec kappa_spec, GammaSpec gamma_spec,
                  std::size_t f_grid_points = kDefaultFGridPoints,
                  std::size_t refinement = kDefaultRefinement);

  /// Constant kappa, TWAP gamma.
  static TrajectoryModel twap(double horizon, double kappa);

  double horizon() const { return horizon_; }
  const KappaSpec& kappa_spec() const { return kappa_; }
  const GammaSpec& gamma_spec() const { return gamma_; }
  bool closed_form() const { return closed_form_; }

  double kappa(double t) const;
  double gamma(double t) const;

  /// True when gamma is differentiable on [0, T]: TWAP, or a table whose
  /// segments all share one slope.
  bool gamma_differentiable() const { return gamma_differentiable_; }
  /// gamma'(t), or nullopt when gamma is not differentiable.
  std::optional<double> gamma_derivative(double t) const;

  /// G(t0, s). Throws DomainError for times outside [0, T].
  double kernel(double t0, double s) const;
  /// F(t) = G(t, t); F(T) = 0 and F is strictly decreasing.
  double capital_f(double t) const;
  /// Smallest t in [0, T] with F(t) <= y. Throws DomainError for y < 0.
  double invert_f(double y) const;

  /// int_{t0}^T kappa(u) du
  double kappa_integral(double t0) const;
  /// int_{t0}^T kappa(u) gamma(u) du
  double kappa_gamma_integral(double t0) const;

  /// Sorted nodes on which kappa and gamma are both affine between neighbours.
  /// Splitting an integral at these nodes makes Simpson's rule exact for
  /// integrands polynomial in (kappa, gamma, t) of total degree <= 3.
  std::span<const double> knots() const { return knots_; }

  /// F sampled on a uniform grid of f_grid_points over [0, T].
  std::span<const double> f_grid() const { return f_grid_; }

 private:
  void check_time(double t, const char* what) const;
  std::size_t segment_of(double t) const;
  double tail_integral(double t0, bool weight_gamma) const;

  double horizon_;
  KappaSpec kappa_;
  GammaSpec gamma_;
  bool closed_form_ = false;
  bool gamma_differentiable_ = false;
  double constant_kappa_ = 0.0;

  // Quadrature nodes (refined union of sample grids) and suffix integrals
  // from each node to T. Empty in the closed-form case.
  std::vector<double> nodes_;
  std::vector<double> suffix_kappa_;
  std::vector<double> suffix_kappa_gamma_;

  std::vector<double> knots_;
  std::vector<double> f_grid_;
};

}  // namespace radner
