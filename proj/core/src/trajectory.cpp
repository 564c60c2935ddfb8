#include "radner/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "radner/errors.hpp"

namespace radner {

namespace {

// Linear interpolation of samples on a uniform grid over [0, horizon].
double interpolate(const std::vector<double>& samples, double horizon, double t) {
  const std::size_t segments = samples.size() - 1;
  const double step = horizon / static_cast<double>(segments);
  auto i = static_cast<std::size_t>(std::floor(t / step));
  i = std::min(i, segments - 1);
  const double x0 = static_cast<double>(i) * step;
  const double w = (t - x0) / step;
  return samples[i] + (samples[i + 1] - samples[i]) * w;
}

void append_uniform(std::vector<double>& out, double horizon, std::size_t samples) {
  for (std::size_t i = 0; i < samples; ++i) {
    out.push_back(horizon * static_cast<double>(i) / static_cast<double>(samples - 1));
  }
}

void validate_samples(const std::vector<double>& samples, const char* name) {
  if (samples.size() < 2) {
    throw SpecError(std::string(name) + " table needs at least 2 samples");
  }
  for (double v : samples) {
    if (!std::isfinite(v)) throw SpecError(std::string(name) + " table has a non-finite sample");
  }
}

}  // namespace

TrajectoryModel::TrajectoryModel(double horizon, KappaSpec kappa_spec, GammaSpec gamma_spec,
                                 std::size_t f_grid_points, std::size_t refinement)
    : horizon_(horizon), kappa_(std::move(kappa_spec)), gamma_(std::move(gamma_spec)) {
  if (!std::isfinite(horizon_) || horizon_ <= 0.0) {
    throw SpecError("horizon must be finite and positive");
  }
  if (f_grid_points < 2) throw SpecError("F grid needs at least 2 points");
  if (refinement < 1) throw SpecError("quadrature refinement must be >= 1");

  if (const auto* c = std::get_if<ConstantKappa>(&kappa_)) {
    if (!std::isfinite(c->value) || c->value <= 0.0) {
      throw SpecError("kappa must be strictly positive");
    }
    constant_kappa_ = c->value;
  } else {
    const auto& table = std::get<TabulatedKappa>(kappa_).samples;
    validate_samples(table, "kappa");
    if (*std::min_element(table.begin(), table.end()) <= 0.0) {
      throw SpecError("kappa table must be strictly positive");
    }
  }

  if (std::holds_alternative<TwapGamma>(gamma_)) {
    gamma_differentiable_ = true;
  } else {
    auto& table = std::get<TabulatedGamma>(gamma_).samples;
    validate_samples(table, "gamma");
    if (std::abs(table.front()) > 1e-12 || std::abs(table.back() - 1.0) > 1e-12) {
      throw SpecError("gamma table must start at 0 and end at 1");
    }
    table.front() = 0.0;
    table.back() = 1.0;
    for (std::size_t i = 1; i < table.size(); ++i) {
      if (!(table[i] > table[i - 1])) throw SpecError("gamma table must be strictly increasing");
    }
    // Linear interpolation is differentiable only if every segment has the
    // same slope, which (with the end conditions) means the table is TWAP.
    const double slope = table[1] - table[0];
    gamma_differentiable_ = true;
    for (std::size_t i = 2; i < table.size(); ++i) {
      if (std::abs((table[i] - table[i - 1]) - slope) > 1e-12 * slope) gamma_differentiable_ = false;
    }
  }

  closed_form_ = std::holds_alternative<ConstantKappa>(kappa_) && std::holds_alternative<TwapGamma>(gamma_);

  knots_ = {0.0, horizon_};
  if (const auto* k = std::get_if<TabulatedKappa>(&kappa_)) append_uniform(knots_, horizon_, k->samples.size());
  if (const auto* g = std::get_if<TabulatedGamma>(&gamma_)) append_uniform(knots_, horizon_, g->samples.size());
  std::sort(knots_.begin(), knots_.end());
  knots_.erase(std::unique(knots_.begin(), knots_.end(),
                           [&](double a, double b) { return std::abs(a - b) <= 1e-14 * horizon_; }),
               knots_.end());
  knots_.front() = 0.0;
  knots_.back() = horizon_;

  if (!closed_form_) {
    nodes_.reserve((knots_.size() - 1) * refinement + 1);
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
      for (std::size_t r = 0; r < refinement; ++r) {
        nodes_.push_back(knots_[i] + (knots_[i + 1] - knots_[i]) * static_cast<double>(r) /
                                         static_cast<double>(refinement));
      }
    }
    nodes_.push_back(horizon_);

    suffix_kappa_.assign(nodes_.size(), 0.0);
    suffix_kappa_gamma_.assign(nodes_.size(), 0.0);
    for (std::size_t m = nodes_.size() - 1; m-- > 0;) {
      const double a = nodes_[m];
      const double b = nodes_[m + 1];
      const double mid = 0.5 * (a + b);
      const double h = (b - a) / 6.0;
      suffix_kappa_[m] = suffix_kappa_[m + 1] + h * (kappa(a) + 4.0 * kappa(mid) + kappa(b));
      suffix_kappa_gamma_[m] = suffix_kappa_gamma_[m + 1] +
                               h * (kappa(a) * gamma(a) + 4.0 * kappa(mid) * gamma(mid) + kappa(b) * gamma(b));
    }
  }

  f_grid_.resize(f_grid_points);
  for (std::size_t g = 0; g < f_grid_points; ++g) {
    const double t = g + 1 == f_grid_points
                         ? horizon_
                         : horizon_ * static_cast<double>(g) / static_cast<double>(f_grid_points - 1);
    f_grid_[g] = capital_f(t);
  }
}

TrajectoryModel TrajectoryModel::twap(double horizon, double kappa) {
  return TrajectoryModel(horizon, ConstantKappa{kappa}, TwapGamma{});
}

void TrajectoryModel::check_time(double t, const char* what) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    throw DomainError(std::string(what) + ": time " + std::to_string(t) + " outside [0, T]");
  }
}

double TrajectoryModel::kappa(double t) const {
  if (const auto* table = std::get_if<TabulatedKappa>(&kappa_)) return interpolate(table->samples, horizon_, t);
  return constant_kappa_;
}

double TrajectoryModel::gamma(double t) const {
  if (const auto* table = std::get_if<TabulatedGamma>(&gamma_)) return interpolate(table->samples, horizon_, t);
  return t / horizon_;
}

std::optional<double> TrajectoryModel::gamma_derivative(double t) const {
  check_time(t, "gamma_derivative");
  if (!gamma_differentiable_) return std::nullopt;
  if (const auto* table = std::get_if<TabulatedGamma>(&gamma_)) {
    const auto segments = static_cast<double>(table->samples.size() - 1);
    return (table->samples[1] - table->samples[0]) * segments / horizon_;
  }
  return 1.0 / horizon_;
}

std::size_t TrajectoryModel::segment_of(double t) const {
  // first node >= t
  return static_cast<std::size_t>(std::lower_bound(nodes_.begin(), nodes_.end(), t) - nodes_.begin());
}

double TrajectoryModel::tail_integral(double t0, bool weight_gamma) const {
  const std::size_t m = segment_of(t0);
  const auto& suffix = weight_gamma ? suffix_kappa_gamma_ : suffix_kappa_;
  if (nodes_[m] == t0) return suffix[m];
  const double b = nodes_[m];
  const double mid = 0.5 * (t0 + b);
  auto f = [&](double u) { return weight_gamma ? kappa(u) * gamma(u) : kappa(u); };
  return suffix[m] + (b - t0) / 6.0 * (f(t0) + 4.0 * f(mid) + f(b));
}

double TrajectoryModel::kappa_integral(double t0) const {
  check_time(t0, "kappa_integral");
  if (closed_form_) return constant_kappa_ * (horizon_ - t0);
  return tail_integral(t0, false);
}

double TrajectoryModel::kappa_gamma_integral(double t0) const {
  check_time(t0, "kappa_gamma_integral");
  if (closed_form_) return constant_kappa_ * (horizon_ - t0) * (horizon_ + t0) / (2.0 * horizon_);
  return tail_integral(t0, true);
}

double TrajectoryModel::kernel(double t0, double s) const {
  check_time(t0, "kernel");
  check_time(s, "kernel");
  if (closed_form_) {
    return constant_kappa_ * (horizon_ - t0) * (horizon_ + t0 - 2.0 * s) / (2.0 * horizon_);
  }
  return tail_integral(t0, true) - gamma(s) * tail_integral(t0, false);
}

double TrajectoryModel::capital_f(double t) const {
  check_time(t, "capital_f");
  if (closed_form_) {
    const double r = horizon_ - t;
    return constant_kappa_ * r * r / (2.0 * horizon_);
  }
  return kernel(t, t);
}

double TrajectoryModel::invert_f(double y) const {
  if (!(y >= 0.0)) throw DomainError("invert_f: negative level");
  if (y >= f_grid_.front()) return 0.0;
  if (y == 0.0) return horizon_;
  if (closed_form_) {
    const double t = horizon_ - std::sqrt(2.0 * horizon_ * y / constant_kappa_);
    return std::clamp(t, 0.0, horizon_);
  }
  // Bracket on the precomputed grid, then bisect on the exact evaluator.
  const auto it = std::find_if(f_grid_.begin(), f_grid_.end(), [&](double f) { return f <= y; });
  const auto g = static_cast<std::size_t>(it - f_grid_.begin());
  const double step = horizon_ / static_cast<double>(f_grid_.size() - 1);
  double lo = static_cast<double>(g - 1) * step;
  double hi = g + 1 == f_grid_.size() ? horizon_ : static_cast<double>(g) * step;
  while (hi - lo > kInversionTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (capital_f(mid) <= y) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace radner
