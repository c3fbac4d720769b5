#pragma once

// Spectral weights and utility functions for the positive risk-measure zoo.

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "surplus/error.hpp"
#include "surplus/loss.hpp"
#include "surplus/scenario.hpp"

namespace surplus {

/// Decreasing step density φ on (0, 1) with ∫φ = 1.
class SpectralWeight {
 public:
  enum class Kind { Uniform, PiecewiseConstant };

  /// φ = (1/α)·1_{(0,α)}
  static SpectralWeight uniform(double alpha) {
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidSpec, "spectral.alpha: must lie in (0, 1)");
    SpectralWeight w(Kind::Uniform);
    w.alpha_ = alpha;
    w.pieces_ = {{alpha, 1.0 / alpha}};
    return w;
  }

  /// Pieces (upper_k, φ_k): φ = φ_k on [upper_{k−1}, upper_k), last upper is 1.
  static SpectralWeight piecewise_constant(std::vector<WeightPiece> pieces) {
    require(!pieces.empty(), ErrorCode::InvalidSpec, "spectral.knots: empty");
    double lo = 0.0, integral = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces) {
      require(p.upper > lo && p.upper <= 1.0, ErrorCode::InvalidSpec, "spectral.knots: uppers must increase within (0, 1]");
      require(p.weight >= 0.0 && std::isfinite(p.weight), ErrorCode::InvalidSpec, "spectral.knots: weights must be >= 0");
      require(p.weight <= previous, ErrorCode::InvalidSpec, "spectral.knots: weights must decrease");
      integral += p.weight * (p.upper - lo);
      previous = p.weight;
      lo = p.upper;
    }
    require(std::abs(integral - 1.0) <= 1e-10, ErrorCode::InvalidSpec, "spectral.knots: weight must integrate to 1");
    SpectralWeight w(Kind::PiecewiseConstant);
    w.pieces_ = std::move(pieces);
    return w;
  }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] std::span<const WeightPiece> pieces() const noexcept { return pieces_; }
  [[nodiscard]] bool positive_near_zero() const noexcept { return pieces_.front().weight > 0.0; }

 private:
  explicit SpectralWeight(Kind k) : kind_(k) {}
  Kind kind_;
  double alpha_ = 0.0;
  std::vector<WeightPiece> pieces_;
};

/// Increasing u : R → R with u(0) = 0, used as −E[u(−X⁻)].
class UtilityFunction {
 public:
  enum class Kind { Exponential, Power, PiecewiseLinear };

  /// u(x) = (1 − e^{−a x}) / a
  static UtilityFunction exponential(double a) {
    require(a > 0.0 && std::isfinite(a), ErrorCode::InvalidSpec, "util.rate: must be > 0");
    UtilityFunction u(Kind::Exponential);
    u.param_ = a;
    return u;
  }
  /// u(x) = sign(x)·|x|^p
  static UtilityFunction power(double p) {
    require(p > 0.0 && std::isfinite(p), ErrorCode::InvalidSpec, "util.power: must be > 0");
    UtilityFunction u(Kind::Power);
    u.param_ = p;
    return u;
  }
  /// Linear interpolation, extended by the end slopes; must pass through (0, 0).
  static UtilityFunction piecewise_linear(std::vector<Knot> knots) {
    detail::check_knots(knots, "util.knots");
    bool through_origin = false;
    for (const auto& k : knots) through_origin = through_origin || (k.x == 0.0 && k.y == 0.0);
    require(through_origin, ErrorCode::InvalidSpec, "util.knots: must contain (0, 0)");
    bool rising = false;
    for (double s : detail::slopes(knots)) {
      require(s >= 0.0, ErrorCode::InvalidSpec, "util.knots: must be increasing");
      rising = rising || s > 0.0;
    }
    require(rising, ErrorCode::InvalidSpec, "util.knots: must be nonconstant");
    UtilityFunction u(Kind::PiecewiseLinear);
    u.knots_ = std::move(knots);
    return u;
  }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double parameter() const noexcept { return param_; }
  [[nodiscard]] const std::vector<Knot>& knots() const noexcept { return knots_; }

  [[nodiscard]] double operator()(double x) const {
    switch (kind_) {
      case Kind::Exponential: return -std::expm1(-param_ * x) / param_;
      case Kind::Power: return std::copysign(std::pow(std::abs(x), param_), x);
      case Kind::PiecewiseLinear: return detail::piecewise_linear(knots_, x);
    }
    return 0.0;
  }

  /// Strictly increasing on (−∞, 0], which is all −E[u(−X⁻)] ever sees.
  [[nodiscard]] bool strictly_increasing_on_losses() const {
    if (kind_ != Kind::PiecewiseLinear) return true;
    const auto s = detail::slopes(knots_);
    if (s.front() <= 0.0) return false;
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
      if (knots_[i].x < 0.0 && s[i] <= 0.0) return false;
    return true;
  }

 private:
  explicit UtilityFunction(Kind k) : kind_(k) {}
  Kind kind_;
  double param_ = 0.0;
  std::vector<Knot> knots_;
};

/// Strictly increasing, strictly convex u : [0, ∞) → R with u(0) = 0.
class ConvexUtility {
 public:
  enum class Kind { Exponential, Power };

  /// u(x) = (e^{a x} − 1) / a
  static ConvexUtility exponential(double a) {
    require(a > 0.0 && std::isfinite(a), ErrorCode::InvalidSpec, "util.rate: must be > 0");
    return ConvexUtility(Kind::Exponential, a);
  }
  /// u(x) = x^p, p > 1
  static ConvexUtility power(double p) {
    require(p > 1.0 && std::isfinite(p), ErrorCode::InvalidSpec, "util.power: must be > 1 for strict convexity");
    return ConvexUtility(Kind::Power, p);
  }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double parameter() const noexcept { return param_; }

  [[nodiscard]] double operator()(double x) const {
    switch (kind_) {
      case Kind::Exponential: return std::expm1(param_ * x) / param_;
      case Kind::Power: return std::pow(x, param_);
    }
    return 0.0;
  }

  /// u⁻¹(y) by bisection on [0, hi]; u(hi) ≥ y is the caller's bracket.
  [[nodiscard]] double inverse(double y, double hi, double tol) const {
    double lo = 0.0;
    if (y <= 0.0) return 0.0;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      ((*this)(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  ConvexUtility(Kind k, double p) : kind_(k), param_(p) {}
  Kind kind_;
  double param_;
};

}  // namespace surplus
