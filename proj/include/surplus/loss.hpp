#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "surplus/error.hpp"

namespace surplus {

struct Knot {
  double x;
  double y;
};

namespace detail {

/// Linear interpolation through sorted knots with linear extrapolation by the end slopes.
inline double piecewise_linear(const std::vector<Knot>& knots, double x) {
  const std::size_t n = knots.size();
  std::size_t k = 0;
  if (x <= knots.front().x) {
    k = 0;
  } else if (x >= knots.back().x) {
    k = n - 2;
  } else {
    while (k + 1 < n - 1 && knots[k + 1].x <= x) ++k;
  }
  const Knot& a = knots[k];
  const Knot& b = knots[k + 1];
  return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
}

inline std::vector<double> slopes(const std::vector<Knot>& knots) {
  std::vector<double> s;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k)
    s.push_back((knots[k + 1].y - knots[k].y) / (knots[k + 1].x - knots[k].x));
  return s;
}

/// Left derivative of the piecewise-linear interpolant at x.
inline double piecewise_linear_left_slope(const std::vector<Knot>& knots, double x) {
  const auto s = slopes(knots);
  for (std::size_t k = 1; k < knots.size(); ++k)
    if (x <= knots[k].x) return s[std::min(k - 1, s.size() - 1)];
  return s.back();
}

inline void check_knots(const std::vector<Knot>& knots, const char* what) {
  require(knots.size() >= 2, ErrorCode::InvalidSpec, std::string(what) + ": at least two knots required");
  for (std::size_t k = 0; k < knots.size(); ++k) {
    require(std::isfinite(knots[k].x) && std::isfinite(knots[k].y), ErrorCode::InvalidSpec,
            std::string(what) + ": knots must be finite");
    if (k > 0)
      require(knots[k].x > knots[k - 1].x, ErrorCode::InvalidSpec,
              std::string(what) + ": knot abscissae must be strictly increasing");
  }
}

}  // namespace detail

/// A nonconstant, convex, decreasing loss ℓ: ℝ → ℝ.
///   Exponential(rate): ℓ(x) = e^(−rate·x) − 1
///   Linear(slope):     ℓ(x) = −slope·x
///   PiecewiseLinear:   interpolation through knots, extrapolated linearly
class LossFunction {
 public:
  enum class Kind { Exponential, Linear, PiecewiseLinear };

  static LossFunction exponential(double rate) {
    require(std::isfinite(rate) && rate > 0.0, ErrorCode::InvalidSpec, "loss.rate: must be > 0");
    LossFunction l(Kind::Exponential);
    l.param_ = rate;
    l.validate();
    return l;
  }
  static LossFunction linear(double slope) {
    require(std::isfinite(slope) && slope > 0.0, ErrorCode::InvalidSpec, "loss.slope: must be > 0");
    LossFunction l(Kind::Linear);
    l.param_ = slope;
    l.validate();
    return l;
  }
  static LossFunction piecewise_linear(std::vector<Knot> knots) {
    detail::check_knots(knots, "loss.knots");
    LossFunction l(Kind::PiecewiseLinear);
    l.knots_ = std::move(knots);
    const auto s = detail::slopes(l.knots_);
    for (std::size_t k = 0; k < s.size(); ++k) {
      require(s[k] <= 0.0, ErrorCode::InvalidSpec, "loss.knots: loss must be decreasing");
      if (k > 0) require(s[k] >= s[k - 1] - 1e-12, ErrorCode::InvalidSpec, "loss.knots: loss must be convex");
    }
    require(s.front() < 0.0, ErrorCode::InvalidSpec, "loss.knots: loss must be nonconstant");
    l.validate();
    return l;
  }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double parameter() const noexcept { return param_; }
  [[nodiscard]] const std::vector<Knot>& knots() const noexcept { return knots_; }

  [[nodiscard]] double operator()(double x) const {
    switch (kind_) {
      case Kind::Exponential: return std::expm1(-param_ * x);
      case Kind::Linear: return -param_ * x;
      case Kind::PiecewiseLinear: return detail::piecewise_linear(knots_, x);
    }
    return 0.0;
  }

  /// Left derivative ℓ'₋(x) (≤ 0, nondecreasing in x).
  [[nodiscard]] double left_derivative(double x) const {
    switch (kind_) {
      case Kind::Exponential: return -param_ * std::exp(-param_ * x);
      case Kind::Linear: return -param_;
      case Kind::PiecewiseLinear: return detail::piecewise_linear_left_slope(knots_, x);
    }
    return 0.0;
  }

  /// inf_x ℓ(x); −∞ unless the loss flattens out.
  [[nodiscard]] double infimum() const {
    switch (kind_) {
      case Kind::Exponential: return -1.0;
      case Kind::Linear: return -std::numeric_limits<double>::infinity();
      case Kind::PiecewiseLinear: {
        const auto s = detail::slopes(knots_);
        return s.back() < 0.0 ? -std::numeric_limits<double>::infinity() : knots_.back().y;
      }
    }
    return 0.0;
  }

 private:
  explicit LossFunction(Kind kind) : kind_(kind) {}

  void validate() const {
    // Decreasing and convex on a probe grid.
    double prev = (*this)(-4.0);
    double prev_slope = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 160; ++i) {
      const double x = -4.0 + 0.05 * i;
      const double v = (*this)(x);
      if (!std::isfinite(v) || !std::isfinite(prev)) {
        prev = v;
        continue;
      }
      const double scale = 1e-9 * std::max(1.0, std::abs(v));
      require(v <= prev + scale, ErrorCode::InvalidSpec, "loss must be decreasing");
      const double slope = (v - prev) / 0.05;
      require(slope >= prev_slope - 1e-7 * std::max(1.0, std::abs(slope)), ErrorCode::InvalidSpec,
              "loss must be convex");
      prev_slope = slope;
      prev = v;
    }
  }

  Kind kind_;
  double param_ = 0.0;
  std::vector<Knot> knots_;
};

}  // namespace surplus
