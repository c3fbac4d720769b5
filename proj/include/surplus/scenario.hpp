#pragma once

// Finite probability spaces, capital positions and the distributional
// statistics (expectation, VaR, TVaR, spectral integrals) built on them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "surplus/error.hpp"

namespace surplus {

/// Tolerance on probability masses (normalization, VaR thresholds).
inline constexpr double kMassTolerance = 1e-12;
/// Normalization tolerance for scenario weights.
inline constexpr double kWeightSumTolerance = 1e-10;
/// Membership tolerance; boundary points count as inside.
inline constexpr double kMembershipTolerance = 1e-9;

/// A capital position: one payoff per scenario, all finite.
class Position {
 public:
  Position() = default;
  explicit Position(std::vector<double> values) : values_(std::move(values)) { check_finite(); }
  Position(std::initializer_list<double> values) : values_(values) { check_finite(); }

  static Position constant(std::size_t n, double c) { return Position(std::vector<double>(n, c)); }
  static Position zero(std::size_t n) { return constant(n, 0.0); }
  static Position unit(std::size_t n, std::size_t j, double scale = 1.0) {
    std::vector<double> v(n, 0.0);
    v.at(j) = scale;
    return Position(std::move(v));
  }

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] const std::vector<double>& vector() const noexcept { return values_; }
  [[nodiscard]] auto begin() const noexcept { return values_.begin(); }
  [[nodiscard]] auto end() const noexcept { return values_.end(); }

  [[nodiscard]] double norm_inf() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  [[nodiscard]] double min() const { return *std::min_element(values_.begin(), values_.end()); }
  [[nodiscard]] double max() const { return *std::max_element(values_.begin(), values_.end()); }

  /// X + c·1
  [[nodiscard]] Position shifted(double c) const {
    std::vector<double> v = values_;
    for (double& x : v) x += c;
    return Position(std::move(v));
  }
  /// X + λ·Y
  [[nodiscard]] Position plus_scaled(double lambda, const Position& y) const {
    require(y.size() == size(), ErrorCode::DimensionMismatch, "plus_scaled: sizes differ");
    std::vector<double> v = values_;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += lambda * y[i];
    return Position(std::move(v));
  }
  [[nodiscard]] Position scaled(double lambda) const {
    std::vector<double> v = values_;
    for (double& x : v) x *= lambda;
    return Position(std::move(v));
  }
  /// X⁺ = max(X, 0)
  [[nodiscard]] Position positive_part() const {
    std::vector<double> v = values_;
    for (double& x : v) x = std::max(x, 0.0);
    return Position(std::move(v));
  }
  /// X⁻ = max(−X, 0)
  [[nodiscard]] Position negative_part() const {
    std::vector<double> v = values_;
    for (double& x : v) x = std::max(-x, 0.0);
    return Position(std::move(v));
  }
  /// −X⁻ = min(X, 0), the option to default.
  [[nodiscard]] Position default_option() const {
    std::vector<double> v = values_;
    for (double& x : v) x = std::min(x, 0.0);
    return Position(std::move(v));
  }
  [[nodiscard]] Position with(std::size_t i, double value) const {
    std::vector<double> v = values_;
    v.at(i) = value;
    return Position(std::move(v));
  }

  /// Componentwise Y ≥ X.
  [[nodiscard]] bool dominates(const Position& x) const {
    for (std::size_t i = 0; i < size(); ++i)
      if (values_[i] < x[i]) return false;
    return true;
  }

  friend bool operator==(const Position&, const Position&) = default;

 private:
  void check_finite() const {
    for (double v : values_)
      require(std::isfinite(v), ErrorCode::InvalidSpec, "position values must be finite");
  }

  std::vector<double> values_;
};

/// An event A ⊂ Ω, kept as sorted unique scenario indices.
class EventMask {
 public:
  EventMask() = default;
  explicit EventMask(std::vector<std::size_t> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }
  EventMask(std::initializer_list<std::size_t> members) : EventMask(std::vector<std::size_t>(members)) {}

  static EventMask full(std::size_t n) {
    std::vector<std::size_t> m(n);
    std::iota(m.begin(), m.end(), std::size_t{0});
    return EventMask(std::move(m));
  }
  /// Bit i of `bits` selects scenario i.
  static EventMask from_bits(std::uint64_t bits, std::size_t n) {
    std::vector<std::size_t> m;
    for (std::size_t i = 0; i < n; ++i)
      if ((bits >> i) & 1U) m.push_back(i);
    return EventMask(std::move(m));
  }

  [[nodiscard]] const std::vector<std::size_t>& members() const noexcept { return members_; }
  [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
  [[nodiscard]] bool empty() const noexcept { return members_.empty(); }
  [[nodiscard]] bool contains(std::size_t i) const {
    return std::binary_search(members_.begin(), members_.end(), i);
  }
  [[nodiscard]] bool is_full(std::size_t n) const { return members_.size() == n; }
  [[nodiscard]] EventMask complement(std::size_t n) const {
    std::vector<std::size_t> m;
    for (std::size_t i = 0; i < n; ++i)
      if (!contains(i)) m.push_back(i);
    return EventMask(std::move(m));
  }
  void check_bounds(std::size_t n) const {
    for (std::size_t i : members_)
      require(i < n, ErrorCode::InvalidSpec, "event index " + std::to_string(i) + " out of range");
  }

  friend bool operator==(const EventMask&, const EventMask&) = default;

 private:
  std::vector<std::size_t> members_;
};

/// X·1_A
inline Position masked(const Position& x, const EventMask& event) {
  std::vector<double> v(x.size(), 0.0);
  for (std::size_t i : event.members())
    if (i < v.size()) v[i] = x[i];
  return Position(std::move(v));
}

/// Finite probability space with strictly positive weights.
class ScenarioSpace {
 public:
  ScenarioSpace(std::vector<double> weights, std::vector<std::string> labels = {})
      : weights_(std::move(weights)), labels_(std::move(labels)) {
    require(!weights_.empty(), ErrorCode::ZeroOrNegativeWeight, "scenario space needs at least one scenario");
    double sum = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      require(std::isfinite(weights_[i]) && weights_[i] > 0.0, ErrorCode::ZeroOrNegativeWeight,
              "weight " + std::to_string(i) + " must be > 0");
      sum += weights_[i];
    }
    require(std::abs(sum - 1.0) <= kWeightSumTolerance, ErrorCode::WeightsDoNotSumToOne,
            "weights sum to " + std::to_string(sum));
    if (labels_.empty()) {
      for (std::size_t i = 0; i < weights_.size(); ++i) labels_.push_back("s" + std::to_string(i));
    }
    require(labels_.size() == weights_.size(), ErrorCode::DimensionMismatch, "labels and weights differ in length");
  }

  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
  [[nodiscard]] double prob(std::size_t i) const { return weights_[i]; }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
  [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
  [[nodiscard]] double min_prob() const { return *std::min_element(weights_.begin(), weights_.end()); }
  [[nodiscard]] double mass(const EventMask& event) const {
    double m = 0.0;
    for (std::size_t i : event.members()) m += weights_.at(i);
    return m;
  }
  [[nodiscard]] bool is_equiprobable() const {
    const double target = 1.0 / static_cast<double>(size());
    return std::all_of(weights_.begin(), weights_.end(),
                       [&](double p) { return std::abs(p - target) <= kWeightSumTolerance; });
  }

  void check(const Position& x) const {
    require(x.size() == size(), ErrorCode::DimensionMismatch,
            "position has " + std::to_string(x.size()) + " values, space has " + std::to_string(size()));
  }

 private:
  std::vector<double> weights_;
  std::vector<std::string> labels_;
};

inline ScenarioSpace make_space(std::vector<double> weights) { return ScenarioSpace(std::move(weights)); }

/// Returns (X⁺, X⁻).
inline std::pair<Position, Position> decompose(const Position& x) { return {x.positive_part(), x.negative_part()}; }

inline double expectation(const ScenarioSpace& space, const Position& x) {
  space.check(x);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += space.prob(i) * x[i];
  return s;
}

/// E[X·Z]
inline double expectation(const ScenarioSpace& space, const Position& x, const Position& z) {
  space.check(x);
  space.check(z);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += space.prob(i) * x[i] * z[i];
  return s;
}

/// P(X < threshold)
inline double prob_below(const ScenarioSpace& space, const Position& x, double threshold) {
  space.check(x);
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < threshold) m += space.prob(i);
  return m;
}

namespace detail {

/// Distinct values in ascending order with the mass strictly below each one.
struct Atom {
  double value;
  double mass_below;
  double mass_upto;
};

inline std::vector<Atom> atoms(const ScenarioSpace& space, const Position& x) {
  space.check(x);
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<Atom> out;
  double cumulative = 0.0;
  for (std::size_t k : order) {
    if (out.empty() || x[k] != out.back().value) out.push_back({x[k], cumulative, cumulative});
    cumulative += space.prob(k);
    out.back().mass_upto = cumulative;
  }
  // Rounding can leave the last cumulative mass a hair off 1.
  out.back().mass_upto = 1.0;
  return out;
}

}  // namespace detail

/// VaR_α(X) = inf{m : P(X + m < 0) ≤ α}.
inline double value_at_risk(const ScenarioSpace& space, const Position& x, double alpha) {
  const auto atoms = detail::atoms(space, x);
  // The acceptable thresholds are m ≥ −x_(k) for the largest atom k whose
  // strictly-lower mass is at most α.
  double var = -atoms.front().value;
  for (const auto& a : atoms) {
    if (a.mass_below <= alpha + kMassTolerance) var = -a.value;
  }
  return var;
}

/// A decreasing step weight on (0,1): value `weight` on [previous upper, upper).
struct WeightPiece {
  double upper;
  double weight;
};

/// Exact ∫₀¹ VaR_β(X) w(β) dβ for a piecewise-constant w. The map β ↦ VaR_β(X)
/// equals −x_(k) on [F_{k−1}, F_k), so the integral is a finite sum of rectangles.
inline double integrate_quantile(const ScenarioSpace& space, const Position& x, std::span<const WeightPiece> pieces) {
  const auto atoms = detail::atoms(space, x);
  double total = 0.0;
  double piece_lo = 0.0;
  for (const auto& piece : pieces) {
    const double piece_hi = std::min(piece.upper, 1.0);
    if (piece_hi > piece_lo && piece.weight != 0.0) {
      for (const auto& a : atoms) {
        const double lo = std::max(a.mass_below, piece_lo);
        const double hi = std::min(a.mass_upto, piece_hi);
        if (hi > lo) total += piece.weight * (-a.value) * (hi - lo);
      }
    }
    piece_lo = std::max(piece_lo, piece_hi);
  }
  return total;
}

/// TVaR_α(X) = (1/α) ∫₀^α VaR_β(X) dβ, computed exactly.
inline double tail_value_at_risk(const ScenarioSpace& space, const Position& x, double alpha) {
  const WeightPiece piece{alpha, 1.0 / alpha};
  return integrate_quantile(space, x, std::span<const WeightPiece>(&piece, 1));
}

/// esssup over an event; scenarios have positive mass so this is a plain max.
inline double max_over(const Position& x, const EventMask& event) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i : event.members()) m = std::max(m, x[i]);
  return m;
}

}  // namespace surplus
