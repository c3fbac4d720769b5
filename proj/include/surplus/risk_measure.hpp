#pragma once

// The capital requirement ρ_{A,S}(X) = inf{m : X + (m/S₀)·S_T ∈ A}.
//
// Acceptance sets are monotone and S_T ≥ 0, so m ↦ [X + (m/S₀)S_T ∈ A] switches
// once from false to true. We bracket the switch by doubling and bisect it.

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <variant>

#include "surplus/acceptance.hpp"
#include "surplus/error.hpp"
#include "surplus/scenario.hpp"

namespace surplus {

/// A traded asset S = (S₀, S_T) with S₀ > 0 and nonzero S_T ≥ 0.
class EligibleAsset {
 public:
  EligibleAsset(double price, Position payoff) : price_(price), payoff_(std::move(payoff)) {
    require(std::isfinite(price_) && price_ > 0.0, ErrorCode::InvalidSpec, "asset.price: must be > 0");
    bool positive = false;
    for (double v : payoff_) {
      require(v >= 0.0, ErrorCode::InvalidSpec, "asset.payoff: must be >= 0");
      positive = positive || v > 0.0;
    }
    require(positive, ErrorCode::InvalidSpec, "asset.payoff: must be nonzero");
  }

  static EligibleAsset cash(std::size_t n) { return EligibleAsset(1.0, Position::constant(n, 1.0)); }

  [[nodiscard]] double price() const noexcept { return price_; }
  [[nodiscard]] const Position& payoff() const noexcept { return payoff_; }
  [[nodiscard]] bool is_cash() const {
    if (price_ != 1.0) return false;
    for (double v : payoff_)
      if (v != 1.0) return false;
    return true;
  }
  /// Smallest strictly positive payoff.
  [[nodiscard]] double min_positive_payoff() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : payoff_)
      if (v > 0.0) m = std::min(m, v);
    return m;
  }

 private:
  double price_;
  Position payoff_;
};

/// ρ values are extended reals; −∞ can only be claimed up to the probe cap.
class ExtendedReal {
 public:
  enum class Kind { Finite, PlusInfinity, MinusInfinityAtCap };

  static ExtendedReal finite(double v) { return ExtendedReal(Kind::Finite, v); }
  static ExtendedReal plus_infinity() { return ExtendedReal(Kind::PlusInfinity, 0.0); }
  static ExtendedReal minus_infinity_at_cap(double cap) { return ExtendedReal(Kind::MinusInfinityAtCap, cap); }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] bool is_finite() const noexcept { return kind_ == Kind::Finite; }
  [[nodiscard]] double value() const {
    require(is_finite(), ErrorCode::PreconditionFailed, "value() on an infinite requirement");
    return value_;
  }
  /// Cap recorded for MinusInfinityAtCap.
  [[nodiscard]] double cap() const noexcept { return value_; }
  /// Finite value, or ±∞ as a double.
  [[nodiscard]] double as_double() const noexcept {
    switch (kind_) {
      case Kind::Finite: return value_;
      case Kind::PlusInfinity: return std::numeric_limits<double>::infinity();
      case Kind::MinusInfinityAtCap: return -std::numeric_limits<double>::infinity();
    }
    return value_;
  }

  friend bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

 private:
  ExtendedReal(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

struct RhoOptions {
  double tol = 1e-9;
  double cap = 1e12;
};

/// ρ_{A,S} bound to a set, a space and an asset. For the cash asset ρ(0) is
/// evaluated once at construction to size the bracket.
class CapitalRequirement {
 public:
  CapitalRequirement(AcceptanceSpec spec, ScenarioSpace space, EligibleAsset asset, RhoOptions options = {})
      : spec_(std::move(spec)), space_(std::move(space)), asset_(std::move(asset)), options_(options) {
    space_.check(asset_.payoff());
    require(options_.tol > 0.0, ErrorCode::InvalidSpec, "tol must be > 0");
    if (asset_.is_cash()) {
      const ExtendedReal r0 = evaluate_doubling(Position::zero(space_.size()));
      if (r0.is_finite()) cash_offset_ = std::abs(r0.value()) + 1.0;
    }
  }

  [[nodiscard]] const AcceptanceSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const ScenarioSpace& space() const noexcept { return space_; }
  [[nodiscard]] const EligibleAsset& asset() const noexcept { return asset_; }
  [[nodiscard]] const RhoOptions& options() const noexcept { return options_; }

  /// Is X + (m/S₀)·S_T acceptable?
  [[nodiscard]] bool acceptable_with(const Position& x, double m) const {
    return contains(spec_, space_, x.plus_scaled(m / asset_.price(), asset_.payoff()));
  }

  [[nodiscard]] ExtendedReal operator()(const Position& x) const {
    space_.check(x);
    if (cash_offset_) {
      const double half = x.norm_inf() + *cash_offset_;
      if (!acceptable_with(x, -half) && acceptable_with(x, half)) return ExtendedReal::finite(bisect(x, -half, half));
    }
    return evaluate_doubling(x);
  }

  /// The bracket [lo, hi] used before bisection, for inspection and oracles.
  [[nodiscard]] double initial_radius(const Position& x) const {
    return 1.0 + x.norm_inf() * asset_.price() / asset_.min_positive_payoff();
  }

 private:
  [[nodiscard]] ExtendedReal evaluate_doubling(const Position& x) const {
    const double cap = options_.cap;
    double hi = std::min(initial_radius(x), cap);
    while (!acceptable_with(x, hi)) {
      if (hi >= cap) return ExtendedReal::plus_infinity();
      hi = std::min(2.0 * hi, cap);
    }
    double lo = -std::min(initial_radius(x), cap);
    if (lo >= hi) lo = hi - 1.0;
    while (acceptable_with(x, lo)) {
      if (lo <= -cap) return ExtendedReal::minus_infinity_at_cap(cap);
      hi = lo;
      lo = std::max(2.0 * lo, -cap);
    }
    return ExtendedReal::finite(bisect(x, lo, hi));
  }

  /// Invariant: lo unacceptable, hi acceptable. Returns the final midpoint.
  [[nodiscard]] double bisect(const Position& x, double lo, double hi) const {
    while (hi - lo > options_.tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (acceptable_with(x, mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }

  AcceptanceSpec spec_;
  ScenarioSpace space_;
  EligibleAsset asset_;
  RhoOptions options_;
  std::optional<double> cash_offset_;
};

inline ExtendedReal rho(const AcceptanceSpec& spec, const ScenarioSpace& space, const EligibleAsset& asset,
                        const Position& x, double tol = 1e-9, double cap = 1e12) {
  return CapitalRequirement(spec, space, asset, {tol, cap})(x);
}

/// Cash-additive ρ_A.
inline ExtendedReal rho_cash(const AcceptanceSpec& spec, const ScenarioSpace& space, const Position& x,
                             double tol = 1e-9) {
  return rho(spec, space, EligibleAsset::cash(space.size()), x, tol);
}

/// A(ρ) = {X : ρ(X) ≤ 10·tol}, wrapped as a membership oracle.
inline AcceptanceSpec acceptance_from_rho(const AcceptanceSpec& spec, const ScenarioSpace& space,
                                          const EligibleAsset& asset, RhoOptions options = {}) {
  auto measure = std::make_shared<CapitalRequirement>(spec, space, asset, options);
  const double threshold = 10.0 * options.tol;
  return AcceptanceSpec::derived(
      [measure, threshold](const Position& x) {
        const ExtendedReal r = (*measure)(x);
        return r.kind() == ExtendedReal::Kind::MinusInfinityAtCap || (r.is_finite() && r.value() <= threshold);
      },
      "A(rho[" + spec.name() + "])", data_magnitude(spec, space));
}

}  // namespace surplus
