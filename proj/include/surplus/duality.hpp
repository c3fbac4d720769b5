#pragma once

// Support functions σ_A(Z) = inf_{X∈A} E[XZ], dual representations, weak and
// strong duality for ρ_{A,S}, and recovery of SPAN(A) from a coherent set.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "surplus/acceptance.hpp"
#include "surplus/lp.hpp"
#include "surplus/risk_measure.hpp"
#include "surplus/sampling.hpp"
#include "surplus/verdict.hpp"

namespace surplus {

/// Z ≥ 0; normalized means E[Z] = 1 (Z = dQ/dP).
class DualVector {
 public:
  DualVector(const ScenarioSpace& space, Position density, bool normalized = false)
      : density_(std::move(density)), normalized_(normalized) {
    space.check(density_);
    for (double v : density_) require(v >= 0.0, ErrorCode::NegativeDual, "dual density has a negative component");
    if (normalized_)
      require(std::abs(expectation(space, density_) - 1.0) <= 1e-10, ErrorCode::InvalidSpec,
              "normalized dual must have E[Z] = 1");
  }

  /// Z = 1_{j}/p_j, the density of the point mass at scenario j.
  static DualVector point_mass(const ScenarioSpace& space, std::size_t j) {
    return DualVector(space, Position::unit(space.size(), j, 1.0 / space.prob(j)), true);
  }

  [[nodiscard]] const Position& density() const noexcept { return density_; }
  [[nodiscard]] bool normalized() const noexcept { return normalized_; }

 private:
  Position density_;
  bool normalized_;
};

/// σ_A(Z): finite, or below −10⁹ at the recorded probe radius. A finite value
/// computed numerically carries a slack; value − slack is a certified lower bound.
struct SupportValue {
  enum class Kind { Finite, MinusInfinityAtProbe };
  Kind kind = Kind::Finite;
  double value = 0.0;
  double radius = 0.0;
  double slack = 0.0;
  bool exact = true;

  static SupportValue finite(double v, double slack = 0.0, bool exact = true) {
    return {Kind::Finite, v, 0.0, slack, exact};
  }
  static SupportValue minus_infinity(double radius, bool exact = true) {
    return {Kind::MinusInfinityAtProbe, 0.0, radius, 0.0, exact};
  }
  [[nodiscard]] bool is_finite() const noexcept { return kind == Kind::Finite; }
  [[nodiscard]] double lower() const noexcept {
    return is_finite() ? value - slack : -std::numeric_limits<double>::infinity();
  }
};

namespace detail {

inline constexpr double kUnboundedLevel = -1e9;

/// Generating halfspaces {E[X·Z_k] ≥ γ_k} of a polyhedral family.
inline std::vector<family::Halfspace> generators(const AcceptanceSpec& spec, const ScenarioSpace& space) {
  const std::size_t n = space.size();
  std::vector<family::Halfspace> out;
  auto point = [&](std::size_t j) { return Position::unit(n, j, 1.0 / space.prob(j)); };
  if (const auto* f = spec.as<family::Span>()) {
    for (std::size_t j : f->event.members()) out.push_back({point(j), 0.0});
  } else if (const auto* f = spec.as<family::SpanType>()) {
    for (std::size_t j : f->event.members()) out.push_back({point(j), f->floor[j]});
  } else if (spec.is<family::PositiveCone>()) {
    for (std::size_t j = 0; j < n; ++j) out.push_back({point(j), 0.0});
  } else if (const auto* f = spec.as<family::HalfspaceIntersection>()) {
    out = f->constraints;
  } else {
    fail(ErrorCode::UnsupportedFamily, spec.name() + " is not polyhedral");
  }
  return out;
}

/// min E[XZ] over {X : E[X·Z_k] ≥ γ_k, ‖X‖∞ ≤ R}; nullopt if infeasible.
inline std::optional<double> box_lp(const family::HalfspaceIntersection& f, const ScenarioSpace& space,
                                    const Position& z, double radius) {
  const std::size_t n = space.size();
  lp::Problem p(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.c[i] = space.prob(i) * z[i];
    p.lower[i] = -radius;
    p.upper[i] = radius;
  }
  for (const auto& c : f.constraints) {
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = space.prob(i) * c.dual[i];
    p.add(std::move(a), lp::Sense::GreaterEqual, c.bound);
  }
  const lp::Result r = lp::solve(p);
  if (r.status != lp::Status::Optimal) return std::nullopt;
  return r.objective;
}

inline SupportValue halfspace_support(const family::HalfspaceIntersection& f, const ScenarioSpace& space,
                                      const Position& z, double radius) {
  double r = std::max(radius, 1.0);
  std::optional<double> previous;
  int below = 0;
  for (int doubling = 0; doubling < 60; ++doubling, r *= 2.0) {
    const auto v = box_lp(f, space, z, r);
    if (!v) continue;
    if (*v < kUnboundedLevel) {
      if (++below >= 3) return SupportValue::minus_infinity(r, false);
    } else {
      below = 0;
    }
    // v(R) is convex and nonincreasing in R; once a doubling leaves it
    // unchanged it has reached its infimum.
    if (previous && std::abs(*v - *previous) <= 1e-9 * std::max(1.0, std::abs(*v)))
      return SupportValue::finite(*v);
    previous = v;
  }
  return SupportValue::minus_infinity(r, false);
}

/// sup{E[yZ] : y ≥ 0, E[ℓ(−y)] ≤ level} for the shortfall set, as (primal, dual).
inline std::pair<double, double> shortfall_sup(const family::Shortfall& f, const ScenarioSpace& space,
                                               const Position& z) {
  const std::size_t n = space.size();
  const LossFunction& loss = f.loss;
  if (loss.kind() == LossFunction::Kind::Exponential) {
    // ℓ(−y) = e^{ry} − 1: the Lagrangian maximizer is explicit per scenario,
    // y_i(λ) = ln(Z_i/(λr))/r when Z_i > λr, and the constraint is monotone in λ.
    const double r = loss.parameter();
    auto y_of = [&](double lambda, std::size_t i) {
      return z[i] > lambda * r ? std::log(z[i] / (lambda * r)) / r : 0.0;
    };
    auto constraint = [&](double lambda) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += space.prob(i) * loss(-y_of(lambda, i));
      return s;
    };
    auto primal = [&](double lambda) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += space.prob(i) * z[i] * y_of(lambda, i);
      return s;
    };
    auto dual = [&](double lambda) {
      double s = lambda * f.level;
      for (std::size_t i = 0; i < n; ++i) {
        const double y = y_of(lambda, i);
        s += space.prob(i) * (z[i] * y - lambda * loss(-y));
      }
      return s;
    };
    if (z.max() <= 0.0) return {0.0, 0.0};
    double zmax = z.max();
    if (constraint(zmax / r) > f.level) fail(ErrorCode::PreconditionFailed, "shortfall: 0 is not acceptable");
    double hi = zmax / r, lo = hi;
    while (constraint(lo) <= f.level && lo > 1e-300) lo *= 0.5;
    if (constraint(lo) <= f.level) return {primal(lo), dual(lo)};
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (constraint(mid) <= f.level ? hi : lo) = mid;
    }
    return {primal(hi), dual(hi)};
  }
  // Piecewise-linear ℓ: ℓ(−y) is the max of affine pieces in y, so the
  // problem is a linear program in (y, t).
  std::vector<std::pair<double, double>> pieces;  // t ≥ a + b·y
  if (loss.kind() == LossFunction::Kind::Linear) {
    pieces.emplace_back(0.0, loss.parameter());
  } else {
    const auto& k = loss.knots();
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
      const double slope = (k[i + 1].y - k[i].y) / (k[i + 1].x - k[i].x);
      // ℓ(x) = k_i.y + slope (x − k_i.x); with x = −y: a + b y.
      pieces.emplace_back(k[i].y - slope * k[i].x, -slope);
    }
  }
  lp::Problem p(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    p.c[i] = -space.prob(i) * z[i];
    p.lower[n + i] = -lp::kInf;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (auto [a, b] : pieces) {
      std::vector<double> row(2 * n, 0.0);
      row[n + i] = 1.0;
      row[i] = -b;
      p.add(std::move(row), lp::Sense::GreaterEqual, a);
    }
  }
  std::vector<double> budget(2 * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) budget[n + i] = space.prob(i);
  p.add(std::move(budget), lp::Sense::LessEqual, f.level);
  const lp::Result r = lp::solve(p);
  if (r.status == lp::Status::Unbounded) return {lp::kInf, lp::kInf};
  require(r.status == lp::Status::Optimal, ErrorCode::PreconditionFailed, "shortfall: 0 is not acceptable");
  return {-r.objective, -r.objective};
}

}  // namespace detail

/// σ_A(Z). Closed forms for the cones and SPAN-type sets, the VaR and TVaR
/// cones, an LP for halfspaces, and a Lagrangian solve for shortfall sets.
inline SupportValue support_function(const AcceptanceSpec& spec, const ScenarioSpace& space, const Position& z,
                                     double probe_radius = 1.0) {
  space.check(z);
  for (double v : z) require(v >= 0.0, ErrorCode::NegativeDual, "dual density has a negative component");
  const std::size_t n = space.size();
  auto vanishes_off = [&](const EventMask& event) {
    for (std::size_t i = 0; i < n; ++i)
      if (!event.contains(i) && z[i] > 0.0) return false;
    return true;
  };
  if (const auto* f = spec.as<family::Span>()) {
    return vanishes_off(f->event) ? SupportValue::finite(0.0) : SupportValue::minus_infinity(probe_radius);
  }
  if (const auto* f = spec.as<family::SpanType>()) {
    if (!vanishes_off(f->event)) return SupportValue::minus_infinity(probe_radius);
    return SupportValue::finite(expectation(space, masked(f->floor, f->event), z));
  }
  if (spec.is<family::PositiveCone>()) return SupportValue::finite(0.0);
  if (const auto* f = spec.as<family::VarSet>()) {
    // −t·e_j is a member for every t > 0 exactly when p_j ≤ α.
    const EventMask allowed = detail::var_allowed(space, f->alpha);
    for (std::size_t j : allowed.members())
      if (z[j] > 0.0) return SupportValue::minus_infinity(probe_radius);
    return SupportValue::finite(0.0);
  }
  if (const auto* f = spec.as<family::TvarSet>()) {
    // A cone whose polar is generated by densities bounded by 1/α.
    const double bound = expectation(space, z) / f->alpha;
    for (double v : z)
      if (v > bound * (1.0 + 1e-12)) return SupportValue::minus_infinity(probe_radius);
    return SupportValue::finite(0.0);
  }
  if (const auto* f = spec.as<family::HalfspaceIntersection>()) {
    return detail::halfspace_support(*f, space, z, probe_radius);
  }
  if (const auto* f = spec.as<family::Shortfall>()) {
    const auto [primal, dual] = detail::shortfall_sup(*f, space, z);
    if (!std::isfinite(primal)) return SupportValue::minus_infinity(probe_radius);
    return SupportValue::finite(-primal, std::max(0.0, dual - primal), false);
  }
  fail(ErrorCode::UnsupportedFamily, "no support function for " + spec.name());
}

inline SupportValue support_function(const AcceptanceSpec& spec, const ScenarioSpace& space, const DualVector& z,
                                     double probe_radius = 1.0) {
  return support_function(spec, space, z.density(), probe_radius);
}

/// Find Z ≥ 0 (a convex combination of generators) with E[XZ] < σ_A(Z) − tol.
inline std::optional<Position> separating_dual(const AcceptanceSpec& spec, const ScenarioSpace& space,
                                               const Position& x, double tol) {
  const auto gens = detail::generators(spec, space);
  const std::size_t k = gens.size();
  // minimize Σ λ_k (E[X Z_k] − γ_k) over the simplex.
  lp::Problem p(k);
  for (std::size_t i = 0; i < k; ++i) p.c[i] = expectation(space, x, gens[i].dual) - gens[i].bound;
  p.add(std::vector<double>(k, 1.0), lp::Sense::Equal, 1.0);
  const lp::Result r = lp::solve(p);
  if (r.status != lp::Status::Optimal || r.objective >= -tol) return std::nullopt;
  std::vector<double> zv(space.size(), 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < space.size(); ++j) zv[j] += r.x[i] * gens[i].dual[j];
  const Position z(zv);
  const SupportValue s = support_function(spec, space, z, probe_magnitude(spec, space));
  if (!s.is_finite() || expectation(space, x, z) >= s.lower() - tol) return std::nullopt;
  return z;
}

/// Necessity E[XZ] ≥ σ_A(Z) on members, separation of non-members (polyhedral
/// sets), and monotonicity of σ_A under Z' ≤ Z.
inline CheckVerdict verify_dual_representation(const AcceptanceSpec& spec, const ScenarioSpace& space,
                                               const std::vector<DualVector>& duals,
                                               const std::vector<Position>& positions, double tol = 1e-9,
                                               bool separation = true, std::uint64_t seed = 1) {
  require(classify(spec, space)[Property::Convex] != Tri::No, ErrorCode::PreconditionFailed,
          spec.name() + " is not convex; the dual representation does not apply");
  if (separation)
    require(spec.polyhedral(), ErrorCode::UnsupportedFamily,
            "separation is only available for polyhedral sets, not " + spec.name());
  const double slack = 10.0 * tol;
  const double radius = probe_magnitude(spec, space);
  std::vector<SupportValue> sigma;
  sigma.reserve(duals.size());
  for (const auto& z : duals) sigma.push_back(support_function(spec, space, z, radius));

  std::size_t checks = 0;
  for (const auto& x : positions) {
    if (contains(spec, space, x)) {
      for (std::size_t k = 0; k < duals.size(); ++k) {
        if (!sigma[k].is_finite()) continue;
        ++checks;
        const double pairing = expectation(space, x, duals[k].density());
        if (pairing < sigma[k].lower() - slack) {
          Witness w;
          w.positions.emplace_back("x", x);
          w.positions.emplace_back("z", duals[k].density());
          w.diagnostics["E[xz]"] = pairing;
          w.diagnostics["sigma(z)"] = sigma[k].value;
          return CheckVerdict::violation(Basis::sampled(checks), std::move(w), "member below a supporting halfspace");
        }
      }
    } else if (separation) {
      ++checks;
      if (!separating_dual(spec, space, x, tol)) {
        Witness w;
        w.positions.emplace_back("x", x);
        return CheckVerdict::violation(Basis::sampled(checks), std::move(w), "non-member could not be separated");
      }
    }
  }

  // σ_A decreasing: shrink each dual coordinatewise and by masks.
  Rng rng(seed);
  for (std::size_t k = 0; k < duals.size(); ++k) {
    if (!sigma[k].is_finite()) continue;
    const Position& z = duals[k].density();
    for (int t = 0; t < 4; ++t) {
      std::vector<double> smaller(z.size());
      for (std::size_t i = 0; i < z.size(); ++i)
        smaller[i] = t % 2 == 0 ? z[i] * uniform(rng, 0.0, 1.0) : (rng() & 1U ? z[i] : 0.0);
      const Position zs(smaller);
      const SupportValue s = support_function(spec, space, zs, radius);
      ++checks;
      const double upper = s.is_finite() ? s.value + s.slack : -std::numeric_limits<double>::infinity();
      if (upper < sigma[k].lower() - slack) {
        Witness w;
        w.positions.emplace_back("z", z);
        w.positions.emplace_back("z_smaller", zs);
        w.diagnostics["sigma(z)"] = sigma[k].value;
        w.diagnostics["sigma(z_smaller)"] = s.is_finite() ? s.value : -std::numeric_limits<double>::infinity();
        return CheckVerdict::violation(Basis::sampled(checks), std::move(w), "support function is not decreasing");
      }
    }
  }
  return CheckVerdict::hold(Basis::sampled(checks));
}

/// sup over the sample of −E[XZ] + σ_A(Z), each Z priced so that E[Z·S_T] = S₀.
inline double dual_bound_rm(const AcceptanceSpec& spec, const ScenarioSpace& space, const EligibleAsset& asset,
                            const Position& x, const std::vector<DualVector>& duals, double tol = 1e-9) {
  (void)tol;
  double best = -std::numeric_limits<double>::infinity();
  const double radius = probe_magnitude(spec, space);
  for (const auto& z : duals) {
    const double price = expectation(space, asset.payoff(), z.density());
    require(std::abs(price - asset.price()) <= 1e-8, ErrorCode::PricingConstraintViolated,
            "dual does not price the eligible asset: E[Z S_T] != S_0");
    const SupportValue s = support_function(spec, space, z, radius);
    if (!s.is_finite()) continue;
    best = std::max(best, -expectation(space, x, z.density()) + s.lower());
  }
  return best;
}

/// Generators of a polyhedral set, rescaled to price the asset; the sup over
/// them of the dual bound equals ρ_{A,S} whenever ρ is finite.
inline std::vector<DualVector> extreme_duals(const AcceptanceSpec& spec, const ScenarioSpace& space,
                                             const EligibleAsset& asset) {
  std::vector<DualVector> out;
  for (const auto& g : detail::generators(spec, space)) {
    const double price = expectation(space, asset.payoff(), g.dual);
    if (price <= 0.0) continue;
    const Position z = g.dual.scaled(asset.price() / price);
    out.emplace_back(space, z, std::abs(expectation(space, z) - 1.0) <= 1e-10);
  }
  return out;
}

/// Rescale densities so that each prices the asset.
inline std::vector<DualVector> price_duals(const ScenarioSpace& space, const EligibleAsset& asset,
                                           const std::vector<Position>& densities) {
  std::vector<DualVector> out;
  for (const auto& d : densities) {
    const double price = expectation(space, asset.payoff(), d);
    require(price > 0.0, ErrorCode::PricingConstraintViolated, "dual assigns zero value to the eligible asset");
    const Position z = d.scaled(asset.price() / price);
    out.emplace_back(space, z, std::abs(expectation(space, z) - 1.0) <= 1e-10);
  }
  return out;
}

struct RecoveredSpan {
  EventMask event;
  bool applicable = true;
  CheckVerdict verdict;
};

/// Read off A = {j : −δe_j ∉ A} and compare the set with SPAN(A) on samples.
inline RecoveredSpan recover_span(const AcceptanceSpec& spec, const ScenarioSpace& space, double tol = 1e-9,
                                  std::size_t samples = 10000, std::uint64_t seed = 7) {
  (void)tol;
  const std::size_t n = space.size();
  const bool cone = classify(spec, space)[Property::Cone] == Tri::Yes;
  const std::vector<double> deltas = cone ? std::vector<double>{1.0} : std::vector<double>{1e-3, 1.0, 1e3};
  std::vector<std::size_t> event;
  RecoveredSpan out{EventMask{}, true, {}};
  for (std::size_t j = 0; j < n; ++j) {
    std::optional<bool> outside;
    for (double d : deltas) {
      const bool in = contains(spec, space, Position::unit(n, j, -d));
      if (outside && *outside != in) {
        out.applicable = false;
        Witness w;
        w.positions.emplace_back("x", Position::unit(n, j, -d));
        w.diagnostics["scenario"] = static_cast<double>(j);
        w.diagnostics["delta"] = d;
        out.verdict = CheckVerdict::inconclusive(0, "axis probes disagree across scales; the set is not a cone");
        out.verdict.witness = std::move(w);
      }
      outside = in;
    }
    if (!contains(spec, space, Position::unit(n, j, -1.0))) event.push_back(j);
  }
  out.event = EventMask(event);
  if (!out.applicable) return out;
  if (out.event.empty()) {
    out.verdict = CheckVerdict::violation(Basis::closed_form(), Witness{{{"x", Position::constant(n, -1.0)}}, {}},
                                          "every axis default is acceptable; no event to recover");
    return out;
  }
  const AcceptanceSpec span = AcceptanceSpec::span(out.event);
  const double radius = probe_magnitude(spec, space);
  PositionSampler sampler(n, radius, seed);
  for (std::size_t k = 0; k < samples; ++k) {
    // A single default cushioned by a large surplus elsewhere comes first.
    const Position x = k < n ? Position::constant(n, 10.0 * radius).with(k, -1.0) : sampler.next();
    const bool a = contains(spec, space, x);
    const bool b = contains(span, space, x);
    if (a != b) {
      Witness w;
      w.positions.emplace_back("x", x);
      w.diagnostics["in_spec"] = a ? 1.0 : 0.0;
      w.diagnostics["in_span"] = b ? 1.0 : 0.0;
      out.verdict = CheckVerdict::violation(Basis::sampled(k + 1), std::move(w),
                                            "membership differs from SPAN of the recovered event");
      return out;
    }
  }
  out.verdict = CheckVerdict::hold(Basis::sampled(samples));
  return out;
}

}  // namespace surplus
