#pragma once

// Positive risk measures: truncations of ρ_A and the loss-based zoo, with
// axiom checks and the reconstruction ρ = ρ^∨_{A(ρ)}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "surplus/acceptance.hpp"
#include "surplus/risk_measure.hpp"
#include "surplus/sampling.hpp"
#include "surplus/structure.hpp"
#include "surplus/utility.hpp"
#include "surplus/verdict.hpp"

namespace surplus {

namespace kind {

/// max{ρ_A(X), 0}
struct TruncVee {
  AcceptanceSpec base;
};
/// ρ_A(−X⁻)
struct TruncWedge {
  AcceptanceSpec base;
};
/// esssup(1_A X⁻)
struct ScenarioMargin {
  EventMask event;
};
/// E[X⁻]
struct PutPremium {};
/// ∫ VaR_β(−X⁻) φ(β) dβ
struct SpectralLoss {
  SpectralWeight weight;
};
/// TVaR_α(−X⁻)
struct ExpectedTailLoss {
  double alpha;
};
/// −E[u(−X⁻)]
struct ShortfallRisk {
  UtilityFunction util;
};
/// u⁻¹(E[u(X⁻)])
struct LossCertaintyEquivalent {
  ConvexUtility util;
};

}  // namespace kind

class PositiveRiskMeasureSpec {
 public:
  using Kind = std::variant<kind::TruncVee, kind::TruncWedge, kind::ScenarioMargin, kind::PutPremium,
                            kind::SpectralLoss, kind::ExpectedTailLoss, kind::ShortfallRisk,
                            kind::LossCertaintyEquivalent>;

  static PositiveRiskMeasureSpec trunc_vee(AcceptanceSpec base) { return {kind::TruncVee{std::move(base)}}; }
  static PositiveRiskMeasureSpec trunc_wedge(AcceptanceSpec base) { return {kind::TruncWedge{std::move(base)}}; }
  static PositiveRiskMeasureSpec scenario_margin(EventMask event) {
    require(!event.empty(), ErrorCode::InvalidSpec, "scenario_margin.event: must be nonempty");
    return {kind::ScenarioMargin{std::move(event)}};
  }
  static PositiveRiskMeasureSpec put_premium() { return {kind::PutPremium{}}; }
  static PositiveRiskMeasureSpec spectral(SpectralWeight w) { return {kind::SpectralLoss{std::move(w)}}; }
  static PositiveRiskMeasureSpec expected_tail_loss(double alpha) {
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidSpec, "expected_tail_loss.alpha: must lie in (0, 1)");
    return {kind::ExpectedTailLoss{alpha}};
  }
  static PositiveRiskMeasureSpec shortfall_risk(UtilityFunction u) { return {kind::ShortfallRisk{std::move(u)}}; }
  static PositiveRiskMeasureSpec loss_certainty(ConvexUtility u) { return {kind::LossCertaintyEquivalent{u}}; }

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
  template <class T>
  [[nodiscard]] const T* as() const noexcept {
    return std::get_if<T>(&kind_);
  }
  template <class T>
  [[nodiscard]] bool is() const noexcept {
    return std::holds_alternative<T>(kind_);
  }

  [[nodiscard]] std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, kind::TruncVee>) return "trunc_vee(" + k.base.name() + ")";
          else if constexpr (std::is_same_v<T, kind::TruncWedge>) return "trunc_wedge(" + k.base.name() + ")";
          else if constexpr (std::is_same_v<T, kind::ScenarioMargin>) return "scenario_margin";
          else if constexpr (std::is_same_v<T, kind::PutPremium>) return "put_premium";
          else if constexpr (std::is_same_v<T, kind::SpectralLoss>) return "spectral";
          else if constexpr (std::is_same_v<T, kind::ExpectedTailLoss>) return "expected_tail_loss";
          else if constexpr (std::is_same_v<T, kind::ShortfallRisk>) return "shortfall_risk";
          else return "loss_certainty";
        },
        kind_);
  }

  /// Kinds whose value comes out of a bisection rather than a closed sum.
  [[nodiscard]] bool bisected() const noexcept {
    return is<kind::TruncVee>() || is<kind::TruncWedge>() || is<kind::LossCertaintyEquivalent>();
  }

 private:
  PositiveRiskMeasureSpec(Kind k) : kind_(std::move(k)) {}  // NOLINT(google-explicit-constructor)
  Kind kind_;
};

enum class Axiom {
  CashCompatible,
  CashAdditiveSubjectToPositivity,
  CashLossAdditive,
  CashSubadditive,
  CashLossProperty,
  SurplusInvariant,
  Sensitive
};

inline constexpr std::array<Axiom, 7> kAllAxioms = {Axiom::CashCompatible,   Axiom::CashAdditiveSubjectToPositivity,
                                                   Axiom::CashLossAdditive, Axiom::CashSubadditive,
                                                   Axiom::CashLossProperty, Axiom::SurplusInvariant,
                                                   Axiom::Sensitive};

inline const char* to_string(Axiom a) {
  switch (a) {
    case Axiom::CashCompatible: return "cash_compatible";
    case Axiom::CashAdditiveSubjectToPositivity: return "cash_additive_subject_to_positivity";
    case Axiom::CashLossAdditive: return "cash_loss_additive";
    case Axiom::CashSubadditive: return "cash_subadditive";
    case Axiom::CashLossProperty: return "cash_loss_property";
    case Axiom::SurplusInvariant: return "surplus_invariant";
    case Axiom::Sensitive: return "sensitive";
  }
  return "?";
}

inline std::optional<Axiom> axiom_from_string(const std::string& name) {
  for (Axiom a : kAllAxioms)
    if (name == to_string(a)) return a;
  if (name == "casp") return Axiom::CashAdditiveSubjectToPositivity;
  return std::nullopt;
}

/// A positive risk measure bound to a space; truncations carry their cash ρ_A.
class PositiveRiskMeasure {
 public:
  PositiveRiskMeasure(PositiveRiskMeasureSpec spec, ScenarioSpace space, double tol = 1e-9)
      : spec_(std::move(spec)), space_(std::move(space)), tol_(tol) {
    require(tol_ > 0.0, ErrorCode::InvalidSpec, "tol must be > 0");
    const AcceptanceSpec* base = nullptr;
    if (const auto* k = spec_.as<kind::TruncVee>()) base = &k->base;
    if (const auto* k = spec_.as<kind::TruncWedge>()) base = &k->base;
    if (const auto* k = spec_.as<kind::ScenarioMargin>()) k->event.check_bounds(space_.size());
    if (base) {
      base_ = std::make_shared<CapitalRequirement>(*base, space_, EligibleAsset::cash(space_.size()),
                                                   RhoOptions{tol_, 1e12});
      const ExtendedReal r0 = (*base_)(Position::zero(space_.size()));
      const double v0 = r0.is_finite() ? r0.value() : r0.as_double();
      if (spec_.is<kind::TruncVee>())
        require(v0 <= 10.0 * tol_, ErrorCode::PreconditionFailed, "trunc_vee: requires rho_A(0) <= 0");
      else
        require(std::abs(v0) <= 10.0 * tol_, ErrorCode::PreconditionFailed, "trunc_wedge: requires rho_A(0) = 0");
    }
  }

  [[nodiscard]] const PositiveRiskMeasureSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const ScenarioSpace& space() const noexcept { return space_; }
  [[nodiscard]] double tol() const noexcept { return tol_; }

  /// Characteristic monetary scale, for sampling radii.
  [[nodiscard]] double magnitude() const {
    if (const auto* k = spec_.as<kind::TruncVee>()) return data_magnitude(k->base, space_);
    if (const auto* k = spec_.as<kind::TruncWedge>()) return data_magnitude(k->base, space_);
    return 0.0;
  }

  [[nodiscard]] double operator()(const Position& x) const {
    space_.check(x);
    const double v = raw(x);
    return v < 0.0 ? 0.0 : v;
  }

 private:
  [[nodiscard]] double from_base(const Position& y) const {
    const ExtendedReal r = (*base_)(y);
    require(r.kind() != ExtendedReal::Kind::PlusInfinity, ErrorCode::PreconditionFailed,
            "base requirement is +inf; the base set is not an acceptance set");
    return r.is_finite() ? r.value() : 0.0;
  }

  [[nodiscard]] double raw(const Position& x) const {
    const Position loss = x.default_option();
    return std::visit(
        [&](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, kind::TruncVee>) {
            return from_base(x);
          } else if constexpr (std::is_same_v<T, kind::TruncWedge>) {
            return from_base(loss);
          } else if constexpr (std::is_same_v<T, kind::ScenarioMargin>) {
            return max_over(x.negative_part(), k.event);
          } else if constexpr (std::is_same_v<T, kind::PutPremium>) {
            return expectation(space_, x.negative_part());
          } else if constexpr (std::is_same_v<T, kind::SpectralLoss>) {
            return integrate_quantile(space_, loss, k.weight.pieces());
          } else if constexpr (std::is_same_v<T, kind::ExpectedTailLoss>) {
            return tail_value_at_risk(space_, loss, k.alpha);
          } else if constexpr (std::is_same_v<T, kind::ShortfallRisk>) {
            double s = 0.0;
            for (std::size_t i = 0; i < space_.size(); ++i) s += space_.prob(i) * k.util(loss[i]);
            return -s;
          } else {
            const Position neg = x.negative_part();
            double s = 0.0;
            for (std::size_t i = 0; i < space_.size(); ++i) s += space_.prob(i) * k.util(neg[i]);
            return k.util.inverse(s, neg.max(), tol_);
          }
        },
        spec_.kind());
  }

  PositiveRiskMeasureSpec spec_;
  ScenarioSpace space_;
  double tol_;
  std::shared_ptr<CapitalRequirement> base_;
};

inline double evaluate(const PositiveRiskMeasureSpec& prm, const ScenarioSpace& space, const Position& x,
                       double tol = 1e-9) {
  return PositiveRiskMeasure(prm, space, tol)(x);
}

/// A(ρ) = {X : ρ(X) ≤ 10·tol}.
inline AcceptanceSpec induced_acceptance(const PositiveRiskMeasure& measure) {
  auto shared = std::make_shared<PositiveRiskMeasure>(measure);
  const double threshold = 10.0 * measure.tol();
  return AcceptanceSpec::derived([shared, threshold](const Position& x) { return (*shared)(x) <= threshold; },
                                 "A(" + measure.spec().name() + ")", measure.magnitude());
}

inline AcceptanceSpec induced_acceptance(const PositiveRiskMeasureSpec& prm, const ScenarioSpace& space,
                                         double tol = 1e-9) {
  return induced_acceptance(PositiveRiskMeasure(prm, space, tol));
}

namespace detail {

inline Witness scalar_witness(const Position& x, std::map<std::string, double> diagnostics) {
  Witness w;
  w.positions.emplace_back("x", x);
  w.diagnostics = std::move(diagnostics);
  return w;
}

/// Axioms the truncations satisfy for every base.
inline bool axiom_closed_form(const PositiveRiskMeasureSpec& prm, Axiom axiom) {
  if (prm.is<kind::TruncVee>())
    return axiom == Axiom::CashCompatible || axiom == Axiom::CashAdditiveSubjectToPositivity ||
           axiom == Axiom::CashSubadditive;
  if (prm.is<kind::TruncWedge>()) return axiom == Axiom::CashLossAdditive || axiom == Axiom::CashSubadditive;
  return false;
}

}  // namespace detail

/// Check one axiom of a positive risk measure.
inline CheckVerdict check_axiom(const PositiveRiskMeasure& rho, Axiom axiom, std::size_t budget, std::uint64_t seed) {
  if (detail::axiom_closed_form(rho.spec(), axiom)) return CheckVerdict::hold(Basis::closed_form());

  const ScenarioSpace& space = rho.space();
  const std::size_t n = space.size();
  const double slack = 10.0 * rho.tol();
  const double radius = 1.0 + rho.magnitude();
  PositionSampler sampler(n, radius, seed);
  auto close = [&](double a, double b) { return std::abs(a - b) <= slack; };

  switch (axiom) {
    case Axiom::CashCompatible:
      for (std::size_t k = 0; k < budget; ++k) {
        const Position x = sampler.next();
        const double r = rho(x);
        const double after = rho(x.shifted(r));
        if (after > slack)
          return CheckVerdict::violation(Basis::sampled(k + 1),
                                         detail::scalar_witness(x, {{"rho(x)", r}, {"rho(x + rho(x))", after}}),
                                         "adding rho(x) in cash does not restore acceptability");
      }
      return CheckVerdict::hold(Basis::sampled(budget));
    case Axiom::CashAdditiveSubjectToPositivity:
      for (std::size_t k = 0; k < budget; ++k) {
        const Position x = sampler.next();
        const double r = rho(x);
        if (r <= slack) continue;
        const double a = uniform(sampler.rng(), -radius, r);
        const double lhs = rho(x.shifted(a));
        if (!close(lhs, r - a))
          return CheckVerdict::violation(
              Basis::sampled(k + 1),
              detail::scalar_witness(x, {{"alpha", a}, {"rho(x)", r}, {"rho(x + alpha)", lhs}}));
      }
      return CheckVerdict::hold(Basis::sampled(budget));
    case Axiom::CashLossAdditive:
      for (std::size_t k = 0; k < budget; ++k) {
        const Position x = sampler.next().default_option();
        const double a = uniform(sampler.rng(), 0.0, radius);
        const double r = rho(x);
        const double lhs = rho(x.shifted(-a));
        if (!close(lhs, r + a))
          return CheckVerdict::violation(
              Basis::sampled(k + 1),
              detail::scalar_witness(x, {{"alpha", a}, {"rho(x)", r}, {"rho(x - alpha)", lhs}}));
      }
      return CheckVerdict::hold(Basis::sampled(budget));
    case Axiom::CashSubadditive:
      for (std::size_t k = 0; k < budget; ++k) {
        const Position x = sampler.next();
        const double a = uniform(sampler.rng(), 0.0, radius);
        const double r = rho(x);
        const double lhs = rho(x.shifted(a));
        if (lhs < r - a - slack)
          return CheckVerdict::violation(
              Basis::sampled(k + 1),
              detail::scalar_witness(x, {{"alpha", a}, {"rho(x)", r}, {"rho(x + alpha)", lhs}}));
      }
      return CheckVerdict::hold(Basis::sampled(budget));
    case Axiom::CashLossProperty: {
      const std::array<double, 4> grid = {0.0, 1e-3, 1.0, 10.0};
      for (double g : grid) {
        const double a = g * radius;
        const Position x = Position::constant(n, -a);
        const double r = rho(x);
        if (!close(r, a))
          return CheckVerdict::violation(Basis::exhaustive(grid.size()),
                                         detail::scalar_witness(x, {{"alpha", a}, {"rho(-alpha)", r}}));
      }
      return CheckVerdict::hold(Basis::exhaustive(grid.size()));
    }
    case Axiom::SurplusInvariant:
      for (std::size_t k = 0; k < budget; ++k) {
        const Position x = sampler.next();
        const double r = rho(x);
        const double rd = rho(x.default_option());
        if (!close(r, rd)) {
          auto w = detail::scalar_witness(x, {{"rho(x)", r}, {"rho(-x^-)", rd}});
          w.positions.emplace_back("-x^-", x.default_option());
          return CheckVerdict::violation(Basis::sampled(k + 1), std::move(w));
        }
      }
      return CheckVerdict::hold(Basis::sampled(budget));
    case Axiom::Sensitive: {
      // Bisected kinds carry an error of order tol; closed sums are exact.
      const double threshold = rho.spec().bisected() ? rho.tol() : 0.0;
      const auto deltas = detail::sensitivity_deltas();
      for (std::size_t j = 0; j < n; ++j) {
        for (double d : deltas) {
          const Position x = Position::unit(n, j, -d);
          const double r = rho(x);
          if (r <= threshold)
            return CheckVerdict::violation(Basis::sampled(j * deltas.size() + 1),
                                           detail::scalar_witness(x, {{"delta", d}, {"rho(x)", r}}),
                                           "a nonzero X <= 0 carries no requirement");
        }
      }
      return CheckVerdict::hold(Basis::sampled(n * deltas.size()));
    }
  }
  return CheckVerdict::inconclusive(0);
}

inline CheckVerdict check_axiom(const PositiveRiskMeasureSpec& prm, const ScenarioSpace& space, Axiom axiom,
                                std::size_t budget, std::uint64_t seed, double tol = 1e-9) {
  return check_axiom(PositiveRiskMeasure(prm, space, tol), axiom, budget, seed);
}

/// Compare ρ with ρ^∨ over its own induced acceptance set, using the cash asset.
inline CheckVerdict reconstruct_vee(const PositiveRiskMeasureSpec& prm, const ScenarioSpace& space, std::size_t budget,
                                    std::uint64_t seed, double tol = 1e-9) {
  const PositiveRiskMeasure rho(prm, space, tol);
  // The induced set is evaluated two orders finer so that the nested
  // bisections stay well inside the 10·tol comparison.
  const PositiveRiskMeasure inner(prm, space, tol / 100.0);
  const PositiveRiskMeasure rebuilt(PositiveRiskMeasureSpec::trunc_vee(induced_acceptance(inner)), space, tol);
  const double slack = 10.0 * tol;
  PositionSampler sampler(space.size(), 1.0 + rho.magnitude(), seed);
  for (std::size_t k = 0; k < budget; ++k) {
    const Position x = sampler.next();
    const double a = rho(x);
    const double b = rebuilt(x);
    if (std::abs(a - b) > slack) {
      const double after = rho(x.shifted(a));
      return CheckVerdict::violation(
          Basis::sampled(k + 1),
          detail::scalar_witness(x, {{"rho(x)", a}, {"rho_vee_A(rho)(x)", b}, {"rho(x + rho(x))", after}}),
          "rho differs from the truncation over its induced acceptance set");
    }
  }
  return CheckVerdict::hold(Basis::sampled(budget));
}

/// ρ^∨_A = ρ^∧_A on samples, cross-checked against the structural verdict on A.
inline CheckVerdict check_wedge_eq_vee(const AcceptanceSpec& base, const ScenarioSpace& space, std::size_t budget,
                                       std::uint64_t seed, double tol = 1e-9) {
  const PositiveRiskMeasure wedge(PositiveRiskMeasureSpec::trunc_wedge(base), space, tol);
  const PositiveRiskMeasure vee(PositiveRiskMeasureSpec::trunc_vee(base), space, tol);
  const double slack = 10.0 * tol;

  // Members first (where the two truncations can differ), then free draws.
  const std::vector<Position> members = sample_members(base, space, budget, seed);
  PositionSampler sampler(space.size(), probe_magnitude(base, space), seed ^ 0x5bd1e995ULL);
  std::optional<CheckVerdict> found;
  for (std::size_t k = 0; k < budget && !found; ++k) {
    for (const Position& x : {k < members.size() ? members[k] : sampler.next(), sampler.next()}) {
      const double v = vee(x);
      const double w = wedge(x);
      if (std::abs(v - w) > slack) {
        found = CheckVerdict::violation(Basis::sampled(k + 1),
                                        detail::scalar_witness(x, {{"rho_vee(x)", v}, {"rho_wedge(x)", w}}),
                                        "truncations differ");
        break;
      }
    }
  }
  const CheckVerdict verdict = found ? *found : CheckVerdict::hold(Basis::sampled(budget));

  const CheckVerdict structural = check_structure(base, space, Property::SurplusInvariant, budget, seed);
  const bool closed_hold = structural.holds() && structural.basis.kind == BasisKind::ClosedForm;
  if (verdict.violated() && closed_hold)
    fail(ErrorCode::HarnessError, "wedge/vee verdict contradicts the closed-form surplus-invariance verdict");
  if (verdict.holds() && structural.violated()) {
    // Replay the structural witness: a member whose default option is not accepted.
    const Position* x = structural.witness.find("x");
    if (x) {
      const double v = vee(*x);
      const double w = wedge(*x);
      if (std::abs(v - w) > slack)
        return CheckVerdict::violation(Basis::sampled(budget),
                                       detail::scalar_witness(*x, {{"rho_vee(x)", v}, {"rho_wedge(x)", w}}),
                                       "truncations differ at the structural witness");
    }
    if (structural.basis.kind == BasisKind::ClosedForm)
      fail(ErrorCode::HarnessError, "closed-form surplus-invariance violation not reflected by the truncations");
  }
  return verdict;
}

}  // namespace surplus
