#pragma once

// Sampled falsification of S-additivity and surplus invariance of ρ_{A,S}.

#include <cmath>
#include <cstdint>
#include <string>

#include "surplus/risk_measure.hpp"
#include "surplus/sampling.hpp"
#include "surplus/verdict.hpp"

namespace surplus {

namespace detail {

/// Both infinite with the same sign, or both finite within slack.
inline bool extended_close(const ExtendedReal& a, const ExtendedReal& b, double slack) {
  if (a.is_finite() != b.is_finite()) return false;
  if (!a.is_finite()) return a.kind() == b.kind();
  return std::abs(a.value() - b.value()) <= slack;
}

inline double diag_value(const ExtendedReal& r) { return r.as_double(); }

}  // namespace detail

/// ρ(X + λS_T) = ρ(X) − λS₀ on sampled (X, λ).
inline CheckVerdict check_s_additive(const CapitalRequirement& measure, std::size_t budget, std::uint64_t seed) {
  const auto& space = measure.space();
  const auto& asset = measure.asset();
  const double radius = probe_magnitude(measure.spec(), space);
  const double slack = 10.0 * measure.options().tol;
  PositionSampler sampler(space.size(), radius, seed);
  for (std::size_t k = 0; k < budget; ++k) {
    const Position x = sampler.next();
    const double lambda = k == 0 ? 1.0 : uniform(sampler.rng(), -radius, radius);
    const ExtendedReal lhs = measure(x.plus_scaled(lambda, asset.payoff()));
    const ExtendedReal base = measure(x);
    const ExtendedReal rhs = base.is_finite() ? ExtendedReal::finite(base.value() - lambda * asset.price()) : base;
    if (!detail::extended_close(lhs, rhs, slack)) {
      Witness w;
      w.positions.emplace_back("x", x);
      w.diagnostics["lambda"] = lambda;
      w.diagnostics["rho(x + lambda*S_T)"] = detail::diag_value(lhs);
      w.diagnostics["rho(x) - lambda*S0"] = detail::diag_value(rhs);
      return CheckVerdict::violation(Basis::sampled(k + 1), std::move(w), "S-additivity fails");
    }
  }
  return CheckVerdict::hold(Basis::sampled(budget));
}

/// ρ(X) = ρ(−X⁻) whenever ρ(X) ≥ 0. Half the samples are shifted down so
/// that the ρ(X) ≥ 0 branch is exercised.
inline CheckVerdict check_rho_surplus_invariant(const CapitalRequirement& measure, std::size_t budget,
                                                std::uint64_t seed) {
  const auto& space = measure.space();
  const double radius = probe_magnitude(measure.spec(), space);
  const double slack = 10.0 * measure.options().tol;
  PositionSampler sampler(space.size(), radius, seed);
  std::size_t probed = 0;
  for (std::size_t k = 0; k < budget; ++k) {
    Position x = sampler.next();
    if (k % 2 == 1) {
      // Pull the worst scenario down while keeping the surplus elsewhere.
      const std::size_t j = std::uniform_int_distribution<std::size_t>(0, space.size() - 1)(sampler.rng());
      x = x.with(j, x[j] - uniform(sampler.rng(), 0.0, 2.0 * radius));
    }
    const ExtendedReal r = measure(x);
    const bool nonnegative = r.kind() == ExtendedReal::Kind::PlusInfinity || (r.is_finite() && r.value() >= -slack);
    if (!nonnegative) continue;
    ++probed;
    const ExtendedReal r_default = measure(x.default_option());
    if (!detail::extended_close(r, r_default, slack)) {
      Witness w;
      w.positions.emplace_back("x", x);
      w.positions.emplace_back("-x^-", x.default_option());
      w.diagnostics["rho(x)"] = detail::diag_value(r);
      w.diagnostics["rho(-x^-)"] = detail::diag_value(r_default);
      return CheckVerdict::violation(Basis::sampled(k + 1), std::move(w), "rho(x) != rho(-x^-) with rho(x) >= 0");
    }
  }
  return CheckVerdict::hold(Basis::sampled(budget), std::to_string(probed) + " samples with rho >= 0");
}

inline CheckVerdict check_s_additive(const AcceptanceSpec& spec, const ScenarioSpace& space, const EligibleAsset& asset,
                                     std::size_t budget, std::uint64_t seed, RhoOptions options = {}) {
  return check_s_additive(CapitalRequirement(spec, space, asset, options), budget, seed);
}

inline CheckVerdict check_rho_surplus_invariant(const AcceptanceSpec& spec, const ScenarioSpace& space,
                                                const EligibleAsset& asset, std::size_t budget, std::uint64_t seed,
                                                RhoOptions options = {}) {
  return check_rho_surplus_invariant(CapitalRequirement(spec, space, asset, options), budget, seed);
}

}  // namespace surplus
