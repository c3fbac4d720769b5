#pragma once

// Finite-dimensional structure of surplus-invariant sets: the coordinate
// infima v_j, the bounded/unbounded split A = π(A) × R^{N−K}, and the
// testable content of cone(A − w) = R^K_+ × R^{N−K}.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "surplus/acceptance.hpp"
#include "surplus/risk_measure.hpp"
#include "surplus/sampling.hpp"
#include "surplus/structure.hpp"
#include "surplus/verdict.hpp"

namespace surplus {

/// v_j = inf{t : t·e_j ∈ A}, which equals inf_{x∈A} x_j when A is surplus invariant.
inline ExtendedReal coordinate_infimum(const AcceptanceSpec& spec, const ScenarioSpace& space, std::size_t j,
                                       double tol = 1e-9, double cap = 1e12) {
  const std::size_t n = space.size();
  require(j < n, ErrorCode::DimensionMismatch, "coordinate index out of range");
  auto in = [&](double t) { return contains(spec, space, Position::unit(n, j, t)); };

  // The axis indicator must switch at most once, from out to in.
  bool seen_member = false;
  for (double t : {-cap, -1e9, -1e6, -1e3, -10.0, -1.0, -0.1, 0.0, 0.1, 1.0, 10.0, 1e3, 1e6}) {
    if (std::abs(t) > cap) continue;
    const bool member = in(t);
    require(!(seen_member && !member), ErrorCode::NonMonotoneAxis,
            "axis " + std::to_string(j) + ": membership is not monotone along t*e_j");
    seen_member = seen_member || member;
  }
  if (in(-cap)) return ExtendedReal::minus_infinity_at_cap(cap);

  double hi = 0.0;
  if (!in(hi)) {
    hi = 1.0;
    while (!in(hi)) {
      if (hi >= cap) return ExtendedReal::plus_infinity();
      hi = std::min(2.0 * hi, cap);
    }
  }
  double lo = hi > 0.0 ? 0.0 : -1.0;
  while (in(lo)) {
    hi = lo;
    lo = std::max(2.0 * lo, -cap);
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (in(mid) ? hi : lo) = mid;
  }
  return ExtendedReal::finite(hi);
}

struct StructureReport {
  std::vector<ExtendedReal> coord_infima;
  std::vector<std::size_t> bounded;
  std::vector<std::size_t> unbounded;
  Position anchor;
  double cap = 1e12;
};

inline StructureReport structure(const AcceptanceSpec& spec, const ScenarioSpace& space, double tol = 1e-9,
                                 double cap = 1e12) {
  const std::size_t n = space.size();
  StructureReport report{{}, {}, {}, Position::zero(n), cap};
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const ExtendedReal v = coordinate_infimum(spec, space, j, tol, cap);
    report.coord_infima.push_back(v);
    if (v.is_finite()) {
      report.bounded.push_back(j);
      w[j] = v.value();
    } else {
      report.unbounded.push_back(j);
    }
  }
  require(!report.bounded.empty(), ErrorCode::SpecNotProper,
          spec.name() + ": every coordinate is unbounded, so the set is not proper");
  report.anchor = Position(w);
  return report;
}

namespace detail {

inline std::string convexity_note(const AcceptanceSpec& spec, const ScenarioSpace& space) {
  return classify(spec, space)[Property::Convex] == Tri::Yes
             ? std::string{}
             : "informational: the set is not known to be convex, so the product decomposition is not guaranteed";
}

}  // namespace detail

/// (a, z) ∈ A ⟺ (a, 0) ∈ A for z on the unbounded coordinates, and Σ z_j e_j ∈ A.
inline CheckVerdict verify_product_decomposition(const AcceptanceSpec& spec, const ScenarioSpace& space,
                                                 const StructureReport& report, std::size_t budget,
                                                 std::uint64_t seed, double tol = 1e-9) {
  (void)tol;
  const std::size_t n = space.size();
  const std::string note = detail::convexity_note(spec, space);
  const double radius = probe_magnitude(spec, space);
  const std::vector<Position> members = sample_members(spec, space, budget / 2 + 1, seed);
  Rng rng(seed ^ 0x2545f4914f6cdd1dULL);
  for (std::size_t k = 0; k < budget; ++k) {
    std::vector<double> a(n, 0.0), z(n, 0.0);
    const bool from_member = k % 2 == 0 && k / 2 < members.size();
    for (std::size_t j : report.bounded) a[j] = from_member ? members[k / 2][j] : uniform(rng, -radius, radius);
    for (std::size_t j : report.unbounded) z[j] = uniform(rng, -1e3, 1e3);
    const Position pa(a), pz(z), full = pa.plus_scaled(1.0, pz);
    const bool in_full = contains(spec, space, full);
    const bool in_projection = contains(spec, space, pa);
    if (in_full != in_projection) {
      Witness w;
      w.positions.emplace_back("x", full);
      w.positions.emplace_back("projection", pa);
      w.diagnostics["in_x"] = in_full ? 1.0 : 0.0;
      w.diagnostics["in_projection"] = in_projection ? 1.0 : 0.0;
      return CheckVerdict::violation(Basis::sampled(k + 1), std::move(w), "membership depends on an unbounded axis");
    }
    if (!report.unbounded.empty() && !contains(spec, space, pz)) {
      Witness w;
      w.positions.emplace_back("x", pz);
      return CheckVerdict::violation(Basis::sampled(k + 1), std::move(w),
                                     "a combination of unbounded axes is not acceptable");
    }
  }
  return CheckVerdict::hold(Basis::sampled(budget), note);
}

/// Members lie above the anchor; (v_j + m)e_j ∈ A on bounded axes; ±10³e_j ∈ A on unbounded ones.
inline CheckVerdict verify_translated_cone(const AcceptanceSpec& spec, const ScenarioSpace& space,
                                           const StructureReport& report, std::size_t budget, std::uint64_t seed,
                                           double tol = 1e-9) {
  const std::size_t n = space.size();
  const double slack = 10.0 * tol;
  const std::string note = detail::convexity_note(spec, space);
  const std::vector<Position> members = sample_members(spec, space, budget, seed);
  for (std::size_t k = 0; k < members.size(); ++k) {
    for (std::size_t j : report.bounded) {
      const double v = report.coord_infima[j].value();
      if (members[k][j] < v - slack) {
        Witness w;
        w.positions.emplace_back("x", members[k]);
        w.diagnostics["scenario"] = static_cast<double>(j);
        w.diagnostics["v_j"] = v;
        return CheckVerdict::violation(Basis::sampled(k + 1), std::move(w), "member below the anchor");
      }
    }
  }
  for (std::size_t j : report.bounded) {
    const double v = report.coord_infima[j].value();
    for (double m : {0.0, 1.0, 10.0, 1e3}) {
      const Position x = Position::unit(n, j, v + m);
      if (!contains(spec, space, x)) {
        Witness w;
        w.positions.emplace_back("x", x);
        w.diagnostics["m"] = m;
        return CheckVerdict::violation(Basis::exhaustive(), std::move(w), "(v_j + m) e_j is not acceptable");
      }
    }
  }
  for (std::size_t j : report.unbounded) {
    for (double t : {-1e3, 1e3}) {
      const Position x = Position::unit(n, j, t);
      if (!contains(spec, space, x)) {
        Witness w;
        w.positions.emplace_back("x", x);
        return CheckVerdict::violation(Basis::exhaustive(), std::move(w), "unbounded axis is not fully acceptable");
      }
    }
  }
  return CheckVerdict::hold(Basis::sampled(members.size()), note);
}

}  // namespace surplus
