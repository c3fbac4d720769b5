#pragma once

// Structural checks on acceptance sets: closed form where the family admits
// one, otherwise a seeded falsification search over sampled members.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "surplus/acceptance.hpp"
#include "surplus/risk_measure.hpp"
#include "surplus/sampling.hpp"
#include "surplus/verdict.hpp"

namespace surplus {

/// Members of A: single defaults cushioned by a large surplus elsewhere,
/// accepted uniform draws on [−R, R]^N, and rejected draws moved onto the
/// boundary by adding ρ_A(X) in cash.
inline std::vector<Position> sample_members(const AcceptanceSpec& spec, const ScenarioSpace& space, std::size_t count,
                                            std::uint64_t seed) {
  const std::size_t n = space.size();
  const double radius = probe_magnitude(spec, space);
  PositionSampler sampler(n, radius, seed);
  const CapitalRequirement measure(spec, space, EligibleAsset::cash(n));
  std::vector<Position> members;
  members.reserve(count);
  for (std::size_t j = 0; j < n && members.size() < count; ++j) {
    const Position x = Position::constant(n, 10.0 * radius).with(j, -1.0);
    if (contains(spec, space, x)) members.push_back(x);
  }
  std::size_t attempts = 0;
  while (members.size() < count && attempts < 4 * count + 16) {
    ++attempts;
    const Position x = sampler.next();
    if (contains(spec, space, x)) {
      members.push_back(x);
      continue;
    }
    const ExtendedReal r = measure(x);
    if (!r.is_finite()) continue;
    const Position projected = x.shifted(r.value());
    if (contains(spec, space, projected)) members.push_back(projected);
  }
  return members;
}

namespace detail {

inline Witness pair_witness(const Position& x, const Position& y, std::string y_name = "y") {
  Witness w;
  w.positions.emplace_back("x", x);
  w.positions.emplace_back(std::move(y_name), y);
  return w;
}

inline std::optional<Witness> sensitive_counterexample(const AcceptanceSpec& spec, const ScenarioSpace& space,
                                                       std::vector<double> deltas) {
  for (std::size_t j = 0; j < space.size(); ++j) {
    for (double d : deltas) {
      const Position y = Position::unit(space.size(), j, -d);
      if (contains(spec, space, y)) {
        Witness w;
        w.positions.emplace_back("x", y);
        w.diagnostics["delta"] = d;
        w.diagnostics["scenario"] = static_cast<double>(j);
        return w;
      }
    }
  }
  return std::nullopt;
}

inline std::vector<double> sensitivity_deltas() { return {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

/// Analytic counterexample for a closed-form "No"; verified before use.
inline std::optional<Witness> closed_form_witness(const AcceptanceSpec& spec, const ScenarioSpace& space,
                                                  Property property) {
  const std::size_t n = space.size();
  auto in = [&](const Position& p) { return contains(spec, space, p); };
  std::optional<Witness> out;
  if (property == Property::Sensitive) {
    auto deltas = sensitivity_deltas();
    if (const auto* f = spec.as<family::SpanType>()) {
      for (std::size_t i : f->event.members())
        if (f->floor[i] < 0.0) deltas.push_back(-f->floor[i]);
    }
    for (double d = 1e-7; d > 1e-15; d *= 0.5) deltas.push_back(d);
    out = sensitive_counterexample(spec, space, deltas);
    if (out) out->positions.emplace_back("nonpositive_member", out->positions.front().second);
    return out;
  }
  if (const auto* f = spec.as<family::SpanType>()) {
    const Position x = masked(f->floor, f->event);
    if (property == Property::SurplusInvariant) {
      out = pair_witness(x, x.default_option(), "-x^-");
    } else if (property == Property::Cone) {
      for (std::size_t i : f->event.members()) {
        if (std::abs(f->floor[i]) > kMembershipTolerance) {
          const double lambda = f->floor[i] < 0.0 ? 2.0 : 0.5;
          out = pair_witness(x, x.scaled(lambda), "lambda*x");
          out->diagnostics["lambda"] = lambda;
          break;
        }
      }
    } else if (property == Property::LawInvariant) {
      const EventMask outside = f->event.complement(n);
      double lowest = *std::min_element(f->floor.begin(), f->floor.end());
      std::vector<double> v(n, lowest - 1.0);
      for (std::size_t i : f->event.members()) v[i] = f->floor[i];
      std::size_t a = 0, b = 0;
      if (!outside.empty()) {
        a = outside.members().front();
        b = f->event.members().front();
        for (std::size_t i : f->event.members())
          if (f->floor[i] > f->floor[b]) b = i;
      } else {
        a = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
        b = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
      }
      std::vector<double> swapped = v;
      std::swap(swapped[a], swapped[b]);
      out = pair_witness(Position(v), Position(swapped), "permuted");
    }
  } else if (const auto* f = spec.as<family::Span>()) {
    if (property == Property::LawInvariant) {
      const EventMask outside = f->event.complement(n);
      if (!outside.empty()) {
        const Position x = Position::unit(n, outside.members().front(), -1.0);
        const Position y = Position::unit(n, f->event.members().front(), -1.0);
        out = pair_witness(x, y, "permuted");
      }
    }
  } else if (const auto* f = spec.as<family::VarSet>()) {
    if (property == Property::Convex) {
      // Grow an allowed default set B until one more allowed scenario j
      // overflows α; then −3 on B and −3 on j average to defaults on B ∪ {j}.
      const EventMask allowed = detail::var_allowed(space, f->alpha);
      std::vector<std::size_t> grown;
      double mass = 0.0;
      for (std::size_t j : allowed.members()) {
        if (mass + space.prob(j) <= f->alpha + kMassTolerance) {
          grown.push_back(j);
          mass += space.prob(j);
          continue;
        }
        std::vector<double> xv(n, 1.0), yv(n, 1.0);
        for (std::size_t i : grown) xv[i] = -3.0;
        yv[j] = -3.0;
        const Position x(xv), y(yv);
        Witness w;
        w.positions.emplace_back("x", x);
        w.positions.emplace_back("y", y);
        w.positions.emplace_back("midpoint", x.scaled(0.5).plus_scaled(0.5, y));
        out = w;
        break;
      }
    }
  }
  if (!out) return std::nullopt;
  // The first position must be a member and the last one must not be.
  if (!in(out->positions.front().second) || in(out->positions.back().second)) return std::nullopt;
  return out;
}

}  // namespace detail

/// Decide one structural property of an acceptance set.
inline CheckVerdict check_structure(const AcceptanceSpec& spec, const ScenarioSpace& space, Property property,
                                    std::size_t budget, std::uint64_t seed) {
  const std::size_t n = space.size();
  if (property == Property::LawInvariant)
    require(space.is_equiprobable(), ErrorCode::UnsupportedProperty,
            "law invariance is only checkable on an equiprobable space");

  const Classification known = classify(spec, space);
  if (known[property] == Tri::Yes) return CheckVerdict::hold(Basis::closed_form());
  if (known[property] == Tri::No) {
    if (auto w = detail::closed_form_witness(spec, space, property))
      return CheckVerdict::violation(Basis::closed_form(), std::move(*w));
  }

  auto in = [&](const Position& p) { return contains(spec, space, p); };
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);

  if (property == Property::Sensitive) {
    if (auto w = detail::sensitive_counterexample(spec, space, detail::sensitivity_deltas()))
      return CheckVerdict::violation(Basis::sampled(n * 7), std::move(*w), "nonzero X <= 0 is acceptable");
    return CheckVerdict::inconclusive(n * 7);
  }

  const std::vector<Position> members = sample_members(spec, space, budget, seed);
  const double radius = probe_magnitude(spec, space);

  switch (property) {
    case Property::Monotone: {
      for (std::size_t k = 0; k < members.size(); ++k) {
        std::vector<double> up(n);
        for (std::size_t i = 0; i < n; ++i) up[i] = members[k][i] + uniform(rng, 0.0, radius);
        const Position y(up);
        if (!in(y)) return CheckVerdict::violation(Basis::sampled(k + 1), detail::pair_witness(members[k], y));
      }
      return CheckVerdict::inconclusive(members.size());
    }
    case Property::Convex: {
      for (std::size_t k = 0; k + 1 < members.size(); ++k) {
        const Position& x = members[k];
        const Position& y = members[k + 1 + (k * 7919) % (members.size() - k - 1)];
        for (double lambda : {0.5, uniform(rng, 0.0, 1.0)}) {
          const Position z = x.scaled(lambda).plus_scaled(1.0 - lambda, y);
          if (!in(z)) {
            Witness w;
            w.positions.emplace_back("x", x);
            w.positions.emplace_back("y", y);
            w.positions.emplace_back("combination", z);
            w.diagnostics["lambda"] = lambda;
            return CheckVerdict::violation(Basis::sampled(k + 1), std::move(w));
          }
        }
      }
      return CheckVerdict::inconclusive(members.size());
    }
    case Property::Cone: {
      for (std::size_t k = 0; k < members.size(); ++k) {
        for (double lambda : {1e-3, 1e-2, 0.1, 0.5, 2.0, 10.0, 1e2, 1e3}) {
          const Position y = members[k].scaled(lambda);
          if (!in(y)) {
            auto w = detail::pair_witness(members[k], y, "lambda*x");
            w.diagnostics["lambda"] = lambda;
            return CheckVerdict::violation(Basis::sampled(k + 1), std::move(w));
          }
        }
      }
      return CheckVerdict::inconclusive(members.size());
    }
    case Property::SurplusInvariant: {
      const bool exhaustive = n <= 16;
      for (std::size_t k = 0; k < members.size(); ++k) {
        const Position& x = members[k];
        const Position d = x.default_option();
        if (!in(d)) return CheckVerdict::violation(Basis::sampled(k + 1), detail::pair_witness(x, d, "-x^-"));
        if (exhaustive) {
          for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
            const Position y = masked(x, EventMask::from_bits(bits, n));
            if (!in(y)) {
              auto w = detail::pair_witness(x, y, "x*1_B");
              w.diagnostics["mask"] = static_cast<double>(bits);
              return CheckVerdict::violation(Basis::sampled(k + 1), std::move(w));
            }
          }
        } else {
          for (int t = 0; t < 64; ++t) {
            const std::uint64_t bits = rng();
            const Position y = masked(x, EventMask::from_bits(bits, n));
            if (!in(y)) return CheckVerdict::violation(Basis::sampled(k + 1), detail::pair_witness(x, y, "x*1_B"));
          }
        }
      }
      if (exhaustive && !members.empty()) return CheckVerdict::hold(Basis::exhaustive(members.size()));
      return CheckVerdict::inconclusive(members.size());
    }
    case Property::LawInvariant: {
      const bool exhaustive = n <= 7;
      std::vector<std::size_t> perm(n);
      for (std::size_t k = 0; k < members.size(); ++k) {
        const Position& x = members[k];
        auto permuted = [&]() {
          std::vector<double> v(n);
          for (std::size_t i = 0; i < n; ++i) v[i] = x[perm[i]];
          return Position(std::move(v));
        };
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        if (exhaustive) {
          do {
            const Position y = permuted();
            if (!in(y))
              return CheckVerdict::violation(Basis::sampled(k + 1), detail::pair_witness(x, y, "permuted"));
          } while (std::next_permutation(perm.begin(), perm.end()));
        } else {
          for (int t = 0; t < 64; ++t) {
            std::shuffle(perm.begin(), perm.end(), rng);
            const Position y = permuted();
            if (!in(y))
              return CheckVerdict::violation(Basis::sampled(k + 1), detail::pair_witness(x, y, "permuted"));
          }
        }
      }
      if (exhaustive && !members.empty()) return CheckVerdict::hold(Basis::exhaustive(members.size()));
      return CheckVerdict::inconclusive(members.size());
    }
    case Property::Sensitive: break;
  }
  return CheckVerdict::inconclusive(members.size());
}

}  // namespace surplus
