#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "surplus/surplus.hpp"

using namespace surplus;

TEST(Rho, Examples) {
  const auto s3 = make_space({0.2, 0.3, 0.5});
  const auto r = rho(AcceptanceSpec::span({0, 1}), s3, EligibleAsset::cash(3), Position{-3, 2, -5});
  ASSERT_TRUE(r.is_finite());
  EXPECT_NEAR(r.value(), 3.0, 1e-8);

  const auto v = rho_cash(AcceptanceSpec::var_set(0.05), make_space({0.05, 0.95}), Position{-10, 1});
  ASSERT_TRUE(v.is_finite());
  EXPECT_NEAR(v.value(), -1.0, 1e-8);

  const auto inf = rho(AcceptanceSpec::span({0, 1}), make_space({0.5, 0.5}), EligibleAsset(1.0, Position{1, 0}),
                       Position{0, -1});
  EXPECT_EQ(inf.kind(), ExtendedReal::Kind::PlusInfinity);

  const auto s2 = make_space({0.5, 0.5});
  const auto pc = AcceptanceSpec::positive_cone();
  EXPECT_NEAR(rho_cash(pc, s2, Position{-2, 5}).value(), 2.0, 1e-8);
  EXPECT_NEAR(rho_cash(pc, s2, Position{-2, 0}).value(), 2.0, 1e-8);
}

TEST(Rho, ShortfallMatchesAnalyticValue) {
  // 0.5(e^{1−m} − 1) + 0.5(e^{0} − 1) ≤ 0.5 gives m = 1 − ln 2.
  const auto s = make_space({0.5, 0.5});
  const auto sf = AcceptanceSpec::shortfall(LossFunction::exponential(1.0), 0.5);
  EXPECT_NEAR(rho_cash(sf, s, Position{-1, 5}).value(), 1.0 - std::log(2.0), 2e-9);
}

TEST(Rho, MinusInfinityAtCap) {
  // Span({0}) ignores scenario 1; an asset paying only there never matters,
  // but any asset paying in scenario 0 can release unlimited capital
  // only when the set is unbounded below along it.
  const auto s = make_space({0.5, 0.5});
  const auto r = rho(AcceptanceSpec::span({0}), s, EligibleAsset(1.0, Position{0, 1}), Position{1, -3},
                     1e-9, 1e6);
  EXPECT_EQ(r.kind(), ExtendedReal::Kind::MinusInfinityAtCap);
  EXPECT_EQ(r.cap(), 1e6);
}

TEST(Rho, SpanClosedFormWithGeneralAssets) {
  gen::Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = gen::index(rng, 1, 8);
    const auto space = gen::space(rng, n);
    const auto e = gen::event(rng, n);
    const auto asset = gen::asset(rng, n);
    const Position x = gen::position(rng, n, 10.0);
    double expected = -std::numeric_limits<double>::infinity();
    for (std::size_t j : e.members()) expected = std::max(expected, -x[j] * asset.price() / asset.payoff()[j]);
    const auto r = rho(AcceptanceSpec::span(e), space, asset, x);
    ASSERT_TRUE(r.is_finite());
    EXPECT_NEAR(r.value(), expected, 1e-8);
  }
}

TEST(Rho, CashAdditive) {
  gen::Rng rng(32);
  for (std::size_t k = 0; k < 140; ++k) {
    const std::size_t n = gen::index(rng, 1, 6);
    const auto space = gen::space(rng, n);
    const auto spec = gen::any_family(rng, n, k);
    const CapitalRequirement r(spec, space, EligibleAsset::cash(n));
    const Position x = gen::position(rng, n, 5.0);
    const double c = gen::uniform(rng, -10.0, 10.0);
    const auto a = r(x.shifted(c)), b = r(x);
    ASSERT_TRUE(a.is_finite() && b.is_finite()) << spec.name();
    EXPECT_NEAR(a.value(), b.value() - c, 1e-8) << spec.name();
  }
}

TEST(Rho, AcceptabilitySwitchesOnceAlongTheAsset) {
  gen::Rng rng(33);
  for (std::size_t k = 0; k < 140; ++k) {
    const std::size_t n = gen::index(rng, 1, 6);
    const auto space = gen::space(rng, n);
    const auto spec = gen::any_family(rng, n, k);
    const CapitalRequirement r(spec, space, gen::asset(rng, n));
    const Position x = gen::position(rng, n, 5.0);
    bool seen = false;
    for (int g = -400; g <= 400; ++g) {
      const bool in = r.acceptable_with(x, g * 0.1);
      EXPECT_FALSE(seen && !in) << spec.name();
      seen = seen || in;
    }
  }
}

TEST(Rho, BisectionAgreesWithGridScan) {
  gen::Rng rng(34);
  for (std::size_t k = 0; k < 56; ++k) {
    const std::size_t n = gen::index(rng, 1, 8);
    const auto space = gen::space(rng, n);
    const auto spec = gen::any_family(rng, n, k);
    const auto asset = k % 2 ? gen::asset(rng, n) : EligibleAsset::cash(n);
    const CapitalRequirement r(spec, space, asset);
    for (int t = 0; t < 5; ++t) {
      const Position x = gen::position(rng, n, 5.0);
      const double bound = 4.0 * (r.initial_radius(x) + probe_magnitude(spec, space));
      const auto grid = oracle::smallest_acceptable([&](double m) { return r.acceptable_with(x, m); }, -bound, bound);
      const auto value = r(x);
      ASSERT_TRUE(grid.has_value()) << spec.name();
      ASSERT_TRUE(value.is_finite()) << spec.name();
      const double spacing = 2.0 * bound / 1e6;
      EXPECT_LE(std::abs(value.value() - *grid), 2.0 * spacing) << spec.name();
    }
  }
}

TEST(SAdditive, Examples) {
  const auto s3 = make_space({0.2, 0.3, 0.5});
  const auto span = AcceptanceSpec::span({0, 1});
  const CapitalRequirement r(span, s3, EligibleAsset::cash(3));
  EXPECT_NEAR(r(Position{-3, 2, -5}.shifted(2.0)).value(), 1.0, 1e-8);
  EXPECT_EQ(check_s_additive(span, s3, EligibleAsset::cash(3), 300, 1).status, Status::Holds);

  // Both sides +∞ count as consistent.
  const auto s2 = make_space({0.5, 0.5});
  const auto full = AcceptanceSpec::span({0, 1});
  const EligibleAsset partial(1.0, Position{1, 0});
  EXPECT_EQ(rho(full, s2, partial, Position{0, -1}).kind(), ExtendedReal::Kind::PlusInfinity);
  EXPECT_EQ(check_s_additive(full, s2, partial, 300, 1).status, Status::Holds);
}

TEST(SAdditive, HoldsAcrossFamiliesAndAssets) {
  gen::Rng rng(35);
  for (std::size_t k = 0; k < 70; ++k) {
    const std::size_t n = gen::index(rng, 1, 6);
    const auto space = gen::space(rng, n);
    const auto spec = gen::any_family(rng, n, k);
    const auto v = check_s_additive(spec, space, gen::asset(rng, n), 60, k);
    EXPECT_EQ(v.status, Status::Holds) << spec.name();
  }
}

TEST(RhoSurplusInvariant, SpanHoldsTvarViolates) {
  gen::Rng rng(36);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = gen::index(rng, 1, 6);
    const auto v = check_rho_surplus_invariant(AcceptanceSpec::span(gen::event(rng, n)), gen::space(rng, n),
                                               gen::asset(rng, n), 200, t);
    EXPECT_EQ(v.status, Status::Holds);
  }
  const auto s = make_space({0.01, 0.99});
  const auto tvar = check_rho_surplus_invariant(AcceptanceSpec::tvar_set(0.05), s, EligibleAsset::cash(2), 2000, 3);
  ASSERT_EQ(tvar.status, Status::Violated);
  const Position* x = tvar.witness.find("x");
  ASSERT_NE(x, nullptr);
  const CapitalRequirement r(AcceptanceSpec::tvar_set(0.05), s, EligibleAsset::cash(2));
  EXPECT_GE(r(*x).value(), -1e-8);
  EXPECT_GT(std::abs(r(*x).value() - r(x->default_option()).value()), 1e-8);
}

TEST(RhoSurplusInvariant, StructuralWitnessLiftsToRequirementWitness) {
  // If x ∈ A but −x⁻ ∉ A, then y = x + ρ(x) has ρ(y) = 0 while −y⁻ ≤ −x⁻,
  // so ρ(−y⁻) > 0: ρ cannot be surplus invariant either.
  gen::Rng rng(37);
  std::size_t lifted = 0;
  for (std::size_t k = 0; k < 140; ++k) {
    const std::size_t n = gen::index(rng, 1, 6);
    const auto space = gen::space(rng, n);
    const auto spec = gen::any_family(rng, n, k);
    const auto sv = check_structure(spec, space, Property::SurplusInvariant, 300, k);
    if (!sv.violated()) continue;
    const Position* x = sv.witness.find("x");
    ASSERT_NE(x, nullptr);
    if (!contains(spec, space, x->default_option())) {
      const CapitalRequirement r(spec, space, EligibleAsset::cash(n));
      const Position y = x->shifted(r(*x).value());
      EXPECT_NEAR(r(y).value(), 0.0, 1e-8) << spec.name();
      EXPECT_GT(r(y.default_option()).value(), 1e-8) << spec.name();
      ++lifted;
    }
  }
  EXPECT_GT(lifted, 0u);
}
