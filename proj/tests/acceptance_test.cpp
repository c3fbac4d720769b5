#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "surplus/surplus.hpp"

using namespace surplus;

namespace {

void expect_code(ErrorCode code, const std::function<void()>& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

struct Instance {
  ScenarioSpace space;
  AcceptanceSpec spec;
};

std::vector<Instance> corpus(std::uint64_t seed, std::size_t count, std::size_t max_n, bool equiprobable = false) {
  gen::Rng rng(seed);
  std::vector<Instance> out;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t n = gen::index(rng, 1, max_n);
    ScenarioSpace space = equiprobable ? gen::equiprobable(n) : gen::space(rng, n);
    AcceptanceSpec spec = gen::any_family(rng, n, k);
    validate(spec, space);
    out.push_back({std::move(space), std::move(spec)});
  }
  return out;
}

}  // namespace

TEST(Contains, Examples) {
  const auto s3 = make_space({0.2, 0.3, 0.5});
  const auto span = AcceptanceSpec::span({0, 1});
  EXPECT_FALSE(contains(span, s3, Position{-3, 2, -5}));
  EXPECT_TRUE(contains(span, s3, Position{0, 2, -5}));

  const auto s2 = make_space({0.5, 0.5});
  const auto sf = AcceptanceSpec::shortfall(LossFunction::exponential(1.0), 0.5);
  EXPECT_FALSE(contains(sf, s2, Position{-1, 5}));  // 0.5(e − 1) ≈ 0.859 > 0.5

  EXPECT_TRUE(contains(AcceptanceSpec::tvar_set(0.05), make_space({0.01, 0.99}), Position{-1, 10}));
  EXPECT_FALSE(contains(AcceptanceSpec::tvar_set(0.05), make_space({0.01, 0.99}), Position{-1, 0}));
  expect_code(ErrorCode::DimensionMismatch, [&] { contains(span, s2, Position{1, 2, 3}); });
}

TEST(Contains, BoundaryCountsAsInside) {
  const auto s = make_space({0.5, 0.5});
  EXPECT_TRUE(contains(AcceptanceSpec::positive_cone(), s, Position{-0.5e-9, 1}));
  EXPECT_FALSE(contains(AcceptanceSpec::positive_cone(), s, Position{-2e-9, 1}));
  const auto hs = AcceptanceSpec::halfspaces({{Position{1, 1}, -1.0}});
  EXPECT_TRUE(contains(hs, s, Position{-1, -1}));
  EXPECT_FALSE(contains(hs, s, Position{-1, -1.00001}));
}

TEST(Contains, VarSetCountsMassBelowZero) {
  const auto s = make_space({0.05, 0.95});
  const auto v = AcceptanceSpec::var_set(0.05);
  EXPECT_TRUE(contains(v, s, Position{-10, 0}));
  EXPECT_FALSE(contains(v, s, Position{0, -1}));
}

TEST(Spec, RejectsInvalidData) {
  expect_code(ErrorCode::InvalidSpec, [] { AcceptanceSpec::var_set(0.0); });
  expect_code(ErrorCode::InvalidSpec, [] { AcceptanceSpec::var_set(1.0); });
  expect_code(ErrorCode::InvalidSpec, [] { AcceptanceSpec::tvar_set(1.5); });
  // Exponential loss has infimum −1; α must exceed it.
  expect_code(ErrorCode::InvalidSpec, [] { AcceptanceSpec::shortfall(LossFunction::exponential(1.0), -1.0); });
  expect_code(ErrorCode::InvalidSpec, [] { LossFunction::exponential(-1.0); });
  expect_code(ErrorCode::InvalidSpec, [] { LossFunction::piecewise_linear({{0, 0}, {1, 1}}); });
  expect_code(ErrorCode::InvalidSpec, [] { LossFunction::piecewise_linear({{-1, 1}, {0, 0}, {1, -2}}); });
  expect_code(ErrorCode::InvalidSpec, [] { AcceptanceSpec::halfspaces({{Position{1, -1}, 0.0}}); });
  expect_code(ErrorCode::InvalidSpec, [] { AcceptanceSpec::halfspaces({{Position{0, 0}, 0.0}}); });
  const auto s = make_space({0.5, 0.5});
  expect_code(ErrorCode::InvalidSpec, [&] { validate(AcceptanceSpec::span({0, 5}), s); });
  expect_code(ErrorCode::DimensionMismatch, [&] { validate(AcceptanceSpec::span_type({0}, Position{1, 2, 3}), s); });
}

TEST(Spec, NonemptyProperAndMonotone) {
  gen::Rng rng(99);
  for (const auto& [space, spec] : corpus(1, 140, 8)) {
    const double m = probe_magnitude(spec, space);
    const std::size_t n = space.size();
    EXPECT_TRUE(contains(spec, space, Position::constant(n, m))) << spec.name();
    EXPECT_FALSE(contains(spec, space, Position::constant(n, -m))) << spec.name();
  }
  // 10³ ordered pairs per family.
  for (const auto& [space, spec] : corpus(2, 14, 6)) {
    const std::size_t n = space.size();
    const double r = probe_magnitude(spec, space);
    for (int t = 0; t < 1000; ++t) {
      const Position x = gen::position(rng, n, 2 * r);
      std::vector<double> y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + (rng() % 2 ? gen::uniform(rng, 0.0, r) : 0.0);
      if (contains(spec, space, x)) {
        EXPECT_TRUE(contains(spec, space, Position(y))) << spec.name();
      }
    }
  }
}

TEST(CheckStructure, SpanIsSurplusInvariantInClosedForm) {
  const auto s = make_space({0.2, 0.3, 0.5});
  for (const auto& e : {EventMask{0}, EventMask{0, 2}, EventMask{0, 1, 2}}) {
    const auto v = check_structure(AcceptanceSpec::span(e), s, Property::SurplusInvariant, 100, 1);
    EXPECT_EQ(v.status, Status::Holds);
    EXPECT_EQ(v.basis.kind, BasisKind::ClosedForm);
  }
}

TEST(CheckStructure, SpanTypeIffFloorNonpositiveOnEvent) {
  const auto s = make_space({0.25, 0.25, 0.5});
  const auto good = AcceptanceSpec::span_type({0, 1}, Position{-1, 0, 4});
  const auto bad = AcceptanceSpec::span_type({0, 1}, Position{-1, 0.5, -4});
  const auto hold = check_structure(good, s, Property::SurplusInvariant, 100, 1);
  EXPECT_EQ(hold.status, Status::Holds);
  EXPECT_EQ(hold.basis.kind, BasisKind::ClosedForm);
  const auto viol = check_structure(bad, s, Property::SurplusInvariant, 100, 1);
  ASSERT_EQ(viol.status, Status::Violated);
  const Position* x = viol.witness.find("x");
  ASSERT_NE(x, nullptr);
  EXPECT_TRUE(contains(bad, s, *x));
  EXPECT_FALSE(contains(bad, s, viol.witness.positions.back().second));
}

TEST(CheckStructure, TvarCounterexampleWitness) {
  const auto s = make_space({0.01, 0.99});
  const auto v = check_structure(AcceptanceSpec::tvar_set(0.05), s, Property::SurplusInvariant, 1000, 42);
  ASSERT_EQ(v.status, Status::Violated);
  const Position* x = v.witness.find("x");
  ASSERT_NE(x, nullptr);
  EXPECT_EQ(*x, (Position{-1, 10}));
  EXPECT_TRUE(contains(AcceptanceSpec::tvar_set(0.05), s, *x));
  EXPECT_FALSE(contains(AcceptanceSpec::tvar_set(0.05), s, x->default_option()));
}

TEST(CheckStructure, TvarDegeneratesToPositiveCone) {
  const auto s = make_space({0.1, 0.9});
  const auto v = check_structure(AcceptanceSpec::tvar_set(0.05), s, Property::SurplusInvariant, 100, 1);
  EXPECT_EQ(v.status, Status::Holds);
}

TEST(CheckStructure, LawInvariantNeedsEquiprobableSpace) {
  expect_code(ErrorCode::UnsupportedProperty, [] {
    check_structure(AcceptanceSpec::positive_cone(), make_space({0.3, 0.7}), Property::LawInvariant, 10, 1);
  });
  const auto eq = gen::equiprobable(3);
  EXPECT_EQ(check_structure(AcceptanceSpec::span({0}), eq, Property::LawInvariant, 10, 1).status, Status::Violated);
  EXPECT_EQ(check_structure(AcceptanceSpec::positive_cone(), eq, Property::LawInvariant, 10, 1).status, Status::Holds);
  // Halfspace sets have no closed form; all 3! permutations are tried.
  const auto sym = AcceptanceSpec::halfspaces({{Position{1, 1, 1}, -1.0}});
  const auto v = check_structure(sym, eq, Property::LawInvariant, 50, 3);
  EXPECT_EQ(v.status, Status::Holds);
  EXPECT_EQ(v.basis.kind, BasisKind::Exhaustive);
  const auto skew = AcceptanceSpec::halfspaces({{Position{3, 0, 0}, -1.0}});
  EXPECT_EQ(check_structure(skew, eq, Property::LawInvariant, 50, 3).status, Status::Violated);
}

TEST(CheckStructure, ConvexAndConeFalsification) {
  // Two allowed single defaults whose combination is not allowed.
  const auto s = make_space({0.2, 0.2, 0.6});
  const auto var = AcceptanceSpec::var_set(0.25);
  const auto v = check_structure(var, s, Property::Convex, 500, 4);
  ASSERT_EQ(v.status, Status::Violated);
  ASSERT_GE(v.witness.positions.size(), 2u);
  EXPECT_TRUE(contains(var, s, v.witness.positions[0].second));
  EXPECT_FALSE(contains(var, s, v.witness.positions.back().second));

  const auto sf = AcceptanceSpec::shortfall(LossFunction::exponential(1.0), 0.5);
  const auto c = check_structure(sf, make_space({0.5, 0.5}), Property::Cone, 500, 4);
  ASSERT_EQ(c.status, Status::Violated);
  EXPECT_FALSE(contains(sf, make_space({0.5, 0.5}), c.witness.positions.back().second));
}

TEST(CheckStructure, SensitiveProbes) {
  const auto s = make_space({0.5, 0.5});
  EXPECT_EQ(check_structure(AcceptanceSpec::positive_cone(), s, Property::Sensitive, 10, 1).status, Status::Holds);
  const auto span = check_structure(AcceptanceSpec::span({0}), s, Property::Sensitive, 10, 1);
  ASSERT_EQ(span.status, Status::Violated);
  EXPECT_TRUE(contains(AcceptanceSpec::span({0}), s, span.witness.positions[0].second));
}

TEST(CheckStructure, HalfspaceSurplusInvarianceBySearch) {
  const auto s = make_space({0.5, 0.5});
  // {x0 + x1 ≥ 0} accepts (−1, 1) but not (−1, 0).
  const auto hs = AcceptanceSpec::halfspaces({{Position{1, 1}, 0.0}});
  const auto v = check_structure(hs, s, Property::SurplusInvariant, 200, 2);
  ASSERT_EQ(v.status, Status::Violated);
  const Position* x = v.witness.find("x");
  ASSERT_NE(x, nullptr);
  EXPECT_TRUE(contains(hs, s, *x));
  EXPECT_FALSE(contains(hs, s, v.witness.positions.back().second));
  // Coordinatewise constraints are masking-closed: all 2^N masks are tried.
  const auto box = AcceptanceSpec::halfspaces({{Position{2, 0}, -1.0}, {Position{0, 2}, -2.0}});
  const auto h = check_structure(box, s, Property::SurplusInvariant, 200, 2);
  EXPECT_EQ(h.status, Status::Holds);
  EXPECT_EQ(h.basis.kind, BasisKind::Exhaustive);
}

TEST(Classify, Examples) {
  const auto s = make_space({0.06, 0.06, 0.88});
  const auto var = classify(AcceptanceSpec::var_set(0.1), s);
  EXPECT_EQ(var[Property::Cone], Tri::Yes);
  EXPECT_EQ(var[Property::Convex], Tri::No);
  EXPECT_EQ(var[Property::SurplusInvariant], Tri::Yes);

  const auto sf = classify(AcceptanceSpec::shortfall(LossFunction::exponential(1.0), 0.5), gen::equiprobable(3));
  EXPECT_EQ(sf[Property::Convex], Tri::Yes);
  EXPECT_EQ(sf[Property::SurplusInvariant], Tri::Yes);
  EXPECT_EQ(sf[Property::LawInvariant], Tri::Yes);

  const auto pc = classify(AcceptanceSpec::positive_cone(), s);
  EXPECT_EQ(pc[Property::Convex], Tri::Yes);
  EXPECT_EQ(pc[Property::Cone], Tri::Yes);
  EXPECT_EQ(pc[Property::SurplusInvariant], Tri::Yes);
  EXPECT_EQ(pc[Property::Sensitive], Tri::Yes);

  const auto tv = classify(AcceptanceSpec::tvar_set(0.5), s);
  EXPECT_EQ(tv[Property::Convex], Tri::Yes);
  EXPECT_EQ(tv[Property::Cone], Tri::Yes);
  EXPECT_EQ(tv[Property::Sensitive], Tri::Yes);
}

TEST(SurplusInvariance, BothCharacterizationsAgree) {
  // X ∈ A ⇒ −X⁻ ∈ A and X ∈ A ⇒ X·1_B ∈ A for every mask B, on closed-form
  // surplus-invariant instances; 0 is always a member.
  for (const auto& [space, spec] : corpus(3, 70, 10)) {
    if (classify(spec, space)[Property::SurplusInvariant] != Tri::Yes) continue;
    const std::size_t n = space.size();
    EXPECT_TRUE(contains(spec, space, Position::zero(n))) << spec.name();
    for (const auto& x : sample_members(spec, space, 20, 5)) {
      ASSERT_TRUE(contains(spec, space, x));
      EXPECT_TRUE(contains(spec, space, x.default_option())) << spec.name();
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits)
        ASSERT_TRUE(contains(spec, space, masked(x, EventMask::from_bits(bits, n)))) << spec.name();
    }
  }
}

TEST(SurplusInvariance, SearchVerdictsMatchClassification) {
  for (const auto& [space, spec] : corpus(4, 84, 6)) {
    const Tri known = classify(spec, space)[Property::SurplusInvariant];
    const auto v = check_structure(spec, space, Property::SurplusInvariant, 200, 9);
    if (known == Tri::Yes) {
      EXPECT_EQ(v.status, Status::Holds) << spec.name();
    } else if (known == Tri::No) {
      EXPECT_EQ(v.status, Status::Violated) << spec.name();
    }
    if (v.violated()) {
      const Position* x = v.witness.find("x");
      ASSERT_NE(x, nullptr);
      EXPECT_TRUE(contains(spec, space, *x));
      EXPECT_FALSE(contains(spec, space, v.witness.positions.back().second));
    }
  }
}

TEST(SurplusInvariance, SensitiveAndSurplusInvariantMeansPositiveCone) {
  std::size_t both = 0;
  for (const auto& [space, spec] : corpus(5, 210, 6)) {
    const auto si = check_structure(spec, space, Property::SurplusInvariant, 200, 3);
    const auto se = check_structure(spec, space, Property::Sensitive, 200, 3);
    if (!si.holds() || !se.holds()) continue;
    ++both;
    // Equal membership with L∞₊ on probes and random draws.
    const std::size_t n = space.size();
    PositionSampler sampler(n, probe_magnitude(spec, space), 17);
    for (int t = 0; t < 500; ++t) {
      const Position x = t < static_cast<int>(n) ? Position::unit(n, t, -1e-6) : sampler.next();
      ASSERT_EQ(contains(spec, space, x), contains(AcceptanceSpec::positive_cone(), space, x)) << spec.name();
    }
  }
  EXPECT_GT(both, 0u);
}

TEST(AcceptanceFromRho, RoundTripsClosedSets) {
  gen::Rng rng(21);
  const auto s = make_space({0.05, 0.95});
  const auto s2 = make_space({0.5, 0.5});
  const std::vector<std::pair<AcceptanceSpec, ScenarioSpace>> cases = {
      {AcceptanceSpec::span({0}), s},
      {AcceptanceSpec::shortfall(LossFunction::exponential(1.0), 0.5), s2},
      {AcceptanceSpec::var_set(0.05), s}};
  for (const auto& [spec, space] : cases) {
    const auto derived = acceptance_from_rho(spec, space, EligibleAsset::cash(2));
    std::size_t agree = 0;
    for (int t = 0; t < 1000; ++t) {
      const Position x = gen::position(rng, 2, 3.0);
      agree += contains(spec, space, x) == contains(derived, space, x);
    }
    EXPECT_EQ(agree, 1000u) << spec.name();
  }
}
