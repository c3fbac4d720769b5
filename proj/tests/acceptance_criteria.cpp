// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "generators.hpp"
#include "oracles.hpp"
#include "surplus/cli.hpp"
#include "surplus/surplus.hpp"

using namespace surplus;

namespace {

struct Result {
  bool ok = true;
  std::string detail;

  void check(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

Result tvar_counterexample() {
  Result r;
  const auto space = make_space({0.01, 0.99});
  const Position x{-1, 10};
  const double t = tail_value_at_risk(space, x, 0.05);
  const double td = tail_value_at_risk(space, x.default_option(), 0.05);
  r.check(std::abs(t + 7.8) <= 1e-9, "TVaR(X) = " + fmt(t));
  r.check(std::abs(td - 0.2) <= 1e-9, "TVaR(-X^-) = " + fmt(td));
  // (ε/α)P(A) + γ(P(A)/α − 1) for ε = 1, γ = 10.
  r.check(std::abs(t - ((1.0 / 0.05) * 0.01 + 10.0 * (0.01 / 0.05 - 1.0))) <= 1e-9, "closed form mismatch");
  const auto spec = AcceptanceSpec::tvar_set(0.05);
  const auto v = check_structure(spec, space, Property::SurplusInvariant, 1000, 1);
  r.check(v.violated(), "check_structure did not report a violation");
  if (const Position* w = v.witness.find("x")) {
    r.check((*w)[0] < 0.0 && (*w)[1] > 0.0, "witness is not of the form (-eps, gamma)");
    r.check(contains(spec, space, *w) && !contains(spec, space, w->default_option()), "witness does not replay");
  } else {
    r.check(false, "no witness");
  }
  if (r.ok) r.detail = "TVaR(X) = " + fmt(t) + ", TVaR(-X^-) = " + fmt(td) + ", structural witness replays";
  return r;
}

Result rho_surplus_invariance_propagates() {
  Result r;
  gen::Rng rng(1001);
  std::size_t instances = 0;
  for (std::size_t k = 0; k < 240; ++k) {
    const std::size_t n = gen::index(rng, 1, 8);
    const auto space = gen::space(rng, n);
    AcceptanceSpec spec = AcceptanceSpec::positive_cone();
    switch (k % 4) {
      case 0: spec = AcceptanceSpec::span(gen::event(rng, n)); break;
      case 1: spec = gen::span_type_valid(rng, n); break;
      case 2: spec = gen::shortfall(rng); break;
      default: spec = gen::var_set(rng); break;
    }
    const auto v = check_rho_surplus_invariant(spec, space, gen::asset(rng, n), 60, k);
    ++instances;
    r.check(!v.violated(), spec.name() + " violated at instance " + std::to_string(k));
  }
  r.detail = r.ok ? std::to_string(instances) + " instances, none violated" : r.detail;
  return r;
}

Result span_recovery() {
  Result r;
  gen::Rng rng(1002);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = gen::index(rng, 1, 10);
    const auto space = gen::space(rng, n);
    const auto e = gen::event(rng, n);
    const auto rec = recover_span(AcceptanceSpec::span(e), space, 1e-9, 10000, t);
    r.check(rec.applicable && rec.event == e, "event not recovered at instance " + std::to_string(t));
    r.check(rec.verdict.holds(), "verification failed at instance " + std::to_string(t));
  }
  int tvar_violated = 0;
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = gen::index(rng, 2, 6);
    const auto space = gen::space(rng, n);
    const auto spec = gen::tvar_set(rng);
    const auto rec = recover_span(spec, space, 1e-9, 10000, t);
    const auto si = check_structure(spec, space, Property::SurplusInvariant, 1000, t);
    r.check(rec.verdict.violated() == si.violated(), spec.name() + ": recovery disagrees with classification");
    tvar_violated += rec.verdict.violated();
  }
  r.check(tvar_violated > 0, "no TVaR instance produced a violation");
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = gen::index(rng, 1, 6);
    const auto space = gen::space(rng, n);
    const auto l = LossFunction::exponential(gen::uniform(rng, 0.5, 2.0));
    const auto rec = recover_span(AcceptanceSpec::shortfall(l, 0.5), space, 1e-9, 10000, t);
    r.check(!rec.applicable, "shortfall recovery reported as applicable");
  }
  if (r.ok) r.detail = "100 spans exact; TVaR and shortfall as classified";
  return r;
}

/// Bases with ρ_A(0) = 0 for the cash asset.
AcceptanceSpec zero_normalized(gen::Rng& rng, std::size_t n, std::size_t k) {
  switch (k % 7) {
    case 0: return AcceptanceSpec::span(gen::event(rng, n));
    case 1: {
      const auto e = gen::event(rng, n);
      std::vector<double> floor(n, 0.0);
      const auto members = e.members();
      for (std::size_t i = 1; i < members.size(); ++i) floor[members[i]] = -gen::uniform(rng, 0.0, 2.0);
      return AcceptanceSpec::span_type(e, Position(floor));
    }
    case 2: {
      const auto l = gen::loss(rng);
      return AcceptanceSpec::shortfall(l, l(0.0));
    }
    case 3: return gen::var_set(rng);
    case 4: return gen::tvar_set(rng);
    case 5: {
      std::vector<family::Halfspace> hs;
      const std::size_t count = gen::index(rng, 1, 3);
      for (std::size_t c = 0; c < count; ++c) {
        std::vector<double> z(n);
        for (double& v : z) v = rng() % 3 == 0 ? 0.0 : gen::uniform(rng, 0.1, 2.0);
        z[gen::index(rng, 0, n - 1)] = 1.0;
        hs.push_back({Position(z), 0.0});
      }
      return AcceptanceSpec::halfspaces(hs);
    }
    default: return AcceptanceSpec::positive_cone();
  }
}

Result wedge_matches_structure() {
  Result r;
  gen::Rng rng(1004);
  std::size_t bases = 0, disagreements = 0, violated = 0;
  for (std::size_t k = 0; k < 210; ++k) {
    const std::size_t n = gen::index(rng, 1, 6);
    const auto space = gen::space(rng, n);
    const auto spec = zero_normalized(rng, n, k);
    const CapitalRequirement rho(spec, space, EligibleAsset::cash(n));
    const auto r0 = rho(Position::zero(n));
    if (!r0.is_finite() || std::abs(r0.value()) > 1e-8) continue;
    ++bases;
    const auto eq = check_wedge_eq_vee(spec, space, 150, k);
    const auto si = check_structure(spec, space, Property::SurplusInvariant, 150, k);
    if (eq.violated() != si.violated()) ++disagreements;
    violated += eq.violated();
  }
  r.check(bases >= 200, "only " + std::to_string(bases) + " bases");
  r.check(disagreements == 0, std::to_string(disagreements) + " disagreements");
  r.check(violated > 0, "no non-invariant base exercised");
  if (r.ok) r.detail = std::to_string(bases) + " bases, 0 disagreements, " + std::to_string(violated) + " violated";
  return r;
}

Result reconstruction() {
  Result r;
  gen::Rng rng(1005);
  for (int t = 0; t < 4; ++t) {
    const std::size_t n = gen::index(rng, 1, 5);
    const auto v = reconstruct_vee(PositiveRiskMeasureSpec::scenario_margin(gen::event(rng, n)), gen::space(rng, n),
                                   1000, t);
    r.check(v.holds(), "scenario margin failed");
  }
  std::size_t truncations = 0;
  for (std::size_t k = 0; k < 7; ++k) {
    const std::size_t n = gen::index(rng, 1, 4);
    const auto space = gen::space(rng, n);
    const auto base = gen::any_family(rng, n, k);
    const CapitalRequirement rho(base, space, EligibleAsset::cash(n));
    if (rho(Position::zero(n)).value() > 0.0) continue;
    ++truncations;
    const auto v = reconstruct_vee(PositiveRiskMeasureSpec::trunc_vee(base), space, 1000, k);
    r.check(v.holds(), "trunc_vee(" + base.name() + ") failed");
  }
  const auto s2 = make_space({0.5, 0.5});
  const PositiveRiskMeasure put(PositiveRiskMeasureSpec::put_premium(), s2);
  const Position x{-2, 0};
  const double after = put(x.shifted(put(x)));
  r.check(std::abs(after - 0.5) <= 1e-12, "rho(x + rho(x)) = " + fmt(after));
  r.check(reconstruct_vee(PositiveRiskMeasureSpec::put_premium(), s2, 1000, 1).violated(),
          "put premium reconstruction did not fail");
  if (r.ok) r.detail = "margin and " + std::to_string(truncations) + " truncations rebuilt; put premium 0.5";
  return r;
}

Result bisection_vs_grid() {
  Result r;
  gen::Rng rng(1006);
  double worst = 0.0;
  for (std::size_t family = 0; family < 7; ++family) {
    for (int t = 0; t < 50; ++t) {
      const std::size_t n = gen::index(rng, 1, 6);
      const auto space = gen::space(rng, n);
      const auto spec = gen::any_family(rng, n, family);
      const auto asset = t % 2 ? gen::asset(rng, n) : EligibleAsset::cash(n);
      const CapitalRequirement rho(spec, space, asset);
      const Position x = gen::position(rng, n, 5.0);
      const double bound = 4.0 * (rho.initial_radius(x) + probe_magnitude(spec, space));
      const auto grid =
          oracle::smallest_acceptable([&](double m) { return rho.acceptable_with(x, m); }, -bound, bound);
      const auto value = rho(x);
      if (!grid || !value.is_finite()) {
        r.check(false, spec.name() + ": no finite value");
        continue;
      }
      const double spacing = 2.0 * bound / 1e6;
      const double err = std::abs(value.value() - *grid) / spacing;
      worst = std::max(worst, err);
      r.check(err <= 2.0, spec.name() + ": error " + fmt(err) + " spacings");
    }
  }
  if (r.ok) r.detail = "350 positions, worst " + fmt(worst) + " grid spacings";
  return r;
}

Result duality() {
  Result r;
  gen::Rng rng(1007);
  double worst_gap = 0.0;
  for (std::size_t k = 0; k < 140; ++k) {
    const std::size_t n = gen::index(rng, 1, 6);
    const auto space = gen::space(rng, n);
    const auto spec = gen::any_family(rng, n, k);
    if (classify(spec, space)[Property::Convex] == Tri::No) continue;
    const auto asset = gen::asset(rng, n);
    std::vector<Position> raw;
    for (int d = 0; d < 6; ++d) {
      std::vector<double> z(n);
      for (double& v : z) v = gen::uniform(rng, 0.0, 2.0);
      raw.emplace_back(z);
    }
    const CapitalRequirement rho(spec, space, asset);
    const Position x = gen::position(rng, n, 5.0);
    const auto value = rho(x);
    if (!value.is_finite()) continue;
    const double weak = dual_bound_rm(spec, space, asset, x, price_duals(space, asset, raw));
    r.check(weak <= value.value() + 1e-7, spec.name() + ": weak duality fails");
    if (spec.polyhedral()) {
      const double strong = dual_bound_rm(spec, space, asset, x, extreme_duals(spec, space, asset));
      worst_gap = std::max(worst_gap, std::abs(strong - value.value()));
      r.check(std::abs(strong - value.value()) <= 1e-7, spec.name() + ": gap " + fmt(strong - value.value()));
    }
  }
  const auto sf = AcceptanceSpec::shortfall(LossFunction::exponential(1.0), 0.5);
  const auto s2 = make_space({0.5, 0.5});
  for (std::size_t j = 0; j < 2; ++j) {
    const auto v = coordinate_infimum(sf, s2, j);
    r.check(v.is_finite() && std::abs(v.value() + std::log(2.0)) <= 1e-8, "v_j differs from -ln 2");
  }
  if (r.ok) r.detail = "weak duality everywhere, polyhedral gap " + fmt(worst_gap);
  return r;
}

Result finite_dimensional_structure() {
  Result r;
  gen::Rng rng(1008);
  double worst = 0.0;
  for (std::size_t k = 0; k < 100; ++k) {
    const std::size_t n = gen::index(rng, 1, 8);
    const auto space = gen::space(rng, n);
    AcceptanceSpec spec = AcceptanceSpec::positive_cone();
    switch (k % 4) {
      case 0: spec = AcceptanceSpec::span(gen::event(rng, n)); break;
      case 1: spec = gen::span_type_valid(rng, n); break;
      case 2: spec = gen::shortfall(rng); break;
      default: break;
    }
    const auto report = structure(spec, space);
    r.check(verify_product_decomposition(spec, space, report, 300, k).holds(), spec.name() + ": decomposition");
    r.check(verify_translated_cone(spec, space, report, 300, k).holds(), spec.name() + ": translated cone");
    for (const auto& x : sample_members(spec, space, 300, k + 1))
      for (std::size_t j : report.bounded) worst = std::max(worst, report.coord_infima[j].value() - x[j]);
  }
  r.check(worst <= 1e-8, "anchor exceeded by " + fmt(worst));
  if (r.ok) r.detail = "100 instances; max anchor excess " + fmt(std::max(worst, 0.0));
  return r;
}

Result cli_determinism() {
  Result r;
  auto data = [](const std::string& name) { return std::string(SURPLUS_DATA_DIR) + "/" + name + ".json"; };
  auto config = [&](const std::string& space, const std::string& acceptance, const std::string& positions) {
    cli::Config c;
    c.space = data(space);
    if (!acceptance.empty()) c.acceptance = data(acceptance);
    c.positions = data(positions);
    c.seed = 7;
    c.budget = 200;
    return c;
  };
  std::vector<std::pair<std::string, cli::Config>> runs;
  runs.emplace_back("assess", config("space3", "span01", "positions3"));
  runs.emplace_back("requirement", config("space_var", "var", "positions_var"));
  auto props = config("space_tvar", "tvar", "positions_tvar");
  props.properties = {"surplus_invariant", "convex", "s_additive", "wedge_eq_vee"};
  runs.emplace_back("properties", props);
  auto measure = config("space2", "", "positions2");
  measure.measure = data("put_premium");
  measure.properties = {"cash_compatible", "sensitive"};
  runs.emplace_back("properties", measure);
  auto dual = config("space4", "span13", "positions4");
  dual.duals = data("duals4");
  dual.verify = true;
  runs.emplace_back("dual", dual);
  runs.emplace_back("recover-span", config("space4", "span13", "positions4"));
  runs.emplace_back("structure", config("space2", "shortfall", "positions2"));
  for (auto& [command, c] : runs) {
    const auto a = cli::run(command, c);
    const auto b = cli::run(command, c);
    r.check(a.exit_code != 2, command + ": " + a.error);
    const std::string ja = cli::render(a.report, "json");
    r.check(ja == cli::render(b.report, "json"), command + ": reports differ between runs");
    c.jobs = 2;
    r.check(ja == cli::render(cli::run(command, c).report, "json"), command + ": reports differ with --jobs 2");
    const auto reparsed = io::Json::parse(ja);
    r.check(reparsed == a.report, command + ": JSON does not round-trip");
    const auto errors = cli::validate_report(reparsed);
    r.check(errors.empty(), command + ": " + (errors.empty() ? "" : errors.front()));
  }
  if (r.ok) r.detail = std::to_string(runs.size()) + " runs byte-identical, all reports valid";
  return r;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Result()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "TVaR counterexample", 1.0, tvar_counterexample},
      {2, "rho surplus invariance on invariant sets", 60.0, rho_surplus_invariance_propagates},
      {3, "SPAN recovery", 30.0, span_recovery},
      {4, "wedge = vee iff surplus invariant", 60.0, wedge_matches_structure},
      {5, "reconstruction over the induced set", 10.0, reconstruction},
      {6, "bisection vs grid oracle", 60.0, bisection_vs_grid},
      {7, "duality", 30.0, duality},
      {8, "finite-dimensional structure", 60.0, finite_dimensional_structure},
      {9, "CLI determinism and schema", 5.0, cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.ok = false;
      r.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.ok && seconds > c.budget_seconds) {
      r.ok = false;
      r.detail = "over time budget of " + fmt(c.budget_seconds) + " s";
    }
    std::printf("%s criterion %d: %s (%.2f s) %s\n", r.ok ? "PASS" : "FAIL", c.id, c.name, seconds, r.detail.c_str());
    failed += !r.ok;
  }
  return failed == 0 ? 0 : 1;
}
