#pragma once

// JSON ingestion of spaces, sets, assets, positions, measures and duals, and
// JSON emission of extended reals and verdicts.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "surplus/acceptance.hpp"
#include "surplus/duality.hpp"
#include "surplus/positive.hpp"
#include "surplus/risk_measure.hpp"
#include "surplus/verdict.hpp"

namespace surplus::io {

using Json = nlohmann::ordered_json;

/// Malformed input; the message names the field, e.g. "acceptance.alpha: required".
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] inline void bad(const std::string& path, const std::string& what) {
  throw InputError(path + ": " + what);
}

inline Json load_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw InputError(file + ": cannot open");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(file + ": malformed JSON (" + std::string(e.what()) + ")");
  }
}

inline const Json& field(const Json& j, const std::string& path, const char* key) {
  if (!j.is_object()) bad(path, "must be an object");
  const auto it = j.find(key);
  if (it == j.end()) bad(path + "." + key, "required");
  return *it;
}

inline double number(const Json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "must be a number");
  return j.get<double>();
}

inline double number_at(const Json& j, const std::string& path, const char* key) {
  return number(field(j, path, key), path + "." + key);
}

inline std::vector<double> numbers(const Json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<std::size_t> indices(const Json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "must be an array of indices");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer() || j[i].get<long long>() < 0)
      bad(path + "[" + std::to_string(i) + "]", "must be a nonnegative integer");
    out.push_back(j[i].get<std::size_t>());
  }
  return out;
}

inline std::string text(const Json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "must be a string");
  return j.get<std::string>();
}

/// Rethrow library validation errors as input errors under a path.
template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    bad(path, e.what());
  }
}

inline ScenarioSpace parse_space(const Json& j, const std::string& path = "space") {
  const auto weights = numbers(field(j, path, "probabilities"), path + ".probabilities");
  if (weights.empty()) bad(path + ".probabilities", "must be nonempty");
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    const Json& l = j["labels"];
    if (!l.is_array() || l.size() != weights.size()) bad(path + ".labels", "must list one name per scenario");
    for (std::size_t i = 0; i < l.size(); ++i) labels.push_back(text(l[i], path + ".labels[" + std::to_string(i) + "]"));
  }
  return guarded(path, [&] { return ScenarioSpace(weights, labels); });
}

inline std::vector<Knot> parse_knots(const Json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "must be an array of [x, y] pairs");
  std::vector<Knot> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto pair = numbers(j[i], path + "[" + std::to_string(i) + "]");
    if (pair.size() != 2) bad(path + "[" + std::to_string(i) + "]", "must be an [x, y] pair");
    out.push_back({pair[0], pair[1]});
  }
  return out;
}

inline LossFunction parse_loss(const Json& j, const std::string& path) {
  const std::string kind = text(field(j, path, "kind"), path + ".kind");
  return guarded(path, [&] {
    if (kind == "exp") return LossFunction::exponential(number_at(j, path, "rate"));
    if (kind == "linear") return LossFunction::linear(number_at(j, path, "slope"));
    if (kind == "piecewise_linear") return LossFunction::piecewise_linear(parse_knots(field(j, path, "knots"), path + ".knots"));
    bad(path + ".kind", "unknown loss kind '" + kind + "'");
  });
}

inline AcceptanceSpec parse_acceptance(const Json& j, const ScenarioSpace& space,
                                       const std::string& path = "acceptance") {
  const std::string type = text(field(j, path, "type"), path + ".type");
  const std::size_t n = space.size();
  auto event = [&] { return EventMask(indices(field(j, path, "event"), path + ".event")); };
  AcceptanceSpec spec = [&]() -> AcceptanceSpec {
    if (type == "span") {
      auto e = event();
      return guarded(path, [&] { return AcceptanceSpec::span(e); });
    }
    if (type == "span_type") {
      auto e = event();
      Position floor(numbers(field(j, path, "floor"), path + ".floor"));
      if (floor.size() != n) bad(path + ".floor", "length differs from the number of scenarios");
      return guarded(path, [&] { return AcceptanceSpec::span_type(e, floor); });
    }
    if (type == "shortfall") {
      auto loss = parse_loss(field(j, path, "loss"), path + ".loss");
      const double level = number_at(j, path, "alpha");
      return guarded(path, [&] { return AcceptanceSpec::shortfall(loss, level); });
    }
    if (type == "var") {
      const double a = number_at(j, path, "alpha");
      return guarded(path, [&] { return AcceptanceSpec::var_set(a); });
    }
    if (type == "tvar") {
      const double a = number_at(j, path, "alpha");
      return guarded(path, [&] { return AcceptanceSpec::tvar_set(a); });
    }
    if (type == "halfspaces") {
      const Json& cs = field(j, path, "constraints");
      if (!cs.is_array() || cs.empty()) bad(path + ".constraints", "must be a nonempty array");
      std::vector<family::Halfspace> constraints;
      for (std::size_t k = 0; k < cs.size(); ++k) {
        const std::string p = path + ".constraints[" + std::to_string(k) + "]";
        Position z(numbers(field(cs[k], p, "z"), p + ".z"));
        if (z.size() != n) bad(p + ".z", "length differs from the number of scenarios");
        constraints.push_back({z, number_at(cs[k], p, "gamma")});
      }
      return guarded(path, [&] { return AcceptanceSpec::halfspaces(constraints); });
    }
    if (type == "positive_cone") return AcceptanceSpec::positive_cone();
    bad(path + ".type", "unknown acceptance type '" + type + "'");
  }();
  guarded(path, [&] {
    validate(spec, space);
    return 0;
  });
  return spec;
}

inline EligibleAsset parse_asset(const Json& j, const ScenarioSpace& space, const std::string& path = "asset") {
  const double price = number_at(j, path, "price");
  Position payoff(numbers(field(j, path, "payoff"), path + ".payoff"));
  if (payoff.size() != space.size()) bad(path + ".payoff", "length differs from the number of scenarios");
  return guarded(path, [&] { return EligibleAsset(price, payoff); });
}

inline std::vector<std::pair<std::string, Position>> parse_positions(const Json& j, const ScenarioSpace& space,
                                                                     const std::string& path = "positions") {
  const Json& ps = field(j, path, "positions");
  if (!ps.is_object()) bad(path + ".positions", "must map names to value arrays");
  std::vector<std::pair<std::string, Position>> out;
  for (const auto& [name, values] : ps.items()) {
    const std::string p = path + ".positions." + name;
    auto v = numbers(values, p);
    if (v.size() != space.size()) bad(p, "length differs from the number of scenarios");
    for (double x : v)
      if (!std::isfinite(x)) bad(p, "values must be finite");
    out.emplace_back(name, Position(std::move(v)));
  }
  return out;
}

inline UtilityFunction parse_utility(const Json& j, const std::string& path) {
  const std::string kind = text(field(j, path, "kind"), path + ".kind");
  return guarded(path, [&] {
    if (kind == "exp") return UtilityFunction::exponential(number_at(j, path, "rate"));
    if (kind == "power") return UtilityFunction::power(number_at(j, path, "power"));
    if (kind == "piecewise_linear")
      return UtilityFunction::piecewise_linear(parse_knots(field(j, path, "knots"), path + ".knots"));
    bad(path + ".kind", "unknown utility kind '" + kind + "'");
  });
}

inline ConvexUtility parse_convex_utility(const Json& j, const std::string& path) {
  const std::string kind = text(field(j, path, "kind"), path + ".kind");
  return guarded(path, [&] {
    if (kind == "exp") return ConvexUtility::exponential(number_at(j, path, "rate"));
    if (kind == "power") return ConvexUtility::power(number_at(j, path, "power"));
    bad(path + ".kind", "unknown convex utility kind '" + kind + "' (exp or power)");
  });
}

inline PositiveRiskMeasureSpec parse_measure(const Json& j, const ScenarioSpace& space,
                                             const std::string& path = "measure") {
  const std::string kind = text(field(j, path, "kind"), path + ".kind");
  if (kind == "trunc_vee") return PositiveRiskMeasureSpec::trunc_vee(parse_acceptance(field(j, path, "base"), space, path + ".base"));
  if (kind == "trunc_wedge")
    return PositiveRiskMeasureSpec::trunc_wedge(parse_acceptance(field(j, path, "base"), space, path + ".base"));
  if (kind == "scenario_margin") {
    EventMask e(indices(field(j, path, "event"), path + ".event"));
    guarded(path + ".event", [&] {
      e.check_bounds(space.size());
      return 0;
    });
    return guarded(path, [&] { return PositiveRiskMeasureSpec::scenario_margin(e); });
  }
  if (kind == "put_premium") return PositiveRiskMeasureSpec::put_premium();
  if (kind == "spectral") {
    if (j.contains("knots")) {
      std::vector<WeightPiece> pieces;
      for (const Knot& k : parse_knots(j["knots"], path + ".knots")) pieces.push_back({k.x, k.y});
      return guarded(path, [&] { return PositiveRiskMeasureSpec::spectral(SpectralWeight::piecewise_constant(pieces)); });
    }
    const double a = number_at(j, path, "alpha");
    return guarded(path, [&] { return PositiveRiskMeasureSpec::spectral(SpectralWeight::uniform(a)); });
  }
  if (kind == "expected_tail_loss") {
    const double a = number_at(j, path, "alpha");
    return guarded(path, [&] { return PositiveRiskMeasureSpec::expected_tail_loss(a); });
  }
  if (kind == "shortfall_risk")
    return PositiveRiskMeasureSpec::shortfall_risk(parse_utility(field(j, path, "util"), path + ".util"));
  if (kind == "loss_certainty")
    return PositiveRiskMeasureSpec::loss_certainty(parse_convex_utility(field(j, path, "util"), path + ".util"));
  bad(path + ".kind", "unknown measure kind '" + kind + "'");
}

struct DualSample {
  std::vector<Position> densities;
  bool normalized = false;
};

inline DualSample parse_duals(const Json& j, const ScenarioSpace& space, const std::string& path = "duals") {
  DualSample out;
  const Json& ds = field(j, path, "duals");
  if (!ds.is_array()) bad(path + ".duals", "must be an array of densities");
  if (j.contains("normalized")) {
    if (!j["normalized"].is_boolean()) bad(path + ".normalized", "must be a boolean");
    out.normalized = j["normalized"].get<bool>();
  }
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const std::string p = path + ".duals[" + std::to_string(k) + "]";
    Position z(numbers(ds[k], p));
    if (z.size() != space.size()) bad(p, "length differs from the number of scenarios");
    for (double v : z)
      if (v < 0.0) bad(p, "dual densities must be >= 0");
    if (out.normalized && std::abs(expectation(space, z) - 1.0) > 1e-10) bad(p, "normalized dual must have E[Z] = 1");
    out.densities.push_back(std::move(z));
  }
  return out;
}

// ---- emission --------------------------------------------------------------

/// 12 significant digits; the JSON number round-trips to the printed text.
inline double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline Json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  const double r = round12(v);
  return r == 0.0 ? Json(0.0) : Json(r);
}

inline Json vec(const Position& x) {
  Json a = Json::array();
  for (double v : x) a.push_back(num(v));
  return a;
}

inline Json extended(const ExtendedReal& r) {
  switch (r.kind()) {
    case ExtendedReal::Kind::Finite: return num(r.value());
    case ExtendedReal::Kind::PlusInfinity: return "+inf";
    case ExtendedReal::Kind::MinusInfinityAtCap: return "-inf@cap";
  }
  return nullptr;
}

inline Json support(const SupportValue& s) {
  Json j = Json::object();
  j["sigma"] = s.is_finite() ? num(s.value) : Json("-inf@probe");
  j["barrier"] = s.is_finite();
  j["exact"] = s.exact;
  j["slack"] = num(s.slack);
  if (!s.is_finite()) j["probe_radius"] = num(s.radius);
  return j;
}

inline Json verdict(const CheckVerdict& v) {
  Json j = Json::object();
  j["status"] = to_string(v.status);
  j["basis"] = to_string(v.basis.kind);
  j["samples"] = v.basis.samples;
  if (!v.note.empty()) j["note"] = v.note;
  if (v.violated() || !v.witness.positions.empty()) {
    Json w = Json::object();
    Json ps = Json::object();
    for (const auto& [name, p] : v.witness.positions) ps[name] = vec(p);
    w["positions"] = ps;
    Json d = Json::object();
    for (const auto& [name, value] : v.witness.diagnostics) d[name] = num(value);
    w["diagnostics"] = d;
    j["witness"] = w;
  }
  return j;
}

}  // namespace surplus::io
