#pragma once

// Batch commands. Each returns an exit code and a JSON report so that tests
// can drive them without a process boundary.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "surplus/io.hpp"
#include "surplus/surplus.hpp"

namespace surplus::cli {

using io::Json;

struct Config {
  std::string space;
  std::string acceptance;
  std::string asset;  // empty: cash
  std::string positions;
  std::string measure;
  std::string duals;
  std::vector<std::string> properties;
  double tol = 1e-9;
  double cap = 1e12;
  std::size_t budget = 1000;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  unsigned jobs = 1;
  bool verify = false;
};

struct Outcome {
  int exit_code = 0;
  Json report;
  std::string error;
};

inline constexpr const char* kCommands[] = {"assess", "requirement", "properties", "dual", "recover-span", "structure"};

namespace detail {

struct Inputs {
  std::optional<ScenarioSpace> space;
  std::optional<AcceptanceSpec> spec;
  std::optional<EligibleAsset> asset;
  std::vector<std::pair<std::string, Position>> positions;
  std::optional<PositiveRiskMeasureSpec> measure;
};

template <class F>
auto from_file(const std::string& file, F&& f) -> decltype(f(Json{})) {
  const Json j = io::load_file(file);
  try {
    return f(j);
  } catch (const io::InputError& e) {
    throw io::InputError(file + ": " + e.what());
  }
}

inline void check_config(const Config& c) {
  if (!(c.tol > 0.0 && c.tol <= 1e-3)) throw io::InputError("--tol: must lie in (0, 1e-3]");
  if (!(c.cap > 0.0)) throw io::InputError("--cap: must be > 0");
  if (c.budget == 0) throw io::InputError("--budget: must be >= 1");
  if (c.jobs == 0) throw io::InputError("--jobs: must be >= 1");
  if (c.format != "json" && c.format != "csv" && c.format != "text")
    throw io::InputError("--format: must be json, csv or text");
  if (c.space.empty()) throw io::InputError("--space: required");
}

inline std::uint64_t need_seed(const Config& c) {
  if (!c.seed) throw io::InputError("--seed: required for sampled checks");
  return *c.seed;
}

inline Inputs load(const Config& c, bool need_acceptance, bool need_positions) {
  Inputs in;
  in.space = from_file(c.space, [](const Json& j) { return io::parse_space(j); });
  const ScenarioSpace& space = *in.space;
  if (!c.acceptance.empty())
    in.spec = from_file(c.acceptance, [&](const Json& j) { return io::parse_acceptance(j, space); });
  else if (need_acceptance)
    throw io::InputError("--acceptance: required");
  in.asset = c.asset.empty() ? EligibleAsset::cash(space.size())
                             : from_file(c.asset, [&](const Json& j) { return io::parse_asset(j, space); });
  if (!c.positions.empty())
    in.positions = from_file(c.positions, [&](const Json& j) { return io::parse_positions(j, space); });
  else if (need_positions)
    throw io::InputError("--positions: required");
  if (!c.measure.empty())
    in.measure = from_file(c.measure, [&](const Json& j) { return io::parse_measure(j, space); });
  return in;
}

inline Json asset_json(const EligibleAsset& a) {
  Json j = Json::object();
  j["price"] = io::num(a.price());
  j["payoff"] = io::vec(a.payoff());
  j["cash"] = a.is_cash();
  return j;
}

inline Json header(const std::string& command, const Config& c, const Inputs& in) {
  Json j = Json::object();
  j["command"] = command;
  j["scenarios"] = in.space->size();
  if (in.spec) j["acceptance"] = in.spec->name();
  if (in.measure) j["measure"] = in.measure->name();
  j["asset"] = asset_json(*in.asset);
  j["tol"] = io::num(c.tol);
  j["cap"] = io::num(c.cap);
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

/// Runs f(i) for every index on up to `jobs` threads; slot i receives f(i).
template <class F>
std::vector<Json> parallel_map(std::size_t count, unsigned jobs, F f) {
  std::vector<Json> out(count);
  std::vector<std::string> errors(count);
  const unsigned workers = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  auto run = [&](unsigned w) {
    for (std::size_t i = w; i < count; i += workers) {
      try {
        out[i] = f(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error(e);
  return out;
}

/// Requirement plus the surplus / default-option split K = X⁺, D = −X⁻.
inline Json position_entry(const std::string& name, const Position& x, const CapitalRequirement* rho,
                           const AcceptanceSpec* spec, const ScenarioSpace& space) {
  Json j = Json::object();
  j["name"] = name;
  j["values"] = io::vec(x);
  if (spec) j["member"] = contains(*spec, space, x);
  if (rho) j["requirement"] = io::extended((*rho)(x));
  j["surplus"] = io::vec(x.positive_part());
  j["default_option"] = io::vec(x.default_option());
  return j;
}

inline Json position_block(const Config& c, const Inputs& in, bool with_member) {
  std::optional<CapitalRequirement> rho;
  if (in.spec) rho.emplace(*in.spec, *in.space, *in.asset, RhoOptions{c.tol, c.cap});
  const auto entries = parallel_map(in.positions.size(), c.jobs, [&](std::size_t i) {
    return position_entry(in.positions[i].first, in.positions[i].second, rho ? &*rho : nullptr,
                          with_member && in.spec ? &*in.spec : nullptr, *in.space);
  });
  Json a = Json::array();
  for (const auto& e : entries) a.push_back(e);
  return a;
}

inline bool any_violated(const Json& j) {
  if (j.is_object()) {
    if (j.contains("status") && j["status"] == "violated") return true;
    for (const auto& [k, v] : j.items())
      if (k != "witness" && any_violated(v)) return true;
  } else if (j.is_array()) {
    for (const auto& v : j)
      if (any_violated(v)) return true;
  }
  return false;
}

inline Json named_verdict(const std::string& name, const std::string& target, const CheckVerdict& v) {
  Json j = Json::object();
  j["property"] = name;
  j["target"] = target;
  const Json body = io::verdict(v);
  for (const auto& [k, val] : body.items()) j[k] = val;
  return j;
}

inline CheckVerdict run_property(const std::string& raw, const Config& c, const Inputs& in, std::string& target) {
  const std::uint64_t seed = need_seed(c);
  const ScenarioSpace& space = *in.space;
  auto need_spec = [&]() -> const AcceptanceSpec& {
    if (!in.spec) throw io::InputError("property '" + raw + "': --acceptance required");
    target = "acceptance";
    return *in.spec;
  };
  auto need_measure = [&]() -> const PositiveRiskMeasureSpec& {
    if (!in.measure) throw io::InputError("property '" + raw + "': --measure required");
    target = "measure";
    return *in.measure;
  };

  std::string name = raw;
  const bool measure_prefix = name.rfind("measure.", 0) == 0;
  if (measure_prefix) name = name.substr(8);

  if (!measure_prefix) {
    if (auto p = property_from_string(name); p && (in.spec || !axiom_from_string(name)))
      return check_structure(need_spec(), space, *p, c.budget, seed);
    if (name == "s_additive")
      return check_s_additive(need_spec(), space, *in.asset, c.budget, seed, RhoOptions{c.tol, c.cap});
    if (name == "rho_surplus_invariant")
      return check_rho_surplus_invariant(need_spec(), space, *in.asset, c.budget, seed, RhoOptions{c.tol, c.cap});
    if (name == "wedge_eq_vee") return check_wedge_eq_vee(need_spec(), space, c.budget, seed, c.tol);
    if (name == "reconstruct_vee") return reconstruct_vee(need_measure(), space, c.budget, seed, c.tol);
  }
  if (auto a = axiom_from_string(name)) return check_axiom(need_measure(), space, *a, c.budget, seed, c.tol);
  throw io::InputError("--properties: unknown property '" + raw + "'");
}

inline std::vector<Position> verification_positions(const Config& c, const Inputs& in) {
  std::vector<Position> out;
  for (const auto& [name, x] : in.positions) out.push_back(x);
  const std::uint64_t seed = need_seed(c);
  for (auto& m : sample_members(*in.spec, *in.space, c.budget, seed)) out.push_back(std::move(m));
  PositionSampler sampler(in.space->size(), probe_magnitude(*in.spec, *in.space), seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t k = 0; k < c.budget; ++k) out.push_back(sampler.next());
  return out;
}

inline Outcome cmd_assess(const Config& c, bool with_member, const std::string& command) {
  const Inputs in = load(c, true, true);
  Json r = header(command, c, in);
  r["positions"] = position_block(c, in, with_member);
  return {0, std::move(r), {}};
}

inline Outcome cmd_properties(const Config& c) {
  if (c.properties.empty()) throw io::InputError("--properties: required");
  const Inputs in = load(c, false, false);
  Json r = header("properties", c, in);
  Json verdicts = Json::array();
  for (const auto& p : c.properties) {
    std::string target;
    const CheckVerdict v = run_property(p, c, in, target);
    verdicts.push_back(named_verdict(p, target, v));
  }
  r["properties"] = verdicts;
  r["positions"] = position_block(c, in, true);
  return {any_violated(verdicts) ? 1 : 0, std::move(r), {}};
}

inline Outcome cmd_dual(const Config& c) {
  const Inputs in = load(c, true, false);
  const ScenarioSpace& space = *in.space;
  const AcceptanceSpec& spec = *in.spec;
  Json r = header("dual", c, in);

  std::vector<DualVector> priced;
  std::vector<Position> raw;
  std::vector<std::string> source;
  if (!c.duals.empty()) {
    const io::DualSample sample = detail::from_file(c.duals, [&](const Json& j) { return io::parse_duals(j, space); });
    for (const auto& d : sample.densities) raw.push_back(d);
    for (auto& z : price_duals(space, *in.asset, sample.densities)) priced.push_back(std::move(z));
    source.assign(raw.size(), "input");
  }
  if (spec.polyhedral()) {
    for (auto& z : extreme_duals(spec, space, *in.asset)) {
      raw.push_back(z.density());
      priced.push_back(std::move(z));
      source.emplace_back("extreme");
    }
  }
  const double radius = probe_magnitude(spec, space);
  Json duals = Json::array();
  for (std::size_t k = 0; k < raw.size(); ++k) {
    Json d = Json::object();
    d["source"] = source[k];
    d["density"] = io::vec(raw[k]);
    const Json sigma = io::support(support_function(spec, space, raw[k], radius));
    for (const auto& [key, val] : sigma.items()) d[key] = val;
    duals.push_back(d);
  }
  r["duals"] = duals;

  const CapitalRequirement rho(spec, space, *in.asset, RhoOptions{c.tol, c.cap});
  const auto entries = parallel_map(in.positions.size(), c.jobs, [&](std::size_t i) {
    const auto& [name, x] = in.positions[i];
    Json e = position_entry(name, x, &rho, &spec, space);
    const ExtendedReal req = rho(x);
    const double bound = dual_bound_rm(spec, space, *in.asset, x, priced, c.tol);
    e["dual_bound"] = io::num(bound);
    if (req.is_finite() && std::isfinite(bound)) e["gap"] = io::num(req.value() - bound);
    else e["gap"] = nullptr;
    return e;
  });
  Json ps = Json::array();
  for (const auto& e : entries) ps.push_back(e);
  r["positions"] = ps;

  if (c.verify) {
    if (classify(spec, space)[Property::Convex] == Tri::No)
      throw io::InputError("--verify: " + spec.name() + " is not convex; the dual representation does not apply");
    const CheckVerdict v = verify_dual_representation(spec, space, priced, verification_positions(c, in), c.tol,
                                                      spec.polyhedral(), need_seed(c));
    r["verification"] = named_verdict("dual_representation", "acceptance", v);
  }
  return {any_violated(r) ? 1 : 0, std::move(r), {}};
}

inline Outcome cmd_recover_span(const Config& c) {
  const Inputs in = load(c, true, false);
  const RecoveredSpan rec = recover_span(*in.spec, *in.space, c.tol, c.budget, need_seed(c));
  Json r = header("recover-span", c, in);
  Json ev = Json::array();
  for (std::size_t i : rec.event.members()) ev.push_back(i);
  r["event"] = ev;
  r["applicable"] = rec.applicable;
  r["verification"] = named_verdict("span_round_trip", "acceptance", rec.verdict);
  r["positions"] = position_block(c, in, true);
  return {any_violated(r["verification"]) ? 1 : 0, std::move(r), {}};
}

inline Outcome cmd_structure(const Config& c) {
  const Inputs in = load(c, true, false);
  const std::uint64_t seed = need_seed(c);
  const StructureReport s = structure(*in.spec, *in.space, c.tol, c.cap);
  Json r = header("structure", c, in);
  Json v = Json::array();
  for (const auto& e : s.coord_infima) v.push_back(e.is_finite() ? io::num(e.value()) : Json("-inf"));
  r["v"] = v;
  r["bounded"] = s.bounded;
  r["unbounded"] = s.unbounded;
  r["anchor"] = io::vec(s.anchor);
  Json verdicts = Json::array();
  verdicts.push_back(named_verdict("product_decomposition", "acceptance",
                                   verify_product_decomposition(*in.spec, *in.space, s, c.budget, seed, c.tol)));
  verdicts.push_back(named_verdict("translated_cone", "acceptance",
                                   verify_translated_cone(*in.spec, *in.space, s, c.budget, seed, c.tol)));
  r["verifiers"] = verdicts;
  r["positions"] = position_block(c, in, true);
  return {any_violated(verdicts) ? 1 : 0, std::move(r), {}};
}

}  // namespace detail

inline Outcome run(const std::string& command, const Config& config) {
  try {
    detail::check_config(config);
    if (command == "assess") return detail::cmd_assess(config, true, command);
    if (command == "requirement") return detail::cmd_assess(config, false, command);
    if (command == "properties") return detail::cmd_properties(config);
    if (command == "dual") return detail::cmd_dual(config);
    if (command == "recover-span") return detail::cmd_recover_span(config);
    if (command == "structure") return detail::cmd_structure(config);
    return {2, Json::object(), "unknown command '" + command + "'"};
  } catch (const io::InputError& e) {
    return {2, Json::object(), e.what()};
  } catch (const Error& e) {
    return {2, Json::object(), e.what()};
  } catch (const std::exception& e) {
    return {2, Json::object(), e.what()};
  }
}

// ---- rendering ---------------------------------------------------------------

namespace detail {

inline std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "null";
  return v.dump();
}

inline void flatten(const Json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, out);
  } else if (j.is_array() && !j.empty() && (j[0].is_object() || j[0].is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
  } else if (j.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < j.size(); ++i) s += (i ? " " : "") + scalar_text(j[i]);
    out.emplace_back(path, s);
  } else {
    out.emplace_back(path, scalar_text(j));
  }
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

}  // namespace detail

inline std::string render(const Json& report, const std::string& format) {
  if (format == "json") return report.dump(2) + "\n";
  std::vector<std::pair<std::string, std::string>> rows;
  detail::flatten(report, "", rows);
  std::ostringstream os;
  if (format == "csv") {
    os << "key,value\n";
    for (const auto& [k, v] : rows) os << detail::csv_field(k) << ',' << detail::csv_field(v) << '\n';
  } else {
    for (const auto& [k, v] : rows) os << k << ": " << v << '\n';
  }
  return os.str();
}

// ---- report schema -------------------------------------------------------------

namespace detail {

inline bool is_number_like(const Json& v) {
  return v.is_number() || (v.is_string() && (v == "+inf" || v == "-inf" || v == "-inf@cap" || v == "-inf@probe" ||
                                             v == "nan"));
}

struct SchemaCheck {
  std::vector<std::string> errors;

  void expect(bool ok, const std::string& path, const std::string& what) {
    if (!ok) errors.push_back(path + ": " + what);
  }
  bool has(const Json& j, const std::string& path, const char* key) {
    const bool ok = j.is_object() && j.contains(key);
    expect(ok, path + "." + key, "required");
    return ok;
  }
  void number(const Json& j, const std::string& path, const char* key) {
    if (has(j, path, key)) expect(is_number_like(j[key]), path + "." + key, "must be a number");
  }
  void vector(const Json& j, const std::string& path, const char* key) {
    if (!has(j, path, key)) return;
    const bool ok = j[key].is_array() && std::all_of(j[key].begin(), j[key].end(), is_number_like);
    expect(ok, path + "." + key, "must be an array of numbers");
  }
  void verdict(const Json& j, const std::string& path) {
    if (has(j, path, "status")) {
      const Json& s = j["status"];
      expect(s == "holds" || s == "violated" || s == "inconclusive", path + ".status", "unknown status");
    }
    if (has(j, path, "basis")) {
      const Json& b = j["basis"];
      expect(b == "closed_form" || b == "exhaustive" || b == "sampled", path + ".basis", "unknown basis");
    }
    if (has(j, path, "samples")) expect(j["samples"].is_number_unsigned(), path + ".samples", "must be a count");
    if (j.contains("note")) expect(j["note"].is_string(), path + ".note", "must be a string");
    if (j.value("status", "") == "violated") expect(j.contains("witness"), path + ".witness", "required when violated");
    if (j.contains("witness")) {
      const Json& w = j["witness"];
      const std::string wp = path + ".witness";
      if (has(w, wp, "positions")) {
        expect(w["positions"].is_object(), wp + ".positions", "must be an object");
        for (const auto& [k, v] : w["positions"].items()) {
          const bool ok = v.is_array() && std::all_of(v.begin(), v.end(), is_number_like);
          expect(ok, wp + ".positions." + k, "must be an array of numbers");
        }
      }
      if (has(w, wp, "diagnostics")) {
        expect(w["diagnostics"].is_object(), wp + ".diagnostics", "must be an object");
        for (const auto& [k, v] : w["diagnostics"].items()) expect(is_number_like(v), wp + ".diagnostics." + k, "must be a number");
      }
    }
  }
  void named(const Json& j, const std::string& path) {
    if (has(j, path, "property")) expect(j["property"].is_string(), path + ".property", "must be a string");
    if (has(j, path, "target")) expect(j["target"].is_string(), path + ".target", "must be a string");
    verdict(j, path);
  }
  void positions(const Json& r, bool requirement) {
    if (!has(r, "report", "positions")) return;
    expect(r["positions"].is_array(), "report.positions", "must be an array");
    if (!r["positions"].is_array()) return;
    for (std::size_t i = 0; i < r["positions"].size(); ++i) {
      const Json& p = r["positions"][i];
      const std::string path = "report.positions[" + std::to_string(i) + "]";
      if (has(p, path, "name")) expect(p["name"].is_string(), path + ".name", "must be a string");
      vector(p, path, "values");
      vector(p, path, "surplus");
      vector(p, path, "default_option");
      if (p.contains("member")) expect(p["member"].is_boolean(), path + ".member", "must be a boolean");
      if (requirement) number(p, path, "requirement");
    }
  }
};

}  // namespace detail

/// Structural validation of an emitted report; empty result means valid.
inline std::vector<std::string> validate_report(const Json& r) {
  detail::SchemaCheck s;
  if (!r.is_object()) return {"report: must be an object"};
  if (!s.has(r, "report", "command")) return s.errors;
  const std::string command = r["command"].is_string() ? r["command"].get<std::string>() : "";
  s.expect(std::find(std::begin(kCommands), std::end(kCommands), command) != std::end(kCommands), "report.command",
           "unknown command");
  if (s.has(r, "report", "scenarios")) s.expect(r["scenarios"].is_number_unsigned(), "report.scenarios", "must be a count");
  if (s.has(r, "report", "asset")) {
    s.number(r["asset"], "report.asset", "price");
    s.vector(r["asset"], "report.asset", "payoff");
  }
  s.number(r, "report", "tol");
  s.number(r, "report", "cap");
  const bool has_spec = r.contains("acceptance");
  s.positions(r, has_spec);
  if (command == "properties" && s.has(r, "report", "properties")) {
    for (std::size_t i = 0; i < r["properties"].size(); ++i)
      s.named(r["properties"][i], "report.properties[" + std::to_string(i) + "]");
  }
  if (command == "dual") {
    if (s.has(r, "report", "duals")) {
      for (std::size_t i = 0; i < r["duals"].size(); ++i) {
        const Json& d = r["duals"][i];
        const std::string path = "report.duals[" + std::to_string(i) + "]";
        s.vector(d, path, "density");
        s.number(d, path, "sigma");
        if (s.has(d, path, "barrier")) s.expect(d["barrier"].is_boolean(), path + ".barrier", "must be a boolean");
      }
    }
    if (r.contains("positions") && r["positions"].is_array())
      for (std::size_t i = 0; i < r["positions"].size(); ++i)
        s.number(r["positions"][i], "report.positions[" + std::to_string(i) + "]", "dual_bound");
    if (r.contains("verification")) s.named(r["verification"], "report.verification");
  }
  if (command == "recover-span") {
    if (s.has(r, "report", "event")) s.expect(r["event"].is_array(), "report.event", "must be an array");
    if (s.has(r, "report", "applicable")) s.expect(r["applicable"].is_boolean(), "report.applicable", "must be a boolean");
    if (s.has(r, "report", "verification")) s.named(r["verification"], "report.verification");
  }
  if (command == "structure") {
    s.vector(r, "report", "v");
    s.vector(r, "report", "anchor");
    if (s.has(r, "report", "bounded")) s.expect(r["bounded"].is_array(), "report.bounded", "must be an array");
    if (s.has(r, "report", "verifiers"))
      for (std::size_t i = 0; i < r["verifiers"].size(); ++i)
        s.named(r["verifiers"][i], "report.verifiers[" + std::to_string(i) + "]");
  }
  return s.errors;
}

}  // namespace surplus::cli
