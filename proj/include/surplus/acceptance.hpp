#pragma once

// Acceptance sets on a finite scenario space: the family zoo, exact
// membership, and closed-form structural facts.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "surplus/error.hpp"
#include "surplus/loss.hpp"
#include "surplus/scenario.hpp"

namespace surplus {

namespace family {

/// SPAN(A) = {X : X·1_A ≥ 0}
struct Span {
  EventMask event;
};
/// SPAN(A, V) = {X : X·1_A ≥ V·1_A}
struct SpanType {
  EventMask event;
  Position floor;
};
/// {X : E[ℓ(−X⁻)] ≤ level}
struct Shortfall {
  LossFunction loss;
  double level;
};
/// {X : P(X < 0) ≤ α}
struct VarSet {
  double alpha;
};
/// {X : TVaR_α(X) ≤ 0}
struct TvarSet {
  double alpha;
};
struct Halfspace {
  Position dual;
  double bound;
};
/// ⋂_k {X : E[X·Z_k] ≥ γ_k}
struct HalfspaceIntersection {
  std::vector<Halfspace> constraints;
};
/// L∞₊
struct PositiveCone {};
/// A membership oracle built from another object (a risk measure, a projection).
struct Derived {
  std::shared_ptr<const std::function<bool(const Position&)>> oracle;
  std::string description;
  double magnitude = 0.0;
};

}  // namespace family

enum class Property { Monotone, Convex, Cone, SurplusInvariant, LawInvariant, Sensitive };
inline constexpr std::array<Property, 6> kAllProperties = {Property::Monotone,         Property::Convex,
                                                          Property::Cone,             Property::SurplusInvariant,
                                                          Property::LawInvariant,     Property::Sensitive};

inline const char* to_string(Property p) {
  switch (p) {
    case Property::Monotone: return "monotone";
    case Property::Convex: return "convex";
    case Property::Cone: return "cone";
    case Property::SurplusInvariant: return "surplus_invariant";
    case Property::LawInvariant: return "law_invariant";
    case Property::Sensitive: return "sensitive";
  }
  return "?";
}

inline std::optional<Property> property_from_string(const std::string& name) {
  for (Property p : kAllProperties)
    if (name == to_string(p)) return p;
  return std::nullopt;
}

class AcceptanceSpec {
 public:
  using Family = std::variant<family::Span, family::SpanType, family::Shortfall, family::VarSet, family::TvarSet,
                              family::HalfspaceIntersection, family::PositiveCone, family::Derived>;

  static AcceptanceSpec span(EventMask event) {
    require(!event.empty(), ErrorCode::InvalidSpec, "span: event must be nonempty (SPAN(∅) is not proper)");
    return AcceptanceSpec(family::Span{std::move(event)});
  }
  static AcceptanceSpec span_type(EventMask event, Position floor) {
    require(!event.empty(), ErrorCode::InvalidSpec, "span_type: event must be nonempty");
    return AcceptanceSpec(family::SpanType{std::move(event), std::move(floor)});
  }
  static AcceptanceSpec shortfall(LossFunction loss, double level) {
    require(std::isfinite(level), ErrorCode::InvalidSpec, "shortfall: alpha must be finite");
    require(level > loss.infimum(), ErrorCode::InvalidSpec, "shortfall: alpha must exceed inf of the loss");
    require(loss(0.0) <= level + kMembershipTolerance, ErrorCode::SpecNotProper,
            "shortfall: alpha below l(0) gives an empty set");
    return AcceptanceSpec(family::Shortfall{std::move(loss), level});
  }
  static AcceptanceSpec var_set(double alpha) {
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidSpec, "var: alpha must lie in (0,1)");
    return AcceptanceSpec(family::VarSet{alpha});
  }
  static AcceptanceSpec tvar_set(double alpha) {
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidSpec, "tvar: alpha must lie in (0,1)");
    return AcceptanceSpec(family::TvarSet{alpha});
  }
  static AcceptanceSpec halfspaces(std::vector<family::Halfspace> constraints) {
    require(!constraints.empty(), ErrorCode::InvalidSpec, "halfspaces: at least one constraint required");
    for (const auto& c : constraints) {
      require(std::isfinite(c.bound), ErrorCode::InvalidSpec, "halfspaces: gamma must be finite");
      bool nonzero = false;
      for (double z : c.dual) {
        require(z >= 0.0, ErrorCode::InvalidSpec, "halfspaces: dual vectors must be >= 0");
        nonzero = nonzero || z > 0.0;
      }
      require(nonzero, ErrorCode::InvalidSpec, "halfspaces: dual vectors must be nonzero");
    }
    return AcceptanceSpec(family::HalfspaceIntersection{std::move(constraints)});
  }
  static AcceptanceSpec positive_cone() { return AcceptanceSpec(family::PositiveCone{}); }
  static AcceptanceSpec derived(std::function<bool(const Position&)> oracle, std::string description,
                                double magnitude = 0.0) {
    return AcceptanceSpec(family::Derived{
        std::make_shared<const std::function<bool(const Position&)>>(std::move(oracle)), std::move(description),
        magnitude});
  }

  [[nodiscard]] const Family& family() const noexcept { return family_; }
  template <class T>
  [[nodiscard]] const T* as() const noexcept {
    return std::get_if<T>(&family_);
  }
  template <class T>
  [[nodiscard]] bool is() const noexcept {
    return std::holds_alternative<T>(family_);
  }

  [[nodiscard]] std::string name() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, family::Span>) return "span";
          else if constexpr (std::is_same_v<T, family::SpanType>) return "span_type";
          else if constexpr (std::is_same_v<T, family::Shortfall>) return "shortfall";
          else if constexpr (std::is_same_v<T, family::VarSet>) return "var";
          else if constexpr (std::is_same_v<T, family::TvarSet>) return "tvar";
          else if constexpr (std::is_same_v<T, family::HalfspaceIntersection>) return "halfspaces";
          else if constexpr (std::is_same_v<T, family::PositiveCone>) return "positive_cone";
          else return "derived(" + f.description + ")";
        },
        family_);
  }

  /// Polyhedral families are finite intersections of halfspaces.
  [[nodiscard]] bool polyhedral() const noexcept {
    return is<family::Span>() || is<family::SpanType>() || is<family::HalfspaceIntersection>() ||
           is<family::PositiveCone>();
  }

 private:
  explicit AcceptanceSpec(Family f) : family_(std::move(f)) {}
  Family family_;
};

/// Exact membership with the boundary counted as inside.
inline bool contains(const AcceptanceSpec& spec, const ScenarioSpace& space, const Position& x) {
  space.check(x);
  constexpr double eps = kMembershipTolerance;
  return std::visit(
      [&](const auto& f) -> bool {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Span>) {
          for (std::size_t i : f.event.members())
            if (x[i] < -eps) return false;
          return true;
        } else if constexpr (std::is_same_v<T, family::SpanType>) {
          for (std::size_t i : f.event.members())
            if (x[i] < f.floor[i] - eps) return false;
          return true;
        } else if constexpr (std::is_same_v<T, family::Shortfall>) {
          double e = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i) e += space.prob(i) * f.loss(std::min(x[i], 0.0));
          return e <= f.level + eps;
        } else if constexpr (std::is_same_v<T, family::VarSet>) {
          return prob_below(space, x, -eps) <= f.alpha + kMassTolerance;
        } else if constexpr (std::is_same_v<T, family::TvarSet>) {
          return tail_value_at_risk(space, x, f.alpha) <= eps;
        } else if constexpr (std::is_same_v<T, family::HalfspaceIntersection>) {
          for (const auto& c : f.constraints)
            if (expectation(space, x, c.dual) < c.bound - eps) return false;
          return true;
        } else if constexpr (std::is_same_v<T, family::PositiveCone>) {
          for (double v : x)
            if (v < -eps) return false;
          return true;
        } else {
          return (*f.oracle)(x);
        }
      },
      spec.family());
}

/// Smallest t ≥ 0 with ℓ(−t) ≥ level: the loss budget measured as a cash shortfall.
inline double shortfall_scale(const family::Shortfall& f) {
  if (f.loss(0.0) >= f.level) return 0.0;
  double hi = 1.0;
  while (f.loss(-hi) < f.level && hi < 1e12) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f.loss(-mid) < f.level ? lo : hi) = mid;
  }
  return hi;
}

/// Characteristic monetary scale of the data defining the set.
inline double data_magnitude(const AcceptanceSpec& spec, const ScenarioSpace& space) {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::SpanType>) {
          double m = 0.0;
          for (std::size_t i : f.event.members()) m = std::max(m, std::abs(f.floor[i]));
          return m;
        } else if constexpr (std::is_same_v<T, family::Shortfall>) {
          return shortfall_scale(f);
        } else if constexpr (std::is_same_v<T, family::HalfspaceIntersection>) {
          double m = 0.0;
          for (const auto& c : f.constraints) {
            const double mass = expectation(space, c.dual);
            m = std::max(m, std::abs(c.bound) / mass);
          }
          return m;
        } else if constexpr (std::is_same_v<T, family::Derived>) {
          return f.magnitude;
        } else {
          return 0.0;
        }
      },
      spec.family());
}

/// M such that M·1 is acceptable and −M·1 is not.
inline double probe_magnitude(const AcceptanceSpec& spec, const ScenarioSpace& space) {
  return 1.0 + data_magnitude(spec, space);
}

/// Checks dimensions, data constraints and that the set is nonempty and proper.
inline void validate(const AcceptanceSpec& spec, const ScenarioSpace& space) {
  const std::size_t n = space.size();
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Span>) {
          f.event.check_bounds(n);
        } else if constexpr (std::is_same_v<T, family::SpanType>) {
          f.event.check_bounds(n);
          require(f.floor.size() == n, ErrorCode::DimensionMismatch, "span_type: floor length differs from N");
        } else if constexpr (std::is_same_v<T, family::HalfspaceIntersection>) {
          for (const auto& c : f.constraints)
            require(c.dual.size() == n, ErrorCode::DimensionMismatch, "halfspaces: z length differs from N");
        }
      },
      spec.family());
  const double m = probe_magnitude(spec, space);
  require(contains(spec, space, Position::constant(n, m)), ErrorCode::SpecNotProper,
          spec.name() + ": constant +M is not acceptable (empty set)");
  require(!contains(spec, space, Position::constant(n, -m)), ErrorCode::SpecNotProper,
          spec.name() + ": constant -M is acceptable (set is not proper)");
}

enum class Tri { Yes, No, Unknown };

/// Closed-form structural facts; Unknown entries need a falsification search.
struct Classification {
  std::array<Tri, 6> value{Tri::Unknown, Tri::Unknown, Tri::Unknown, Tri::Unknown, Tri::Unknown, Tri::Unknown};

  [[nodiscard]] Tri operator[](Property p) const { return value[static_cast<std::size_t>(p)]; }
  Tri& operator[](Property p) { return value[static_cast<std::size_t>(p)]; }
  [[nodiscard]] Tri coherent() const {
    const Tri c = (*this)[Property::Convex];
    const Tri k = (*this)[Property::Cone];
    if (c == Tri::Yes && k == Tri::Yes) return Tri::Yes;
    if (c == Tri::No || k == Tri::No) return Tri::No;
    return Tri::Unknown;
  }
};

namespace detail {

inline Tri tri(bool b) { return b ? Tri::Yes : Tri::No; }

/// Scenarios whose individual default keeps a VaR position acceptable.
inline EventMask var_allowed(const ScenarioSpace& space, double alpha) {
  std::vector<std::size_t> m;
  for (std::size_t i = 0; i < space.size(); ++i)
    if (space.prob(i) <= alpha + kMassTolerance) m.push_back(i);
  return EventMask(std::move(m));
}

}  // namespace detail

inline Classification classify(const AcceptanceSpec& spec, const ScenarioSpace& space) {
  Classification c;
  const std::size_t n = space.size();
  const bool law_applicable = space.is_equiprobable();
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (!std::is_same_v<T, family::Derived>) c[Property::Monotone] = Tri::Yes;
        if constexpr (std::is_same_v<T, family::Span>) {
          c[Property::Convex] = Tri::Yes;
          c[Property::Cone] = Tri::Yes;
          c[Property::SurplusInvariant] = Tri::Yes;
          c[Property::Sensitive] = detail::tri(f.event.is_full(n));
          if (law_applicable) c[Property::LawInvariant] = detail::tri(f.event.is_full(n));
        } else if constexpr (std::is_same_v<T, family::SpanType>) {
          bool floor_nonpositive = true;
          bool floor_zero = true;
          bool floor_nonnegative = true;
          for (std::size_t i : f.event.members()) {
            floor_nonpositive = floor_nonpositive && f.floor[i] <= kMembershipTolerance;
            floor_zero = floor_zero && std::abs(f.floor[i]) <= kMembershipTolerance;
            floor_nonnegative = floor_nonnegative && f.floor[i] >= -kMembershipTolerance;
          }
          c[Property::Convex] = Tri::Yes;
          c[Property::Cone] = detail::tri(floor_zero);
          c[Property::SurplusInvariant] = detail::tri(floor_nonpositive);
          c[Property::Sensitive] = detail::tri(f.event.is_full(n) && floor_nonnegative);
          if (law_applicable) {
            bool constant = true;
            for (std::size_t i = 1; i < n; ++i) constant = constant && f.floor[i] == f.floor[0];
            c[Property::LawInvariant] = detail::tri(f.event.is_full(n) && constant);
          }
        } else if constexpr (std::is_same_v<T, family::Shortfall>) {
          c[Property::Convex] = Tri::Yes;
          c[Property::SurplusInvariant] = Tri::Yes;
          if (law_applicable) c[Property::LawInvariant] = Tri::Yes;
          const bool tight = f.level <= f.loss(0.0) + kMassTolerance;
          c[Property::Sensitive] = detail::tri(tight && f.loss.left_derivative(0.0) < 0.0);
          // A tight, sensitive shortfall set is the positive cone.
          if (c[Property::Sensitive] == Tri::Yes) c[Property::Cone] = Tri::Yes;
        } else if constexpr (std::is_same_v<T, family::VarSet>) {
          const EventMask allowed = detail::var_allowed(space, f.alpha);
          c[Property::Convex] = detail::tri(space.mass(allowed) <= f.alpha + kMassTolerance);
          c[Property::Cone] = Tri::Yes;
          c[Property::SurplusInvariant] = Tri::Yes;
          c[Property::Sensitive] = detail::tri(allowed.empty());
          if (law_applicable) c[Property::LawInvariant] = Tri::Yes;
        } else if constexpr (std::is_same_v<T, family::TvarSet>) {
          c[Property::Convex] = Tri::Yes;
          c[Property::Cone] = Tri::Yes;
          c[Property::Sensitive] = Tri::Yes;
          if (law_applicable) c[Property::LawInvariant] = Tri::Yes;
          // Degenerates to the positive cone when α ≤ min p.
          if (f.alpha <= space.min_prob() + kMassTolerance) c[Property::SurplusInvariant] = Tri::Yes;
        } else if constexpr (std::is_same_v<T, family::HalfspaceIntersection>) {
          c[Property::Convex] = Tri::Yes;
          const bool homogeneous =
              std::all_of(f.constraints.begin(), f.constraints.end(), [](const auto& h) { return h.bound == 0.0; });
          if (homogeneous) c[Property::Cone] = Tri::Yes;
        } else if constexpr (std::is_same_v<T, family::PositiveCone>) {
          c[Property::Convex] = Tri::Yes;
          c[Property::Cone] = Tri::Yes;
          c[Property::SurplusInvariant] = Tri::Yes;
          c[Property::Sensitive] = Tri::Yes;
          if (law_applicable) c[Property::LawInvariant] = Tri::Yes;
        }
      },
      spec.family());
  return c;
}

}  // namespace surplus
