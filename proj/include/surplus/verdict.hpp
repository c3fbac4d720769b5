#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "surplus/scenario.hpp"

namespace surplus {

enum class Status { Holds, Violated, Inconclusive };
enum class BasisKind { ClosedForm, Exhaustive, Sampled };

struct Basis {
  BasisKind kind = BasisKind::ClosedForm;
  std::size_t samples = 0;

  static Basis closed_form() { return {BasisKind::ClosedForm, 0}; }
  static Basis exhaustive(std::size_t n = 0) { return {BasisKind::Exhaustive, n}; }
  static Basis sampled(std::size_t n) { return {BasisKind::Sampled, n}; }
};

/// Named positions plus scalar diagnostics that reproduce a violation.
struct Witness {
  std::vector<std::pair<std::string, Position>> positions;
  std::map<std::string, double> diagnostics;

  [[nodiscard]] const Position* find(const std::string& name) const {
    for (const auto& [n, p] : positions)
      if (n == name) return &p;
    return nullptr;
  }
};

struct CheckVerdict {
  Status status = Status::Inconclusive;
  Basis basis;
  Witness witness;
  std::string note;

  [[nodiscard]] bool holds() const noexcept { return status == Status::Holds; }
  [[nodiscard]] bool violated() const noexcept { return status == Status::Violated; }

  static CheckVerdict hold(Basis basis, std::string note = {}) {
    return {Status::Holds, basis, {}, std::move(note)};
  }
  static CheckVerdict inconclusive(std::size_t samples, std::string note = {}) {
    return {Status::Inconclusive, Basis::sampled(samples), {}, std::move(note)};
  }
  static CheckVerdict violation(Basis basis, Witness witness, std::string note = {}) {
    return {Status::Violated, basis, std::move(witness), std::move(note)};
  }
};

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Holds: return "holds";
    case Status::Violated: return "violated";
    case Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

inline const char* to_string(BasisKind b) {
  switch (b) {
    case BasisKind::ClosedForm: return "closed_form";
    case BasisKind::Exhaustive: return "exhaustive";
    case BasisKind::Sampled: return "sampled";
  }
  return "?";
}

}  // namespace surplus
