#pragma once

// Small dense linear programs: two-phase tableau simplex with Bland's rule.
// Sizes here are tens of variables and rows, so a dense tableau is plenty.

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace surplus::lp {

enum class Sense { LessEqual, GreaterEqual, Equal };
enum class Status { Optimal, Infeasible, Unbounded };

struct Row {
  std::vector<double> a;
  Sense sense;
  double b;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// minimize c·x subject to rows and lower ≤ x ≤ upper (bounds may be infinite).
struct Problem {
  std::vector<double> c;
  std::vector<Row> rows;
  std::vector<double> lower;
  std::vector<double> upper;

  explicit Problem(std::size_t n) : c(n, 0.0), lower(n, 0.0), upper(n, kInf) {}
  [[nodiscard]] std::size_t size() const noexcept { return c.size(); }
  void add(std::vector<double> a, Sense s, double b) { rows.push_back({std::move(a), s, b}); }
};

struct Result {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

namespace detail {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_(rows, std::vector<double>(cols + 1, 0.0)) {}

  double& at(std::size_t i, std::size_t j) { return t_[i][j]; }
  double& rhs(std::size_t i) { return t_[i][n_]; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = t_[r][c];
    for (double& v : t_[r]) v /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = t_[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) t_[i][j] -= f * t_[r][j];
      t_[i][c] = 0.0;
    }
    basis_[r] = c;
  }

  /// Minimize cost over columns [0, allowed). Returns false if unbounded.
  bool optimize(const std::vector<double>& cost, std::size_t allowed, double eps) {
    for (int guard = 0; guard < 100000; ++guard) {
      std::size_t enter = n_;
      for (std::size_t j = 0; j < allowed; ++j) {
        double reduced = cost[j];
        for (std::size_t i = 0; i < m_; ++i) reduced -= cost[basis_[i]] * t_[i][j];
        if (reduced < -eps) {
          enter = j;
          break;
        }
      }
      if (enter == n_) return true;
      std::size_t leave = m_;
      double best = kInf;
      for (std::size_t i = 0; i < m_; ++i) {
        if (t_[i][enter] <= eps) continue;
        const double ratio = t_[i][n_] / t_[i][enter];
        const bool better = ratio < best - eps;
        const bool tie = !better && leave < m_ && ratio <= best + eps && basis_[i] < basis_[leave];
        if (better || tie) {
          best = better ? ratio : std::min(best, ratio);
          leave = i;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
    return true;
  }

  [[nodiscard]] std::size_t rows() const noexcept { return m_; }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<std::vector<double>> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

inline Result solve(const Problem& problem, double eps = 1e-10) {
  const std::size_t n = problem.size();
  // Map each original variable onto nonnegative columns: x = offset + Σ coef·y.
  struct Map {
    double offset;
    std::vector<std::pair<std::size_t, double>> cols;
  };
  std::vector<Map> maps(n);
  std::vector<std::pair<std::size_t, double>> box;  // column ≤ width
  std::size_t ny = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = problem.lower[j], hi = problem.upper[j];
    if (std::isfinite(lo)) {
      maps[j] = {lo, {{ny, 1.0}}};
      if (std::isfinite(hi)) box.emplace_back(ny, hi - lo);
      ++ny;
    } else if (std::isfinite(hi)) {
      maps[j] = {hi, {{ny, -1.0}}};
      ++ny;
    } else {
      maps[j] = {0.0, {{ny, 1.0}, {ny + 1, -1.0}}};
      ny += 2;
    }
  }
  std::vector<Row> expanded;
  for (auto [col, width] : box) {
    std::vector<double> a(ny, 0.0);
    a[col] = 1.0;
    expanded.push_back({std::move(a), Sense::LessEqual, width});
  }
  for (const auto& r : problem.rows) {
    std::vector<double> a(ny, 0.0);
    double b = r.b;
    for (std::size_t j = 0; j < n; ++j) {
      if (r.a[j] == 0.0) continue;
      b -= r.a[j] * maps[j].offset;
      for (auto [col, coef] : maps[j].cols) a[col] += r.a[j] * coef;
    }
    expanded.push_back({std::move(a), r.sense, b});
  }

  const std::size_t m = expanded.size();
  std::size_t slacks = 0, artificials = 0;
  for (auto& r : expanded) {
    if (r.b < 0.0) {
      for (double& v : r.a) v = -v;
      r.b = -r.b;
      if (r.sense == Sense::LessEqual) r.sense = Sense::GreaterEqual;
      else if (r.sense == Sense::GreaterEqual) r.sense = Sense::LessEqual;
    }
    if (r.sense != Sense::Equal) ++slacks;
    if (r.sense != Sense::LessEqual) ++artificials;
  }
  const std::size_t first_art = ny + slacks;
  const std::size_t cols = first_art + artificials;
  detail::Tableau t(m, cols);
  t.basis().assign(m, 0);
  std::size_t s = ny, a = first_art;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& r = expanded[i];
    for (std::size_t j = 0; j < ny; ++j) t.at(i, j) = r.a[j];
    t.rhs(i) = r.b;
    if (r.sense == Sense::LessEqual) {
      t.at(i, s) = 1.0;
      t.basis()[i] = s++;
    } else {
      if (r.sense == Sense::GreaterEqual) t.at(i, s++) = -1.0;
      t.at(i, a) = 1.0;
      t.basis()[i] = a++;
    }
  }

  Result result;
  if (artificials > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (std::size_t j = first_art; j < cols; ++j) phase1[j] = 1.0;
    t.optimize(phase1, cols, eps);
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (t.basis()[i] >= first_art) infeasibility += t.rhs(i);
    if (infeasibility > 1e-8) return result;
    // Pivot remaining (zero-level) artificials out where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis()[i] < first_art) continue;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (std::abs(t.at(i, j)) > 1e-9) {
          t.pivot(i, j);
          break;
        }
      }
    }
  }

  std::vector<double> cost(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (auto [col, coef] : maps[j].cols) cost[col] += problem.c[j] * coef;
  if (!t.optimize(cost, first_art, eps)) {
    result.status = Status::Unbounded;
    return result;
  }
  std::vector<double> y(cols, 0.0);
  for (std::size_t i = 0; i < m; ++i) y[t.basis()[i]] = t.rhs(i);
  result.status = Status::Optimal;
  result.x.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double v = maps[j].offset;
    for (auto [col, coef] : maps[j].cols) v += coef * y[col];
    result.x[j] = v;
    result.objective += problem.c[j] * v;
  }
  return result;
}

}  // namespace surplus::lp
