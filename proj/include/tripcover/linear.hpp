#pragma once

#include "tripcover/rational.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tripcover {

using Matrix = std::vector<std::vector<Rational>>;
using Vector = std::vector<Rational>;

struct SolveResult {
  enum class Kind { inconsistent, unique, underdetermined };
  Kind kind = Kind::inconsistent;
  int rank = 0;
  int dimension = 0;  // of the solution space, when consistent
  Vector solution;    // unique solution, or one particular solution
};

namespace detail {

inline BigInt lcm_big(const BigInt& a, const BigInt& b) {
  return a / boost::multiprecision::gcd(a, b) * b;
}

}  // namespace detail

/// Solves A x = b exactly. Rows are scaled to integers and reduced by
/// fraction-free (Bareiss) elimination; free variables are set to zero in
/// the particular solution.
inline SolveResult solve_exact(const Matrix& a, const Vector& b) {
  const std::size_t rows = a.size();
  if (b.size() != rows) throw std::invalid_argument("solve_exact: row count mismatch");
  const std::size_t cols = rows ? a[0].size() : 0;

  std::vector<std::vector<BigInt>> m(rows, std::vector<BigInt>(cols + 1));
  for (std::size_t i = 0; i < rows; ++i) {
    if (a[i].size() != cols) throw std::invalid_argument("solve_exact: ragged matrix");
    BigInt scale = denominator(b[i]);
    for (const auto& v : a[i]) scale = detail::lcm_big(scale, denominator(v));
    for (std::size_t j = 0; j < cols; ++j) m[i][j] = numerator(Rational(a[i][j] * scale));
    m[i][cols] = numerator(Rational(b[i] * scale));
  }

  BigInt prev = 1;
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j <= cols; ++j) m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev;
      m[i][c] = 0;
    }
    prev = m[r][c];
    pivot_cols.push_back(c);
    ++r;
  }

  SolveResult out;
  out.rank = static_cast<int>(r);
  for (std::size_t i = r; i < rows; ++i) {
    if (m[i][cols] != 0) return out;
  }
  out.dimension = static_cast<int>(cols - r);
  out.kind = out.dimension == 0 ? SolveResult::Kind::unique : SolveResult::Kind::underdetermined;
  out.solution.assign(cols, Rational(0));
  for (std::size_t k = r; k-- > 0;) {
    const std::size_t c = pivot_cols[k];
    Rational acc(m[k][cols]);
    for (std::size_t j = c + 1; j < cols; ++j) acc -= Rational(m[k][j]) * out.solution[j];
    out.solution[c] = acc / Rational(m[k][c]);
  }
  return out;
}

namespace detail {

// Dense tableau simplex with Bland's rule. Maximizes c.x subject to
// A x = b, x >= 0. Returns nullopt when infeasible.
class Simplex {
 public:
  Simplex(const Matrix& a, const Vector& b) : rows_(a.size()), vars_(rows_ ? a[0].size() : 0) {
    t_.assign(rows_, Vector(vars_ + rows_ + 1, Rational(0)));
    basis_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      const bool flip = b[i] < 0;
      for (std::size_t j = 0; j < vars_; ++j) t_[i][j] = flip ? Rational(-a[i][j]) : a[i][j];
      t_[i][vars_ + i] = 1;
      t_[i].back() = flip ? Rational(-b[i]) : b[i];
      basis_[i] = vars_ + i;
    }
  }

  std::optional<std::pair<Rational, Vector>> maximize(const Vector& c) {
    // Phase one: drive the artificial variables to zero.
    Vector phase1(vars_ + rows_, Rational(0));
    for (std::size_t i = 0; i < rows_; ++i) phase1[vars_ + i] = -1;
    if (run(phase1, vars_ + rows_) < 0) return std::nullopt;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < vars_) continue;
      for (std::size_t j = 0; j < vars_; ++j) {
        if (t_[i][j] != 0) {
          pivot(i, j);
          break;
        }
      }
    }
    Vector full(c);
    full.resize(vars_ + rows_, Rational(0));
    const Rational best = run(full, vars_);
    Vector x(vars_, Rational(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < vars_) x[basis_[i]] = t_[i].back();
    }
    return std::pair{best, x};
  }

 private:
  // Optimizes over columns [0, allowed); returns the objective value.
  Rational run(const Vector& c, std::size_t allowed) {
    for (;;) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed && enter == allowed; ++j) {
        if (is_basic(j)) continue;
        Rational reduced = c[j];
        for (std::size_t i = 0; i < rows_; ++i) reduced -= c[basis_[i]] * t_[i][j];
        if (reduced > 0) enter = j;
      }
      if (enter == allowed) break;
      std::optional<std::size_t> leave;
      Rational ratio;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (t_[i][enter] <= 0) continue;
        Rational q = t_[i].back() / t_[i][enter];
        if (!leave || q < ratio || (q == ratio && basis_[i] < basis_[*leave])) {
          leave = i;
          ratio = q;
        }
      }
      if (!leave) throw std::logic_error("simplex: unbounded objective");
      pivot(*leave, enter);
    }
    Rational value = 0;
    for (std::size_t i = 0; i < rows_; ++i) value += c[basis_[i]] * t_[i].back();
    return value;
  }

  bool is_basic(std::size_t j) const {
    for (auto v : basis_) {
      if (v == j) return true;
    }
    return false;
  }

  void pivot(std::size_t r, std::size_t c) {
    const Rational p = t_[r][c];
    for (auto& v : t_[r]) v /= p;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r || t_[i][c] == 0) continue;
      const Rational f = t_[i][c];
      for (std::size_t j = 0; j < t_[i].size(); ++j) t_[i][j] -= f * t_[r][j];
    }
    basis_[r] = c;
  }

  std::size_t rows_;
  std::size_t vars_;
  Matrix t_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

/// Some x with A x = b and every x_i > 0, if one exists.
inline std::optional<Vector> positive_solution(const Matrix& a, const Vector& b) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  // x = s + t*1 with s >= 0 and 0 <= t <= 1; maximize t.
  Matrix lp(rows + 1, Vector(cols + 2, Rational(0)));
  Vector rhs(rows + 1);
  for (std::size_t i = 0; i < rows; ++i) {
    Rational row_sum = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      lp[i][j] = a[i][j];
      row_sum += a[i][j];
    }
    lp[i][cols] = row_sum;
    rhs[i] = b[i];
  }
  lp[rows][cols] = 1;
  lp[rows][cols + 1] = 1;
  rhs[rows] = 1;
  Vector objective(cols + 2, Rational(0));
  objective[cols] = 1;

  auto best = detail::Simplex(lp, rhs).maximize(objective);
  if (!best || best->first <= 0) return std::nullopt;
  Vector x(cols);
  for (std::size_t j = 0; j < cols; ++j) x[j] = best->second[j] + best->second[cols];
  return x;
}

}  // namespace tripcover
