#include <catch2/catch_amalgamated.hpp>

#include "tripcover/linear.hpp"

#include <random>

using namespace tripcover;

namespace {

Vector times(const Matrix& a, const Vector& x) {
  Vector out(a.size(), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += a[i][j] * x[j];
  }
  return out;
}

bool all_positive(const Vector& x) {
  return std::all_of(x.begin(), x.end(), [](const Rational& v) { return v > 0; });
}

Matrix ints(std::initializer_list<std::initializer_list<int>> rows) {
  Matrix m;
  for (const auto& r : rows) {
    m.emplace_back();
    for (int v : r) m.back().emplace_back(v);
  }
  return m;
}

}  // namespace

TEST_CASE("unique solutions", "[linear]") {
  // x + y = 3, x - y = 1
  const auto r = solve_exact(ints({{1, 1}, {1, -1}}), {3, 1});
  CHECK(r.kind == SolveResult::Kind::unique);
  CHECK(r.rank == 2);
  CHECK(r.solution == Vector{2, 1});

  // rational coefficients and a redundant row
  Matrix a{{Rational(1, 2), Rational(1, 3)}, {Rational(1), Rational(-1)}, {Rational(3, 2), Rational(-2, 3)}};
  const auto q = solve_exact(a, {Rational(1), Rational(1, 2), Rational(3, 2)});
  CHECK(q.kind == SolveResult::Kind::unique);
  CHECK(times(a, q.solution) == Vector{Rational(1), Rational(1, 2), Rational(3, 2)});
}

TEST_CASE("inconsistent and underdetermined systems", "[linear]") {
  CHECK(solve_exact(ints({{1, 1}, {2, 2}}), {1, 3}).kind == SolveResult::Kind::inconsistent);
  const auto u = solve_exact(ints({{1, 1, 0}, {0, 1, 1}}), {2, 2});
  CHECK(u.kind == SolveResult::Kind::underdetermined);
  CHECK(u.rank == 2);
  CHECK(u.dimension == 1);
  CHECK(times(ints({{1, 1, 0}, {0, 1, 1}}), u.solution) == Vector{2, 2});
  // a zero column is a free variable
  const auto z = solve_exact(ints({{1, 0}}), {5});
  CHECK(z.kind == SolveResult::Kind::underdetermined);
  CHECK(z.solution[0] == 5);
  CHECK_THROWS_AS(solve_exact(ints({{1, 0}}), {1, 2}), std::invalid_argument);
}

TEST_CASE("positive solutions", "[linear]") {
  // x + y = 2 has (1, 1)
  auto p = positive_solution(ints({{1, 1}}), {2});
  REQUIRE(p);
  CHECK(all_positive(*p));
  CHECK(times(ints({{1, 1}}), *p) == Vector{2});

  // x = 1, x + y = 1 forces y = 0
  CHECK_FALSE(positive_solution(ints({{1, 0}, {1, 1}}), {1, 1}));
  // x - y = 1 and 2y + z = 0 force y = z = 0
  CHECK_FALSE(positive_solution(ints({{1, -1, 0}, {0, 2, 1}}), {1, 0}));
  // unique but negative
  CHECK_FALSE(positive_solution(ints({{1, 1}, {1, -1}}), {1, 3}));
  // inconsistent
  CHECK_FALSE(positive_solution(ints({{1, 1}, {1, 1}}), {1, 2}));
  // tiny positive entries are found exactly
  p = positive_solution(ints({{1000, 1}, {0, 1}}), {1, Rational(1, 1000)});
  REQUIRE(p);
  CHECK((*p)[1] == Rational(1, 1000));
  CHECK((*p)[0] == Rational(999, 1000000));
}

TEST_CASE("random systems with a planted positive solution", "[linear][property]") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> coef(-3, 3), val(1, 9), shape(1, 6);
  for (int round = 0; round < 300; ++round) {
    const auto rows = static_cast<std::size_t>(shape(rng));
    const auto cols = static_cast<std::size_t>(shape(rng));
    Matrix a(rows, Vector(cols));
    for (auto& r : a) {
      for (auto& v : r) v = coef(rng);
    }
    Vector x(cols);
    for (auto& v : x) v = Rational(val(rng), val(rng));
    const auto b = times(a, x);
    INFO("round " << round);

    const auto s = solve_exact(a, b);
    REQUIRE(s.kind != SolveResult::Kind::inconsistent);
    CHECK(times(a, s.solution) == b);
    CHECK(s.rank + s.dimension == static_cast<int>(cols));
    if (s.kind == SolveResult::Kind::unique) CHECK(s.solution == x);

    const auto p = positive_solution(a, b);
    REQUIRE(p);
    CHECK(all_positive(*p));
    CHECK(times(a, *p) == b);

    // perturbing b off the column space makes it inconsistent when A is not
    // of full row rank
    if (s.rank < static_cast<int>(rows)) {
      bool moved = false;
      for (std::size_t i = 0; i < rows && !moved; ++i) {
        auto b2 = b;
        b2[i] += 1;
        if (solve_exact(a, b2).kind == SolveResult::Kind::inconsistent) {
          CHECK_FALSE(positive_solution(a, b2));
          moved = true;
        }
      }
      CHECK(moved);
    }
  }
}
