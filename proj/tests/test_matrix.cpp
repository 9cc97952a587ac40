#include <catch2/catch_amalgamated.hpp>

#include "dgx/matrix.hpp"

#include <random>

using namespace dgx;

TEST_CASE("rational arithmetic stays canonical") {
  Rational a(2, 4);
  REQUIRE(a == Rational(1, 2));
  REQUIRE(to_string(Rational(-6, 4)) == "-3/2");
  REQUIRE(rational_from_string("7/3") == Rational(7, 3));
  REQUIRE_THROWS_AS(rational_from_string("x"), StructuralError);
}

TEST_CASE("matrix product and identity") {
  QMatrix a(1, 1), b(1, 1);
  a.set(0, 0, 2);
  b.set(0, 0, 3);
  REQUIRE((a * b).get(0, 0) == 6);
  QMatrix id = QMatrix::identity(3);
  QMatrix m(3, 3);
  m.set(0, 1, Rational(5, 2));
  m.set(2, 0, -1);
  REQUIRE(id * m == m);
  REQUIRE(m * id == m);
}

TEST_CASE("rank by fraction-free elimination") {
  QMatrix m(3, 4);
  m.set(0, 0, 1);
  m.set(0, 1, 2);
  m.set(1, 0, 2);
  m.set(1, 1, 4);  // row 1 = 2 * row 0
  m.set(2, 3, Rational(1, 7));
  REQUIRE(m.rank() == 2);
  REQUIRE(QMatrix(5, 5).rank() == 0);
  REQUIRE(QMatrix::identity(4).rank() == 4);
}

TEST_CASE("rank agrees with echelon rank on random matrices") {
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> entry(-3, 3);
  for (int trial = 0; trial < 30; ++trial) {
    int r = 1 + static_cast<int>(rng() % 6), c = 1 + static_cast<int>(rng() % 6);
    QMatrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        if (rng() % 3 == 0) m.set(i, j, Rational(entry(rng), 1 + static_cast<int>(rng() % 3)));
    EchelonBasis e;
    for (int i = 0; i < r; ++i) e.insert(m.row(i));
    REQUIRE(m.rank() == e.rank());
  }
}

TEST_CASE("nullspace vectors are killed and count matches rank") {
  QMatrix m(2, 4);
  m.set(0, 0, 1);
  m.set(0, 2, 2);
  m.set(1, 1, 1);
  m.set(1, 3, Rational(-1, 2));
  auto ns = m.nullspace();
  REQUIRE(static_cast<int>(ns.size()) == 4 - m.rank());
  for (const auto& v : ns) REQUIRE(m.apply(v).empty());
}

TEST_CASE("solve finds a particular solution or reports inconsistency") {
  QMatrix m(2, 2);
  m.set(0, 0, 1);
  m.set(0, 1, 1);
  m.set(1, 0, 1);
  m.set(1, 1, 1);
  SparseVec b{{0, Rational(2)}, {1, Rational(2)}};
  auto x = m.solve(b);
  REQUIRE(x.has_value());
  SparseVec mx = m.apply(*x);
  REQUIRE(coeff(mx, 0) == 2);
  REQUIRE(coeff(mx, 1) == 2);
  SparseVec bad{{0, Rational(1)}, {1, Rational(2)}};
  REQUIRE(!m.solve(bad).has_value());
}

TEST_CASE("echelon coordinate tracking expresses members over generators") {
  EchelonBasis e(true);
  SparseVec g0{{0, Rational(1)}, {1, Rational(1)}};
  SparseVec g1{{1, Rational(2)}};
  e.insert(g0);
  e.insert(g1);
  SparseVec v{{0, Rational(3)}, {1, Rational(5)}};
  auto coords = e.coordinates(v);
  REQUIRE(coords.has_value());
  SparseVec rebuilt;
  axpy(rebuilt, coeff(*coords, 0), g0);
  axpy(rebuilt, coeff(*coords, 1), g1);
  REQUIRE(rebuilt == v);
  SparseVec outside{{2, Rational(1)}};
  REQUIRE(!e.coordinates(outside).has_value());
}
