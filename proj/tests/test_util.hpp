#pragma once

// Shared helpers for the test suites: hand-built complexes and randomized
// complexes whose cohomology is known by construction (independent of the
// library's elimination path).

#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "dgx/graded.hpp"

namespace dgx_test {

using namespace dgx;

inline Complex make_complex(std::vector<BasisElement> basis,
                            const std::vector<std::tuple<std::string, std::string, Rational>>& dents,
                            DegreeWindow w) {
  GradedModule m(std::move(basis));
  GradedMap d(m, m, 1);
  for (const auto& [from, to, c] : dents) {
    auto i = m.find(from), j = m.find(to);
    if (!i || !j) throw StructuralError("make_complex: unknown basis name");
    d.add_entry(*i, *j, c);
  }
  return Complex(m, d, w);
}

struct KnownComplex {
  Complex complex;
  std::map<int, int> h_dims;  // expected cohomology dimensions, by construction
};

/// Direct sum of points (one generator, contributes to H) and contractible
/// cones (two generators), conjugated by random shears. The expected
/// cohomology is recorded before the base change, so it is an independent
/// oracle for the elimination-based computation.
inline KnownComplex random_known_complex(std::mt19937& rng, int max_pieces, DegreeWindow w) {
  std::vector<BasisElement> basis;
  std::vector<std::tuple<int, int>> cone_pairs;
  std::map<int, int> hdims;
  int pieces = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_pieces));
  int lo = w.lo + 1, hi = w.hi - 2;
  for (int p = 0; p < pieces; ++p) {
    int deg = lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1));
    if (rng() % 2 == 0) {
      basis.push_back({"p" + std::to_string(p), deg});
      hdims[deg] += 1;
    } else {
      int a = static_cast<int>(basis.size());
      basis.push_back({"c" + std::to_string(p) + "a", deg});
      basis.push_back({"c" + std::to_string(p) + "b", deg + 1});
      cone_pairs.emplace_back(a, a + 1);
    }
  }
  GradedModule m(basis);
  GradedMap d(m, m, 1);
  for (auto [a, b] : cone_pairs) d.add_entry(a, b, Rational(1 + static_cast<int>(rng() % 3)));

  // conjugate by random shears: d := P d P^{-1}
  std::map<int, QMatrix> P, Pinv;
  for (int deg : m.degrees()) {
    int n = m.dim(deg);
    QMatrix p = QMatrix::identity(n), pinv = QMatrix::identity(n);
    for (int k = 0; k < 2 * n; ++k) {
      int i = static_cast<int>(rng() % static_cast<unsigned>(n));
      int j = static_cast<int>(rng() % static_cast<unsigned>(n));
      if (i == j) continue;
      Rational c(static_cast<int>(rng() % 5) - 2);
      if (c == 0) continue;
      QMatrix e = QMatrix::identity(n), einv = QMatrix::identity(n);
      e.set(i, j, c);
      einv.set(i, j, -c);
      p = e * p;
      pinv = pinv * einv;
    }
    P[deg] = p;
    Pinv[deg] = pinv;
  }
  GradedMap dconj(m, m, 1);
  for (int deg : m.degrees()) {
    if (m.dim(deg + 1) == 0) continue;
    QMatrix block = d.block(deg);
    QMatrix conj = P.at(deg + 1) * block * Pinv.at(deg);
    dconj.set_block(deg, conj);
  }
  return KnownComplex{Complex(m, dconj, w), hdims};
}

}  // namespace dgx_test
