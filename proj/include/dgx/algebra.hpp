#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dgx/homology.hpp"

namespace dgx {

// ---------------------------------------------------------------------------
// Base rings: commutative unital finite-dimensional Q-algebras in degree 0.
// Base-ring coefficients appear inside scenario data (pairings, moment maps);
// all linear algebra stays Q-linear on materialized bases.
// ---------------------------------------------------------------------------

/// Element of a base ring, sparse over its basis.
using KVec = SparseVec;

class BaseRing {
 public:
  static BaseRing rationals() {
    BaseRing k;
    k.names_ = {"1"};
    k.table_ = {{{{0, Rational(1)}}}};
    return k;
  }

  /// Q[x_1..x_r] / (monomials of total degree > trunc), ordered by total
  /// degree then lexicographically.
  static BaseRing truncated_polynomials(const std::vector<std::string>& vars, int trunc) {
    if (trunc < 0) throw StructuralError("polynomial truncation must be >= 0");
    BaseRing k;
    std::vector<std::vector<int>> expos;
    std::vector<int> cur(vars.size(), 0);
    // enumerate exponent vectors of total degree <= trunc
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
      if (i == vars.size()) {
        expos.push_back(cur);
        return;
      }
      for (int e = 0; e <= left; ++e) {
        cur[i] = e;
        rec(i + 1, left - e);
      }
      cur[i] = 0;
    };
    rec(0, trunc);
    std::sort(expos.begin(), expos.end(), [](const auto& a, const auto& b) {
      int ta = 0, tb = 0;
      for (int x : a) ta += x;
      for (int x : b) tb += x;
      if (ta != tb) return ta < tb;
      return a < b;
    });
    std::map<std::vector<int>, int> index;
    for (const auto& e : expos) {
      index[e] = static_cast<int>(k.names_.size());
      k.names_.push_back(monomial_name(vars, e));
    }
    k.table_.assign(expos.size(), std::vector<KVec>(expos.size()));
    for (std::size_t i = 0; i < expos.size(); ++i)
      for (std::size_t j = 0; j < expos.size(); ++j) {
        std::vector<int> sum(vars.size());
        int total = 0;
        for (std::size_t v = 0; v < vars.size(); ++v) {
          sum[v] = expos[i][v] + expos[j][v];
          total += sum[v];
        }
        if (total <= trunc) k.table_[i][j] = KVec{{index.at(sum), Rational(1)}};
      }
    return k;
  }

  int dim() const { return static_cast<int>(names_.size()); }
  int unit() const { return 0; }
  const std::string& name(int i) const { return names_.at(i); }
  bool is_rationals() const { return names_.size() == 1; }

  KVec mul(int i, int j) const { return table_.at(i).at(j); }
  KVec mul_vec(const KVec& a, const KVec& b) const {
    KVec out;
    for (const auto& [i, x] : a)
      for (const auto& [j, y] : b) axpy(out, x * y, mul(i, j));
    return out;
  }
  KVec one() const { return KVec{{0, Rational(1)}}; }

  std::optional<int> find(const std::string& name) const {
    for (int i = 0; i < dim(); ++i)
      if (names_[i] == name) return i;
    return std::nullopt;
  }

 private:
  static std::string monomial_name(const std::vector<std::string>& vars,
                                   const std::vector<int>& e) {
    std::string out;
    for (std::size_t v = 0; v < vars.size(); ++v) {
      if (e[v] == 0) continue;
      if (!out.empty()) out += "·";
      out += vars[v];
      if (e[v] > 1) out += "^" + std::to_string(e[v]);
    }
    return out.empty() ? "1" : out;
  }

  std::vector<std::string> names_;
  std::vector<std::vector<KVec>> table_;  // total: quotient-ring semantics
};

// ---------------------------------------------------------------------------
// Structure-constant tables
// ---------------------------------------------------------------------------

/// Bilinear structure constants keyed by basis pairs. Values are stored in
/// quotient-truncated form (terms outside the stored basis dropped); pairs
/// where dropping occurred are flagged so verdicts about the untruncated
/// object can shrink their windows.
class ProductTable {
 public:
  void set(int i, int j, SparseVec v, bool dropped = false) {
    auto k = key(i, j);
    if (!v.empty()) values_[k] = std::move(v);
    else values_.erase(k);
    if (dropped) dropped_.insert(k);
  }
  SparseVec get(int i, int j) const {
    auto it = values_.find(key(i, j));
    return it == values_.end() ? SparseVec{} : it->second;
  }
  bool dropped(int i, int j) const { return dropped_.count(key(i, j)) != 0; }
  bool any_dropped() const { return !dropped_.empty(); }

 private:
  static std::uint64_t key(int i, int j) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
           static_cast<std::uint32_t>(j);
  }
  std::unordered_map<std::uint64_t, SparseVec> values_;
  std::set<std::uint64_t> dropped_;
};

// ---------------------------------------------------------------------------
// Dg-algebras
// ---------------------------------------------------------------------------

class DgAlgebra;
using AlgebraRef = std::shared_ptr<const DgAlgebra>;

/// Structure-constant dg-algebra. The stored object is always an honest
/// finite dg-algebra (a quotient of the intended object when truncated);
/// `mult.dropped` and the differential's unknown-set say where it deviates
/// from the untruncated one.
class DgAlgebra {
 public:
  Complex cx;
  int unit = -1;
  ProductTable mult;
  std::vector<int> generators;                  // algebra generators (basis indices)
  std::optional<std::vector<Rational>> augmentation;  // functional values per basis

  const GradedModule& module() const { return cx.module(); }

  SparseVec product(int i, int j) const { return mult.get(i, j); }

  SparseVec product_vec(const SparseVec& a, const SparseVec& b) const {
    SparseVec out;
    for (const auto& [i, x] : a)
      for (const auto& [j, y] : b) axpy(out, x * y, mult.get(i, j));
    return out;
  }

  /// Product valid for the untruncated object: nullopt when a dropped pair
  /// is touched.
  std::optional<SparseVec> exact_product_vec(const SparseVec& a, const SparseVec& b) const {
    SparseVec out;
    for (const auto& [i, x] : a)
      for (const auto& [j, y] : b) {
        if (mult.dropped(i, j)) return std::nullopt;
        axpy(out, x * y, mult.get(i, j));
      }
    return out;
  }

  SparseVec d_of(int i) const {
    return cx.d().apply_global(cx.module().degree_of(i), SparseVec{{i, Rational(1)}});
  }
  SparseVec d_vec(const SparseVec& v) const {
    SparseVec out;
    for (const auto& [i, x] : v) axpy(out, x, d_of(i));
    return out;
  }

  Rational aug_of(const SparseVec& v) const {
    if (!augmentation) throw PreconditionError("algebra carries no augmentation");
    Rational out = 0;
    for (const auto& [i, x] : v) out += x * (*augmentation)[i];
    return out;
  }

  bool is_graded_commutative() const {
    const auto& m = cx.module();
    for (int i = 0; i < m.total_dim(); ++i)
      for (int j = 0; j < m.total_dim(); ++j) {
        SparseVec ij = mult.get(i, j);
        SparseVec ji = scaled(mult.get(j, i),
                              Rational(sign_pow(static_cast<long long>(m.degree_of(i)) * m.degree_of(j))));
        if (ij != ji) return false;
      }
    return true;
  }

  /// Asserts the dg-algebra axioms on the stored (quotient) object:
  /// associativity, unit, Leibniz, d^2 = 0, augmentation axioms if present.
  void validate() const {
    const auto& m = cx.module();
    if (unit < 0 || unit >= m.total_dim() || m.degree_of(unit) != 0)
      throw StructuralError("algebra unit missing or not in degree 0");
    for (int i = 0; i < m.total_dim(); ++i) {
      if (mult.get(unit, i) != SparseVec{{i, Rational(1)}})
        throw StructuralError("left unit law fails on " + m.name_of(i));
      if (mult.get(i, unit) != SparseVec{{i, Rational(1)}})
        throw StructuralError("right unit law fails on " + m.name_of(i));
    }
    for (int i = 0; i < m.total_dim(); ++i)
      for (int j = 0; j < m.total_dim(); ++j) {
        // Leibniz
        SparseVec lhs = d_vec(mult.get(i, j));
        SparseVec rhs = product_vec(d_of(i), SparseVec{{j, Rational(1)}});
        axpy(rhs, Rational(sign_pow(m.degree_of(i))), product_vec(SparseVec{{i, Rational(1)}}, d_of(j)));
        if (lhs != rhs && leibniz_reliable(i, j))
          throw StructuralError("Leibniz rule fails on (" + m.name_of(i) + ", " + m.name_of(j) + ")");
        for (int k = 0; k < m.total_dim(); ++k) {
          SparseVec a = product_vec(mult.get(i, j), SparseVec{{k, Rational(1)}});
          SparseVec b = product_vec(SparseVec{{i, Rational(1)}}, mult.get(j, k));
          if (a != b)
            throw StructuralError("associativity fails on (" + m.name_of(i) + ", " + m.name_of(j) +
                                  ", " + m.name_of(k) + ")");
        }
      }
    if (augmentation) {
      if ((*augmentation)[unit] != 1) throw StructuralError("augmentation does not send 1 to 1");
      for (int i = 0; i < m.total_dim(); ++i) {
        if (m.degree_of(i) != 0 && (*augmentation)[i] != 0)
          throw StructuralError("augmentation non-graded on " + m.name_of(i));
        if (aug_of(d_of(i)) != 0)
          throw StructuralError("augmentation not a chain map on " + m.name_of(i));
        for (int j = 0; j < m.total_dim(); ++j)
          if (aug_of(mult.get(i, j)) != (*augmentation)[i] * (*augmentation)[j])
            throw StructuralError("augmentation not multiplicative on (" + m.name_of(i) + ", " +
                                  m.name_of(j) + ")");
      }
    }
  }

 private:
  // Leibniz on a pair whose d-data or product was truncated can only be
  // compared where everything stayed inside the stored basis.
  bool leibniz_reliable(int i, int j) const {
    const auto& m = cx.module();
    if (mult.dropped(i, j)) return false;
    int di = m.degree_of(i), dj = m.degree_of(j);
    if (!cx.d().known(di) || !cx.d().known(dj) || !cx.d().known(di + dj)) return false;
    for (const auto& [t, c] : d_of(i))
      if (mult.dropped(t, j)) return false;
    for (const auto& [t, c] : d_of(j))
      if (mult.dropped(i, t)) return false;
    return true;
  }
};

/// The base field as a dg-algebra.
inline AlgebraRef trivial_algebra() {
  auto A = std::make_shared<DgAlgebra>();
  GradedModule m({{"1", 0}});
  A->cx = Complex(m, GradedMap(m, m, 1), DegreeWindow(0, 0));
  A->unit = 0;
  A->mult.set(0, 0, SparseVec{{0, Rational(1)}});
  A->augmentation = std::vector<Rational>{Rational(1)};
  A->validate();
  return A;
}

/// Graded opposite: a ·op b = (-1)^{|a||b|} b a.
inline AlgebraRef opposite_algebra(const AlgebraRef& A) {
  auto B = std::make_shared<DgAlgebra>(*A);
  const auto& m = A->cx.module();
  for (int i = 0; i < m.total_dim(); ++i)
    for (int j = 0; j < m.total_dim(); ++j) {
      Rational s(sign_pow(static_cast<long long>(m.degree_of(i)) * m.degree_of(j)));
      B->mult.set(i, j, scaled(A->mult.get(j, i), s), A->mult.dropped(j, i));
    }
  B->validate();
  return B;
}

/// Tensor product of dg-algebras over the scalars, with the Koszul-sign
/// product (a⊗b)(a'⊗b') = (-1)^{|b||a'|} aa'⊗bb'.
struct AlgebraTensor {
  AlgebraRef algebra;
  TensorLayout layout;
};

inline AlgebraTensor tensor_algebra(const AlgebraRef& A, const AlgebraRef& B,
                                    const DegreeWindow& w) {
  AlgebraTensor out;
  out.layout = tensor_layout(A->cx.module(), B->cx.module(), w);
  const GradedModule& m = out.layout.module;
  auto T = std::make_shared<DgAlgebra>();
  GradedMap d(m, m, 1);
  std::set<int> bad;
  for (int p = 0; p < m.total_dim(); ++p) {
    auto [a, b] = out.layout.pairs[p];
    int da = A->cx.module().degree_of(a);
    for (const auto& [t, c] : A->d_of(a)) {
      int q = out.layout.of(t, b);
      if (q < 0) {
        bad.insert(m.degree_of(p));
        continue;
      }
      d.add_entry(p, q, c);
    }
    for (const auto& [t, c] : B->d_of(b)) {
      int q = out.layout.of(a, t);
      if (q < 0) {
        bad.insert(m.degree_of(p));
        continue;
      }
      d.add_entry(p, q, Rational(sign_pow(da)) * c);
    }
    if (!A->cx.d().known(da) || !B->cx.d().known(m.degree_of(p) - da)) bad.insert(m.degree_of(p));
  }
  if (out.layout.dropped_low) bad.insert(w.lo - 1);
  for (int dg : bad) d.mark_unknown(dg);
  DegreeWindow win = w;
  T->cx = Complex(m, d, win, false);
  T->unit = out.layout.of(A->unit, B->unit);
  if (T->unit < 0) throw StructuralError("tensor algebra lost its unit to the window");
  for (int p = 0; p < m.total_dim(); ++p)
    for (int q = 0; q < m.total_dim(); ++q) {
      auto [a, b] = out.layout.pairs[p];
      auto [a2, b2] = out.layout.pairs[q];
      bool dropped = A->mult.dropped(a, a2) || B->mult.dropped(b, b2);
      SparseVec prod;
      Rational s(sign_pow(static_cast<long long>(B->cx.module().degree_of(b)) *
                          A->cx.module().degree_of(a2)));
      for (const auto& [ta, ca] : A->mult.get(a, a2))
        for (const auto& [tb, cb] : B->mult.get(b, b2)) {
          int t = out.layout.of(ta, tb);
          if (t < 0) {
            dropped = true;
            continue;
          }
          prod[t] += s * ca * cb;
          if (prod[t] == 0) prod.erase(t);
        }
      T->mult.set(p, q, std::move(prod), dropped);
    }
  for (int g : A->generators) {
    int t = out.layout.of(g, B->unit);
    if (t >= 0) T->generators.push_back(t);
  }
  for (int g : B->generators) {
    int t = out.layout.of(A->unit, g);
    if (t >= 0) T->generators.push_back(t);
  }
  if (A->augmentation && B->augmentation) {
    std::vector<Rational> aug(m.total_dim(), Rational(0));
    for (int p = 0; p < m.total_dim(); ++p) {
      auto [a, b] = out.layout.pairs[p];
      aug[p] = (*A->augmentation)[a] * (*B->augmentation)[b];
    }
    T->augmentation = std::move(aug);
  }
  T->validate();
  out.algebra = T;
  return out;
}

// ---------------------------------------------------------------------------
// Dg-coalgebras
// ---------------------------------------------------------------------------

struct CoProductTerm {
  int left = 0, right = 0;
  Rational c;
};

class DgCoalgebra {
 public:
  Complex cx;
  std::vector<std::vector<CoProductTerm>> delta;  // per basis element
  SparseVec counit;                               // functional values
  std::set<int> delta_boundary;                   // degrees where Delta was truncated

  const GradedModule& module() const { return cx.module(); }

  Rational counit_of(const SparseVec& v) const {
    Rational out = 0;
    for (const auto& [i, x] : v) out += x * coeff(counit, i);
    return out;
  }

  SparseVec d_of(int i) const {
    return cx.d().apply_global(cx.module().degree_of(i), SparseVec{{i, Rational(1)}});
  }

  void validate() const {
    const auto& m = cx.module();
    if (static_cast<int>(delta.size()) != m.total_dim())
      throw StructuralError("coalgebra table size mismatch");
    for (int b = 0; b < m.total_dim(); ++b) {
      if (delta_boundary.count(m.degree_of(b))) continue;
      // counit laws
      SparseVec left, right;
      for (const auto& t : delta[b]) {
        axpy(left, t.c * coeff(counit, t.left), SparseVec{{t.right, Rational(1)}});
        axpy(right, t.c * coeff(counit, t.right), SparseVec{{t.left, Rational(1)}});
      }
      SparseVec self{{b, Rational(1)}};
      if (left != self) throw StructuralError("left counit law fails on " + m.name_of(b));
      if (right != self) throw StructuralError("right counit law fails on " + m.name_of(b));
      // coassociativity, as dictionaries over basis triples
      std::map<std::tuple<int, int, int>, Rational> lhs, rhs;
      for (const auto& t : delta[b])
        for (const auto& u : delta[t.left]) {
          auto& slot = lhs[{u.left, u.right, t.right}];
          slot += t.c * u.c;
          if (slot == 0) lhs.erase({u.left, u.right, t.right});
        }
      for (const auto& t : delta[b])
        for (const auto& u : delta[t.right]) {
          auto& slot = rhs[{t.left, u.left, u.right}];
          slot += t.c * u.c;
          if (slot == 0) rhs.erase({t.left, u.left, u.right});
        }
      if (lhs != rhs) throw StructuralError("coassociativity fails on " + m.name_of(b));
      // Delta is a chain map
      if (cx.d().known(m.degree_of(b))) {
        std::map<std::pair<int, int>, Rational> a, bb;
        for (const auto& [t, c] : d_of(b))
          for (const auto& u : delta[t]) {
            auto& slot = a[{u.left, u.right}];
            slot += c * u.c;
            if (slot == 0) a.erase({u.left, u.right});
          }
        bool reliable = true;
        for (const auto& t : delta[b]) {
          int dl = m.degree_of(t.left);
          if (!cx.d().known(dl) || !cx.d().known(m.degree_of(t.right))) reliable = false;
          for (const auto& [u, c] : d_of(t.left)) {
            auto& slot = bb[{u, t.right}];
            slot += t.c * c;
            if (slot == 0) bb.erase({u, t.right});
          }
          for (const auto& [u, c] : d_of(t.right)) {
            auto& slot = bb[{t.left, u}];
            slot += t.c * c * Rational(sign_pow(dl));
            if (slot == 0) bb.erase({t.left, u});
          }
        }
        if (reliable && a != bb)
          throw StructuralError("comultiplication is not a chain map on " + m.name_of(b));
      }
    }
  }
};

using CoalgebraRef = std::shared_ptr<const DgCoalgebra>;

// ---------------------------------------------------------------------------
// Dg-modules and dg-comodules
// ---------------------------------------------------------------------------

class DgModule {
 public:
  AlgebraRef A;
  Complex cx;
  ProductTable action;  // (algebra basis, module basis) -> module vector

  const GradedModule& module() const { return cx.module(); }

  SparseVec act(int a, int m) const { return action.get(a, m); }
  SparseVec act_vec(const SparseVec& a, const SparseVec& v) const {
    SparseVec out;
    for (const auto& [i, x] : a)
      for (const auto& [j, y] : v) axpy(out, x * y, action.get(i, j));
    return out;
  }
  SparseVec d_of(int i) const {
    return cx.d().apply_global(cx.module().degree_of(i), SparseVec{{i, Rational(1)}});
  }
  SparseVec d_vec(const SparseVec& v) const {
    SparseVec out;
    for (const auto& [i, x] : v) axpy(out, x, d_of(i));
    return out;
  }

  void validate() const {
    const auto& m = cx.module();
    const auto& am = A->cx.module();
    for (int i = 0; i < m.total_dim(); ++i)
      if (action.get(A->unit, i) != SparseVec{{i, Rational(1)}})
        throw StructuralError("unit does not act as identity on " + m.name_of(i));
    for (int a = 0; a < am.total_dim(); ++a)
      for (int i = 0; i < m.total_dim(); ++i) {
        for (int b = 0; b < am.total_dim(); ++b) {
          SparseVec lhs = act_vec(A->mult.get(a, b), SparseVec{{i, Rational(1)}});
          SparseVec rhs = act_vec(SparseVec{{a, Rational(1)}}, action.get(b, i));
          if (lhs != rhs)
            throw StructuralError("action associativity fails on (" + am.name_of(a) + ", " +
                                  am.name_of(b) + ", " + m.name_of(i) + ")");
        }
        if (!action_leibniz_reliable(a, i)) continue;
        SparseVec lhs = d_vec(action.get(a, i));
        SparseVec rhs = act_vec(A->d_of(a), SparseVec{{i, Rational(1)}});
        axpy(rhs, Rational(sign_pow(am.degree_of(a))),
             act_vec(SparseVec{{a, Rational(1)}}, d_of(i)));
        if (lhs != rhs)
          throw StructuralError("module Leibniz fails on (" + am.name_of(a) + ", " + m.name_of(i) +
                                ")");
      }
  }

 private:
  bool action_leibniz_reliable(int a, int i) const {
    if (action.dropped(a, i)) return false;
    int da = A->cx.module().degree_of(a), di = cx.module().degree_of(i);
    if (!A->cx.d().known(da) || !cx.d().known(di) || !cx.d().known(da + di)) return false;
    for (const auto& [t, c] : A->d_of(a))
      if (action.dropped(t, i)) return false;
    for (const auto& [t, c] : d_of(i))
      if (action.dropped(a, t)) return false;
    return true;
  }
};

using ModuleRef = std::shared_ptr<const DgModule>;

/// A as a left module over itself.
inline ModuleRef free_rank_one(const AlgebraRef& A) {
  auto M = std::make_shared<DgModule>();
  M->A = A;
  M->cx = A->cx;
  const auto& m = A->cx.module();
  for (int a = 0; a < m.total_dim(); ++a)
    for (int i = 0; i < m.total_dim(); ++i) M->action.set(a, i, A->mult.get(a, i), A->mult.dropped(a, i));
  M->validate();
  return M;
}

/// Base field as a module via the augmentation.
inline ModuleRef trivial_module(const AlgebraRef& A) {
  if (!A->augmentation) throw PreconditionError("trivial module needs an augmentation");
  auto M = std::make_shared<DgModule>();
  M->A = A;
  GradedModule m({{"triv", 0}});
  M->cx = Complex(m, GradedMap(m, m, 1), A->cx.window());
  const auto& am = A->cx.module();
  for (int a = 0; a < am.total_dim(); ++a) {
    Rational v = (*A->augmentation)[a];
    M->action.set(a, 0, v == 0 ? SparseVec{} : SparseVec{{0, v}});
  }
  M->validate();
  return M;
}

class DgComodule {
 public:
  CoalgebraRef C;
  Complex cx;
  std::vector<std::vector<CoProductTerm>> ca;  // per basis: sum (coalg, module, coeff)
  std::set<int> ca_boundary;                   // degrees where ca was truncated

  const GradedModule& module() const { return cx.module(); }

  SparseVec d_of(int i) const {
    return cx.d().apply_global(cx.module().degree_of(i), SparseVec{{i, Rational(1)}});
  }

  void validate() const {
    const auto& m = cx.module();
    const auto& cm = C->module();
    if (static_cast<int>(ca.size()) != m.total_dim())
      throw StructuralError("comodule table size mismatch");
    for (int b = 0; b < m.total_dim(); ++b) {
      if (ca_boundary.count(m.degree_of(b))) continue;
      SparseVec counit_side;
      for (const auto& t : ca[b])
        axpy(counit_side, t.c * coeff(C->counit, t.left), SparseVec{{t.right, Rational(1)}});
      if (counit_side != SparseVec{{b, Rational(1)}})
        throw StructuralError("comodule counit law fails on " + m.name_of(b));
      std::map<std::tuple<int, int, int>, Rational> lhs, rhs;
      for (const auto& t : ca[b])
        for (const auto& u : C->delta[t.left]) {
          auto& slot = lhs[{u.left, u.right, t.right}];
          slot += t.c * u.c;
          if (slot == 0) lhs.erase({u.left, u.right, t.right});
        }
      for (const auto& t : ca[b])
        for (const auto& u : ca[t.right]) {
          auto& slot = rhs[{t.left, u.left, u.right}];
          slot += t.c * u.c;
          if (slot == 0) rhs.erase({t.left, u.left, u.right});
        }
      if (lhs != rhs) throw StructuralError("coaction coassociativity fails on " + m.name_of(b));
      if (cx.d().known(m.degree_of(b))) {
        std::map<std::pair<int, int>, Rational> a, bb;
        for (const auto& [t, c] : d_of(b))
          for (const auto& u : ca[t]) {
            auto& slot = a[{u.left, u.right}];
            slot += c * u.c;
            if (slot == 0) a.erase({u.left, u.right});
          }
        bool reliable = true;
        for (const auto& t : ca[b]) {
          int dl = cm.degree_of(t.left);
          if (!C->cx.d().known(dl) || !cx.d().known(m.degree_of(t.right))) reliable = false;
          for (const auto& [u, c] : C->d_of(t.left)) {
            auto& slot = bb[{u, t.right}];
            slot += t.c * c;
            if (slot == 0) bb.erase({u, t.right});
          }
          for (const auto& [u, c] : d_of(t.right)) {
            auto& slot = bb[{t.left, u}];
            slot += t.c * c * Rational(sign_pow(dl));
            if (slot == 0) bb.erase({t.left, u});
          }
        }
        if (reliable && a != bb)
          throw StructuralError("coaction is not a chain map on " + m.name_of(b));
      }
    }
  }
};

using ComoduleRef = std::shared_ptr<const DgComodule>;

}  // namespace dgx
