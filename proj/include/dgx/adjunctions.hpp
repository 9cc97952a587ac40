#pragma once

#include <string>

#include "dgx/homalg.hpp"

namespace dgx {

/// Wraps a complex as a module over the base field.
inline ModuleRef as_trivial_module(const Complex& c) {
  static AlgebraRef k = trivial_algebra();
  auto M = std::make_shared<DgModule>();
  M->A = k;
  M->cx = c;
  for (int i = 0; i < c.module().total_dim(); ++i)
    M->action.set(0, i, SparseVec{{i, Rational(1)}});
  return M;
}

/// The full degree range Hom(M, N) can occupy for finite modules.
inline DegreeWindow natural_hom_window(const GradedModule& M, const GradedModule& N) {
  if (M.total_dim() == 0 || N.total_dim() == 0) return DegreeWindow(0, 0);
  return DegreeWindow(N.min_degree() - M.max_degree(), N.max_degree() - M.min_degree() + 1);
}

struct ComparisonReport {
  std::string name;
  bool ok = true;
  DegreeSet degrees;
  std::string witness;

  void fail(const std::string& w) {
    ok = false;
    if (witness.empty()) witness = w;
  }
};

/// Verifies that `phi` identifies the two hom complexes: degreewise bijective
/// and commuting with the differentials.
inline ComparisonReport verify_complex_iso(const std::string& name, const Complex& L,
                                           const Complex& R, const GradedMap& phi) {
  ComparisonReport rep;
  rep.name = name;
  std::set<int> degs;
  for (int d : L.module().degrees()) degs.insert(d);
  for (int d : R.module().degrees()) degs.insert(d);
  for (int d : degs) {
    rep.degrees.insert(d);
    int nl = L.module().dim(d), nr = R.module().dim(d);
    if (nl != nr) {
      rep.fail("dimensions differ in degree " + std::to_string(d) + ": " + std::to_string(nl) +
               " vs " + std::to_string(nr));
      continue;
    }
    if (nl > 0 && phi.block(d).rank() != nl)
      rep.fail("comparison not bijective in degree " + std::to_string(d));
  }
  if (auto bad = chain_map_defect(phi, L, R))
    rep.fail("comparison does not commute with d at degree " + std::to_string(*bad));
  return rep;
}

/// Hom_k(M|_k, X) = Hom_A(M, Hom_k(A, X)) via g -> (m -> (b -> (-1)^{|b||m|} g(b m))),
/// where Hom_k(A, X) carries the action (a F)(b) = (-1)^{|a|(|F|+|b|)} F(b a).
struct CoinductionData {
  HomComplex left, right;
  GradedMap comparison;
  ComparisonReport report;
};

inline CoinductionData adjunction_restriction(const ModuleRef& M, const Complex& X,
                                              const DegreeWindow& /*unused: full ranges*/) {
  const AlgebraRef A = M->A;
  CoinductionData out;
  ModuleRef Xtriv = as_trivial_module(X);
  out.left = hom_complex(*as_trivial_module(M->cx), *Xtriv,
                         natural_hom_window(M->module(), X.module()));

  HomComplex HAX = hom_complex(*as_trivial_module(A->cx), *Xtriv,
                               natural_hom_window(A->cx.module(), X.module()));
  auto T = std::make_shared<DgModule>();
  T->A = A;
  T->cx = HAX.cx;
  const auto& am = A->cx.module();
  for (int a = 0; a < am.total_dim(); ++a) {
    int da = am.degree_of(a);
    for (const auto& [deg, maps] : HAX.basis_maps)
      for (std::size_t k = 0; k < maps.size(); ++k) {
        const GradedMap& F = maps[k];
        GradedMap aF(am, X.module(), deg + da);
        for (int b = 0; b < am.total_dim(); ++b) {
          int db = am.degree_of(b);
          Rational s(sign_pow(static_cast<long long>(da) * (deg + db)));
          SparseVec ba = A->product_vec(SparseVec{{b, Rational(1)}}, SparseVec{{a, Rational(1)}});
          for (const auto& [t, c] : ba)
            for (const auto& [x, cx] : F.apply_global(db + da, SparseVec{{t, c}}))
              aF.add_entry(b, x, s * cx);
        }
        auto coords = HAX.coordinates(aF);
        if (!coords) throw StructuralError("coinduced action leaves the hom space");
        int src = *HAX.cx.module().find("h" + std::to_string(deg) + "_" + std::to_string(k));
        SparseVec img;
        for (const auto& [j, v] : *coords) {
          int tgt = *HAX.cx.module().find("h" + std::to_string(deg + da) + "_" + std::to_string(j));
          img[tgt] = v;
        }
        T->action.set(a, src, std::move(img));
      }
  }
  T->validate();
  out.right = hom_complex(*M, *T, natural_hom_window(M->module(), T->module()));

  // comparison
  GradedMap phi(out.left.cx.module(), out.right.cx.module(), 0);
  const auto& mm = M->module();
  for (const auto& [deg, maps] : out.left.basis_maps)
    for (std::size_t k = 0; k < maps.size(); ++k) {
      const GradedMap& g = maps[k];
      // ghat(m) in T, with value map b -> (-1)^{|b||m|} g(b m)
      GradedMap ghat(mm, T->module(), deg);
      for (int m = 0; m < mm.total_dim(); ++m) {
        int dm = mm.degree_of(m);
        GradedMap val(am, X.module(), deg + dm);
        for (int b = 0; b < am.total_dim(); ++b) {
          int db = am.degree_of(b);
          Rational s(sign_pow(static_cast<long long>(db) * dm));
          for (const auto& [t, c] : M->act_vec(SparseVec{{b, Rational(1)}}, SparseVec{{m, Rational(1)}}))
            for (const auto& [x, cx] : g.apply_global(db + dm, SparseVec{{t, c}}))
              val.add_entry(b, x, s * cx);
        }
        auto coords = HAX.coordinates(val);
        if (!coords) throw StructuralError("comparison value leaves the hom space");
        for (const auto& [j, v] : *coords) {
          int tgt = *HAX.cx.module().find("h" + std::to_string(deg + dm) + "_" + std::to_string(j));
          ghat.add_entry(m, tgt, v);
        }
      }
      auto rc = out.right.coordinates(ghat);
      if (!rc) throw StructuralError("comparison image is not A-linear");
      int src = *out.left.cx.module().find("h" + std::to_string(deg) + "_" + std::to_string(k));
      for (const auto& [j, v] : *rc) {
        int tgt = *out.right.cx.module().find("h" + std::to_string(deg) + "_" + std::to_string(j));
        phi.add_entry(src, tgt, v);
      }
    }
  out.comparison = phi;
  out.report = verify_complex_iso("hom-restriction adjunction", out.left.cx, out.right.cx, phi);
  return out;
}

/// Hom_A(M (x)_A N, X) = Hom_A(M, Hom_A(N, X)) for graded-commutative A,
/// via g -> (m -> (n -> g(m (x) n))). Hom_A(N, X) carries (a f)(n) = a f(n).
struct TensorHomData {
  ModuleTensor tensor;
  HomComplex left, right;
  GradedMap comparison;
  ComparisonReport report;
};

inline TensorHomData adjunction_tensor_hom(const ModuleRef& M, const ModuleRef& N,
                                           const ModuleRef& X, const DegreeWindow& w) {
  const AlgebraRef A = M->A;
  TensorHomData out;
  out.tensor = tensor_over_A(*M, *N, w);
  out.left = hom_complex(*out.tensor.module, *X,
                         natural_hom_window(out.tensor.module->module(), X->module()));

  HomComplex HNX = hom_complex(*N, *X, natural_hom_window(N->module(), X->module()));
  auto T = std::make_shared<DgModule>();
  T->A = A;
  T->cx = HNX.cx;
  const auto& am = A->cx.module();
  for (int a = 0; a < am.total_dim(); ++a) {
    int da = am.degree_of(a);
    for (const auto& [deg, maps] : HNX.basis_maps)
      for (std::size_t k = 0; k < maps.size(); ++k) {
        const GradedMap& f = maps[k];
        GradedMap af(N->module(), X->module(), deg + da);
        for (int n = 0; n < N->module().total_dim(); ++n) {
          int dn = N->module().degree_of(n);
          for (const auto& [x, cx] : f.apply_global(dn, SparseVec{{n, Rational(1)}}))
            for (const auto& [y, cy] : X->act(a, x)) af.add_entry(n, y, cx * cy);
        }
        auto coords = HNX.coordinates(af);
        if (!coords) throw StructuralError("hom action leaves the hom space");
        int src = *HNX.cx.module().find("h" + std::to_string(deg) + "_" + std::to_string(k));
        SparseVec img;
        for (const auto& [j, v] : *coords)
          img[*HNX.cx.module().find("h" + std::to_string(deg + da) + "_" + std::to_string(j))] = v;
        T->action.set(a, src, std::move(img));
      }
  }
  T->validate();
  out.right = hom_complex(*M, *T, natural_hom_window(M->module(), T->module()));

  GradedMap phi(out.left.cx.module(), out.right.cx.module(), 0);
  const auto& mm = M->module();
  for (const auto& [deg, maps] : out.left.basis_maps)
    for (std::size_t k = 0; k < maps.size(); ++k) {
      const GradedMap& g = maps[k];
      GradedMap ghat(mm, T->module(), deg);
      for (int m = 0; m < mm.total_dim(); ++m) {
        int dm = mm.degree_of(m);
        GradedMap val(N->module(), X->module(), deg + dm);
        for (int n = 0; n < N->module().total_dim(); ++n) {
          int p = out.tensor.ambient.of(m, n);
          if (p < 0) continue;
          int dn = N->module().degree_of(n);
          SparseVec q = out.tensor.onto.projection.apply_global(dm + dn, SparseVec{{p, Rational(1)}});
          for (const auto& [qq, cq] : q)
            for (const auto& [x, cx] : g.apply_global(dm + dn, SparseVec{{qq, cq}}))
              val.add_entry(n, x, cx);
        }
        auto coords = HNX.coordinates(val);
        if (!coords) throw StructuralError("tensor-hom comparison leaves the hom space");
        for (const auto& [j, v] : *coords)
          ghat.add_entry(m, *HNX.cx.module().find("h" + std::to_string(deg + dm) + "_" + std::to_string(j)), v);
      }
      auto rc = out.right.coordinates(ghat);
      if (!rc) throw StructuralError("tensor-hom comparison image is not A-linear");
      int src = *out.left.cx.module().find("h" + std::to_string(deg) + "_" + std::to_string(k));
      for (const auto& [j, v] : *rc)
        phi.add_entry(src, *out.right.cx.module().find("h" + std::to_string(deg) + "_" + std::to_string(j)), v);
    }
  out.comparison = phi;
  out.report = verify_complex_iso("tensor-hom adjunction", out.left.cx, out.right.cx, phi);
  return out;
}

/// Hom_A(A (x)_B M, N) = Hom_B(M, N|_B) along phi: B -> A, via g -> g(1 (x) -).
struct ExtensionHomData {
  ExtendedModule extended;
  HomComplex left, right;
  GradedMap comparison;
  ComparisonReport report;
};

inline ExtensionHomData adjunction_extension(const AlgebraMap& phi_map, const ModuleRef& M,
                                             const ModuleRef& N, const DegreeWindow& w) {
  ExtensionHomData out;
  out.extended = extend_module(phi_map, M, w);
  out.left = hom_complex(*out.extended.module, *N,
                         natural_hom_window(out.extended.module->module(), N->module()));
  ModuleRef NB = restrict_module(phi_map, N);
  out.right = hom_complex(*M, *NB, natural_hom_window(M->module(), NB->module()));

  GradedMap phi(out.left.cx.module(), out.right.cx.module(), 0);
  const AlgebraRef A = phi_map.target;
  for (const auto& [deg, maps] : out.left.basis_maps)
    for (std::size_t k = 0; k < maps.size(); ++k) {
      const GradedMap& g = maps[k];
      GradedMap h(M->module(), N->module(), deg);
      for (int m = 0; m < M->module().total_dim(); ++m) {
        int dm = M->module().degree_of(m);
        int p = out.extended.ambient.of(A->unit, m);
        if (p < 0) continue;
        SparseVec q = out.extended.onto.projection.apply_global(dm, SparseVec{{p, Rational(1)}});
        for (const auto& [qq, cq] : q)
          for (const auto& [x, cx] : g.apply_global(dm, SparseVec{{qq, cq}})) h.add_entry(m, x, cx);
      }
      auto rc = out.right.coordinates(h);
      if (!rc) throw StructuralError("extension comparison image is not B-linear");
      int src = *out.left.cx.module().find("h" + std::to_string(deg) + "_" + std::to_string(k));
      for (const auto& [j, v] : *rc)
        phi.add_entry(src, *out.right.cx.module().find("h" + std::to_string(deg) + "_" + std::to_string(j)), v);
    }
  out.comparison = phi;
  out.report = verify_complex_iso("extension-restriction adjunction", out.left.cx, out.right.cx, phi);
  return out;
}

}  // namespace dgx
