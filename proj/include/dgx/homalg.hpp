#pragma once

#include <map>
#include <string>
#include <vector>

#include "dgx/algebra.hpp"

namespace dgx {

// ---------------------------------------------------------------------------
// Hom complexes of A-linear maps
// ---------------------------------------------------------------------------

/// Complex of A-linear graded maps M -> N (left modules, with the sign rule
/// f(a m) = (-1)^{|f||a|} a f(m)), differential D(f) = d_N f - (-1)^{|f|} f d_M.
/// Each degree carries an explicit basis of GradedMaps.
class HomComplex {
 public:
  Complex cx;
  std::map<int, std::vector<GradedMap>> basis_maps;

  /// Coordinates of an A-linear map over the degree-d basis.
  std::optional<SparseVec> coordinates(const GradedMap& f) const {
    auto it = ech_.find(f.degree());
    if (it == ech_.end()) return f_vectorize(f).empty() ? std::optional<SparseVec>(SparseVec{}) : std::nullopt;
    return it->second.coordinates(f_vectorize(f));
  }

  SparseVec f_vectorize(const GradedMap& f) const {
    auto lt = layout_.find(f.degree());
    SparseVec out;
    if (lt == layout_.end()) {
      if (!f.is_zero_where_known()) throw StructuralError("map outside hom layout degrees");
      return out;
    }
    for (const auto& [i, off] : lt->second) {
      QMatrix b = f.block(i);
      for (int r = 0; r < b.rows(); ++r)
        for (int c = 0; c < b.cols(); ++c) {
          Rational v = b.get(r, c);
          if (v != 0) out[off + r * b.cols() + c] = v;
        }
    }
    return out;
  }

  friend HomComplex hom_complex(const DgModule& M, const DgModule& N, const DegreeWindow& w);
  friend HomComplex comodule_hom(const DgComodule& M, const DgComodule& N, const DegreeWindow& w);

 private:
  std::map<int, std::map<int, int>> layout_;  // hom degree -> (module degree -> var offset)
  std::map<int, EchelonBasis> ech_;           // hom degree -> echelon of vectorized basis
};

inline HomComplex hom_complex(const DgModule& M, const DgModule& N, const DegreeWindow& w) {
  if (!(M.A->cx.module() == N.A->cx.module()))
    throw StructuralError("hom_complex: modules live over different algebras");
  const AlgebraRef A = M.A;
  const GradedModule& mm = M.module();
  const GradedModule& nm = N.module();
  HomComplex out;

  auto build_layout = [&](int d) {
    std::map<int, int> off;
    int total = 0;
    for (int i : mm.degrees()) {
      int rows = nm.dim(i + d), cols = mm.dim(i);
      if (rows * cols == 0) continue;
      off[i] = total;
      total += rows * cols;
    }
    return std::pair{off, total};
  };

  std::vector<BasisElement> basis;
  std::map<int, std::vector<SparseVec>> space;  // hom degree -> nullspace vectors
  for (int d = w.lo; d <= w.hi; ++d) {
    auto [off, total] = build_layout(d);
    if (total == 0) continue;
    out.layout_[d] = off;
    auto var = [&](int i, int r, int c) { return off.at(i) + r * mm.dim(i) + c; };
    // constraints: f(g m) = (-1)^{d |g|} g f(m) for algebra generators g.
    // Constraints touching truncation-dropped action entries are skipped:
    // the truncated data does not determine them.
    std::vector<SparseVec> rows;
    for (int g : A->generators) {
      int dg = A->cx.module().degree_of(g);
      Rational sgn(sign_pow(static_cast<long long>(d) * dg));
      for (int m = 0; m < mm.total_dim(); ++m) {
        int im = mm.degree_of(m);
        int itgt = im + dg;                 // degree of g*m
        int otgt = itgt + d;                // degree of f(g*m)
        if (M.action.dropped(g, m)) continue;
        bool unreliable = false;
        if (off.count(im))
          for (int r = 0; r < nm.dim(im + d) && !unreliable; ++r)
            unreliable = N.action.dropped(g, nm.global_of(im + d, r));
        if (unreliable) continue;
        std::map<int, SparseVec> eq;        // target basis global -> row
        for (const auto& [m2, c] : M.action.get(g, m)) {
          if (!off.count(itgt)) continue;
          for (int r = 0; r < nm.dim(otgt); ++r)
            eq[nm.global_of(otgt, r)][var(itgt, r, mm.local_of(m2))] += c;
        }
        if (off.count(im)) {
          for (int r = 0; r < nm.dim(im + d); ++r) {
            int nglob = nm.global_of(im + d, r);
            for (const auto& [n2, c] : N.action.get(g, nglob)) {
              SparseVec& row = eq[n2];
              row[var(im, r, mm.local_of(m))] -= sgn * c;
            }
          }
        }
        for (auto& [tgt, row] : eq) {
          // drop zero entries
          for (auto it = row.begin(); it != row.end();)
            it = (it->second == 0) ? row.erase(it) : std::next(it);
          if (!row.empty()) rows.push_back(std::move(row));
        }
      }
    }
    QMatrix C(static_cast<int>(rows.size()), total);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
      for (const auto& [j, v] : rows[r]) C.set(r, j, v);
    space[d] = C.nullspace();
    for (std::size_t k = 0; k < space[d].size(); ++k)
      basis.push_back({"h" + std::to_string(d) + "_" + std::to_string(k), d});
  }

  GradedModule hm(std::move(basis));
  // materialize basis maps and echelons
  for (const auto& [d, vecs] : space) {
    std::vector<GradedMap> maps;
    EchelonBasis ech(true);
    for (const auto& v : vecs) {
      GradedMap f(mm, nm, d);
      for (const auto& [idx, val] : v) {
        // invert the layout: find the block containing idx
        const auto& off = out.layout_.at(d);
        int i = 0, base = 0;
        for (const auto& [deg, o] : off) {
          int rows = nm.dim(deg + d), cols = mm.dim(deg);
          if (idx >= o && idx < o + rows * cols) {
            i = deg;
            base = o;
            break;
          }
        }
        int cols = mm.dim(i);
        int r = (idx - base) / cols, c = (idx - base) % cols;
        f.add_entry(mm.global_of(i, c), nm.global_of(i + d, r), val);
      }
      ech.insert(v);
      maps.push_back(std::move(f));
    }
    out.ech_.emplace(d, std::move(ech));
    out.basis_maps[d] = std::move(maps);
  }

  // differential via coordinates of D(f) over the next degree's basis
  GradedMap D(hm, hm, 1);
  std::set<int> dbad;
  for (const auto& [d, maps] : out.basis_maps) {
    for (std::size_t k = 0; k < maps.size(); ++k) {
      GradedMap df = compose(N.cx.d(), maps[k]) - compose(maps[k], M.cx.d()) * Rational(sign_pow(d));
      if (!out.layout_.count(d + 1) && !df.is_zero_where_known()) {
        dbad.insert(d);
        continue;
      }
      SparseVec vec = out.f_vectorize(df);
      auto it = out.ech_.find(d + 1);
      SparseVec coords;
      if (!vec.empty()) {
        if (it == out.ech_.end())
          throw StructuralError("hom differential leaves the computed hom space");
        auto c = it->second.coordinates(vec);
        if (!c) throw StructuralError("hom differential leaves the computed hom space");
        coords = *c;
      }
      int src = *hm.find("h" + std::to_string(d) + "_" + std::to_string(k));
      for (const auto& [j, v] : coords) {
        int tgt = *hm.find("h" + std::to_string(d + 1) + "_" + std::to_string(j));
        D.add_entry(src, tgt, v);
      }
    }
  }
  if (out.basis_maps.count(w.hi)) dbad.insert(w.hi);
  for (int d : dbad) D.mark_unknown(d);
  out.cx = Complex(hm, D, w, true);
  return out;
}

// ---------------------------------------------------------------------------
// Quotient complexes
// ---------------------------------------------------------------------------

struct QuotientLayout {
  Complex complex;
  GradedMap projection;  // ambient -> quotient
  GradedMap section;     // quotient -> ambient (a linear splitting, not chain)
};

/// Quotient of a complex by the span of homogeneous relation vectors (global
/// coordinates). The span must be d-stable; this is checked.
inline QuotientLayout quotient_complex(const Complex& ambient,
                                       const std::vector<SparseVec>& relations,
                                       const std::string& tag = "q") {
  const GradedModule& am = ambient.module();
  std::map<int, EchelonBasis> rel;
  for (const auto& r : relations) {
    if (r.empty()) continue;
    int deg = am.degree_of(r.begin()->first);
    for (const auto& [i, c] : r)
      if (am.degree_of(i) != deg)
        throw StructuralError("quotient relation is not homogeneous");
    rel[deg].insert(am.to_local(deg, r));
  }
  // d-stability
  for (const auto& r : relations) {
    if (r.empty()) continue;
    int deg = am.degree_of(r.begin()->first);
    if (!ambient.d().known(deg)) continue;
    SparseVec dr = ambient.d().apply_global(deg, r);
    if (dr.empty()) continue;
    auto it = rel.find(deg + 1);
    SparseVec res = it == rel.end() ? am.to_local(deg + 1, dr) : it->second.reduce(am.to_local(deg + 1, dr));
    if (!res.empty())
      throw StructuralError("quotient relations are not closed under the differential at degree " +
                            std::to_string(deg));
  }
  // quotient basis: ambient basis elements away from relation pivots
  std::map<int, std::set<int>> pivots;
  for (const auto& [deg, e] : rel)
    for (const auto& row : e.row_vectors()) pivots[deg].insert(row.begin()->first);
  std::vector<BasisElement> qbasis;
  std::vector<int> q_to_ambient;
  std::map<int, int> ambient_to_q;
  for (int g = 0; g < am.total_dim(); ++g) {
    int deg = am.degree_of(g);
    int loc = am.local_of(g);
    if (pivots.count(deg) && pivots[deg].count(loc)) continue;
    ambient_to_q[g] = static_cast<int>(qbasis.size());
    q_to_ambient.push_back(g);
    qbasis.push_back({tag + "[" + am.name_of(g) + "]", deg});
  }
  GradedModule qm(std::move(qbasis));

  GradedMap proj(am, qm, 0), sect(qm, am, 0);
  for (int g = 0; g < am.total_dim(); ++g) {
    int deg = am.degree_of(g);
    SparseVec v{{am.local_of(g), Rational(1)}};
    auto it = rel.find(deg);
    SparseVec red = it == rel.end() ? v : it->second.reduce(v);
    for (const auto& [loc, c] : red) proj.add_entry(g, ambient_to_q.at(am.global_of(deg, loc)), c);
  }
  for (std::size_t q = 0; q < q_to_ambient.size(); ++q)
    sect.add_entry(static_cast<int>(q), q_to_ambient[q], 1);

  GradedMap dq = compose(proj, compose(ambient.d(), sect));
  QuotientLayout out;
  out.complex = Complex(qm, dq, ambient.window(), true);
  out.projection = std::move(proj);
  out.section = std::move(sect);
  return out;
}

// ---------------------------------------------------------------------------
// Tensor over A, restriction and extension of scalars
// ---------------------------------------------------------------------------

struct ModuleTensor {
  ModuleRef module;      // M (x)_A N as an A-module via the left factor
  QuotientLayout onto;   // from the ambient M (x)_Q N
  TensorLayout ambient;
};

/// M (x)_A N for graded-commutative A: the quotient of M (x) N by
/// m a (x) n - m (x) a n, with a running over the generators and the right
/// action m a = (-1)^{|a||m|} a m.
inline ModuleTensor tensor_over_A(const DgModule& M, const DgModule& N, const DegreeWindow& w) {
  const AlgebraRef A = M.A;
  if (!A->is_graded_commutative())
    throw PreconditionError("tensor_over_A needs a graded-commutative algebra");
  TensorLayout T = tensor_layout(M.module(), N.module(), w);
  GradedMap dM = tensor_map(T, T, M.cx.d(), GradedMap::identity(N.module()));
  GradedMap dN = tensor_map(T, T, GradedMap::identity(M.module()), N.cx.d());
  Complex ambient(T.module, dM + dN, w, true);

  std::vector<SparseVec> rels;
  for (int g : A->generators) {
    int dg = A->cx.module().degree_of(g);
    for (int m = 0; m < M.module().total_dim(); ++m)
      for (int n = 0; n < N.module().total_dim(); ++n) {
        // right action on M through graded commutativity
        SparseVec ma = scaled(M.action.get(g, m),
                              Rational(sign_pow(static_cast<long long>(dg) * M.module().degree_of(m))));
        SparseVec rel;
        bool inside = true;
        for (const auto& [m2, c] : ma) {
          int p = T.of(m2, n);
          if (p < 0) { inside = false; break; }
          rel[p] += c;
        }
        Rational s(-1);
        for (const auto& [n2, c] : N.action.get(g, n)) {
          int p = T.of(m, n2);
          if (p < 0) { inside = false; break; }
          rel[p] += s * c;
        }
        for (auto it = rel.begin(); it != rel.end();)
          it = (it->second == 0) ? rel.erase(it) : std::next(it);
        if (inside && !rel.empty()) rels.push_back(std::move(rel));
      }
  }
  ModuleTensor out;
  out.ambient = T;
  out.onto = quotient_complex(ambient, rels, "t");
  auto R = std::make_shared<DgModule>();
  R->A = A;
  R->cx = out.onto.complex;
  const GradedModule& qm = R->cx.module();
  for (int a = 0; a < A->cx.module().total_dim(); ++a)
    for (int q = 0; q < qm.total_dim(); ++q) {
      // act on the left factor of a section representative, then project
      SparseVec amb = out.onto.section.apply_global(qm.degree_of(q), SparseVec{{q, Rational(1)}});
      SparseVec img;
      bool dropped = false;
      for (const auto& [p, c] : amb) {
        auto [m, n] = T.pairs[p];
        for (const auto& [m2, cm] : M.action.get(a, m)) {
          int t = T.of(m2, n);
          if (t < 0) { dropped = true; continue; }
          img[t] += c * cm;
        }
      }
      for (auto it = img.begin(); it != img.end();)
        it = (it->second == 0) ? img.erase(it) : std::next(it);
      int adeg = A->cx.module().degree_of(a);
      SparseVec proj = out.onto.projection.apply_global(adeg + qm.degree_of(q), img);
      R->action.set(a, q, std::move(proj), dropped);
    }
  R->validate();
  out.module = R;
  return out;
}

struct AlgebraMap {
  AlgebraRef source, target;
  GradedMap map;  // degree 0 between the underlying modules

  SparseVec of(int i) const {
    return map.apply_global(source->cx.module().degree_of(i), SparseVec{{i, Rational(1)}});
  }

  void validate() const {
    if (map.degree() != 0) throw StructuralError("algebra map must have degree 0");
    if (!(of(source->unit) == SparseVec{{target->unit, Rational(1)}}))
      throw StructuralError("algebra map does not preserve the unit");
    const auto& sm = source->cx.module();
    for (int i = 0; i < sm.total_dim(); ++i) {
      // chain map
      if (source->cx.d().known(sm.degree_of(i))) {
        SparseVec lhs = map.apply_global(sm.degree_of(i) + 1, source->d_of(i).empty()
                                                                  ? SparseVec{}
                                                                  : source->d_of(i));
        SparseVec rhs = target->d_vec(of(i));
        if (lhs != rhs) throw StructuralError("algebra map is not a chain map on " + sm.name_of(i));
      }
      for (int j = 0; j < sm.total_dim(); ++j) {
        SparseVec lhs = map.apply_global(sm.degree_of(i) + sm.degree_of(j),
                                         source->mult.get(i, j));
        SparseVec rhs = target->product_vec(of(i), of(j));
        if (lhs != rhs && !source->mult.dropped(i, j))
          throw StructuralError("algebra map not multiplicative on (" + sm.name_of(i) + ", " +
                                sm.name_of(j) + ")");
      }
    }
  }
};

/// Restriction of an A-module to B along phi: B -> A.
inline ModuleRef restrict_module(const AlgebraMap& phi, const ModuleRef& M) {
  if (!(phi.target->cx.module() == M->A->cx.module()))
    throw StructuralError("restrict_module: map target is not the module's algebra");
  auto R = std::make_shared<DgModule>();
  R->A = phi.source;
  R->cx = M->cx;
  const auto& bm = phi.source->cx.module();
  for (int b = 0; b < bm.total_dim(); ++b)
    for (int m = 0; m < M->module().total_dim(); ++m)
      R->action.set(b, m, M->act_vec(phi.of(b), SparseVec{{m, Rational(1)}}));
  R->validate();
  return R;
}

struct ExtendedModule {
  ModuleRef module;  // A (x)_B M
  QuotientLayout onto;
  TensorLayout ambient;
};

/// Extension of scalars A (x)_B M along phi: B -> A.
inline ExtendedModule extend_module(const AlgebraMap& phi, const ModuleRef& M,
                                    const DegreeWindow& w) {
  const AlgebraRef A = phi.target;
  const AlgebraRef B = phi.source;
  if (!(B->cx.module() == M->A->cx.module()))
    throw StructuralError("extend_module: module must live over the map's source");
  TensorLayout T = tensor_layout(A->cx.module(), M->module(), w);
  GradedMap dA = tensor_map(T, T, A->cx.d(), GradedMap::identity(M->module()));
  GradedMap dM = tensor_map(T, T, GradedMap::identity(A->cx.module()), M->cx.d());
  Complex ambient(T.module, dA + dM, w, true);
  std::vector<SparseVec> rels;
  for (int g : B->generators) {
    int dg = B->cx.module().degree_of(g);
    SparseVec pg = phi.of(g);
    for (int a = 0; a < A->cx.module().total_dim(); ++a)
      for (int m = 0; m < M->module().total_dim(); ++m) {
        SparseVec rel;
        bool inside = true;
        for (const auto& [a2, c] : A->product_vec(SparseVec{{a, Rational(1)}}, pg)) {
          int p = T.of(a2, m);
          if (p < 0) { inside = false; break; }
          rel[p] += c;
        }
        Rational s(-Rational(1));
        for (const auto& [m2, c] : M->action.get(g, m)) {
          int p = T.of(a, m2);
          if (p < 0) { inside = false; break; }
          rel[p] += s * c;
        }
        for (auto it = rel.begin(); it != rel.end();)
          it = (it->second == 0) ? rel.erase(it) : std::next(it);
        if (inside && !rel.empty()) rels.push_back(std::move(rel));
      }
  }
  ExtendedModule out;
  out.ambient = T;
  out.onto = quotient_complex(ambient, rels, "e");
  auto R = std::make_shared<DgModule>();
  R->A = A;
  R->cx = out.onto.complex;
  const GradedModule& qm = R->cx.module();
  for (int a = 0; a < A->cx.module().total_dim(); ++a)
    for (int q = 0; q < qm.total_dim(); ++q) {
      SparseVec amb = out.onto.section.apply_global(qm.degree_of(q), SparseVec{{q, Rational(1)}});
      SparseVec img;
      bool dropped = false;
      for (const auto& [p, c] : amb) {
        auto [a1, m] = T.pairs[p];
        for (const auto& [a2, ca] : A->mult.get(a, a1)) {
          int t = T.of(a2, m);
          if (t < 0) { dropped = true; continue; }
          img[t] += c * ca;
        }
      }
      for (auto it = img.begin(); it != img.end();)
        it = (it->second == 0) ? img.erase(it) : std::next(it);
      SparseVec proj = out.onto.projection.apply_global(A->cx.module().degree_of(a) + qm.degree_of(q), img);
      R->action.set(a, q, std::move(proj), dropped);
    }
  R->validate();
  out.module = R;
  return out;
}

// ---------------------------------------------------------------------------
// Filtered extensions
// ---------------------------------------------------------------------------

struct FilteredExtension {
  ModuleRef total;
  std::vector<int> piece_offset;           // piece index -> global offset
  std::vector<std::string> certificate;    // one line per filtration step
  bool semifree = false;
};

/// Assembles a module from filtration pieces and glue maps of degree +1 into
/// strictly earlier pieces. The filtration is the certificate; when every
/// piece is marked free the result is semifree by construction.
inline FilteredExtension filtered_extension(
    const std::vector<ModuleRef>& pieces,
    const std::map<std::pair<int, int>, GradedMap>& glue,  // (from, to) with to < from
    const std::vector<bool>& piece_is_free, const DegreeWindow& w) {
  if (pieces.empty()) throw PreconditionError("filtered_extension needs at least one piece");
  const AlgebraRef A = pieces[0]->A;
  std::vector<BasisElement> basis;
  FilteredExtension out;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    out.piece_offset.push_back(static_cast<int>(basis.size()));
    const auto& m = pieces[p]->module();
    for (int i = 0; i < m.total_dim(); ++i)
      basis.push_back({"F" + std::to_string(p) + ":" + m.name_of(i), m.degree_of(i)});
  }
  GradedModule tm(std::move(basis));
  GradedMap d(tm, tm, 1);
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const auto& m = pieces[p]->module();
    for (int i = 0; i < m.total_dim(); ++i)
      for (const auto& [t, c] : pieces[p]->d_of(i))
        d.add_entry(out.piece_offset[p] + i, out.piece_offset[p] + t, c);
  }
  for (const auto& [edge, g] : glue) {
    auto [from, to] = edge;
    if (to >= from)
      throw PreconditionError("glue must map into strictly earlier pieces");
    if (g.degree() != 1) throw PreconditionError("glue maps must have degree +1");
    const auto& sm = pieces[from]->module();
    for (int i = 0; i < sm.total_dim(); ++i)
      for (const auto& [t, c] : g.apply_global(sm.degree_of(i), SparseVec{{i, Rational(1)}}))
        d.add_entry(out.piece_offset[from] + i, out.piece_offset[to] + t, c);
  }
  // locate a failing pair on d^2 != 0 before constructing
  GradedMap dd = compose(d, d);
  if (!dd.is_zero_where_known()) {
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      const auto& m = pieces[p]->module();
      for (int i = 0; i < m.total_dim(); ++i) {
        SparseVec v = dd.apply_global(m.degree_of(i), SparseVec{{out.piece_offset[p] + i, Rational(1)}});
        if (v.empty()) continue;
        int tgt = v.begin()->first;
        std::size_t q = 0;
        while (q + 1 < pieces.size() && out.piece_offset[q + 1] <= tgt) ++q;
        throw StructuralError("total differential does not square to zero between pieces " +
                              std::to_string(p) + " and " + std::to_string(q));
      }
    }
  }
  auto M = std::make_shared<DgModule>();
  M->A = A;
  M->cx = Complex(tm, d, w, true);
  for (int a = 0; a < A->cx.module().total_dim(); ++a)
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      const auto& m = pieces[p]->module();
      for (int i = 0; i < m.total_dim(); ++i) {
        SparseVec img;
        for (const auto& [t, c] : pieces[p]->action.get(a, i)) img[out.piece_offset[p] + t] = c;
        M->action.set(a, out.piece_offset[p] + i, std::move(img),
                      pieces[p]->action.dropped(a, i));
      }
    }
  M->validate();
  out.total = M;
  out.semifree = true;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    bool fr = p < piece_is_free.size() && piece_is_free[p];
    out.semifree = out.semifree && fr;
    out.certificate.push_back("gr^" + std::to_string(p) + ": " +
                              (fr ? "free piece, " : "piece, ") + "rank " +
                              std::to_string(pieces[p]->module().total_dim()));
  }
  return out;
}

}  // namespace dgx
