#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dgx/graded.hpp"

namespace dgx {

struct Cohomology {
  std::map<int, int> dims;                          // degree -> dim H^degree
  std::map<int, std::vector<SparseVec>> reps;       // local coords of representatives
  DegreeSet valid;

  int dim(int degree) const {
    auto it = dims.find(degree);
    return it == dims.end() ? 0 : it->second;
  }
};

/// Per-degree cohomology with closed representatives lifting ker/im. Ranks
/// come from the fraction-free elimination; representatives from the rational
/// echelon. The two are checked against each other.
inline Cohomology cohomology(const Complex& c) {
  Cohomology out;
  out.valid = c.h_valid();
  for (int d : out.valid.values()) {
    QMatrix dcur = c.d().block(d);
    QMatrix dprev = c.d().block(d - 1);
    int dim_d = c.module().dim(d);
    int rank_cur = dcur.rank();
    int rank_prev = dprev.rank();
    int hdim = dim_d - rank_cur - rank_prev;
    if (hdim < 0) throw StructuralError("negative cohomology dimension: internal error");
    out.dims[d] = hdim;
    // representatives: extend the image basis to a kernel basis
    EchelonBasis ech;
    for (int j = 0; j < dprev.cols(); ++j) {
      SparseVec col;
      for (int r = 0; r < dprev.rows(); ++r) {
        Rational v = dprev.get(r, j);
        if (v != 0) col[r] = v;
      }
      ech.insert(std::move(col));
    }
    if (ech.rank() != rank_prev)
      throw StructuralError("rank disagreement between eliminations: internal error");
    std::vector<SparseVec> reps;
    for (SparseVec& k : dcur.nullspace())
      if (ech.insert(k)) reps.push_back(k);
    if (static_cast<int>(reps.size()) != hdim)
      throw StructuralError("representative count disagrees with rank count: internal error");
    out.reps[d] = std::move(reps);
  }
  return out;
}

/// Returns the first degree where f fails to commute with the differentials,
/// or nullopt when f is a chain map on all known degrees.
inline std::optional<int> chain_map_defect(const GradedMap& f, const Complex& X,
                                           const Complex& Y) {
  GradedMap left = compose(Y.d(), f);
  GradedMap right = compose(f, X.d());
  for (int d : X.module().degrees()) {
    if (!left.known(d) || !right.known(d)) continue;
    if (!(left.block(d) == right.block(d))) return d;
  }
  return std::nullopt;
}

struct QuasiIsoVerdict {
  bool ok = false;
  DegreeSet valid;
  std::map<int, std::pair<int, int>> h_dims;  // degree -> (dim H src, dim H tgt)
  std::string witness;
};

/// True iff the induced map on cohomology is bijective in every degree of the
/// shared valid window. Throws PreconditionError when f is not a chain map.
inline QuasiIsoVerdict is_quasi_iso(const GradedMap& f, const Complex& X, const Complex& Y) {
  if (f.degree() != 0) throw PreconditionError("is_quasi_iso: map must have degree 0");
  if (auto bad = chain_map_defect(f, X, Y))
    throw PreconditionError("is_quasi_iso: not a chain map, first failure at degree " +
                            std::to_string(*bad));
  Cohomology hx = cohomology(X);
  Cohomology hy = cohomology(Y);
  QuasiIsoVerdict out;
  out.valid = hx.valid;
  out.valid.intersect_with(hy.valid);
  DegreeSet pruned;
  for (int d : out.valid.values())
    if (f.known(d)) pruned.insert(d);
  out.valid = pruned;
  out.ok = true;
  for (int d : out.valid.values()) {
    int nx = hx.dim(d);
    int ny = hy.dim(d);
    out.h_dims[d] = {nx, ny};
    if (nx != ny) {
      out.ok = false;
      if (out.witness.empty())
        out.witness = "H^" + std::to_string(d) + " dims differ: " + std::to_string(nx) + " vs " +
                      std::to_string(ny);
      continue;
    }
    if (nx == 0) continue;
    // coordinates of f(rep) over target representatives modulo the image
    EchelonBasis ech(true);
    QMatrix dprev = Y.d().block(d - 1);
    int im_tags = dprev.cols();
    for (int j = 0; j < dprev.cols(); ++j) {
      SparseVec col;
      for (int r = 0; r < dprev.rows(); ++r) {
        Rational v = dprev.get(r, j);
        if (v != 0) col[r] = v;
      }
      ech.insert(std::move(col));
    }
    for (const SparseVec& r : hy.reps.at(d)) ech.insert(r);
    QMatrix induced(ny, nx);
    QMatrix fb = f.block(d);
    for (int j = 0; j < nx; ++j) {
      SparseVec img = fb.apply(hx.reps.at(d)[j]);
      auto coords = ech.coordinates(img);
      if (!coords)
        throw StructuralError("image of a closed representative is not closed: internal error");
      for (const auto& [tag, v] : *coords) {
        if (tag < im_tags) continue;
        induced.set(tag - im_tags, j, v);
      }
    }
    if (induced.rank() != nx) {
      out.ok = false;
      if (out.witness.empty())
        out.witness = "induced map on H^" + std::to_string(d) + " is not bijective";
    }
  }
  return out;
}

struct HomotopyResult {
  std::optional<GradedMap> h;
  DegreeSet solved_degrees;
  std::string note;
};

/// Solves lhs = d_tgt . h + h . d_src for h of degree deg(lhs)-1, as one
/// sparse linear system over the degrees where all participating blocks are
/// known. Unsolvable is a normal outcome.
inline HomotopyResult solve_homotopy(const GradedMap& lhs, const Complex& src,
                                     const Complex& tgt) {
  if (!(lhs.source() == src.module()) || !(lhs.target() == tgt.module()))
    throw StructuralError("solve_homotopy: endpoints do not match");
  const int k = lhs.degree();
  const GradedModule& S = src.module();
  const GradedModule& T = tgt.module();

  // unknown blocks h_d : S^d -> T^{d+k-1}
  std::map<int, int> var_offset;
  int nvars = 0;
  for (int d : S.degrees()) {
    int rows = T.dim(d + k - 1);
    int cols = S.dim(d);
    if (rows * cols == 0) continue;
    var_offset[d] = nvars;
    nvars += rows * cols;
  }
  auto var = [&](int d, int r, int c) {
    return var_offset.at(d) + r * S.dim(d) + c;
  };

  struct Eq {
    SparseVec lhsrow;
    Rational rhs;
  };
  std::vector<Eq> eqs;
  DegreeSet solved;
  for (int d : S.degrees()) {
    if (!lhs.known(d) || !src.d().known(d) || !tgt.d().known(d + k - 1)) continue;
    solved.insert(d);
    QMatrix L = lhs.block(d);
    QMatrix dT = tgt.d().block(d + k - 1);
    QMatrix dS = src.d().block(d);
    int rows = T.dim(d + k);
    int cols = S.dim(d);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        Eq eq;
        eq.rhs = L.get(r, c);
        if (var_offset.count(d)) {
          for (int m = 0; m < T.dim(d + k - 1); ++m) {
            Rational v = dT.get(r, m);
            if (v != 0) eq.lhsrow[var(d, m, c)] += v;
          }
        }
        if (var_offset.count(d + 1)) {
          for (int m = 0; m < S.dim(d + 1); ++m) {
            Rational v = dS.get(m, c);
            if (v != 0) eq.lhsrow[var(d + 1, r, m)] += v;
          }
        }
        if (eq.lhsrow.empty() && eq.rhs != 0) {
          HomotopyResult fail;
          fail.solved_degrees = solved;
          fail.note = "unsolvable at degree " + std::to_string(d);
          return fail;
        }
        if (!eq.lhsrow.empty()) eqs.push_back(std::move(eq));
      }
  }

  QMatrix A(static_cast<int>(eqs.size()), nvars);
  SparseVec b;
  for (int i = 0; i < static_cast<int>(eqs.size()); ++i) {
    for (const auto& [j, v] : eqs[i].lhsrow) A.set(i, j, v);
    if (eqs[i].rhs != 0) b[i] = eqs[i].rhs;
  }
  auto sol = A.solve(b);
  HomotopyResult out;
  out.solved_degrees = solved;
  if (!sol) {
    out.note = "linear system inconsistent in the given window";
    return out;
  }
  GradedMap h(S, T, k - 1);
  for (const auto& [d, off] : var_offset) {
    int rows = T.dim(d + k - 1);
    int cols = S.dim(d);
    QMatrix block(rows, cols);
    bool any = false;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        Rational v = coeff(*sol, off + r * cols + c);
        if (v != 0) {
          block.set(r, c, v);
          any = true;
        }
      }
    if (any) h.set_block(d, std::move(block));
  }
  out.h = std::move(h);
  return out;
}

}  // namespace dgx
