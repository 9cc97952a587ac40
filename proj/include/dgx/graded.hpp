#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dgx/matrix.hpp"

namespace dgx {

struct DegreeWindow {
  int lo = 0;
  int hi = 0;
  DegreeWindow() = default;
  DegreeWindow(int l, int h) : lo(l), hi(h) {
    if (l > h) throw StructuralError("degree window [" + std::to_string(l) + "," + std::to_string(h) + "] is empty");
  }
  bool contains(int d) const { return lo <= d && d <= hi; }
  DegreeWindow intersect(const DegreeWindow& o) const {
    return DegreeWindow(std::max(lo, o.lo), std::min(hi, o.hi));
  }
  std::string str() const { return "[" + std::to_string(lo) + "," + std::to_string(hi) + "]"; }
};

/// Set of degrees on which a verdict is trustworthy. Validity shrinks when a
/// computation touches truncated data; it never turns into a hard failure.
class DegreeSet {
 public:
  DegreeSet() = default;
  static DegreeSet interval(int lo, int hi) {
    DegreeSet s;
    for (int d = lo; d <= hi; ++d) s.s_.insert(d);
    return s;
  }
  static DegreeSet window(const DegreeWindow& w) { return interval(w.lo, w.hi); }

  bool contains(int d) const { return s_.count(d) != 0; }
  bool contains_interval(int lo, int hi) const {
    for (int d = lo; d <= hi; ++d)
      if (!contains(d)) return false;
    return true;
  }
  void insert(int d) { s_.insert(d); }
  void erase(int d) { s_.erase(d); }
  void intersect_with(const DegreeSet& o) {
    for (auto it = s_.begin(); it != s_.end();)
      it = o.contains(*it) ? std::next(it) : s_.erase(it);
  }
  bool empty() const { return s_.empty(); }
  const std::set<int>& values() const { return s_; }

  /// Compact rendering such as "[-6,-1] u [2,6]".
  std::string str() const {
    if (s_.empty()) return "(empty)";
    std::string out;
    auto it = s_.begin();
    while (it != s_.end()) {
      int lo = *it, hi = *it;
      auto next = std::next(it);
      while (next != s_.end() && *next == hi + 1) hi = *next++;
      if (!out.empty()) out += " u ";
      out += "[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
      it = next;
    }
    return out;
  }

 private:
  std::set<int> s_;
};

struct BasisElement {
  std::string name;
  int degree = 0;
};

/// Finitely supported graded vector space with a named basis. Immutable after
/// construction and cheap to copy.
class GradedModule {
 public:
  GradedModule() : impl_(std::make_shared<Impl>()) {}
  explicit GradedModule(std::vector<BasisElement> basis) {
    auto impl = std::make_shared<Impl>();
    impl->basis = std::move(basis);
    std::set<std::string> seen;
    for (int i = 0; i < static_cast<int>(impl->basis.size()); ++i) {
      const auto& b = impl->basis[i];
      if (!seen.insert(b.name).second)
        throw StructuralError("duplicate basis name '" + b.name + "'");
      auto& bucket = impl->by_degree[b.degree];
      impl->local.push_back(static_cast<int>(bucket.size()));
      bucket.push_back(i);
    }
    impl_ = std::move(impl);
  }

  int total_dim() const { return static_cast<int>(impl_->basis.size()); }
  int dim(int degree) const {
    auto it = impl_->by_degree.find(degree);
    return it == impl_->by_degree.end() ? 0 : static_cast<int>(it->second.size());
  }
  std::vector<int> degrees() const {
    std::vector<int> out;
    for (const auto& [d, v] : impl_->by_degree)
      if (!v.empty()) out.push_back(d);
    return out;
  }
  int min_degree() const {
    if (impl_->by_degree.empty()) throw StructuralError("min_degree of zero module");
    return impl_->by_degree.begin()->first;
  }
  int max_degree() const {
    if (impl_->by_degree.empty()) throw StructuralError("max_degree of zero module");
    return impl_->by_degree.rbegin()->first;
  }

  const BasisElement& basis(int global) const {
    if (global < 0 || global >= total_dim())
      throw StructuralError("basis index out of range");
    return impl_->basis[global];
  }
  int degree_of(int global) const { return basis(global).degree; }
  const std::string& name_of(int global) const { return basis(global).name; }
  int local_of(int global) const {
    if (global < 0 || global >= total_dim()) throw StructuralError("basis index out of range");
    return impl_->local[global];
  }
  int global_of(int degree, int local) const {
    auto it = impl_->by_degree.find(degree);
    if (it == impl_->by_degree.end() || local < 0 || local >= static_cast<int>(it->second.size()))
      throw StructuralError("no basis element at degree " + std::to_string(degree) + " local " +
                            std::to_string(local));
    return it->second[local];
  }
  std::optional<int> find(const std::string& name) const {
    for (int i = 0; i < total_dim(); ++i)
      if (impl_->basis[i].name == name) return i;
    return std::nullopt;
  }

  SparseVec to_local(int degree, const SparseVec& global_vec) const {
    SparseVec out;
    for (const auto& [g, v] : global_vec) {
      if (degree_of(g) != degree)
        throw StructuralError("vector is not homogeneous of degree " + std::to_string(degree));
      out[local_of(g)] = v;
    }
    return out;
  }
  SparseVec to_global(int degree, const SparseVec& local_vec) const {
    SparseVec out;
    for (const auto& [l, v] : local_vec) out[global_of(degree, l)] = v;
    return out;
  }

  bool operator==(const GradedModule& o) const {
    if (impl_ == o.impl_) return true;
    if (total_dim() != o.total_dim()) return false;
    for (int i = 0; i < total_dim(); ++i)
      if (impl_->basis[i].name != o.impl_->basis[i].name ||
          impl_->basis[i].degree != o.impl_->basis[i].degree)
        return false;
    return true;
  }
  bool operator!=(const GradedModule& o) const { return !(*this == o); }

  std::string describe(const SparseVec& global_vec) const {
    if (global_vec.empty()) return "0";
    std::string out;
    for (const auto& [g, v] : global_vec) {
      if (!out.empty()) out += " + ";
      out += "(" + to_string(v) + ")" + name_of(g);
    }
    return out;
  }

 private:
  struct Impl {
    std::vector<BasisElement> basis;
    std::map<int, std::vector<int>> by_degree;
    std::vector<int> local;
  };
  std::shared_ptr<const Impl> impl_;
};

/// Degree-homogeneous linear map given by per-degree blocks; block(d) maps
/// source degree d to target degree d+degree(). Absent block = zero. Degrees
/// in `unknown` carry truncated (untrusted) data.
class GradedMap {
 public:
  GradedMap() = default;
  GradedMap(GradedModule source, GradedModule target, int degree)
      : source_(std::move(source)), target_(std::move(target)), degree_(degree) {}

  static GradedMap identity(const GradedModule& m) {
    GradedMap f(m, m, 0);
    for (int d : m.degrees()) f.set_block(d, QMatrix::identity(m.dim(d)));
    return f;
  }
  static GradedMap zero(const GradedModule& src, const GradedModule& tgt, int degree) {
    return GradedMap(src, tgt, degree);
  }

  const GradedModule& source() const { return source_; }
  const GradedModule& target() const { return target_; }
  int degree() const { return degree_; }

  void set_block(int d, QMatrix m) {
    if (m.rows() != target_.dim(d + degree_) || m.cols() != source_.dim(d))
      throw StructuralError("block shape mismatch at degree " + std::to_string(d) + ": got " +
                            m.shape_str() + ", want " + std::to_string(target_.dim(d + degree_)) +
                            "x" + std::to_string(source_.dim(d)));
    col_cache_.erase(d);
    if (m.is_zero())
      blocks_.erase(d);
    else
      blocks_[d] = std::move(m);
  }
  void mark_unknown(int d) { unknown_.insert(d); }
  bool known(int d) const { return unknown_.count(d) == 0; }
  const std::set<int>& unknown_degrees() const { return unknown_; }

  QMatrix block(int d) const {
    auto it = blocks_.find(d);
    if (it != blocks_.end()) return it->second;
    return QMatrix(target_.dim(d + degree_), source_.dim(d));
  }
  bool has_block(int d) const { return blocks_.count(d) != 0; }

  /// Adds c * target_basis_vector to column of source basis element g.
  void add_entry(int source_global, int target_global, const Rational& c) {
    if (c == 0) return;
    int d = source_.degree_of(source_global);
    if (target_.degree_of(target_global) != d + degree_)
      throw StructuralError("entry degree mismatch: " + source_.name_of(source_global) + " -> " +
                            target_.name_of(target_global));
    col_cache_.erase(d);
    auto it = blocks_.find(d);
    if (it == blocks_.end()) {
      QMatrix m(target_.dim(d + degree_), source_.dim(d));
      it = blocks_.emplace(d, std::move(m)).first;
    }
    it->second.add_to(target_.local_of(target_global), source_.local_of(source_global), c);
  }

  /// Applies to a global sparse vector homogeneous of `degree_in`.
  SparseVec apply_global(int degree_in, const SparseVec& v) const {
    const auto& cols = columns(degree_in);
    SparseVec out;
    for (const auto& [g, x] : v) {
      if (source_.degree_of(g) != degree_in)
        throw StructuralError("apply_global: vector not homogeneous of the stated degree");
      for (const auto& [tg, val] : cols[source_.local_of(g)]) {
        Rational& slot = out[tg];
        slot += val * x;
        if (slot == 0) out.erase(tg);
      }
    }
    return out;
  }

  GradedMap operator+(const GradedMap& o) const {
    require_parallel(o, "map addition");
    GradedMap out(source_, target_, degree_);
    std::set<int> ds;
    for (const auto& [d, m] : blocks_) ds.insert(d);
    for (const auto& [d, m] : o.blocks_) ds.insert(d);
    for (int d : ds) out.set_block(d, block(d) + o.block(d));
    out.unknown_ = union_sets(unknown_, o.unknown_);
    return out;
  }
  GradedMap operator-(const GradedMap& o) const { return *this + (o * Rational(-1)); }
  GradedMap operator*(const Rational& c) const {
    GradedMap out(source_, target_, degree_);
    for (const auto& [d, m] : blocks_) out.set_block(d, m * c);
    out.unknown_ = unknown_;
    return out;
  }

  bool is_zero_where_known() const {
    for (const auto& [d, m] : blocks_)
      if (known(d) && !m.is_zero()) return false;
    return true;
  }

  /// First degree where the map has a known nonzero block, if any.
  std::optional<int> first_nonzero_degree() const {
    for (const auto& [d, m] : blocks_)
      if (known(d) && !m.is_zero()) return d;
    return std::nullopt;
  }

  bool equals_where_known(const GradedMap& o) const {
    if (!(source_ == o.source_) || !(target_ == o.target_) || degree_ != o.degree_) return false;
    std::set<int> ds;
    for (const auto& [d, m] : blocks_) ds.insert(d);
    for (const auto& [d, m] : o.blocks_) ds.insert(d);
    for (int d : ds) {
      if (!known(d) || !o.known(d)) continue;
      if (!(block(d) == o.block(d))) return false;
    }
    return true;
  }

 private:
  void require_parallel(const GradedMap& o, const std::string& op) const {
    if (!(source_ == o.source_) || !(target_ == o.target_) || degree_ != o.degree_)
      throw StructuralError(op + ": maps are not parallel");
  }
  static std::set<int> union_sets(const std::set<int>& a, const std::set<int>& b) {
    std::set<int> out = a;
    out.insert(b.begin(), b.end());
    return out;
  }

  // column view: local source column -> list of (target global, value)
  const std::vector<std::vector<std::pair<int, Rational>>>& columns(int d) const {
    auto it = col_cache_.find(d);
    if (it != col_cache_.end()) return it->second;
    auto& cols = col_cache_[d];
    cols.assign(source_.dim(d), {});
    auto bit = blocks_.find(d);
    if (bit != blocks_.end())
      for (int r = 0; r < bit->second.rows(); ++r)
        for (const auto& [c, v] : bit->second.row(r))
          cols[c].push_back({target_.global_of(d + degree_, r), v});
    return cols;
  }

  GradedModule source_, target_;
  int degree_ = 0;
  std::map<int, QMatrix> blocks_;
  std::set<int> unknown_;
  mutable std::map<int, std::vector<std::vector<std::pair<int, Rational>>>> col_cache_;
};

/// Composition f . g with degree addition; unknown-ness propagates.
inline GradedMap compose(const GradedMap& f, const GradedMap& g) {
  if (!(g.target() == f.source()))
    throw StructuralError("compose: target of inner map differs from source of outer map");
  GradedMap out(g.source(), f.target(), f.degree() + g.degree());
  for (int d : g.source().degrees()) {
    bool g_known = g.known(d);
    bool g_zero = !g.has_block(d);
    bool f_known = f.known(d + g.degree());
    if (!g_known || (!g_zero && !f_known)) {
      out.mark_unknown(d);
      continue;
    }
    if (g_zero) continue;
    out.set_block(d, f.block(d + g.degree()) * g.block(d));
  }
  return out;
}

inline GradedMap map_from_basis(
    const GradedModule& src, const GradedModule& tgt, int degree,
    const std::function<std::optional<SparseVec>(int)>& image_of_global) {
  GradedMap out(src, tgt, degree);
  std::set<int> bad;
  for (int g = 0; g < src.total_dim(); ++g) {
    auto img = image_of_global(g);
    if (!img) {
      bad.insert(src.degree_of(g));
      continue;
    }
    for (const auto& [t, c] : *img) out.add_entry(g, t, c);
  }
  for (int d : bad) out.mark_unknown(d);
  return out;
}

// ---------------------------------------------------------------------------
// Shifts, duals, sums, tensor products
// ---------------------------------------------------------------------------

/// M[n]: an element of degree d moves to degree d-n. Names are preserved.
inline GradedModule shift_module(const GradedModule& m, int n) {
  std::vector<BasisElement> basis;
  basis.reserve(m.total_dim());
  for (int i = 0; i < m.total_dim(); ++i)
    basis.push_back({m.name_of(i), m.degree_of(i) - n});
  return GradedModule(std::move(basis));
}

/// Graded dual: basis name* in degree -d, in the same basis order.
inline GradedModule dual_module(const GradedModule& m) {
  std::vector<BasisElement> basis;
  basis.reserve(m.total_dim());
  for (int i = 0; i < m.total_dim(); ++i)
    basis.push_back({m.name_of(i) + "*", -m.degree_of(i)});
  return GradedModule(std::move(basis));
}

struct SumLayout {
  GradedModule module;
  std::vector<int> offset;  // block index -> global index offset
};

inline SumLayout direct_sum(const std::vector<GradedModule>& parts, const std::string& sep = "#") {
  std::vector<BasisElement> basis;
  SumLayout layout;
  std::set<std::string> seen;
  bool collide = false;
  for (const auto& p : parts)
    for (int i = 0; i < p.total_dim(); ++i)
      if (!seen.insert(p.name_of(i)).second) collide = true;
  int off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    layout.offset.push_back(off);
    for (int i = 0; i < parts[k].total_dim(); ++i) {
      std::string nm = parts[k].name_of(i);
      if (collide) nm = std::to_string(k) + sep + nm;
      basis.push_back({nm, parts[k].degree_of(i)});
    }
    off += parts[k].total_dim();
  }
  layout.module = GradedModule(std::move(basis));
  return layout;
}

struct TensorLayout {
  GradedModule module;
  std::vector<std::pair<int, int>> pairs;        // global -> (a, b)
  std::map<std::pair<int, int>, int> index;      // (a, b) -> global
  bool truncated = false;                        // some pairs fell outside the window
  bool dropped_low = false;                      // content exists below the window

  int of(int a, int b) const {
    auto it = index.find({a, b});
    if (it == index.end()) return -1;
    return it->second;
  }
};

/// Tensor product of graded modules, keeping only basis pairs whose total
/// degree lies in `w`. Basis names read "a⊗b".
inline TensorLayout tensor_layout(const GradedModule& A, const GradedModule& B,
                                  const DegreeWindow& w) {
  TensorLayout out;
  std::vector<BasisElement> basis;
  for (int a = 0; a < A.total_dim(); ++a)
    for (int b = 0; b < B.total_dim(); ++b) {
      int d = A.degree_of(a) + B.degree_of(b);
      if (!w.contains(d)) {
        out.truncated = true;
        if (d < w.lo) out.dropped_low = true;
        continue;
      }
      out.index[{a, b}] = static_cast<int>(basis.size());
      out.pairs.emplace_back(a, b);
      basis.push_back({A.name_of(a) + "⊗" + B.name_of(b), d});
    }
  out.module = GradedModule(std::move(basis));
  return out;
}

/// (f⊗g)(a⊗b) = (-1)^{|g||a|} f(a)⊗g(b), on prepared tensor layouts.
inline GradedMap tensor_map(const TensorLayout& src, const TensorLayout& tgt, const GradedMap& f,
                            const GradedMap& g) {
  GradedMap out(src.module, tgt.module, f.degree() + g.degree());
  std::set<int> bad;
  for (int p = 0; p < src.module.total_dim(); ++p) {
    auto [a, b] = src.pairs[p];
    int da = f.source().degree_of(a);
    int db = g.source().degree_of(b);
    if (!f.known(da) || !g.known(db)) {
      bad.insert(da + db);
      continue;
    }
    SparseVec fa = f.apply_global(da, SparseVec{{a, Rational(1)}});
    SparseVec gb = g.apply_global(db, SparseVec{{b, Rational(1)}});
    if (fa.empty() || gb.empty()) continue;
    int sgn = sign_pow(static_cast<long long>(g.degree()) * da);
    for (const auto& [ta, ca] : fa)
      for (const auto& [tb, cb] : gb) {
        int t = tgt.of(ta, tb);
        if (t < 0) {
          bad.insert(da + db);
          continue;
        }
        out.add_entry(p, t, Rational(sgn) * ca * cb);
      }
  }
  for (int d : bad) out.mark_unknown(d);
  return out;
}

// ---------------------------------------------------------------------------
// Complexes
// ---------------------------------------------------------------------------

/// A graded module with a degree +1 differential. d^2 = 0 is asserted at
/// construction on every pair of composable known blocks.
class Complex {
 public:
  Complex() = default;
  Complex(GradedModule module, GradedMap d, DegreeWindow window, bool check = true)
      : module_(std::move(module)), d_(std::move(d)), window_(window) {
    if (!(d_.source() == module_) || !(d_.target() == module_))
      throw StructuralError("complex differential must be an endo-map of the module");
    if (d_.degree() != 1) throw StructuralError("complex differential must have degree +1");
    if (check) assert_d_squared();
  }

  const GradedModule& module() const { return module_; }
  const GradedMap& d() const { return d_; }
  const DegreeWindow& window() const { return window_; }

  bool d_known(int degree) const { return d_.known(degree); }

  /// Degrees where cohomology is trustworthy: d at degree-1 and degree known,
  /// and inside the window with one degree of margin above.
  DegreeSet h_valid() const {
    DegreeSet s;
    for (int d = window_.lo; d <= window_.hi; ++d) {
      if (!d_.known(d - 1) || !d_.known(d)) continue;
      // the block at `d` maps into degree d+1; if that exits the window the
      // constructor must have marked it unknown already
      s.insert(d);
    }
    return s;
  }

  void assert_d_squared() const {
    GradedMap dd = compose(d_, d_);
    for (int deg : module_.degrees()) {
      if (!d_.known(deg) || !d_.known(deg + 1)) continue;
      if (!dd.has_block(deg)) continue;
      if (!dd.block(deg).is_zero())
        throw StructuralError("d^2 != 0 at degree " + std::to_string(deg));
    }
  }

 private:
  GradedModule module_;
  GradedMap d_;
  DegreeWindow window_;
};

/// C[n] with d_{C[n]} = (-1)^n d_C.
inline Complex shift_complex(const Complex& c, int n) {
  GradedModule m = shift_module(c.module(), n);
  GradedMap d(m, m, 1);
  for (int deg : c.module().degrees()) {
    if (c.d().has_block(deg)) {
      QMatrix b = c.d().block(deg) * Rational(sign_pow(n));
      d.set_block(deg - n, std::move(b));
    }
    if (!c.d().known(deg)) d.mark_unknown(deg - n);
  }
  return Complex(m, d, DegreeWindow(c.window().lo - n, c.window().hi - n), false);
}

struct ConeLayout {
  Complex complex;
  std::vector<int> shifted_source_index;  // source global -> cone global (degree |x|-1)
  std::vector<int> target_index;          // target global -> cone global
};

/// cone(f) = X[1] (+) Y with d(sx, y) = (-s dx, f(x) + dy).
inline ConeLayout cone(const GradedMap& f, const Complex& X, const Complex& Y) {
  if (!(f.source() == X.module()) || !(f.target() == Y.module()))
    throw StructuralError("cone: map endpoints do not match the complexes");
  if (f.degree() != 0) throw StructuralError("cone of a non-degree-0 map");
  SumLayout sum = direct_sum({shift_module(X.module(), 1), Y.module()}, "#");
  ConeLayout out;
  for (int i = 0; i < X.module().total_dim(); ++i)
    out.shifted_source_index.push_back(sum.offset[0] + i);
  for (int i = 0; i < Y.module().total_dim(); ++i)
    out.target_index.push_back(sum.offset[1] + i);
  GradedMap d(sum.module, sum.module, 1);
  std::set<int> bad;
  for (int i = 0; i < X.module().total_dim(); ++i) {
    int deg = X.module().degree_of(i);
    if (!X.d().known(deg) || !f.known(deg)) {
      bad.insert(deg - 1);
      continue;
    }
    SparseVec dx = X.d().apply_global(deg, SparseVec{{i, Rational(1)}});
    for (const auto& [t, c] : dx) d.add_entry(out.shifted_source_index[i], out.shifted_source_index[t], -c);
    SparseVec fx = f.apply_global(deg, SparseVec{{i, Rational(1)}});
    for (const auto& [t, c] : fx) d.add_entry(out.shifted_source_index[i], out.target_index[t], c);
  }
  for (int i = 0; i < Y.module().total_dim(); ++i) {
    int deg = Y.module().degree_of(i);
    if (!Y.d().known(deg)) {
      bad.insert(deg);
      continue;
    }
    SparseVec dy = Y.d().apply_global(deg, SparseVec{{i, Rational(1)}});
    for (const auto& [t, c] : dy) d.add_entry(out.target_index[i], out.target_index[t], c);
  }
  for (int dg : bad) d.mark_unknown(dg);
  DegreeWindow w = X.window().intersect(Y.window());
  out.complex = Complex(sum.module, d, DegreeWindow(w.lo - 1, w.hi), false);
  return out;
}

}  // namespace dgx
