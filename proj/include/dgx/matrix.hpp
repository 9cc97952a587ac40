#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "dgx/rational.hpp"

namespace dgx {

/// Sparse vector: index -> nonzero rational coefficient.
using SparseVec = std::map<int, Rational>;

inline void axpy(SparseVec& dst, const Rational& c, const SparseVec& src) {
  if (c == 0) return;
  for (const auto& [i, v] : src) {
    Rational& slot = dst[i];
    slot += c * v;
    if (slot == 0) dst.erase(i);
  }
}

inline SparseVec scaled(const SparseVec& v, const Rational& c) {
  SparseVec out;
  if (c == 0) return out;
  for (const auto& [i, x] : v) out.emplace(i, c * x);
  return out;
}

inline Rational coeff(const SparseVec& v, int i) {
  auto it = v.find(i);
  return it == v.end() ? Rational(0) : it->second;
}

// Sparse rational matrix, row-major. Rows and columns are 0-based.
class QMatrix {
 public:
  QMatrix() : rows_(0), cols_(0) {}
  QMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows) {}

  static QMatrix identity(int n) {
    QMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void set(int r, int c, const Rational& v) {
    check_index(r, c);
    if (v == 0)
      data_[r].erase(c);
    else
      data_[r][c] = v;
  }

  void add_to(int r, int c, const Rational& v) {
    check_index(r, c);
    Rational& slot = data_[r][c];
    slot += v;
    if (slot == 0) data_[r].erase(c);
  }

  Rational get(int r, int c) const {
    check_index(r, c);
    auto it = data_[r].find(c);
    return it == data_[r].end() ? Rational(0) : it->second;
  }

  const SparseVec& row(int r) const { return data_[r]; }

  bool is_zero() const {
    for (const auto& row : data_)
      if (!row.empty()) return false;
    return true;
  }

  long long nnz() const {
    long long n = 0;
    for (const auto& row : data_) n += static_cast<long long>(row.size());
    return n;
  }

  bool operator==(const QMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  QMatrix operator+(const QMatrix& o) const {
    require_shape(o, "matrix addition");
    QMatrix out = *this;
    for (int r = 0; r < rows_; ++r)
      for (const auto& [c, v] : o.data_[r]) out.add_to(r, c, v);
    return out;
  }

  QMatrix operator-(const QMatrix& o) const {
    require_shape(o, "matrix subtraction");
    QMatrix out = *this;
    for (int r = 0; r < rows_; ++r)
      for (const auto& [c, v] : o.data_[r]) out.add_to(r, c, -v);
    return out;
  }

  QMatrix operator*(const Rational& c) const {
    QMatrix out(rows_, cols_);
    if (c == 0) return out;
    for (int r = 0; r < rows_; ++r) out.data_[r] = scaled(data_[r], c);
    return out;
  }

  /// Matrix product this * o.
  QMatrix operator*(const QMatrix& o) const {
    if (cols_ != o.rows_)
      throw StructuralError("matrix product shape mismatch: " + shape_str() + " * " + o.shape_str());
    QMatrix out(rows_, o.cols_);
    for (int r = 0; r < rows_; ++r) {
      SparseVec& target = out.data_[r];
      for (const auto& [k, v] : data_[r]) axpy(target, v, o.data_[k]);
    }
    return out;
  }

  /// Column-vector application.
  SparseVec apply(const SparseVec& v) const {
    if (!v.empty() && (v.begin()->first < 0 || v.rbegin()->first >= cols_))
      throw StructuralError("vector index out of range in apply");
    SparseVec out;
    for (int r = 0; r < rows_; ++r) {
      Rational acc = 0;
      const SparseVec& row = data_[r];
      if (row.size() <= v.size()) {
        for (const auto& [c, val] : row) {
          auto it = v.find(c);
          if (it != v.end()) acc += val * it->second;
        }
      } else {
        for (const auto& [c, x] : v) {
          auto it = row.find(c);
          if (it != row.end()) acc += it->second * x;
        }
      }
      if (acc != 0) out[r] = acc;
    }
    return out;
  }

  QMatrix transpose() const {
    QMatrix out(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (const auto& [c, v] : data_[r]) out.data_[c][r] = v;
    return out;
  }

  /// Rank by fraction-free elimination: rows are cleared to integers and
  /// updated by gcd-reduced cross-multiplication, so no rational arithmetic
  /// appears during pivoting.
  int rank() const;

  /// Basis of the right kernel {x : Ax = 0}, as sparse column vectors.
  std::vector<SparseVec> nullspace() const;

  /// One solution of Ax = b with free variables set to zero, if consistent.
  std::optional<SparseVec> solve(const SparseVec& b) const;

  std::string shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

 private:
  void check_index(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
      throw StructuralError("matrix index (" + std::to_string(r) + "," + std::to_string(c) +
                            ") out of range for " + shape_str());
  }
  void require_shape(const QMatrix& o, const std::string& op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw StructuralError(op + " shape mismatch: " + shape_str() + " vs " + o.shape_str());
  }

  int rows_, cols_;
  std::vector<SparseVec> data_;
};

namespace detail {

using IntRow = std::map<int, Integer>;

inline IntRow clear_denominators(const SparseVec& row) {
  Integer lcm = 1;
  for (const auto& [c, v] : row) {
    Integer den = boost::multiprecision::denominator(v);
    lcm = boost::multiprecision::lcm(lcm, den);
  }
  IntRow out;
  for (const auto& [c, v] : row) {
    Integer num = boost::multiprecision::numerator(v) * (lcm / boost::multiprecision::denominator(v));
    if (num != 0) out[c] = num;
  }
  return out;
}

inline void gcd_normalize(IntRow& row) {
  Integer g = 0;
  for (const auto& [c, v] : row) g = boost::multiprecision::gcd(g, v);
  if (g > 1)
    for (auto& [c, v] : row) v /= g;
}

}  // namespace detail

inline int QMatrix::rank() const {
  std::vector<detail::IntRow> work;
  work.reserve(rows_);
  for (int r = 0; r < rows_; ++r) {
    detail::IntRow row = detail::clear_denominators(data_[r]);
    if (!row.empty()) work.push_back(std::move(row));
  }
  int rank = 0;
  while (!work.empty()) {
    // Pivot column: leftmost occupied; pivot row: fewest entries there.
    int pc = -1;
    for (const auto& row : work) {
      int first = row.begin()->first;
      if (pc < 0 || first < pc) pc = first;
    }
    std::size_t pr = work.size();
    for (std::size_t i = 0; i < work.size(); ++i) {
      if (work[i].begin()->first != pc) continue;
      if (pr == work.size() || work[i].size() < work[pr].size()) pr = i;
    }
    detail::IntRow pivot = std::move(work[pr]);
    work.erase(work.begin() + static_cast<long>(pr));
    const Integer p = pivot.begin()->second;
    std::vector<detail::IntRow> next;
    next.reserve(work.size());
    for (auto& row : work) {
      auto it = row.find(pc);
      if (it == row.end()) {
        next.push_back(std::move(row));
        continue;
      }
      const Integer c = it->second;
      detail::IntRow updated;
      // row := p*row - c*pivot, gcd-reduced afterwards.
      for (const auto& [j, v] : row) updated[j] = p * v;
      for (const auto& [j, v] : pivot) {
        Integer& slot = updated[j];
        slot -= c * v;
        if (slot == 0) updated.erase(j);
      }
      if (!updated.empty()) {
        detail::gcd_normalize(updated);
        next.push_back(std::move(updated));
      }
    }
    work = std::move(next);
    ++rank;
  }
  return rank;
}

/// Row-echelon store in reduced form. Inserted vectors are remembered, so a
/// reduced vector can be expressed in terms of the originally inserted ones.
class EchelonBasis {
 public:
  explicit EchelonBasis(bool track = false) : track_(track) {}

  int rank() const { return static_cast<int>(rows_.size()); }

  /// Reduces v against the basis. Returns the residual; if tracking, *combo
  /// receives coefficients over inserted-generator indices with
  /// v = sum combo[g] * gen_g + residual.
  SparseVec reduce(SparseVec v, SparseVec* combo = nullptr) const {
    if (combo) combo->clear();
    for (const auto& row : rows_) {
      auto it = v.find(row.pivot);
      if (it == v.end()) continue;
      Rational c = it->second;
      axpy(v, -c, row.vec);
      if (combo && track_) axpy(*combo, c, row.combo);
    }
    return v;
  }

  bool contains(const SparseVec& v) const { return reduce(v).empty(); }

  /// Inserts a vector; returns true if it enlarged the span. `tag` is the
  /// generator index recorded for tracking (defaults to insertion count).
  bool insert(SparseVec v, int tag = -1) {
    SparseVec combo;
    if (track_ && tag < 0) tag = inserted_;
    for (const auto& row : rows_) {
      auto it = v.find(row.pivot);
      if (it == v.end()) continue;
      Rational c = it->second;
      axpy(v, -c, row.vec);
      if (track_) axpy(combo, -c, row.combo);
    }
    ++inserted_;
    if (v.empty()) return false;
    int pivot = v.begin()->first;
    Rational lead = v.begin()->second;
    for (auto& [i, x] : v) x /= lead;
    if (track_) {
      // row.vec = sum combo[g] * gen_g after normalization.
      for (auto& [i, x] : combo) x /= lead;
      Rational& t = combo[tag];
      t += Rational(1) / lead;
      if (t == 0) combo.erase(tag);
    }
    // Back-substitute to keep rows mutually reduced.
    for (auto& row : rows_) {
      auto it = row.vec.find(pivot);
      if (it == row.vec.end()) continue;
      Rational c = it->second;
      axpy(row.vec, -c, v);
      if (track_) axpy(row.combo, -c, combo);
    }
    Row r;
    r.pivot = pivot;
    r.vec = std::move(v);
    r.combo = std::move(combo);
    auto pos = rows_.begin();
    while (pos != rows_.end() && pos->pivot < r.pivot) ++pos;
    rows_.insert(pos, std::move(r));
    return true;
  }

  /// Expresses v over the inserted generators if v lies in the span.
  std::optional<SparseVec> coordinates(const SparseVec& v) const {
    if (!track_) throw StructuralError("EchelonBasis: coordinates need tracking enabled");
    SparseVec combo;
    SparseVec res = reduce(v, &combo);
    if (!res.empty()) return std::nullopt;
    return combo;
  }

  std::vector<SparseVec> row_vectors() const {
    std::vector<SparseVec> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r.vec);
    return out;
  }

 private:
  struct Row {
    int pivot = 0;
    SparseVec vec;
    SparseVec combo;  // coefficients over inserted generators
  };
  bool track_;
  int inserted_ = 0;
  std::vector<Row> rows_;
};

inline std::vector<SparseVec> QMatrix::nullspace() const {
  EchelonBasis rowspace;
  for (int r = 0; r < rows_; ++r) rowspace.insert(data_[r]);
  std::vector<SparseVec> rows = rowspace.row_vectors();
  std::map<int, SparseVec> pivot_rows;
  for (const auto& row : rows) pivot_rows[row.begin()->first] = row;
  std::vector<SparseVec> basis;
  for (int c = 0; c < cols_; ++c) {
    if (pivot_rows.count(c)) continue;
    SparseVec v;
    v[c] = 1;
    for (const auto& [p, row] : pivot_rows) {
      Rational x = coeff(row, c);
      if (x != 0) v[p] = -x;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

inline std::optional<SparseVec> QMatrix::solve(const SparseVec& b) const {
  EchelonBasis aug;
  const int bcol = cols_;
  for (int r = 0; r < rows_; ++r) {
    SparseVec row = data_[r];
    Rational rb = coeff(b, r);
    if (rb != 0) row[bcol] = rb;
    aug.insert(std::move(row));
  }
  SparseVec solution;
  for (const auto& row : aug.row_vectors()) {
    int p = row.begin()->first;
    if (p == bcol) return std::nullopt;  // 0 = 1 row: inconsistent
    Rational rhs = coeff(row, bcol);
    if (rhs != 0) solution[p] = rhs;
  }
  return solution;
}

}  // namespace dgx
