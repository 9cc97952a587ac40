#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dgx/algebra.hpp"

namespace dgx {

struct FreeGen {
  std::string name;
  int degree = 0;
};

/// Skew pairing data on a list of generators, with base-ring values.
/// Entries vanish unless the degrees cancel; validate() checks graded
/// skew-symmetry <a,b> = -(-1)^{|a||b|} <b,a>.
struct BilinearForm {
  std::vector<FreeGen> gens;
  std::vector<std::vector<KVec>> values;

  static BilinearForm zero(const std::vector<FreeGen>& gens) {
    BilinearForm f;
    f.gens = gens;
    f.values.assign(gens.size(), std::vector<KVec>(gens.size()));
    return f;
  }

  void validate() const {
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (std::size_t j = 0; j < gens.size(); ++j) {
        if (!values[i][j].empty() && gens[i].degree + gens[j].degree != 0)
          throw StructuralError("pairing <" + gens[i].name + "," + gens[j].name +
                                "> nonzero in nonzero total degree");
        KVec mirror = scaled(values[j][i],
                             Rational(-sign_pow(static_cast<long long>(gens[i].degree) * gens[j].degree)));
        if (values[i][j] != mirror)
          throw StructuralError("pairing not graded skew-symmetric at (" + gens[i].name + "," +
                                gens[j].name + ")");
      }
  }
};

/// PBW-monomial dg-algebra over a base ring: the free graded-commutative
/// algebra when the pairing vanishes, a Heisenberg algebra otherwise.
/// Monomials are straightened into generator order; odd squares obey
/// g^2 = <g,g>/2. Storage is quotient-truncated by the degree window and the
/// optional total-exponent cap.
class MonomialAlgebra {
 public:
  AlgebraRef algebra;
  BaseRing base;
  std::vector<FreeGen> gens;
  std::vector<std::vector<KVec>> pairing;
  std::vector<std::pair<std::vector<int>, int>> monomials;  // global -> (exponents, base index)
  std::optional<int> weight_cap;

  int index_of(const std::vector<int>& expo, int kidx) const {
    auto it = index_.find({expo, kidx});
    return it == index_.end() ? -1 : it->second;
  }
  int weight_of(int global) const {
    int w = 0;
    for (int e : monomials[global].first) w += e;
    return w;
  }

  /// Basis element of generator i.
  SparseVec gen_element(std::size_t i) const {
    std::vector<int> e(gens.size(), 0);
    e[i] = 1;
    int idx = index_of(e, base.unit());
    if (idx < 0) throw StructuralError("generator " + gens[i].name + " fell outside the window");
    return SparseVec{{idx, Rational(1)}};
  }

  /// The element k·1 of the base ring inside the algebra.
  SparseVec scalar_element(const KVec& k) const {
    SparseVec out;
    std::vector<int> e(gens.size(), 0);
    for (const auto& [ki, c] : k) {
      int idx = index_of(e, ki);
      if (idx < 0) throw StructuralError("base element fell outside the window");
      out[idx] += c;
      if (out[idx] == 0) out.erase(idx);
    }
    return out;
  }

  /// Straightens a generator word times a base coefficient into basis
  /// coordinates. Sets *dropped when a term left the stored basis.
  SparseVec normalize_word(const std::vector<int>& word, const KVec& kpart, bool* dropped) const {
    SparseVec out;
    normalize_into(out, word, kpart, Rational(1), dropped);
    return out;
  }

  /// v * w in the algebra (quotient-truncated).
  SparseVec mul(const SparseVec& v, const SparseVec& w) const { return algebra->product_vec(v, w); }

  /// Left multiplication by a fixed element, as a graded map.
  GradedMap multiplication_operator(const SparseVec& v, int degree) const {
    const GradedModule& m = algebra->cx.module();
    GradedMap out(m, m, degree);
    std::set<int> bad;
    for (int i = 0; i < m.total_dim(); ++i) {
      bool dropped = false;
      for (const auto& [a, c] : v) dropped = dropped || algebra->mult.dropped(a, i);
      if (dropped) bad.insert(m.degree_of(i));
      for (const auto& [t, c] : algebra->product_vec(v, SparseVec{{i, Rational(1)}}))
        out.add_entry(i, t, c);
    }
    for (int d : bad) out.mark_unknown(d);
    return out;
  }

  /// The degree-k derivation with prescribed values on generators (base-ring
  /// linear, zero on the base). Used for contractions and for differentials.
  GradedMap derivation_operator(int degree, const std::vector<SparseVec>& gen_values) const {
    if (gen_values.size() != gens.size())
      throw StructuralError("derivation needs one value per generator");
    const GradedModule& m = algebra->cx.module();
    GradedMap out(m, m, degree);
    std::set<int> bad;
    for (int g = 0; g < m.total_dim(); ++g) {
      const auto& [expo, kidx] = monomials[g];
      std::vector<int> word = expand_word(expo);
      int prefix_deg = 0;
      bool dropped = false;
      SparseVec img;
      for (std::size_t p = 0; p < word.size(); ++p) {
        int gi = word[p];
        Rational sgn(sign_pow(static_cast<long long>(degree) * prefix_deg));
        // word with position p replaced by the prescribed value
        for (const auto& [val_idx, vc] : gen_values[gi]) {
          const auto& [vexpo, vk] = monomials[val_idx];
          std::vector<int> replaced;
          replaced.reserve(word.size() + 4);
          for (std::size_t q = 0; q < p; ++q) replaced.push_back(word[q]);
          for (int r : expand_word(vexpo)) replaced.push_back(r);
          for (std::size_t q = p + 1; q < word.size(); ++q) replaced.push_back(word[q]);
          KVec kmul = base.mul_vec(KVec{{kidx, Rational(1)}}, KVec{{vk, Rational(1)}});
          bool drop_here = false;
          SparseVec term = normalize_word(replaced, kmul, &drop_here);
          dropped = dropped || drop_here;
          axpy(img, sgn * vc, term);
        }
        prefix_deg += gens[gi].degree;
      }
      if (dropped) bad.insert(m.degree_of(g));
      for (const auto& [t, c] : img) out.add_entry(g, t, c);
    }
    for (int d : bad) out.mark_unknown(d);
    return out;
  }

 private:
  friend MonomialAlgebra monomial_algebra(const BaseRing&, const std::vector<FreeGen>&,
                                          const BilinearForm&,
                                          const std::vector<SparseVec>&, const DegreeWindow&,
                                          std::optional<int>);

  std::vector<int> expand_word(const std::vector<int>& expo) const {
    std::vector<int> word;
    for (std::size_t i = 0; i < expo.size(); ++i)
      for (int k = 0; k < expo[i]; ++k) word.push_back(static_cast<int>(i));
    return word;
  }

  void normalize_into(SparseVec& out, std::vector<int> word, KVec kpart, Rational coeff,
                      bool* dropped) const {
    if (kpart.empty() || coeff == 0) return;
    for (std::size_t p = 0; p + 1 < word.size(); ++p) {
      int a = word[p], b = word[p + 1];
      if (a < b) continue;
      if (a == b) {
        if (gens[a].degree % 2 == 0) continue;  // even powers are fine
        // g g = <g,g>/2
        KVec pv = pairing[a][a];
        if (pv.empty()) return;  // odd square, zero pairing: term dies
        std::vector<int> rest;
        for (std::size_t q = 0; q < word.size(); ++q)
          if (q != p && q != p + 1) rest.push_back(word[q]);
        normalize_into(out, std::move(rest), base.mul_vec(kpart, scaled(pv, Rational(1, 2))), coeff,
                       dropped);
        return;
      }
      // a > b: swap with Koszul sign plus the pairing term
      Rational sgn(sign_pow(static_cast<long long>(gens[a].degree) * gens[b].degree));
      std::vector<int> swapped = word;
      std::swap(swapped[p], swapped[p + 1]);
      const KVec& pv = pairing[a][b];
      if (!pv.empty()) {
        std::vector<int> rest;
        for (std::size_t q = 0; q < word.size(); ++q)
          if (q != p && q != p + 1) rest.push_back(word[q]);
        normalize_into(out, std::move(rest), base.mul_vec(kpart, pv), coeff, dropped);
      }
      normalize_into(out, std::move(swapped), kpart, coeff * sgn, dropped);
      return;
    }
    // sorted: kill odd repeats handled above; build exponent vector
    std::vector<int> expo(gens.size(), 0);
    for (int g : word) expo[g] += 1;
    for (const auto& [ki, kc] : kpart) {
      int idx = index_of(expo, ki);
      if (idx < 0) {
        if (dropped) *dropped = true;
        continue;
      }
      Rational& slot = out[idx];
      slot += coeff * kc;
      if (slot == 0) out.erase(idx);
    }
  }

  std::map<std::pair<std::vector<int>, int>, int> index_;
};

inline std::string monomial_name(const BaseRing& k, const std::vector<FreeGen>& gens,
                                 const std::vector<int>& expo, int ki) {
  std::string out;
  if (ki != k.unit()) out = k.name(ki);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (expo[i] == 0) continue;
    if (!out.empty()) out += "·";
    out += gens[i].name;
    if (expo[i] > 1) out += "^" + std::to_string(expo[i]);
  }
  return out.empty() ? "1" : out;
}

/// Builds the PBW algebra on `gens` over `k` with the given pairing and
/// generator differentials (d(gen_i) = dgens[i], a vector in the algebra).
/// Pass a zero form for Sym. Generators of degree 0 and even parity need a
/// weight cap to stay finite.
inline MonomialAlgebra monomial_algebra(const BaseRing& k, const std::vector<FreeGen>& gens,
                                        const BilinearForm& form,
                                        const std::vector<SparseVec>& dgens_in,
                                        const DegreeWindow& window,
                                        std::optional<int> weight_cap = std::nullopt) {
  form.validate();
  MonomialAlgebra M;
  M.base = k;
  M.gens = gens;
  M.pairing = form.values;
  M.weight_cap = weight_cap;

  bool has_pos = false, has_neg = false;
  for (const auto& g : gens) {
    if (g.degree == 0 && !weight_cap)
      throw PreconditionError("generator '" + g.name + "' in degree 0 needs a weight cap");
    has_pos = has_pos || g.degree > 0;
    has_neg = has_neg || g.degree < 0;
  }
  auto bounded_exponent = [&](std::size_t i) {
    return (gens[i].degree % 2 != 0 && form.values[i][i].empty()) || weight_cap.has_value();
  };
  if (has_pos && has_neg)
    for (std::size_t i = 0; i < gens.size(); ++i)
      if (!bounded_exponent(i))
        throw PreconditionError("mixed-sign generator degrees need odd generators or a weight cap");

  // enumerate exponent vectors within the window and cap
  std::vector<std::vector<int>> expos;
  std::vector<int> cur(gens.size(), 0);
  const bool mixed = has_pos && has_neg;
  std::function<void(std::size_t, int, int)> rec = [&](std::size_t i, int deg, int weight) {
    if (weight_cap && weight > *weight_cap) return;
    if (i == gens.size()) {
      if (window.contains(deg)) expos.push_back(cur);
      return;
    }
    int dg = gens[i].degree;
    int maxe;
    if (dg % 2 != 0 && form.values[i][i].empty())
      maxe = 1;
    else if (dg == 0 || weight_cap)
      maxe = *weight_cap - weight;
    else
      maxe = (window.hi - window.lo) / std::abs(dg) + 1;
    for (int e = 0; e <= maxe; ++e) {
      int ndeg = deg + e * dg;
      // with single-signed degrees the window prunes monotonically
      if (!mixed && dg > 0 && ndeg > window.hi) break;
      if (!mixed && dg < 0 && ndeg < window.lo) break;
      cur[i] = e;
      rec(i + 1, ndeg, weight + e);
    }
    cur[i] = 0;
  };
  rec(0, 0, 0);

  struct Key {
    int degree, weight;
    std::vector<int> expo;
  };
  std::vector<std::pair<Key, std::vector<int>>> order;
  for (auto& e : expos) {
    int deg = 0, w = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      deg += e[i] * gens[i].degree;
      w += e[i];
    }
    order.push_back({{deg, w, e}, e});
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.first.degree != b.first.degree) return a.first.degree < b.first.degree;
    if (a.first.weight != b.first.weight) return a.first.weight < b.first.weight;
    return a.first.expo < b.first.expo;
  });

  std::vector<BasisElement> basis;
  for (const auto& [key, expo] : order)
    for (int ki = 0; ki < k.dim(); ++ki) {
      M.index_[{expo, ki}] = static_cast<int>(basis.size());
      M.monomials.push_back({expo, ki});
      basis.push_back({monomial_name(k, gens, expo, ki), key.degree});
    }
  GradedModule module(std::move(basis));

  auto A = std::make_shared<DgAlgebra>();
  // products
  for (int i = 0; i < module.total_dim(); ++i)
    for (int j = 0; j < module.total_dim(); ++j) {
      const auto& [ei, ki] = M.monomials[i];
      const auto& [ej, kj] = M.monomials[j];
      std::vector<int> word = M.expand_word(ei);
      for (int t : M.expand_word(ej)) word.push_back(t);
      bool dropped = false;
      SparseVec prod = M.normalize_word(word, k.mul(ki, kj), &dropped);
      A->mult.set(i, j, std::move(prod), dropped);
    }
  // differential as the degree +1 derivation extending dgens
  std::vector<SparseVec> dvals = dgens_in;
  if (dvals.empty()) dvals.assign(gens.size(), SparseVec{});
  M.algebra = A;  // derivation_operator needs the algebra's module only after cx set; fill below
  A->unit = M.index_.at({std::vector<int>(gens.size(), 0), k.unit()});
  A->cx = Complex(module, GradedMap(module, module, 1), window, false);
  GradedMap d = M.derivation_operator(1, dvals);
  // if monomials exist below the window, incoming boundaries at the low edge
  // are missing; flag the edge
  long long min_possible = 0;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (gens[i].degree >= 0) continue;
    long long maxe = (gens[i].degree % 2 != 0 && form.values[i][i].empty())
                         ? 1
                         : (weight_cap ? *weight_cap : 0);
    min_possible += maxe * gens[i].degree;
  }
  if (min_possible < window.lo) d.mark_unknown(window.lo - 1);
  A->cx = Complex(module, d, window, true);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    std::vector<int> e(gens.size(), 0);
    e[static_cast<int>(i)] = 1;
    int idx = M.index_of(e, k.unit());
    if (idx >= 0) A->generators.push_back(idx);
  }
  for (int ki = 0; ki < k.dim(); ++ki) {
    if (ki == k.unit()) continue;
    int idx = M.index_of(std::vector<int>(gens.size(), 0), ki);
    if (idx >= 0) A->generators.push_back(idx);
  }
  // augmentation: kill generators and the base ideal; only an algebra map
  // when the pairing vanishes
  bool zero_pairing = true;
  for (const auto& row : form.values)
    for (const auto& v : row) zero_pairing = zero_pairing && v.empty();
  if (zero_pairing) {
    std::vector<Rational> aug(module.total_dim(), Rational(0));
    aug[A->unit] = 1;
    A->augmentation = std::move(aug);
  }
  A->validate();
  return M;
}

/// Free graded-commutative algebra on a complex (generators plus a linear
/// differential), truncated to the window and optional weight cap.
inline MonomialAlgebra sym_algebra(const BaseRing& k, const std::vector<FreeGen>& gens,
                                   const std::vector<SparseVec>& dgens, const DegreeWindow& window,
                                   std::optional<int> weight_cap = std::nullopt) {
  return monomial_algebra(k, gens, BilinearForm::zero(gens), dgens, window, weight_cap);
}

/// Heis(M[1] (+) N[-1]) with the pairing induced by phi: generators of M[1]
/// first, then N[-1], straightened on the PBW basis Sym(M[1]) (x) Sym(N[-1]).
/// phi_entries[i][j] = <phi(m_i), n_j> in the base ring.
inline MonomialAlgebra heisenberg_algebra(const BaseRing& k, const std::vector<FreeGen>& m_shifted,
                                          const std::vector<FreeGen>& n_shifted,
                                          const std::vector<std::vector<KVec>>& phi_entries,
                                          const DegreeWindow& window,
                                          std::optional<int> weight_cap = std::nullopt) {
  std::vector<FreeGen> gens = m_shifted;
  gens.insert(gens.end(), n_shifted.begin(), n_shifted.end());
  BilinearForm form = BilinearForm::zero(gens);
  const std::size_t nm = m_shifted.size();
  for (std::size_t i = 0; i < nm; ++i)
    for (std::size_t j = 0; j < n_shifted.size(); ++j) {
      const KVec& v = phi_entries.at(i).at(j);
      if (v.empty()) continue;
      if (m_shifted[i].degree + n_shifted[j].degree != 0)
        throw PreconditionError("pairing entry in nonzero total degree: phi has wrong degree");
      form.values[i][nm + j] = v;
      form.values[nm + j][i] = scaled(
          v, Rational(-sign_pow(static_cast<long long>(m_shifted[i].degree) * n_shifted[j].degree)));
    }
  return monomial_algebra(k, gens, form, {}, window, weight_cap);
}

}  // namespace dgx
