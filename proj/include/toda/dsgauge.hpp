#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "toda/derivation.hpp"
#include "toda/diffring.hpp"
#include "toda/lie_poly.hpp"
#include "toda/rootsys.hpp"

namespace toda {

/// Order of the factors of M ∈ N_-.
enum class FactorOrder {
  SecondKind,  ///< M = e^{a_1} ⋯ e^{a_m}, a_i ∈ g_{-i}
  Descending,  ///< M = e^{b_m} ⋯ e^{b_1}, b_i ∈ g_{-i}
};

struct GaugeOptions {
  FactorOrder order = FactorOrder::SecondKind;
  bool reversed_iteration = false;  ///< traverse basis maps backwards (result must not change)
};

struct GaugeResult {
  RingPtr ring;
  std::vector<LieValuedPoly> a;     ///< a[i-1] ∈ g_{-i}
  std::vector<DiffPoly> integrals;  ///< I_1..I_l
  std::vector<int> degrees;         ///< d_j = m_j + 1
  LieValuedPoly gauged;             ///< e + Σ I_j s_j
};

/// Per-degree inverse of (a, J) ↦ [e, a] + J from g_{-k-1} × (s ∩ g_{-k})
/// onto g_{-k}.
class GradedSplit {
 public:
  struct Piece {
    std::vector<int> coords;     ///< basis of g_{-k}
    std::vector<int> a_basis;    ///< basis of g_{-k-1}
    std::vector<int> slice_ids;  ///< j with m_j = k
    RationalMatrix inv;
  };

  GradedSplit(const LieData& lie) : lie_(&lie) {
    const auto& g = *lie.alg;
    const int hmax = lie.roots().max_height();
    for (int k = 0; k <= hmax; ++k) {
      Piece pc;
      for (int b = 0; b < g.dim(); ++b) {
        if (g.degree(b) == -k) pc.coords.push_back(b);
        if (g.degree(b) == -k - 1) pc.a_basis.push_back(b);
      }
      for (int j = 0; j < lie.rank(); ++j)
        if (lie.slice.exponents[j] == k) pc.slice_ids.push_back(j);
      const std::size_t n = pc.coords.size();
      if (pc.a_basis.size() + pc.slice_ids.size() != n) throw InternalSplitError("graded split has wrong dimension");
      RationalMatrix m(n, n);
      std::size_t col = 0;
      for (int b : pc.a_basis) {
        LieVec v = g.bracket(lie.principal.e, g.unit(b));
        for (std::size_t r = 0; r < n; ++r) m(r, col) = v[pc.coords[r]];
        ++col;
      }
      for (int j : pc.slice_ids) {
        for (std::size_t r = 0; r < n; ++r) m(r, col) = lie.slice.slice_basis[j][pc.coords[r]];
        ++col;
      }
      try {
        pc.inv = inverse(m);
      } catch (const Error&) {
        throw InternalSplitError("g_{-" + std::to_string(k) + "} is not [e, g] + s");
      }
      pieces_.push_back(std::move(pc));
    }
  }

  /// Split a degree -k element X = [e, a] + Σ_j J_j s_j.
  std::pair<LieValuedPoly, std::map<int, DiffPoly>> split(const LieValuedPoly& x, int k, bool reversed = false) const {
    const auto& g = *lie_->alg;
    const Piece& pc = pieces_.at(k);
    for (const auto& [b, p] : x.coeffs())
      if (g.degree(b) != -k) throw InternalSplitError("split input has a component outside g_{-k}");
    LieValuedPoly a(x.ring());
    std::map<int, DiffPoly> j;
    const std::size_t n = pc.coords.size();
    for (std::size_t r = 0; r < n; ++r) {
      DiffPoly s(x.ring());
      for (std::size_t c0 = 0; c0 < n; ++c0) {
        std::size_t c = reversed ? n - 1 - c0 : c0;
        const Rational& w = pc.inv(r, c);
        if (is_zero(w)) continue;
        const DiffPoly& xc = x.at(pc.coords[c]);
        if (!xc.is_zero()) s += xc * w;
      }
      if (r < pc.a_basis.size()) {
        a.add(pc.a_basis[r], s);
      } else if (!s.is_zero()) {
        j.emplace(pc.slice_ids[r - pc.a_basis.size()], s);
      }
    }
    return {a, j};
  }

 private:
  const LieData* lie_;
  std::vector<Piece> pieces_;
};

/// e^{ad a}(L) - Σ_k ad_a^k(∂_x a)/(k+1)!, i.e. the gauge transform of ∂_x + L
/// by e^a, exact on components of degree >= min_degree.
inline LieValuedPoly gauge_step(const ChevalleyAlgebra& g, const LieValuedPoly& a, const LieValuedPoly& l,
                                int min_degree, bool reversed = false) {
  LieValuedPoly out = l;
  out.truncate(g, min_degree);
  LieValuedPoly term = out;
  for (int k = 1; !term.is_zero(); ++k) {
    term = lie_bracket(g, a, term, min_degree, reversed) * make_rational(1, k);
    out += term;
  }
  LieValuedPoly t = a.dx();
  t.truncate(g, min_degree);
  for (int k = 0; !t.is_zero(); ++k) {
    out -= t;
    t = lie_bracket(g, a, t, min_degree, reversed) * make_rational(1, k + 2);
  }
  return out;
}

/// The Drinfeld–Sokolov normal form M(∂_x + e + u)M^{-1} = ∂_x + e + Σ I_j s_j
/// with u = Σ u_i^(1) h_i.
inline GaugeResult ds_gauge(const LieData& lie, const GaugeOptions& opt = {}) {
  const auto& g = *lie.alg;
  const int l = lie.rank();
  const int m_top = lie.slice.exponents.back();
  GaugeResult res;
  res.ring = make_diff_ring(lie.roots().cartan_matrix);
  const RingPtr& ring = res.ring;
  GradedSplit split(lie);

  LieValuedPoly start = LieValuedPoly::constant(ring, lie.principal.e);
  for (int i = 0; i < l; ++i) start.add(g.h_index(i), DiffPoly::var(ring, i, 1));

  auto conjugate = [&](int upto, int min_degree) {
    // G_{a_1}(G_{a_2}(… G_{a_upto}(e + u)))
    LieValuedPoly x = start;
    for (int i = upto; i >= 1; --i) x = gauge_step(g, res.a[i - 1], x, min_degree, opt.reversed_iteration);
    return x;
  };

  LieValuedPoly running = start;
  for (int i = 1; i <= m_top; ++i) {
    LieValuedPoly cur;
    if (opt.order == FactorOrder::SecondKind) {
      cur = conjugate(i - 1, -(i - 1));
    } else {
      cur = running;
    }
    auto [ai, j] = split.split(cur.component(g, -(i - 1)), i - 1, opt.reversed_iteration);
    if (ai.is_zero()) ai = LieValuedPoly(ring);
    res.a.push_back(ai);
    if (opt.order == FactorOrder::Descending) running = gauge_step(g, ai, running, -m_top, opt.reversed_iteration);
  }
  LieValuedPoly fin = opt.order == FactorOrder::SecondKind ? conjugate(m_top, -m_top) : running;

  // e + Σ I_j s_j: degree 1 is exactly e, every lower piece lies in the slice.
  if (!(fin.component(g, 1) == LieValuedPoly::constant(ring, lie.principal.e)))
    throw InternalSplitError("degree-one part changed under the gauge");
  res.integrals.assign(l, DiffPoly(ring));
  for (int k = 0; k <= m_top; ++k) {
    auto [rest, j] = split.split(fin.component(g, -k), k);
    if (!rest.is_zero()) throw InternalSplitError("gauged connection leaves the slice in degree -" + std::to_string(k));
    for (auto& [idx, p] : j) res.integrals[idx] = p;
  }
  for (int j = 0; j < l; ++j) res.degrees.push_back(lie.slice.exponents[j] + 1);
  res.gauged = fin;
  return res;
}

struct LeadingTermReport {
  bool linear_part_ok = true;  ///< order-d_j linear part is Σ_i c_ji u_i^(d_j)
  bool homogeneous = true;     ///< weighted degree d_j, no u_i, no E_i
  bool products_ok = true;     ///< other terms have >= 2 factors (soft)
  bool ok() const { return linear_part_ok && homogeneous && products_ok; }
};

inline Rational linear_coefficient(const DiffPoly& p, const DiffVar& v) {
  DiffMonomial m;
  m.factors.push_back({v, 1});
  return p.coefficient(m);
}

inline LeadingTermReport leading_term_check(const GaugeResult& res, const KostantSliceData& slice) {
  LeadingTermReport rep;
  const int l = static_cast<int>(res.integrals.size());
  for (int j = 0; j < l; ++j) {
    const DiffPoly& p = res.integrals[j];
    const int d = res.degrees[j];
    if (p.has_exp() || p.has_order0()) rep.homogeneous = false;
    for (const auto& [m, c] : p.terms()) {
      if (m.weight() != d) rep.homogeneous = false;
      int nfac = 0;
      for (const auto& [v, pw] : m.factors) nfac += pw;
      bool linear_top = nfac == 1 && m.factors[0].first.order == d;
      if (!linear_top && nfac < 2) rep.products_ok = false;
    }
    for (int i = 0; i < l; ++i)
      if (linear_coefficient(p, {i, d}) != slice.cji(j, i)) rep.linear_part_ok = false;
  }
  return rep;
}

/// Y restricted to x-jets: u_i^(k) ↦ -E_i B_i^{k-1}. With `suppress`, u_i
/// and E_i (whose y-derivatives live outside the ring) contribute zero;
/// otherwise their presence is an error.
inline DiffPoly y_derivation(const DiffPoly& p, bool suppress = false) {
  if (!suppress) {
    if (p.has_order0()) throw Unsupported("Y of an order-0 variable leaves the ring");
    if (p.has_exp()) throw Unsupported("Y of an exponential generator leaves the ring");
  }
  const RingPtr& ring = p.ring();
  DiffPoly out(ring);
  if (p.is_constant()) return out;
  std::map<int, std::vector<DiffPoly>> bcache;
  for (const auto& gen : p.generators()) {
    if (gen.is_exp || gen.order == 0) continue;
    auto& bs = bcache[gen.index];
    if (static_cast<int>(bs.size()) < gen.order) bs = b_polys(ring, gen.index, gen.order - 1);
    out -= partial(p, gen) * DiffPoly::exp_gen(ring, gen.index) * bs[gen.order - 1];
  }
  return out;
}

using GenDerivation = Derivation<DiffPoly, DiffGen>;

/// Triangular rewriting of C[U] modulo the ideal generated by the I_j and
/// their x-derivatives, valid for variables of order <= truncation.
struct NormalFormTable {
  RingPtr ring;
  int truncation = 0;
  std::vector<int> sigma;    ///< sigma[j]: player solved for from I_j
  std::vector<int> degrees;  ///< d_j
  std::vector<DiffVar> generators;
  std::map<DiffVar, DiffPoly> rewrite;

  bool is_generator(const DiffVar& v) const {
    return std::find(generators.begin(), generators.end(), v) != generators.end();
  }
};

/// Pivot columns of the rows of c: largest |entry| per row after eliminating
/// earlier pivots, ties to the smallest column.
inline std::vector<int> pivot_permutation(const RationalMatrix& c) {
  RationalMatrix m = c;
  const std::size_t n = m.rows();
  std::vector<int> sigma;
  std::vector<bool> used(n, false);
  for (std::size_t r = 0; r < n; ++r) {
    int best = -1;
    for (std::size_t col = 0; col < n; ++col) {
      if (used[col] || is_zero(m(r, col))) continue;
      if (best < 0 || abs(m(r, col)) > abs(m(r, best))) best = static_cast<int>(col);
    }
    if (best < 0) throw Error("leading-term matrix is singular");
    used[best] = true;
    sigma.push_back(best);
    for (std::size_t s = r + 1; s < n; ++s) {
      if (is_zero(m(s, best))) continue;
      Rational f = m(s, best) / m(r, best);
      for (std::size_t col = 0; col < n; ++col) m(s, col) -= f * m(r, col);
    }
  }
  return sigma;
}

inline DiffPoly normal_form(const DiffPoly& p, const NormalFormTable& t) {
  if (p.max_order() > t.truncation)
    throw TruncationExceeded("order " + std::to_string(p.max_order()) + " exceeds truncation " +
                             std::to_string(t.truncation));
  if (p.has_order0()) throw Unsupported("normal form is defined on C[U] only");
  return substitute(p, t.rewrite);
}

inline NormalFormTable build_normal_form_table(const GaugeResult& res, const KostantSliceData& slice,
                                               int truncation = -1) {
  NormalFormTable t;
  t.ring = res.ring;
  const int l = static_cast<int>(res.integrals.size());
  t.truncation = truncation >= 0 ? truncation : slice.exponents.back() + 4;
  t.degrees = res.degrees;
  t.sigma = pivot_permutation(slice.cji);
  for (int j = 0; j < l; ++j)
    for (int k = 1; k < res.degrees[j]; ++k) t.generators.push_back({t.sigma[j], k});
  std::sort(t.generators.begin(), t.generators.end(), [](const DiffVar& a, const DiffVar& b) {
    return a.order != b.order ? a.order < b.order : a.index < b.index;
  });
  for (int order = 2; order <= t.truncation; ++order) {
    std::vector<int> active;
    for (int j = 0; j < l; ++j)
      if (res.degrees[j] <= order) active.push_back(j);
    if (active.empty()) continue;
    const std::size_t n = active.size();
    std::vector<DiffPoly> rel;
    for (int j : active) rel.push_back(dx(res.integrals[j], order - res.degrees[j]));
    RationalMatrix s(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) s(r, c) = linear_coefficient(rel[r], {t.sigma[active[c]], order});
    RationalMatrix inv = inverse(s);
    for (std::size_t c = 0; c < n; ++c) {
      DiffVar v{t.sigma[active[c]], order};
      DiffPoly q(res.ring);
      for (std::size_t r = 0; r < n; ++r)
        if (!is_zero(inv(c, r))) q += rel[r] * inv(c, r);
      DiffPoly rhs = DiffPoly::var(res.ring, v.index, v.order) - q;
      t.rewrite[v] = substitute(rhs, t.rewrite);
    }
  }
  return t;
}

/// Ṽ_j = Σ_k B_j^{k-1} ∂/∂u_j^(k) as a derivation of the generator ring.
inline GenDerivation tilde_v_field(int j, const NormalFormTable& t) {
  GenDerivation d{DiffPoly(t.ring)};
  int top = 0;
  for (const auto& g : t.generators)
    if (g.index == j) top = std::max(top, g.order);
  if (top == 0) return d;
  auto bs = b_polys(t.ring, j, top - 1);
  for (const auto& g : t.generators)
    if (g.index == j) d.set(DiffGen::u(j, g.order), normal_form(bs[g.order - 1], t));
  return d;
}

/// ∂_x on the generator ring: g ↦ normal_form(∂_x g).
inline GenDerivation quotient_dx(const NormalFormTable& t) {
  GenDerivation d{DiffPoly(t.ring)};
  for (const auto& g : t.generators)
    d.set(DiffGen::u(g.index, g.order), normal_form(DiffPoly::var(t.ring, g.index, g.order + 1), t));
  return d;
}

/// Ṽ_j on the full truncated jet ring (before passing to the quotient).
inline GenDerivation raw_tilde_v(const RingPtr& ring, int j, int truncation) {
  GenDerivation d{DiffPoly(ring)};
  auto bs = b_polys(ring, j, truncation - 1);
  for (int k = 1; k <= truncation; ++k) d.set(DiffGen::u(j, k), bs[k - 1]);
  return d;
}

/// Truncated vector fields Y, U_j, V_j on (u_i, u_i^(k), E_i) with E_i = e^{ρ_i}.
struct JetFields {
  RingPtr ring;
  int truncation = 0;
  GenDerivation y;  ///< ∂/∂y part omitted: its brackets with all fields vanish
  std::vector<GenDerivation> u, v, v_tilde;
};

inline JetFields jet_fields(const IntMatrix& cartan, int truncation) {
  JetFields jf;
  jf.ring = make_diff_ring(cartan, true);
  jf.truncation = truncation;
  const int l = static_cast<int>(cartan.size());
  RationalMatrix a(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) a(i, j) = cartan[i][j];
  RationalMatrix ainv = inverse(a);
  DiffPoly zero(jf.ring);
  jf.y = GenDerivation(zero);
  for (int j = 0; j < l; ++j) {
    GenDerivation uj(zero), vt = raw_tilde_v(jf.ring, j, truncation);
    for (int i = 0; i < l; ++i) uj.set(DiffGen::u(i, 0), DiffPoly(jf.ring, ainv(i, j)));
    // U_j(E_k) = Σ_i a^{ij} ∂E_k/∂u_i = δ_jk E_k
    uj.set(DiffGen::exp(j), DiffPoly::exp_gen(jf.ring, j));
    GenDerivation vj = DiffPoly::exp_gen(jf.ring, j) * vt;
    jf.u.push_back(uj);
    jf.v_tilde.push_back(vt);
    jf.v.push_back(vj);
    jf.y = jf.y - vj;
  }
  return jf;
}

/// Coefficients of ∏_{i>=1} (1 - q^i)^{-b_i} up to q^nmax.
inline std::vector<long> character_series(const std::vector<int>& b, int nmax) {
  std::vector<long> s(nmax + 1, 0);
  s[0] = 1;
  for (std::size_t i = 1; i <= b.size(); ++i)
    for (int rep = 0; rep < b[i - 1]; ++rep)
      for (int n = static_cast<int>(i); n <= nmax; ++n) s[n] += s[n - i];  // multiply by 1/(1-q^i)
  return s;
}

/// Number of monomials of each weight 0..nmax in variables of the given weights.
inline std::vector<long> monomial_counts(const std::vector<int>& weights, int nmax) {
  std::vector<long> s(nmax + 1, 0);
  s[0] = 1;
  for (int w : weights)
    for (int n = w; n <= nmax; ++n) s[n] += s[n - w];
  return s;
}

/// All monomials of weight n in u_i^(k), 1 <= k <= n.
inline std::vector<DiffMonomial> monomials_of_weight(int rank, int n) {
  std::vector<DiffVar> vars;
  for (int k = n; k >= 1; --k)
    for (int i = 0; i < rank; ++i) vars.push_back({i, k});
  std::vector<DiffMonomial> out;
  DiffMonomial cur;
  auto rec = [&](auto&& self, std::size_t vi, int left) -> void {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    if (vi == vars.size()) return;
    const DiffVar& v = vars[vi];
    for (int p = left / v.order; p >= 1; --p) {
      cur.factors.push_back({v, p});
      self(self, vi + 1, left - p * v.order);
      cur.factors.pop_back();
    }
    self(self, vi + 1, left);
  };
  rec(rec, 0, n);
  return out;
}

/// dim C[U]_n - dim (ideal)_n, the ideal spanned by monomials times ∂^k I_j.
inline long quotient_dimension(const GaugeResult& res, int n) {
  const int l = static_cast<int>(res.integrals.size());
  auto base = monomials_of_weight(l, n);
  // Sparse row reduction keyed by the term order; pivot = leading monomial.
  std::map<DiffMonomial, DiffPoly, MonomialOrder> pivots;
  auto reduce_insert = [&](DiffPoly p) {
    while (!p.is_zero()) {
      const auto& [lead, lc] = *p.terms().begin();
      auto it = pivots.find(lead);
      if (it == pivots.end()) {
        Rational inv = 1 / Rational(lc);
        p *= inv;
        DiffMonomial key = p.terms().begin()->first;
        pivots.emplace(std::move(key), std::move(p));
        return;
      }
      p -= it->second * Rational(lc);
    }
  };
  for (int j = 0; j < l; ++j) {
    for (int k = 0; res.degrees[j] + k <= n; ++k) {
      DiffPoly dj = dx(res.integrals[j], k);
      int rest = n - res.degrees[j] - k;
      if (rest == 0) {
        reduce_insert(dj);
        continue;
      }
      for (const auto& m : monomials_of_weight(l, rest)) reduce_insert(DiffPoly::from_monomial(res.ring, m, 1) * dj);
    }
  }
  return static_cast<long>(base.size()) - static_cast<long>(pivots.size());
}

}  // namespace toda
