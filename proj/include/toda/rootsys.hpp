#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "toda/errors.hpp"
#include "toda/matrix.hpp"
#include "toda/rational.hpp"

namespace toda {

enum class CartanType { A, B, C, D, E, F, G };

inline char type_letter(CartanType t) { return "ABCDEFG"[static_cast<int>(t)]; }

inline CartanType parse_cartan_type(const std::string& s) {
  if (s.size() == 1) {
    char c = s[0];
    if (c >= 'a' && c <= 'g') c = static_cast<char>(c - 'a' + 'A');
    if (c >= 'A' && c <= 'G') return static_cast<CartanType>(c - 'A');
  }
  throw InvalidCartanType("unknown Cartan type '" + s + "'");
}

inline bool valid_cartan(CartanType t, int rank) {
  switch (t) {
    case CartanType::A: return rank >= 1;
    case CartanType::B: return rank >= 2;
    case CartanType::C: return rank >= 3;
    case CartanType::D: return rank >= 4;
    case CartanType::E: return rank >= 6 && rank <= 8;
    case CartanType::F: return rank == 4;
    case CartanType::G: return rank == 2;
  }
  return false;
}

using IntMatrix = std::vector<std::vector<int>>;

/// a_ij = α_i(H_{α_j}) = 2(α_i, α_j)/(α_j, α_j), simple roots in Bourbaki order.
inline IntMatrix cartan_matrix(CartanType t, int l) {
  if (!valid_cartan(t, l))
    throw InvalidCartanType(std::string("invalid Cartan type ") + type_letter(t) + std::to_string(l));
  IntMatrix a(l, std::vector<int>(l, 0));
  for (int i = 0; i < l; ++i) a[i][i] = 2;
  auto link = [&](int i, int j) { a[i][j] = a[j][i] = -1; };
  switch (t) {
    case CartanType::A:
      for (int i = 0; i + 1 < l; ++i) link(i, i + 1);
      break;
    case CartanType::B:  // α_l short
      for (int i = 0; i + 1 < l; ++i) link(i, i + 1);
      a[l - 2][l - 1] = -2;
      break;
    case CartanType::C:  // α_l long
      for (int i = 0; i + 1 < l; ++i) link(i, i + 1);
      a[l - 1][l - 2] = -2;
      break;
    case CartanType::D:
      for (int i = 0; i + 2 < l; ++i) link(i, i + 1);
      link(l - 3, l - 1);
      break;
    case CartanType::E:
      link(0, 2);
      link(2, 3);
      link(1, 3);
      for (int i = 3; i + 1 < l; ++i) link(i, i + 1);
      break;
    case CartanType::F:  // α_1, α_2 long
      link(0, 1);
      link(1, 2);
      link(2, 3);
      a[1][2] = -2;
      break;
    case CartanType::G:  // α_1 short
      a[0][1] = -1;
      a[1][0] = -3;
      break;
  }
  return a;
}

using Root = std::vector<int>;

struct RootSystemData {
  CartanType cartan_type{};
  int rank = 0;
  IntMatrix cartan_matrix;
  /// Ordered by height, then by coordinate vector in decreasing lexicographic
  /// order; the first `rank` entries are the simple roots α_1..α_l.
  std::vector<Root> positive_roots;
  /// d_i = (α_i, α_i)/2, long roots have d_i = 1.
  std::vector<Rational> half_norms;
  std::map<Root, int> index_of;

  std::size_t num_positive() const { return positive_roots.size(); }
  std::string name() const { return std::string(1, type_letter(cartan_type)) + std::to_string(rank); }

  static int height(const Root& r) {
    int h = 0;
    for (int c : r) h += c;
    return h;
  }
  int height(std::size_t k) const { return height(positive_roots[k]); }
  int max_height() const { return height(positive_roots.back()); }

  /// Index of a positive root, or -1.
  int find(const Root& r) const {
    auto it = index_of.find(r);
    return it == index_of.end() ? -1 : it->second;
  }

  /// (β, γ) = Σ β_i γ_j a_ij d_j.
  Rational inner(const Root& b, const Root& g) const {
    Rational s = 0;
    for (int i = 0; i < rank; ++i) {
      if (!b[i]) continue;
      for (int j = 0; j < rank; ++j)
        if (g[j]) s += Rational(b[i] * g[j] * cartan_matrix[i][j]) * half_norms[j];
    }
    return s;
  }

  /// ⟨β, α_i^∨⟩ = β(H_{α_i}).
  int pair_coroot(const Root& b, int i) const {
    int s = 0;
    for (int k = 0; k < rank; ++k) s += b[k] * cartan_matrix[k][i];
    return s;
  }

  RationalMatrix inverse_cartan() const {
    RationalMatrix a(rank, rank);
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j) a(i, j) = cartan_matrix[i][j];
    return inverse(a);
  }
};

namespace detail {

inline bool root_order(const Root& a, const Root& b) {
  int ha = RootSystemData::height(a), hb = RootSystemData::height(b);
  if (ha != hb) return ha < hb;
  return a > b;
}

inline std::vector<Rational> symmetrizer(const IntMatrix& a) {
  const int l = static_cast<int>(a.size());
  std::vector<std::optional<Rational>> d(l);
  d[0] = Rational(1);
  std::queue<int> q;
  q.push(0);
  while (!q.empty()) {
    int i = q.front();
    q.pop();
    for (int j = 0; j < l; ++j) {
      if (j == i || a[i][j] == 0 || d[j]) continue;
      // a_ij d_j = a_ji d_i
      d[j] = Rational(a[j][i]) * *d[i] / Rational(a[i][j]);
      q.push(j);
    }
  }
  Rational mx = 0;
  for (auto& x : d) {
    if (!x) throw InvalidCartanType("Cartan matrix is not indecomposable");
    mx = std::max(mx, *x);
  }
  std::vector<Rational> out;
  for (auto& x : d) out.push_back(*x / mx);
  return out;
}

}  // namespace detail

inline RootSystemData build_root_system(CartanType t, int l) {
  RootSystemData rs;
  rs.cartan_type = t;
  rs.rank = l;
  rs.cartan_matrix = cartan_matrix(t, l);
  rs.half_norms = detail::symmetrizer(rs.cartan_matrix);

  std::vector<Root> found;
  std::map<Root, bool> known;
  std::vector<Root> layer;
  for (int i = 0; i < l; ++i) {
    Root r(l, 0);
    r[i] = 1;
    layer.push_back(r);
    known[r] = true;
  }
  // Layer-by-layer closure: β + α_i is a root iff q > 0, where the α_i-string
  // through β runs from β - pα_i to β + qα_i and p - q = ⟨β, α_i^∨⟩.
  while (!layer.empty()) {
    found.insert(found.end(), layer.begin(), layer.end());
    std::vector<Root> next;
    for (const auto& b : layer) {
      for (int i = 0; i < l; ++i) {
        int p = 0;
        Root down = b;
        while (true) {
          down[i] -= 1;
          if (!known.count(down)) break;
          ++p;
        }
        int q = p - rs.pair_coroot(b, i);
        if (q <= 0) continue;
        Root up = b;
        up[i] += 1;
        if (!known.count(up)) {
          known[up] = true;
          next.push_back(up);
        }
      }
    }
    layer = std::move(next);
  }
  std::sort(found.begin(), found.end(), detail::root_order);
  rs.positive_roots = found;
  for (std::size_t k = 0; k < found.size(); ++k) rs.index_of[found[k]] = static_cast<int>(k);
  return rs;
}

inline RootSystemData build_root_system(const std::string& type, int rank) {
  return build_root_system(parse_cartan_type(type), rank);
}

/// Dense coordinate vector of a Lie algebra element in the Chevalley basis.
using LieVec = std::vector<Rational>;

struct BracketTerm {
  int index;
  long coeff;
};

/// Chevalley basis {e_β, f_β = e_{-β}, h_i}: index k < N is e_{β_k},
/// N <= k < 2N is f_{β_{k-N}}, 2N + i is h_i = H_{α_i}.
class ChevalleyAlgebra {
 public:
  explicit ChevalleyAlgebra(RootSystemData rs, int sign_variant = 0) : rs_(std::move(rs)), variant_(sign_variant) {
    npos_ = static_cast<int>(rs_.num_positive());
    dim_ = 2 * npos_ + rs_.rank;
    build(sign_variant);
  }

  const RootSystemData& roots() const { return rs_; }
  int dim() const { return dim_; }
  int rank() const { return rs_.rank; }
  int num_positive() const { return npos_; }
  /// Which four-root sign relation produced the constants (0 or 1).
  int sign_variant() const { return variant_; }

  int e_index(int k) const { return k; }
  int f_index(int k) const { return npos_ + k; }
  int h_index(int i) const { return 2 * npos_ + i; }
  bool is_e(int b) const { return b < npos_; }
  bool is_f(int b) const { return b >= npos_ && b < 2 * npos_; }
  bool is_h(int b) const { return b >= 2 * npos_; }
  /// Positive-root index behind e_β or f_β.
  int root_of(int b) const { return is_e(b) ? b : b - npos_; }

  /// Principal grading: +height for e, -height for f, 0 on the Cartan.
  int degree(int b) const {
    if (is_h(b)) return 0;
    int h = rs_.height(static_cast<std::size_t>(root_of(b)));
    return is_e(b) ? h : -h;
  }

  /// Weight of a basis element as a root vector (zero for h).
  Root weight(int b) const {
    if (is_h(b)) return Root(rs_.rank, 0);
    Root r = rs_.positive_roots[root_of(b)];
    if (is_f(b))
      for (auto& c : r) c = -c;
    return r;
  }

  std::string symbol(int b) const {
    if (is_h(b)) return "h[" + std::to_string(b - 2 * npos_ + 1) + "]";
    std::string s = is_e(b) ? "e[" : "f[";
    const Root& r = rs_.positive_roots[root_of(b)];
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + std::to_string(r[i]);
    return s + "]";
  }

  const std::vector<BracketTerm>& bracket(int a, int b) const { return table_[a * dim_ + b]; }

  LieVec zero() const { return LieVec(dim_, Rational(0)); }
  LieVec unit(int b) const {
    LieVec v = zero();
    v[b] = 1;
    return v;
  }

  LieVec bracket(const LieVec& x, const LieVec& y) const {
    LieVec out = zero();
    for (int a = 0; a < dim_; ++a) {
      if (is_zero(x[a])) continue;
      for (int b = 0; b < dim_; ++b) {
        if (is_zero(y[b])) continue;
        const Rational xy = x[a] * y[b];
        for (const auto& t : bracket(a, b)) out[t.index] += xy * t.coeff;
      }
    }
    return out;
  }

  /// Invariant symmetric form normalized by (e_β, f_β) = 2/(β,β) with long
  /// roots of square length 2 (the trace form in type A).
  Rational form(int a, int b) const {
    if (is_h(a) && is_h(b)) {
      int i = a - 2 * npos_, j = b - 2 * npos_;
      return Rational(rs_.cartan_matrix[i][j]) / rs_.half_norms[i];
    }
    if (!is_h(a) && !is_h(b) && root_of(a) == root_of(b) && is_e(a) != is_e(b)) {
      const Root& r = rs_.positive_roots[root_of(a)];
      return Rational(2) / rs_.inner(r, r);
    }
    return 0;
  }

  /// Coroot H_β = Σ c_i h_i for a positive root index.
  LieVec coroot(int k) const {
    LieVec v = zero();
    const Root& r = rs_.positive_roots[k];
    const Rational norm = rs_.inner(r, r);
    for (int i = 0; i < rs_.rank; ++i)
      if (r[i]) v[h_index(i)] = Rational(r[i]) * Rational(2) * rs_.half_norms[i] / norm;
    return v;
  }

  /// N_{ξ,ζ} with [e_ξ, e_ζ] = N_{ξ,ζ} e_{ξ+ζ}; zero when ξ+ζ is not a root.
  long structure_constant(const Root& xi, const Root& zeta) const {
    auto it = nconst_.find({xi, zeta});
    return it == nconst_.end() ? 0 : it->second;
  }

  /// Replace one stored constant; used only to build negative-control fixtures.
  void corrupt_constant(int a, int b) {
    auto& terms = table_[a * dim_ + b];
    if (terms.empty()) throw Error("bracket is zero, nothing to corrupt");
    terms[0].coeff = -terms[0].coeff;
  }

 private:
  static Root neg(Root r) {
    for (auto& c : r) c = -c;
    return r;
  }
  static Root add(Root a, const Root& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
  }
  static Root sub(Root a, const Root& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
  }
  bool is_root(const Root& r) const {
    if (rs_.find(r) >= 0) return true;
    return rs_.find(neg(r)) >= 0;
  }
  bool is_positive(const Root& r) const { return rs_.find(r) >= 0; }
  Rational norm(const Root& r) const { return rs_.inner(r, r); }

  /// Largest p with ζ - pξ a root.
  int string_p(const Root& xi, const Root& zeta) const {
    int p = 0;
    Root r = zeta;
    while (true) {
      r = sub(r, xi);
      if (!is_root(r)) return p;
      ++p;
    }
  }

  // N for arbitrary roots, given all positive-pair constants with smaller sum.
  Rational n_any(const Root& x, const Root& y) const {
    Root s = add(x, y);
    bool zero_sum = std::all_of(s.begin(), s.end(), [](int c) { return c == 0; });
    if (zero_sum || !is_root(s)) return 0;
    bool px = is_positive(x), py = is_positive(y);
    if (px && py) return pos_.at({x, y});
    if (!px && !py) return -pos_.at({neg(x), neg(y)});
    if (!px) return -n_any(y, x);
    // x positive, y = -w negative.
    Root w = neg(y);
    Root g = sub(x, w);
    if (is_positive(g)) return -norm(g) / norm(x) * n_any(w, g);
    g = sub(w, x);
    return norm(g) / norm(w) * n_any(g, x);
  }

  void build(int variant) {
    const auto& pr = rs_.positive_roots;
    // Positive-pair constants by increasing height of the sum.
    for (std::size_t si = 0; si < pr.size(); ++si) {
      const Root& sigma = pr[si];
      std::optional<std::pair<Root, Root>> extra;
      std::vector<std::pair<Root, Root>> others;
      for (std::size_t ai = 0; ai < si; ++ai) {
        Root rest = sub(sigma, pr[ai]);
        if (!is_positive(rest)) continue;
        if (!extra) {
          extra = std::make_pair(pr[ai], rest);
        } else if (rs_.find(pr[ai]) < rs_.find(rest)) {
          others.emplace_back(pr[ai], rest);
        }
      }
      if (!extra) continue;
      const auto& [al, be] = *extra;
      const Rational nab = string_p(al, be) + 1;
      pos_[{al, be}] = nab;
      pos_[{be, al}] = -nab;
      for (const auto& [x, z] : others) {
        if (x == be) continue;
        // Four-root relation on (ξ, ζ, -α, -β).
        Rational t1 = 0, t2 = 0;
        if (variant == 0) {
          Root za = sub(z, al), xa = sub(x, al);
          if (is_root(za)) t1 = n_any(z, neg(al)) * n_any(x, neg(be)) / norm(za);
          if (is_root(xa)) t2 = n_any(neg(al), x) * n_any(z, neg(be)) / norm(xa);
        } else {
          Root bx = sub(be, x), ax = sub(al, x);
          if (is_root(bx)) t1 = n_any(be, neg(x)) * n_any(al, neg(z)) / norm(bx);
          if (is_root(ax)) t2 = n_any(neg(x), al) * n_any(be, neg(z)) / norm(ax);
        }
        Rational n = norm(sigma) / nab * (t1 + t2);
        pos_[{x, z}] = n;
        pos_[{z, x}] = -n;
      }
    }

    table_.assign(static_cast<std::size_t>(dim_) * dim_, {});
    auto put = [&](int a, int b, int idx, const Rational& c) {
      if (is_zero(c)) return;
      if (!is_integer(c)) throw Error("non-integral structure constant");
      table_[a * dim_ + b].push_back({idx, to_long(c)});
    };
    auto index_of_root = [&](const Root& r) {
      int k = rs_.find(r);
      return k >= 0 ? e_index(k) : f_index(rs_.find(neg(r)));
    };
    const int l = rs_.rank;
    for (int a = 0; a < dim_; ++a) {
      for (int b = 0; b < dim_; ++b) {
        if (is_h(a) && is_h(b)) continue;
        if (is_h(a) || is_h(b)) {
          int hb = is_h(a) ? a : b, xb = is_h(a) ? b : a;
          int i = hb - 2 * npos_;
          int c = rs_.pair_coroot(weight(xb), i);
          put(a, b, xb, is_h(a) ? Rational(c) : Rational(-c));
          continue;
        }
        Root x = weight(a), y = weight(b);
        Root s = add(x, y);
        if (std::all_of(s.begin(), s.end(), [](int c) { return c == 0; })) {
          LieVec h = coroot(root_of(a));
          Rational sign = is_e(a) ? 1 : -1;
          for (int i = 0; i < l; ++i) put(a, b, h_index(i), sign * h[h_index(i)]);
          continue;
        }
        if (!is_root(s)) continue;
        Rational n = n_any(x, y);
        nconst_[{x, y}] = to_long(n);
        put(a, b, index_of_root(s), n);
      }
    }
  }

  RootSystemData rs_;
  int variant_ = 0;
  int npos_ = 0;
  int dim_ = 0;
  std::map<std::pair<Root, Root>, Rational> pos_;
  std::map<std::pair<Root, Root>, long> nconst_;
  std::vector<std::vector<BracketTerm>> table_;
};

/// First failing Jacobi triple (a, b, c), if any; exhaustive over a < b < c.
inline std::optional<std::array<int, 3>> find_jacobi_violation(const ChevalleyAlgebra& g) {
  const int n = g.dim();
  std::vector<long> acc(n, 0);
  auto add_nested = [&](int x, int y, int z) {
    // acc += [x, [y, z]]
    for (const auto& t : g.bracket(y, z))
      for (const auto& u : g.bracket(x, t.index)) acc[u.index] += t.coeff * u.coeff;
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        std::fill(acc.begin(), acc.end(), 0);
        add_nested(a, b, c);
        add_nested(b, c, a);
        add_nested(c, a, b);
        for (long v : acc)
          if (v != 0) return std::array<int, 3>{a, b, c};
      }
  return std::nullopt;
}

/// Builds the algebra, falling back to the alternative four-root relation if
/// the first sign propagation does not satisfy Jacobi. Jacobi is checked only
/// for dim <= 60 (exhaustive triples); larger algebras use variant 0.
inline std::shared_ptr<const ChevalleyAlgebra> chevalley_constants(const RootSystemData& rs) {
  auto g = std::make_shared<ChevalleyAlgebra>(rs, 0);
  if (g->dim() <= 60 && find_jacobi_violation(*g)) {
    auto alt = std::make_shared<ChevalleyAlgebra>(rs, 1);
    if (find_jacobi_violation(*alt)) throw Error("structure constants violate Jacobi for " + rs.name());
    return alt;
  }
  return g;
}

struct PrincipalData {
  LieVec h0;               ///< α_i(H_0) = 1
  LieVec e;                ///< Σ e_{α_i}
  LieVec f;                ///< sl_2 partner: [e, f] = 2H_0
  std::vector<int> graded_dims;  ///< graded_dims[k-1] = b_k = dim g_k
  std::vector<Rational> h0_coeffs;
};

inline PrincipalData principal_data(const ChevalleyAlgebra& g) {
  const auto& rs = g.roots();
  const int l = rs.rank;
  // A c = 1 with A_ij = α_i(h_j).
  RationalMatrix a(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) a(i, j) = rs.cartan_matrix[i][j];
  RationalMatrix inv = inverse(a);
  PrincipalData pd;
  pd.h0 = g.zero();
  pd.e = g.zero();
  pd.f = g.zero();
  for (int i = 0; i < l; ++i) {
    Rational c = 0;
    for (int k = 0; k < l; ++k) c += inv(i, k);
    pd.h0_coeffs.push_back(c);
    pd.h0[g.h_index(i)] = c;
    pd.e[g.e_index(i)] = 1;
    pd.f[g.f_index(i)] = 2 * c;
  }
  pd.graded_dims.assign(rs.max_height(), 0);
  for (std::size_t k = 0; k < rs.num_positive(); ++k) pd.graded_dims[rs.height(k) - 1]++;
  return pd;
}

enum class SliceRule { RootVectorGreedy, LowestWeight };

inline const char* slice_rule_name(SliceRule r) {
  return r == SliceRule::RootVectorGreedy ? "root-vector-greedy" : "lowest-weight";
}

struct KostantSliceData {
  SliceRule rule = SliceRule::RootVectorGreedy;
  std::vector<LieVec> slice_basis;         ///< s_1..s_l, s_j ∈ g_{-m_j}
  std::vector<int> exponents;              ///< m_1 <= ... <= m_l
  std::vector<std::vector<LieVec>> powers; ///< powers[j][k] = (-ad_e)^k s_j, 0 <= k <= 2m_j
  RationalMatrix cji;                      ///< H_{α_i} = Σ_j cji(j, i) s_j^{m_j}
  bool repeated_exponents = false;         ///< some g_{-k} carries two slice vectors
};

namespace detail {

inline std::vector<int> basis_of_degree(const ChevalleyAlgebra& g, int d) {
  std::vector<int> out;
  for (int b = 0; b < g.dim(); ++b)
    if (g.degree(b) == d) out.push_back(b);
  return out;
}

inline std::size_t span_rank(const std::vector<LieVec>& vs, const std::vector<int>& coords) {
  if (vs.empty()) return 0;
  RationalMatrix m(vs.size(), coords.size());
  for (std::size_t r = 0; r < vs.size(); ++r)
    for (std::size_t c = 0; c < coords.size(); ++c) m(r, c) = vs[r][coords[c]];
  return rank(m);
}

}  // namespace detail

inline KostantSliceData kostant_slice(const ChevalleyAlgebra& g, const PrincipalData& pd,
                                      SliceRule rule = SliceRule::RootVectorGreedy) {
  KostantSliceData ks;
  ks.rule = rule;
  const int hmax = g.roots().max_height();
  for (int k = 1; k <= hmax; ++k) {
    auto coords = detail::basis_of_degree(g, -k);
    std::vector<LieVec> chosen;
    if (rule == SliceRule::RootVectorGreedy) {
      std::vector<LieVec> span;
      for (int b : detail::basis_of_degree(g, -k - 1)) span.push_back(g.bracket(pd.e, g.unit(b)));
      std::size_t r = detail::span_rank(span, coords);
      for (int b : coords) {
        span.push_back(g.unit(b));
        std::size_t r2 = detail::span_rank(span, coords);
        if (r2 > r) {
          chosen.push_back(g.unit(b));
          r = r2;
        } else {
          span.pop_back();
        }
      }
    } else {
      // ker ad_f restricted to g_{-k}.
      auto target = detail::basis_of_degree(g, -k - 1);
      RationalMatrix m(target.size(), coords.size());
      for (std::size_t c = 0; c < coords.size(); ++c) {
        LieVec v = g.bracket(pd.f, g.unit(coords[c]));
        for (std::size_t r = 0; r < target.size(); ++r) m(r, c) = v[target[r]];
      }
      std::vector<std::vector<Rational>> ns;
      if (target.empty()) {
        for (std::size_t c = 0; c < coords.size(); ++c) {
          std::vector<Rational> v(coords.size(), Rational(0));
          v[c] = 1;
          ns.push_back(v);
        }
      } else {
        ns = nullspace(m);
      }
      for (auto& v : ns) {
        LieVec x = g.zero();
        for (std::size_t c = 0; c < coords.size(); ++c) x[coords[c]] = v[c];
        chosen.push_back(x);
      }
    }
    if (chosen.size() > 1) ks.repeated_exponents = true;
    for (auto& x : chosen) {
      ks.slice_basis.push_back(x);
      ks.exponents.push_back(k);
    }
  }
  const int l = g.rank();
  if (static_cast<int>(ks.slice_basis.size()) != l) throw InternalSplitError("slice has wrong dimension");
  for (int j = 0; j < l; ++j) {
    std::vector<LieVec> pw{ks.slice_basis[j]};
    for (int k = 1; k <= 2 * ks.exponents[j]; ++k) pw.push_back(g.bracket(pw.back(), pd.e));
    ks.powers.push_back(std::move(pw));
  }
  RationalMatrix s(l, l);
  for (int j = 0; j < l; ++j)
    for (int r = 0; r < l; ++r) s(r, j) = ks.powers[j][ks.exponents[j]][g.h_index(r)];
  ks.cji = inverse(s);
  return ks;
}

/// Everything downstream modules need about one simple Lie algebra.
struct LieData {
  std::shared_ptr<const ChevalleyAlgebra> alg;
  PrincipalData principal;
  KostantSliceData slice;

  const RootSystemData& roots() const { return alg->roots(); }
  int rank() const { return alg->rank(); }
};

inline LieData make_lie_data(CartanType t, int rank, SliceRule rule = SliceRule::RootVectorGreedy) {
  LieData d;
  d.alg = chevalley_constants(build_root_system(t, rank));
  d.principal = principal_data(*d.alg);
  d.slice = kostant_slice(*d.alg, d.principal, rule);
  return d;
}

inline LieData make_lie_data(std::shared_ptr<const ChevalleyAlgebra> alg,
                             SliceRule rule = SliceRule::RootVectorGreedy) {
  LieData d;
  d.alg = std::move(alg);
  d.principal = principal_data(*d.alg);
  d.slice = kostant_slice(*d.alg, d.principal, rule);
  return d;
}

}  // namespace toda
