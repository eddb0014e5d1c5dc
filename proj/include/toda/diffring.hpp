#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "toda/errors.hpp"
#include "toda/rational.hpp"
#include "toda/rootsys.hpp"

namespace toda {

/// Parameters shared by all polynomials of one differential ring.
struct DiffRing {
  int rank = 0;
  IntMatrix cartan;
  bool allow_order0 = false;  ///< admit u_i themselves (outside C[U])
  bool laurent = false;       ///< admit negative powers of E_i

  bool operator==(const DiffRing& o) const {
    return rank == o.rank && cartan == o.cartan && allow_order0 == o.allow_order0 && laurent == o.laurent;
  }
};

using RingPtr = std::shared_ptr<const DiffRing>;

inline RingPtr make_diff_ring(const IntMatrix& cartan, bool allow_order0 = false, bool laurent = false) {
  auto r = std::make_shared<DiffRing>();
  r->rank = static_cast<int>(cartan.size());
  r->cartan = cartan;
  r->allow_order0 = allow_order0;
  r->laurent = laurent;
  return r;
}

/// u_{index+1}^{(order)}; indices are 0-based internally.
struct DiffVar {
  int index = 0;
  int order = 0;
  auto operator<=>(const DiffVar&) const = default;
};

/// Canonical factor order inside a monomial: higher order first, then
/// smaller index.
inline bool factor_before(const DiffVar& a, const DiffVar& b) {
  if (a.order != b.order) return a.order > b.order;
  return a.index < b.index;
}

/// Ring generator: a jet variable or one of the exponential generators E_i.
struct DiffGen {
  bool is_exp = false;
  int index = 0;
  int order = 0;  ///< unused for E_i
  auto operator<=>(const DiffGen&) const = default;
  static DiffGen u(int i, int n) { return {false, i, n}; }
  static DiffGen exp(int i) { return {true, i, 0}; }
  DiffVar var() const { return {index, order}; }
};

struct DiffMonomial {
  std::vector<std::pair<DiffVar, int>> factors;  ///< sorted by factor_before, powers > 0
  std::vector<int> exps;                         ///< E multi-index, trailing zeros stripped

  int weight() const {
    int w = 0;
    for (const auto& [v, p] : factors) w += v.order * p;
    return w;
  }
  bool has_exp() const { return !exps.empty(); }
  bool operator==(const DiffMonomial&) const = default;

  int power_of(const DiffVar& v) const {
    for (const auto& [w, p] : factors)
      if (w == v) return p;
    return 0;
  }
  int exp_of(int i) const { return i < static_cast<int>(exps.size()) ? exps[i] : 0; }

  void normalize_exps() {
    while (!exps.empty() && exps.back() == 0) exps.pop_back();
  }

  friend DiffMonomial operator*(const DiffMonomial& a, const DiffMonomial& b) {
    DiffMonomial m;
    std::size_t i = 0, j = 0;
    while (i < a.factors.size() || j < b.factors.size()) {
      if (j == b.factors.size() || (i < a.factors.size() && factor_before(a.factors[i].first, b.factors[j].first))) {
        m.factors.push_back(a.factors[i++]);
      } else if (i == a.factors.size() || factor_before(b.factors[j].first, a.factors[i].first)) {
        m.factors.push_back(b.factors[j++]);
      } else {
        m.factors.emplace_back(a.factors[i].first, a.factors[i].second + b.factors[j].second);
        ++i;
        ++j;
      }
    }
    m.exps = a.exps;
    if (b.exps.size() > m.exps.size()) m.exps.resize(b.exps.size(), 0);
    for (std::size_t k = 0; k < b.exps.size(); ++k) m.exps[k] += b.exps[k];
    m.normalize_exps();
    return m;
  }

  /// Monomial with one power of v removed; v must be present.
  DiffMonomial without_one(const DiffVar& v) const {
    DiffMonomial m = *this;
    for (auto it = m.factors.begin(); it != m.factors.end(); ++it)
      if (it->first == v) {
        if (--it->second == 0) m.factors.erase(it);
        return m;
      }
    throw Error("variable not present in monomial");
  }
};

/// Term order: weighted degree descending, then the factor lists compared
/// position by position (earlier variable first, higher power first).
struct MonomialOrder {
  bool operator()(const DiffMonomial& a, const DiffMonomial& b) const {
    int wa = a.weight(), wb = b.weight();
    if (wa != wb) return wa > wb;
    std::size_t n = std::min(a.factors.size(), b.factors.size());
    for (std::size_t k = 0; k < n; ++k) {
      const auto& [va, pa] = a.factors[k];
      const auto& [vb, pb] = b.factors[k];
      if (va != vb) return factor_before(va, vb);
      if (pa != pb) return pa > pb;
    }
    if (a.factors.size() != b.factors.size()) return a.factors.size() < b.factors.size();
    return a.exps < b.exps;
  }
};

class DiffPoly {
 public:
  using TermMap = std::map<DiffMonomial, Rational, MonomialOrder>;

  DiffPoly() = default;
  explicit DiffPoly(RingPtr ring) : ring_(std::move(ring)) {}
  DiffPoly(RingPtr ring, const Rational& c) : ring_(std::move(ring)) {
    if (!toda::is_zero(c)) terms_[DiffMonomial{}] = c;
  }

  static DiffPoly var(RingPtr ring, int index, int order, int power = 1) {
    if (ring) {
      if (index < 0 || index >= ring->rank) throw Error("variable index out of range");
      if (order == 0 && !ring->allow_order0) throw Unsupported("order-0 variable in a ring without u_i");
    }
    if (order < 0 || power < 0) throw Error("negative order or power");
    DiffPoly p(std::move(ring));
    DiffMonomial m;
    if (power > 0) m.factors.push_back({{index, order}, power});
    p.terms_[m] = 1;
    return p;
  }

  /// E_{index+1}^k.
  static DiffPoly exp_gen(RingPtr ring, int index, int k = 1) {
    if (ring && (index < 0 || index >= ring->rank)) throw Error("exponential index out of range");
    if (k < 0 && !(ring && ring->laurent)) throw Unsupported("negative E power outside a Laurent ring");
    DiffPoly p(std::move(ring));
    DiffMonomial m;
    m.exps.assign(index + 1, 0);
    m.exps[index] = k;
    m.normalize_exps();
    p.terms_[m] = 1;
    return p;
  }

  static DiffPoly from_monomial(RingPtr ring, DiffMonomial m, const Rational& c) {
    DiffPoly p(std::move(ring));
    p.add_term(std::move(m), c);
    return p;
  }

  const RingPtr& ring() const { return ring_; }
  /// Same terms, tagged with another (compatible) ring.
  DiffPoly rebased(RingPtr ring) const {
    DiffPoly p(std::move(ring));
    p.terms_ = terms_;
    return p;
  }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.factors.empty() && !terms_.begin()->first.has_exp()); }

  Rational coefficient(const DiffMonomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void add_term(DiffMonomial m, const Rational& c) {
    if (toda::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(std::move(m), c);
    if (!inserted) {
      it->second += c;
      if (toda::is_zero(it->second)) terms_.erase(it);
    }
  }

  DiffPoly& operator+=(const DiffPoly& o) {
    adopt(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  DiffPoly& operator-=(const DiffPoly& o) {
    adopt(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  DiffPoly& operator*=(const Rational& s) {
    if (toda::is_zero(s)) {
      terms_.clear();
    } else {
      for (auto& [m, c] : terms_) c *= s;
    }
    return *this;
  }
  DiffPoly& operator*=(const DiffPoly& o) { return *this = *this * o; }

  friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
  friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
  friend DiffPoly operator-(DiffPoly a) { return a *= Rational(-1); }
  friend DiffPoly operator*(DiffPoly a, const Rational& s) { return a *= s; }
  friend DiffPoly operator*(const Rational& s, DiffPoly a) { return a *= s; }
  friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly out(common_ring(a, b));
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
    return out;
  }

  friend bool operator==(const DiffPoly& a, const DiffPoly& b) {
    common_ring(a, b);
    return a.terms_ == b.terms_;
  }

  /// The ring both operands live in; a null ring matches anything.
  static RingPtr common_ring(const DiffPoly& a, const DiffPoly& b) {
    if (!a.ring_) return b.ring_;
    if (!b.ring_ || a.ring_ == b.ring_ || *a.ring_ == *b.ring_) return a.ring_;
    throw RingMismatch("operands belong to different differential rings");
  }

  std::set<DiffGen> generators() const {
    std::set<DiffGen> g;
    for (const auto& [m, c] : terms_) {
      for (const auto& [v, p] : m.factors) g.insert(DiffGen::u(v.index, v.order));
      for (std::size_t i = 0; i < m.exps.size(); ++i)
        if (m.exps[i]) g.insert(DiffGen::exp(static_cast<int>(i)));
    }
    return g;
  }

  int max_order() const {
    int mx = -1;
    for (const auto& [m, c] : terms_)
      for (const auto& [v, p] : m.factors) mx = std::max(mx, v.order);
    return mx;
  }
  bool has_order0() const {
    for (const auto& [m, c] : terms_)
      for (const auto& [v, p] : m.factors)
        if (v.order == 0) return true;
    return false;
  }
  bool has_exp() const {
    for (const auto& [m, c] : terms_)
      if (m.has_exp()) return true;
    return false;
  }

 private:
  void adopt(const DiffPoly& o) { ring_ = common_ring(*this, o); }

  RingPtr ring_;
  TermMap terms_;
};

/// ρ_{i,x} = Σ_j a_ij u_j^(1).
inline DiffPoly rho_x(const RingPtr& ring, int i) {
  DiffPoly r(ring);
  for (int j = 0; j < ring->rank; ++j)
    if (ring->cartan[i][j]) r += DiffPoly::var(ring, j, 1) * Rational(ring->cartan[i][j]);
  return r;
}

/// Total x-derivative: ∂u^(n) = u^(n+1), ∂E_i = ρ_{i,x} E_i.
inline DiffPoly dx(const DiffPoly& p) {
  const RingPtr& ring = p.ring();
  DiffPoly out(ring);
  for (const auto& [m, c] : p.terms()) {
    for (const auto& [v, pw] : m.factors) {
      DiffMonomial rest = m.without_one(v);
      DiffMonomial up;
      up.factors.push_back({{v.index, v.order + 1}, 1});
      out.add_term(rest * up, c * pw);
    }
    if (m.has_exp()) {
      if (!ring) throw Error("dx of an exponential generator needs a ring");
      // (Σ_i k_i ρ_{i,x}) E^k with ρ_{i,x} = Σ_j a_ij u_j^(1)
      for (int j = 0; j < ring->rank; ++j) {
        long s = 0;
        for (std::size_t i = 0; i < m.exps.size(); ++i) s += static_cast<long>(m.exps[i]) * ring->cartan[i][j];
        if (!s) continue;
        DiffMonomial ux;
        ux.factors.push_back({{j, 1}, 1});
        out.add_term(m * ux, c * Rational(s));
      }
    }
  }
  return out;
}

inline DiffPoly dx(const DiffPoly& p, int times) {
  DiffPoly q = p;
  for (int k = 0; k < times; ++k) q = dx(q);
  return q;
}

/// Formal partial derivative with respect to one generator; E_i is treated
/// as independent of u_i.
inline DiffPoly partial(const DiffPoly& p, const DiffGen& g) {
  DiffPoly out(p.ring());
  for (const auto& [m, c] : p.terms()) {
    if (g.is_exp) {
      int k = m.exp_of(g.index);
      if (!k) continue;
      DiffMonomial d = m;
      d.exps[g.index] -= 1;
      d.normalize_exps();
      out.add_term(std::move(d), c * k);
    } else {
      int pw = m.power_of(g.var());
      if (!pw) continue;
      out.add_term(m.without_one(g.var()), c * pw);
    }
  }
  return out;
}

inline DiffPoly partial(const DiffPoly& p, const DiffVar& v) { return partial(p, DiffGen::u(v.index, v.order)); }

/// ∂/∂u_j for the order-0 variable, including the chain rule through
/// E_i = e^{ρ_i}: ∂E^k/∂u_j = (Σ_i k_i a_ij) E^k.
inline DiffPoly partial_u0_total(const DiffPoly& p, int j) {
  DiffPoly out = partial(p, DiffVar{j, 0});
  const RingPtr& ring = p.ring();
  for (const auto& [m, c] : p.terms()) {
    if (!m.has_exp()) continue;
    long s = 0;
    for (std::size_t i = 0; i < m.exps.size(); ++i) s += static_cast<long>(m.exps[i]) * ring->cartan[i][j];
    out.add_term(m, c * Rational(s));
  }
  return out;
}

inline std::set<DiffGen> generators(const DiffPoly& p) { return p.generators(); }

/// Replace variables by polynomials; variables without an entry stay.
inline DiffPoly substitute(const DiffPoly& p, const std::map<DiffVar, DiffPoly>& rules) {
  DiffPoly out(p.ring());
  std::map<DiffVar, std::vector<DiffPoly>> powers;  // powers[v][k] = rule(v)^k
  auto power = [&](const DiffVar& v, int k) -> const DiffPoly& {
    auto& pw = powers[v];
    if (pw.empty()) pw.push_back(DiffPoly(p.ring(), Rational(1)));
    while (static_cast<int>(pw.size()) <= k) pw.push_back(pw.back() * rules.at(v));
    return pw[k];
  };
  for (const auto& [m, c] : p.terms()) {
    DiffMonomial kept;
    kept.exps = m.exps;
    std::optional<DiffPoly> prod;
    for (const auto& [v, pw] : m.factors) {
      if (rules.count(v)) {
        prod = prod ? *prod * power(v, pw) : power(v, pw);
      } else {
        kept.factors.push_back({v, pw});
      }
    }
    if (!prod) {
      out.add_term(m, c);
      continue;
    }
    for (const auto& [km, kc] : prod->terms()) out.add_term(kept * km, c * kc);
  }
  return out;
}

/// Common weighted degree Σ order × power of all terms; 0 for the zero
/// polynomial.
inline int weighted_degree(const DiffPoly& p) {
  if (p.has_exp()) throw Unsupported("weighted degree is defined on C[U] only");
  std::optional<int> d;
  for (const auto& [m, c] : p.terms()) {
    int w = m.weight();
    if (d && *d != w) throw NotHomogeneous("terms of weighted degree " + std::to_string(*d) + " and " + std::to_string(w));
    d = w;
  }
  return d.value_or(0);
}

/// B_i^0 = 1, B_i^k = ∂_x B_i^{k-1} + ρ_{i,x} B_i^{k-1}.
inline std::vector<DiffPoly> b_polys(const RingPtr& ring, int i, int kmax) {
  std::vector<DiffPoly> out{DiffPoly(ring, Rational(1))};
  DiffPoly rho = rho_x(ring, i);
  for (int k = 1; k <= kmax; ++k) out.push_back(dx(out.back()) + rho * out.back());
  return out;
}

inline DiffPoly b_poly(const RingPtr& ring, int i, int k) {
  if (k < 0) throw Error("b_poly needs k >= 0");
  return b_polys(ring, i, k).back();
}

inline std::string var_name(const DiffVar& v) {
  std::string s = "u" + std::to_string(v.index + 1);
  if (v.order == 0) return s;
  if (v.order <= 3) return s + "_" + std::string(v.order, 'x');
  return s + "^(" + std::to_string(v.order) + ")";
}

inline std::string monomial_text(const DiffMonomial& m) {
  std::string s;
  for (const auto& [v, p] : m.factors) {
    if (!s.empty()) s += "*";
    s += var_name(v);
    if (p > 1) s += "^" + std::to_string(p);
  }
  for (std::size_t i = 0; i < m.exps.size(); ++i) {
    if (!m.exps[i]) continue;
    if (!s.empty()) s += "*";
    s += "E" + std::to_string(i + 1);
    if (m.exps[i] != 1) s += "^" + std::to_string(m.exps[i]);
  }
  return s;
}

/// "-u2_xxx + 2*u2_xx*u2_x - u1_xx*u2_x"; "0" for the zero polynomial.
inline std::string to_text(const DiffPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    std::string body = monomial_text(m);
    Rational a = abs(c);
    bool neg = sgn(c) < 0;
    if (first) {
      out += neg ? "-" : "";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    if (body.empty()) {
      out += to_string(a);
    } else if (a == 1) {
      out += body;
    } else {
      out += to_string(a) + "*" + body;
    }
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const DiffPoly& p) { return os << to_text(p); }

}  // namespace toda
