#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "toda/errors.hpp"
#include "toda/rational.hpp"

namespace toda {

/// Exponent vector with trailing zeros removed, so a constant is the empty
/// vector and polynomials in different numbers of variables mix freely.
using Exponents = std::vector<int>;

/// Total degree descending, then lexicographically descending (v1 before v2).
struct ExponentOrder {
  bool operator()(const Exponents& a, const Exponents& b) const {
    int da = 0, db = 0;
    for (int e : a) da += e;
    for (int e : b) db += e;
    if (da != db) return da > db;
    const std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      int x = i < a.size() ? a[i] : 0, y = i < b.size() ? b[i] : 0;
      if (x != y) return x > y;
    }
    return false;
  }
};

/// Multivariate polynomial with rational coefficients.
class MPoly {
 public:
  using Terms = std::map<Exponents, Rational, ExponentOrder>;

  MPoly() = default;
  MPoly(int c) : MPoly(Rational(c)) {}  // NOLINT: matrices need T(0), T(1)
  MPoly(const Rational& c) {            // NOLINT
    if (sgn(c) != 0) terms_.emplace(Exponents{}, c);
  }

  static MPoly var(int i, int power = 1) {
    MPoly p;
    if (power == 0) return MPoly(1);
    Exponents e(i + 1, 0);
    e[i] = power;
    p.terms_.emplace(std::move(e), Rational(1));
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }
  Rational constant_term() const {
    auto it = terms_.find(Exponents{});
    return it == terms_.end() ? Rational(0) : it->second;
  }
  std::size_t size() const { return terms_.size(); }
  int num_vars() const {
    int n = 0;
    for (const auto& [e, c] : terms_) n = std::max(n, static_cast<int>(e.size()));
    return n;
  }

  void add_term(Exponents e, const Rational& c) {
    while (!e.empty() && e.back() == 0) e.pop_back();
    if (sgn(c) == 0) return;
    auto [it, fresh] = terms_.emplace(std::move(e), c);
    if (!fresh) {
      it->second += c;
      if (sgn(it->second) == 0) terms_.erase(it);
    }
  }

  MPoly& operator+=(const MPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  MPoly& operator-=(const MPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  MPoly& operator*=(const MPoly& o) { return *this = *this * o; }
  MPoly& operator/=(const MPoly& o) { return *this = *this / o; }

  friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
  friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
  friend MPoly operator-(MPoly a) {
    for (auto& [e, c] : a.terms_) c = -c;
    return a;
  }
  friend MPoly operator*(const MPoly& a, const MPoly& b) {
    MPoly out;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(std::max(ea.size(), eb.size()), 0);
        for (std::size_t i = 0; i < ea.size(); ++i) e[i] += ea[i];
        for (std::size_t i = 0; i < eb.size(); ++i) e[i] += eb[i];
        out.add_term(std::move(e), ca * cb);
      }
    return out;
  }
  /// Division is defined only by nonzero constants: the ring is not a field.
  friend MPoly operator/(MPoly a, const MPoly& b) {
    if (!b.is_constant() || b.is_zero()) throw Unsupported("polynomial division by a non-constant");
    const Rational c = b.constant_term();
    for (auto& [e, v] : a.terms_) v /= c;
    return a;
  }
  friend bool operator==(const MPoly& a, const MPoly& b) { return a.terms_ == b.terms_; }

  std::string to_text(const std::vector<std::string>& names) const;

 private:
  Terms terms_;
};

inline MPoly partial(const MPoly& p, int k) {
  MPoly out;
  for (const auto& [e, c] : p.terms()) {
    if (k >= static_cast<int>(e.size()) || e[k] == 0) continue;
    Exponents d = e;
    d[k] -= 1;
    out.add_term(std::move(d), c * e[k]);
  }
  return out;
}

inline std::set<int> generators(const MPoly& p) {
  std::set<int> out;
  for (const auto& [e, c] : p.terms())
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] != 0) out.insert(static_cast<int>(i));
  return out;
}

/// Evaluation at a point over any commutative ring S constructible from a
/// Rational via `lift`.
template <class S, class Lift>
S evaluate(const MPoly& p, const std::vector<S>& x, Lift&& lift) {
  S out = lift(Rational(0));
  for (const auto& [e, c] : p.terms()) {
    S m = lift(c);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (i >= x.size()) throw Error("evaluation point has too few coordinates");
      for (int k = 0; k < e[i]; ++k) m = m * x[i];
    }
    out = out + m;
  }
  return out;
}

inline Rational evaluate(const MPoly& p, const std::vector<Rational>& x) {
  return evaluate(p, x, [](const Rational& c) { return c; });
}
inline double evaluate(const MPoly& p, const std::vector<double>& x) {
  return evaluate(p, x, [](const Rational& c) { return c.get_d(); });
}

/// Substitute polynomials for variables.
inline MPoly compose(const MPoly& p, const std::vector<MPoly>& x) {
  return evaluate(p, x, [](const Rational& c) { return MPoly(c); });
}

/// Degree with variable k weighted by w[k]; throws when p mixes degrees.
inline int weighted_degree(const MPoly& p, const std::vector<int>& w) {
  int deg = -1;
  for (const auto& [e, c] : p.terms()) {
    int d = 0;
    for (std::size_t i = 0; i < e.size(); ++i) d += e[i] * w.at(i);
    if (deg >= 0 && d != deg) throw NotHomogeneous("polynomial is not homogeneous");
    deg = d;
  }
  return deg < 0 ? 0 : deg;
}

inline std::string MPoly::to_text(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    Rational a = abs(c);
    if (first) {
      if (sgn(c) < 0) os << "-";
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
    }
    first = false;
    bool need_star = false;
    if (e.empty() || a != 1) {
      os << a.get_str();
      need_star = true;
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (need_star) os << "*";
      os << (i < names.size() ? names[i] : "x" + std::to_string(i + 1));
      if (e[i] > 1) os << "^" << e[i];
      need_star = true;
    }
  }
  return os.str();
}

/// a + b ε with ε² = 0: exact first-order perturbation.
template <class T>
struct Dual {
  T re{}, eps{};
  Dual() = default;
  Dual(int c) : re(c), eps(0) {}  // NOLINT
  Dual(T r, T e = T(0)) : re(std::move(r)), eps(std::move(e)) {}

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.re + b.re, a.eps + b.eps}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.re - b.re, a.eps - b.eps}; }
  friend Dual operator-(const Dual& a) { return {-a.re, -a.eps}; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.re * b.re, a.re * b.eps + a.eps * b.re}; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    return {a.re / b.re, (a.eps * b.re - a.re * b.eps) / (b.re * b.re)};
  }
  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  friend bool operator==(const Dual& a, const Dual& b) { return a.re == b.re && a.eps == b.eps; }
};

}  // namespace toda
