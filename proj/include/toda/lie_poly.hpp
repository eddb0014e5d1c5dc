#pragma once

#include <climits>
#include <map>
#include <vector>

#include "toda/diffring.hpp"
#include "toda/rootsys.hpp"

namespace toda {

/// Element of g ⊗ C[U]: basis index → nonzero coefficient.
class LieValuedPoly {
 public:
  LieValuedPoly() = default;
  explicit LieValuedPoly(RingPtr ring) : ring_(std::move(ring)) {}

  /// Constant element with rational coordinates.
  static LieValuedPoly constant(RingPtr ring, const LieVec& v) {
    LieValuedPoly x(ring);
    for (std::size_t b = 0; b < v.size(); ++b)
      if (!toda::is_zero(v[b])) x.add(static_cast<int>(b), DiffPoly(ring, v[b]));
    return x;
  }

  const RingPtr& ring() const { return ring_; }
  const std::map<int, DiffPoly>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  const DiffPoly& at(int b) const {
    static const DiffPoly zero;
    auto it = coeffs_.find(b);
    return it == coeffs_.end() ? zero : it->second;
  }

  void add(int b, const DiffPoly& p) {
    if (p.is_zero()) return;
    auto it = coeffs_.find(b);
    if (it == coeffs_.end()) {
      coeffs_.emplace(b, p);
      return;
    }
    it->second += p;
    if (it->second.is_zero()) coeffs_.erase(it);
  }

  LieValuedPoly& operator+=(const LieValuedPoly& o) {
    for (const auto& [b, p] : o.coeffs_) add(b, p);
    return *this;
  }
  LieValuedPoly& operator-=(const LieValuedPoly& o) {
    for (const auto& [b, p] : o.coeffs_) add(b, -p);
    return *this;
  }
  LieValuedPoly& operator*=(const Rational& s) {
    if (toda::is_zero(s)) coeffs_.clear();
    for (auto& [b, p] : coeffs_) p *= s;
    return *this;
  }
  friend LieValuedPoly operator+(LieValuedPoly a, const LieValuedPoly& b) { return a += b; }
  friend LieValuedPoly operator-(LieValuedPoly a, const LieValuedPoly& b) { return a -= b; }
  friend LieValuedPoly operator*(LieValuedPoly a, const Rational& s) { return a *= s; }
  friend bool operator==(const LieValuedPoly& a, const LieValuedPoly& b) { return a.coeffs_ == b.coeffs_; }

  /// Components of grading degree exactly d.
  LieValuedPoly component(const ChevalleyAlgebra& g, int d) const {
    LieValuedPoly out(ring_);
    for (const auto& [b, p] : coeffs_)
      if (g.degree(b) == d) out.coeffs_.emplace(b, p);
    return out;
  }

  /// Drop components of degree below min_degree.
  void truncate(const ChevalleyAlgebra& g, int min_degree) {
    for (auto it = coeffs_.begin(); it != coeffs_.end();)
      it = g.degree(it->first) < min_degree ? coeffs_.erase(it) : std::next(it);
  }

  LieValuedPoly dx() const {
    LieValuedPoly out(ring_);
    for (const auto& [b, p] : coeffs_) out.add(b, toda::dx(p));
    return out;
  }

 private:
  RingPtr ring_;
  std::map<int, DiffPoly> coeffs_;
};

/// [x, y] truncated to components of degree >= min_degree. `reversed`
/// iterates the inputs in the opposite basis order.
inline LieValuedPoly lie_bracket(const ChevalleyAlgebra& g, const LieValuedPoly& x, const LieValuedPoly& y,
                                 int min_degree = INT_MIN, bool reversed = false) {
  LieValuedPoly out(DiffPoly::common_ring(DiffPoly(x.ring()), DiffPoly(y.ring())));
  auto body = [&](int a, const DiffPoly& pa, int b, const DiffPoly& pb) {
    if (g.degree(a) + g.degree(b) < min_degree) return;
    const auto& terms = g.bracket(a, b);
    if (terms.empty()) return;
    DiffPoly prod = pa * pb;
    for (const auto& t : terms) out.add(t.index, prod * Rational(t.coeff));
  };
  if (!reversed) {
    for (const auto& [a, pa] : x.coeffs())
      for (const auto& [b, pb] : y.coeffs()) body(a, pa, b, pb);
  } else {
    for (auto ia = x.coeffs().rbegin(); ia != x.coeffs().rend(); ++ia)
      for (auto ib = y.coeffs().rbegin(); ib != y.coeffs().rend(); ++ib) body(ia->first, ia->second, ib->first, ib->second);
  }
  return out;
}

}  // namespace toda
