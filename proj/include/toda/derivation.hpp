#pragma once

#include <map>
#include <set>
#include <utility>

namespace toda {

/// Derivation of a polynomial ring, stored by its values on generators.
/// Poly must provide `partial(p, key)` and `generators(p)` (found by ADL).
/// Generators without an entry are mapped to zero.
template <class Poly, class Key>
class Derivation {
 public:
  Derivation() = default;
  explicit Derivation(Poly zero) : zero_(std::move(zero)) {}

  void set(const Key& k, Poly v) {
    if (v.is_zero()) {
      values_.erase(k);
    } else {
      values_.insert_or_assign(k, std::move(v));
    }
  }
  const Poly& get(const Key& k) const {
    auto it = values_.find(k);
    return it == values_.end() ? zero_ : it->second;
  }
  const std::map<Key, Poly>& values() const { return values_; }
  const Poly& zero() const { return zero_; }
  bool is_zero() const { return values_.empty(); }

  /// D(p) = Σ_k ∂p/∂k · D(k)
  Poly operator()(const Poly& p) const {
    Poly out = zero_;
    for (const auto& k : generators(p)) {
      auto it = values_.find(k);
      if (it == values_.end()) continue;
      out += partial(p, k) * it->second;
    }
    return out;
  }

  /// Commutator [A, B] = A∘B - B∘A, evaluated on the union of both supports.
  friend Derivation bracket(const Derivation& a, const Derivation& b) {
    Derivation out(a.zero_);
    std::set<Key> keys;
    for (const auto& [k, v] : a.values_) keys.insert(k);
    for (const auto& [k, v] : b.values_) keys.insert(k);
    for (const auto& k : keys) out.set(k, a(b.get(k)) - b(a.get(k)));
    return out;
  }

  friend Derivation operator+(Derivation a, const Derivation& b) {
    for (const auto& [k, v] : b.values_) a.set(k, a.get(k) + v);
    return a;
  }
  friend Derivation operator-(Derivation a, const Derivation& b) {
    for (const auto& [k, v] : b.values_) a.set(k, a.get(k) - v);
    return a;
  }
  /// Multiplication by a ring element: (fD)(p) = f · D(p).
  friend Derivation operator*(const Poly& f, const Derivation& d) {
    Derivation out(d.zero_);
    for (const auto& [k, v] : d.values_) out.set(k, f * v);
    return out;
  }
  friend bool operator==(const Derivation& a, const Derivation& b) {
    for (const auto& [k, v] : a.values_)
      if (!(b.get(k) == v)) return false;
    for (const auto& [k, v] : b.values_)
      if (!(a.get(k) == v)) return false;
    return true;
  }

 private:
  Poly zero_{};
  std::map<Key, Poly> values_;
};

}  // namespace toda
