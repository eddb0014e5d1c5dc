#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "toda/brackets.hpp"
#include "toda/derivation.hpp"
#include "toda/dsgauge.hpp"
#include "toda/matrix.hpp"
#include "toda/mpoly.hpp"

namespace toda {

using PolyMatrix = Matrix<MPoly>;
/// Vector field on a coordinate space, keyed by coordinate index.
using PolyField = Derivation<MPoly, int>;

// ---------------------------------------------------------------------------
// Unipotent exponential and big-cell factorization, over any scalar domain.

template <class T>
bool is_strictly_lower(const Matrix<T>& x) {
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = i; j < x.cols(); ++j)
      if (!(x(i, j) == T(0))) return false;
  return true;
}

template <class T>
bool is_lower_unitriangular(const Matrix<T>& x) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (!(x(i, i) == T(1))) return false;
    for (std::size_t j = i + 1; j < x.cols(); ++j)
      if (!(x(i, j) == T(0))) return false;
  }
  return true;
}

/// exp(X) = Σ_{k<n} X^k / k! for strictly lower triangular X.
template <class T>
Matrix<T> exp_nilpotent(const Matrix<T>& x) {
  if (!x.square() || !is_strictly_lower(x)) throw Error("exp_nilpotent needs a strictly lower triangular matrix");
  const std::size_t n = x.rows();
  Matrix<T> out = Matrix<T>::identity(n), term = out;
  for (std::size_t k = 1; k < n; ++k) {
    term = term * x;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) term(i, j) = term(i, j) / T(static_cast<int>(k));
    out += term;
  }
  return out;
}

/// log(U) = Σ_{k<n} (-1)^{k+1} (U - 1)^k / k for lower unitriangular U.
template <class T>
Matrix<T> log_unipotent(const Matrix<T>& u) {
  if (!u.square() || !is_lower_unitriangular(u)) throw Error("log_unipotent needs a lower unitriangular matrix");
  const std::size_t n = u.rows();
  Matrix<T> nil = u - Matrix<T>::identity(n), power = nil, out(n, n);
  for (std::size_t k = 1; k < n; ++k) {
    Matrix<T> term = power;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) term(i, j) = term(i, j) / T(static_cast<int>(k));
    if (k % 2 == 1) out += term; else out -= term;
    power = power * nil;
  }
  return out;
}

/// g = n · b with n lower unitriangular and b upper triangular.
template <class T>
struct BigCellFactors {
  Matrix<T> n, b;
};

inline bool pivot_vanishes(const Rational& x, double) { return sgn(x) == 0; }
inline bool pivot_vanishes(double x, double tol) { return !(std::fabs(x) > tol); }
inline bool pivot_vanishes(const MPoly& x, double) { return x.is_zero(); }
template <class T>
bool pivot_vanishes(const Dual<T>& x, double tol) {
  return pivot_vanishes(x.re, tol);
}

/// Doolittle factorization without pivoting. `tol` only matters for
/// floating-point input, where a pivot of magnitude <= tol·max|g| counts as
/// zero. Throws NotInBigCell at the first vanishing leading minor.
template <class T>
BigCellFactors<T> factorize_bigcell(const Matrix<T>& g, double tol = 0.0) {
  if (!g.square()) throw Error("factorize_bigcell needs a square matrix");
  const std::size_t n = g.rows();
  double scale = 0.0;
  if constexpr (std::is_same_v<T, double>)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(g(i, j)));
  BigCellFactors<T> f{Matrix<T>::identity(n), Matrix<T>(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = k; j < n; ++j) {
      T s = g(k, j);
      for (std::size_t m = 0; m < k; ++m) s -= f.n(k, m) * f.b(m, j);
      f.b(k, j) = s;
    }
    if (pivot_vanishes(f.b(k, k), tol * scale))
      throw NotInBigCell("leading principal minor " + std::to_string(k + 1) + " vanishes");
    for (std::size_t i = k + 1; i < n; ++i) {
      T s = g(i, k);
      for (std::size_t m = 0; m < k; ++m) s -= f.n(i, m) * f.b(m, k);
      f.n(i, k) = s / f.b(k, k);
    }
  }
  return f;
}

/// Inverse of a lower unitriangular matrix by the finite Neumann series.
template <class T>
Matrix<T> unipotent_inverse(const Matrix<T>& u) {
  const std::size_t n = u.rows();
  Matrix<T> nil = Matrix<T>::identity(n) - u, out = Matrix<T>::identity(n), power = out;
  for (std::size_t k = 1; k < n; ++k) {
    power = power * nil;
    out += power;
  }
  return out;
}

template <class T>
Matrix<T> strictly_lower_part(const Matrix<T>& x) {
  Matrix<T> out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < i && j < x.cols(); ++j) out(i, j) = x(i, j);
  return out;
}

/// Elementary matrix E_{ij} (0-based) of size n.
template <class T>
Matrix<T> unit_matrix(std::size_t n, std::size_t i, std::size_t j) {
  Matrix<T> m(n, n);
  m(i, j) = T(1);
  return m;
}

/// Principal nilpotent e = Σ E_{i,i+1}.
template <class T>
Matrix<T> principal_e(std::size_t n) {
  Matrix<T> m(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) m(i, i + 1) = T(1);
  return m;
}

// ---------------------------------------------------------------------------
// Coordinates on N₋ for A_ℓ.

/// Coordinate c is the entry of K attached to positive root c: the root
/// α_i + … + α_j sits at row j+1, column i.
struct BigCell {
  int rank = 0;
  int n = 0;  ///< matrix size ℓ+1
  RootSystemData roots;
  std::vector<std::pair<int, int>> entry;
  std::vector<std::vector<int>> coord;  ///< coord[row][col], -1 off the strict lower part
  std::vector<std::string> symbols;
  PolyMatrix k;  ///< generic element of N₋

  int num_coords() const { return static_cast<int>(entry.size()); }
  /// H₀-degree (root height) of each coordinate.
  std::vector<int> heights() const {
    std::vector<int> h;
    for (const auto& [r, c] : entry) h.push_back(r - c);
    return h;
  }
};

inline BigCell make_bigcell(int rank) {
  if (rank < 1) throw InvalidCartanType("type A needs rank >= 1");
  BigCell bc;
  bc.rank = rank;
  bc.n = rank + 1;
  bc.roots = build_root_system(CartanType::A, rank);
  bc.coord.assign(bc.n, std::vector<int>(bc.n, -1));
  for (const Root& r : bc.roots.positive_roots) {
    int i = 0;
    while (r[i] == 0) ++i;
    int j = i;
    while (j + 1 < rank && r[j + 1] != 0) ++j;
    bc.coord[j + 1][i] = static_cast<int>(bc.entry.size());
    bc.entry.emplace_back(j + 1, i);
    bc.symbols.push_back("v" + std::to_string(bc.entry.size()));
  }
  bc.k = PolyMatrix::identity(bc.n);
  for (int c = 0; c < bc.num_coords(); ++c) bc.k(bc.entry[c].first, bc.entry[c].second) = MPoly::var(c);
  return bc;
}

/// Field whose value on coordinate c is the matching entry of m.
inline PolyField field_from_matrix(const BigCell& bc, const PolyMatrix& m) {
  PolyField f{MPoly()};
  for (int c = 0; c < bc.num_coords(); ++c) f.set(c, m(bc.entry[c].first, bc.entry[c].second));
  return f;
}

inline PolyMatrix field_matrix(const BigCell& bc, const PolyField& f) {
  PolyMatrix m(bc.n, bc.n);
  for (int c = 0; c < bc.num_coords(); ++c) m(bc.entry[c].first, bc.entry[c].second) = f.get(c);
  return m;
}

/// Infinitesimal left action 𝓛_a f(K) = d/dt f(exp(-ta)·K): the matrix of
/// components is -K (K⁻¹ a K)₋.
inline PolyField left_action_field(const BigCell& bc, const RationalMatrix& a) {
  PolyMatrix am = a.map([](const Rational& x) { return MPoly(x); });
  PolyMatrix kin = unipotent_inverse(bc.k);
  return field_from_matrix(bc, -(bc.k * strictly_lower_part(kin * am * bc.k)));
}

inline PolyField le_field(const BigCell& bc) { return left_action_field(bc, principal_e<Rational>(bc.n)); }

/// H₀ = ρ^∨ = diag(ℓ/2, ℓ/2 - 1, …, -ℓ/2).
inline RationalMatrix principal_h0(int n) {
  RationalMatrix h(n, n);
  for (int i = 0; i < n; ++i) h(i, i) = make_rational(n - 1 - 2 * i, 2);
  return h;
}

inline PolyField h0_field(const BigCell& bc) { return left_action_field(bc, principal_h0(bc.n)); }

/// Infinitesimal right multiplication by a strictly lower constant x: K·x.
inline PolyField right_multiplication_field(const BigCell& bc, const RationalMatrix& x) {
  PolyMatrix xm = x.map([](const Rational& v) { return MPoly(v); });
  return field_from_matrix(bc, bc.k * xm);
}

/// e^R_{-α_j}: right multiplication by E_{j+1,j}.
inline PolyField right_field(const BigCell& bc, int j) {
  return right_multiplication_field(bc, unit_matrix<Rational>(bc.n, j + 1, j));
}

/// Fundamental coweight ω_i as a traceless diagonal matrix: α_j(ω_i) = δ_ij.
inline RationalMatrix fundamental_coweight(int n, int i) {
  RationalMatrix w(n, n);
  for (int r = 0; r < n; ++r) w(r, r) = r <= i ? make_rational(n - 1 - i, n) : make_rational(-(i + 1), n);
  return w;
}

/// Trace form, under which (e_{-α}, e_α) = 1 = 2/(α,α).
template <class T>
T trace_form(const Matrix<T>& a, const Matrix<T>& b) {
  T s(0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * b(j, i);
  return s;
}

/// v_i = (ω_i, K⁻¹ e K).
inline std::vector<MPoly> v_coordinates(const BigCell& bc) {
  PolyMatrix kin = unipotent_inverse(bc.k);
  PolyMatrix x = kin * principal_e<MPoly>(bc.n) * bc.k;
  std::vector<MPoly> v;
  for (int i = 0; i < bc.rank; ++i) {
    PolyMatrix w = fundamental_coweight(bc.n, i).map([](const Rational& c) { return MPoly(c); });
    v.push_back(trace_form(w, x));
  }
  return v;
}

/// The substitution u_i^(k) ↦ v_i^(k-1) = 𝓛_e^{k-1} v_i, with a lazy cache of
/// iterated derivatives.
class PhiMap {
 public:
  explicit PhiMap(const BigCell& bc) : bc_(&bc), le_(le_field(bc)) {
    for (const auto& v : v_coordinates(bc)) cache_.push_back({v});
  }

  const PolyField& le() const { return le_; }

  /// v_i^(n)
  const MPoly& v(int i, int n) {
    auto& c = cache_.at(i);
    while (static_cast<int>(c.size()) <= n) c.push_back(le_(c.back()));
    return c[n];
  }

  MPoly operator()(const DiffPoly& p) {
    MPoly out;
    for (const auto& [m, coef] : p.terms()) {
      if (m.has_exp()) throw Unsupported("exponential generators have no image on N-");
      MPoly term(coef);
      for (const auto& [var, pw] : m.factors) {
        if (var.order == 0) throw Unsupported("order-0 variables have no image on N-");
        const MPoly& img = v(var.index, var.order - 1);
        for (int k = 0; k < pw; ++k) term = term * img;
      }
      out += term;
    }
    return out;
  }

 private:
  const BigCell* bc_;
  PolyField le_;
  std::vector<std::vector<MPoly>> cache_;
};

// ---------------------------------------------------------------------------
// Identity checks. Each returns a report instead of throwing so callers can
// aggregate them.

struct CheckReport {
  bool ok = true;
  std::vector<std::string> failures;

  void fail(std::string what) {
    ok = false;
    failures.push_back(std::move(what));
  }
  void merge(const CheckReport& o) {
    if (!o.ok) ok = false;
    failures.insert(failures.end(), o.failures.begin(), o.failures.end());
  }
};

inline std::string field_text(const PolyField& f, const std::vector<std::string>& names) {
  std::string out;
  for (const auto& [k, v] : f.values()) {
    if (!out.empty()) out += " + ";
    out += "(" + v.to_text(names) + ")*d/d" + names.at(k);
  }
  return out.empty() ? "0" : out;
}

/// φ(I_j) = 0 for the integrals of A_rank.
inline CheckReport phi_kills_integrals(const BigCell& bc, const GaugeResult& res) {
  CheckReport rep;
  PhiMap phi(bc);
  for (std::size_t j = 0; j < res.integrals.size(); ++j) {
    MPoly r = phi(res.integrals[j]);
    if (!r.is_zero()) rep.fail("phi(I" + std::to_string(j + 1) + ") = " + r.to_text(bc.symbols));
  }
  return rep;
}

/// [𝓛_e, e^R_{-α_j}] = -(Σ_m a_jm v_m) e^R_{-α_j}.
inline CheckReport kostant_bracket_check(const BigCell& bc) {
  CheckReport rep;
  PolyField le = le_field(bc);
  auto v = v_coordinates(bc);
  const IntMatrix& a = bc.roots.cartan_matrix;
  for (int j = 0; j < bc.rank; ++j) {
    PolyField er = right_field(bc, j);
    MPoly c;
    for (int m = 0; m < bc.rank; ++m) c += MPoly(a[j][m]) * v[m];
    PolyField residual = bracket(le, er) + c * er;
    if (!residual.is_zero()) rep.fail("Kostant bracket j=" + std::to_string(j + 1) + ": " + field_text(residual, bc.symbols));
  }
  return rep;
}

/// Right fields e^R_{-β} along the root chains, with the bracket table
/// compared to the Chevalley constants.
inline CheckReport right_field_table_check(const BigCell& bc, std::vector<PolyField>* out = nullptr) {
  CheckReport rep;
  auto alg = chevalley_constants(bc.roots);
  auto ch = root_chains(bc.roots);
  std::vector<PolyField> gen;
  for (int j = 0; j < bc.rank; ++j) gen.push_back(right_field(bc, j));
  auto br = [](const PolyField& x, const PolyField& y) { return bracket(x, y); };
  auto w = iterated_fields(gen, ch, br);
  auto t = check_bracket_table(
      w, bc.roots, negative_kappa(*alg, ch), br, [](const PolyField& x, const Rational& k) { return MPoly(k) * x; },
      [](const PolyField& x) { return x.is_zero(); });
  for (const auto& m : t.mismatches) rep.fail("right-field bracket " + m);
  if (out) *out = std::move(w);
  return rep;
}

/// Rank of the component matrix of `fields` at a point.
inline std::size_t rank_at(const std::vector<PolyField>& fields, int num_coords, const std::vector<Rational>& point) {
  RationalMatrix m(fields.size(), num_coords);
  for (std::size_t r = 0; r < fields.size(); ++r)
    for (int c = 0; c < num_coords; ++c) m(r, c) = evaluate(fields[r].get(c), point);
  return rank(m);
}

/// Compares the quotient of the jet system with the fields on N₋:
/// φ∘Ṽ_j = e^R_{-α_j}∘φ on every generator, and φ maps generators to
/// functions with independent differentials at a sample point.
inline CheckReport tilde_v_identification(const BigCell& bc, const NormalFormTable& t, PhiMap& phi) {
  CheckReport rep;
  for (int j = 0; j < bc.rank; ++j) {
    GenDerivation vt = tilde_v_field(j, t);
    PolyField er = right_field(bc, j);
    for (const auto& g : t.generators) {
      DiffPoly x = DiffPoly::var(t.ring, g.index, g.order);
      MPoly lhs = phi(vt(x)), rhs = er(phi(x));
      if (!(lhs == rhs)) rep.fail("Vtilde" + std::to_string(j + 1) + " vs e^R on " + var_name(g));
    }
  }
  if (static_cast<int>(t.generators.size()) != bc.num_coords()) {
    rep.fail("generator count differs from dim N-");
    return rep;
  }
  // Jacobian of the generator images: invertible is what makes φ a chart.
  RationalMatrix jac(bc.num_coords(), bc.num_coords());
  std::vector<Rational> point;
  for (int c = 0; c < bc.num_coords(); ++c) point.push_back(make_rational(2 * c + 3, 7));
  for (std::size_t r = 0; r < t.generators.size(); ++r) {
    MPoly img = phi(DiffPoly::var(t.ring, t.generators[r].index, t.generators[r].order));
    for (int c = 0; c < bc.num_coords(); ++c) jac(r, c) = evaluate(partial(img, c), point);
  }
  if (rank(jac) != t.generators.size()) rep.fail("phi on generators is degenerate");
  return rep;
}

/// Fields of the barred system on coordinates (v_1..v_N, φ_1..φ_ℓ):
/// Ȳ = Σ φ_i e^R_{-α_i}, Ū_i = φ_i ∂/∂φ_i, V̄_j = [Ȳ, Ū_j]. The ∂/∂y part
/// of Ȳ commutes with all of them and is left out.
struct BarFields {
  int num_coords = 0;
  std::vector<std::string> symbols;
  PolyField y;
  std::vector<PolyField> u, v;
};

inline BarFields bar_fields(const BigCell& bc) {
  BarFields b;
  const int n = bc.num_coords();
  b.num_coords = n + bc.rank;
  b.symbols = bc.symbols;
  for (int i = 0; i < bc.rank; ++i) b.symbols.push_back("phi" + std::to_string(i + 1));
  b.y = PolyField{MPoly()};
  for (int i = 0; i < bc.rank; ++i) b.y = b.y + MPoly::var(n + i) * right_field(bc, i);
  for (int i = 0; i < bc.rank; ++i) {
    PolyField ui{MPoly()};
    ui.set(n + i, MPoly::var(n + i));
    b.u.push_back(ui);
  }
  for (int j = 0; j < bc.rank; ++j) b.v.push_back(bracket(b.y, b.u[j]));
  return b;
}

inline CheckReport bar_relations_check(const BigCell& bc) {
  CheckReport rep;
  BarFields b = bar_fields(bc);
  const int n = bc.num_coords();
  for (int j = 0; j < bc.rank; ++j) {
    if (!(b.v[j] == -MPoly::var(n + j) * right_field(bc, j))) rep.fail("Vbar" + std::to_string(j + 1) + " != -phi e^R");
    for (int i = 0; i < bc.rank; ++i) {
      PolyField expect = i == j ? b.v[j] : PolyField{MPoly()};
      if (!(bracket(b.u[i], b.v[j]) == expect))
        rep.fail("[Ubar" + std::to_string(i + 1) + ", Vbar" + std::to_string(j + 1) + "]");
    }
    // [V̄_i, V̄_j] = φ_i φ_j [e^R_i, e^R_j], the image of [V_i, V_j] = E_i E_j [Ṽ_i, Ṽ_j].
    for (int i = 0; i < bc.rank; ++i) {
      MPoly pp = MPoly::var(n + i) * MPoly::var(n + j);
      if (!(bracket(b.v[i], b.v[j]) == pp * bracket(right_field(bc, i), right_field(bc, j))))
        rep.fail("[Vbar" + std::to_string(i + 1) + ", Vbar" + std::to_string(j + 1) + "]");
    }
  }
  // Iterated V̄ brackets span a space of dimension dim n₋ at a generic point.
  auto ch = root_chains(bc.roots);
  auto w = iterated_fields(b.v, ch, [](const PolyField& x, const PolyField& y) { return bracket(x, y); });
  std::vector<Rational> point;
  for (int c = 0; c < b.num_coords; ++c) point.push_back(make_rational(c + 2, 3 + (c % 4)));
  if (rank_at(w, b.num_coords, point) != static_cast<std::size_t>(n)) rep.fail("iterated Vbar fields are dependent");
  return rep;
}

/// Full comparison of the jet system with its image on N₋.
inline CheckReport jet_system_isomorphism_check(const BigCell& bc, const GaugeResult& res, const KostantSliceData& s) {
  CheckReport rep;
  NormalFormTable t = build_normal_form_table(res, s);
  PhiMap phi(bc);
  rep.merge(tilde_v_identification(bc, t, phi));
  rep.merge(right_field_table_check(bc));
  rep.merge(bar_relations_check(bc));
  return rep;
}

/// 𝓛_e at a rational point by differentiating the left action: factorize
/// (1 - εe)·K₀ over dual numbers; the ε part of the N₋ factor is 𝓛_e K.
inline std::vector<Rational> le_by_action(const BigCell& bc, const std::vector<Rational>& point) {
  using D = Dual<Rational>;
  Matrix<D> k0 = Matrix<D>::identity(bc.n);
  for (int c = 0; c < bc.num_coords(); ++c) k0(bc.entry[c].first, bc.entry[c].second) = D(point[c]);
  Matrix<D> g = Matrix<D>::identity(bc.n);
  for (int i = 0; i + 1 < bc.n; ++i) g(i, i + 1) = D(Rational(0), Rational(-1));
  auto f = factorize_bigcell(g * k0);
  std::vector<Rational> out;
  for (int c = 0; c < bc.num_coords(); ++c) out.push_back(f.n(bc.entry[c].first, bc.entry[c].second).eps);
  return out;
}

// ---------------------------------------------------------------------------
// Second-kind chart M = exp(a_1) ⋯ exp(a_ℓ) with a_k ∈ n₋ of height k.

enum class ChartStyle { MatrixEntries, SecondKind };

/// Coordinates t_c (root order) ↦ matrix entries of ∏_k exp(Σ_{ht c = k} t_c E_c).
inline std::vector<MPoly> second_kind_to_matrix(const BigCell& bc, const std::vector<MPoly>& t) {
  PolyMatrix m = PolyMatrix::identity(bc.n);
  auto h = bc.heights();
  for (int k = 1; k <= bc.rank; ++k) {
    PolyMatrix a(bc.n, bc.n);
    for (int c = 0; c < bc.num_coords(); ++c)
      if (h[c] == k) a(bc.entry[c].first, bc.entry[c].second) = t.at(c);
    m = m * exp_nilpotent(a);
  }
  std::vector<MPoly> out;
  for (const auto& [r, c] : bc.entry) out.push_back(m(r, c));
  return out;
}

/// Inverse of second_kind_to_matrix: peel off one height at a time.
inline std::vector<MPoly> matrix_to_second_kind(const BigCell& bc, const std::vector<MPoly>& entries) {
  PolyMatrix m = PolyMatrix::identity(bc.n);
  for (int c = 0; c < bc.num_coords(); ++c) m(bc.entry[c].first, bc.entry[c].second) = entries.at(c);
  auto h = bc.heights();
  std::vector<MPoly> t(bc.num_coords());
  for (int k = 1; k <= bc.rank; ++k) {
    PolyMatrix a(bc.n, bc.n);
    for (int c = 0; c < bc.num_coords(); ++c)
      if (h[c] == k) {
        t[c] = m(bc.entry[c].first, bc.entry[c].second);
        a(bc.entry[c].first, bc.entry[c].second) = t[c];
      }
    m = exp_nilpotent(-a) * m;
  }
  return t;
}

inline std::vector<MPoly> convert_chart(const BigCell& bc, const std::vector<MPoly>& x, ChartStyle from, ChartStyle to) {
  if (from == to) return x;
  return from == ChartStyle::SecondKind ? second_kind_to_matrix(bc, x) : matrix_to_second_kind(bc, x);
}

}  // namespace toda
