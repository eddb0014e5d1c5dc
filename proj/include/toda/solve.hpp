#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "toda/bigcell.hpp"
#include "toda/expr.hpp"
#include "toda/matrix.hpp"
#include "toda/rootsys.hpp"

namespace toda {

enum class CurveSide { X, Y };

/// One integral curve of the standard system. The y-side curve Φ(y) ∈ N₋
/// solves Φ' = Φ·Σ φ_i(y) E_{i+1,i}; the x-side curve Ψ(x) ∈ N₊ solves
/// Ψ' = Σ ψ_i(x) E_{i,i+1}·Ψ. `initial` is the value at t0 (identity when empty).
struct CurveSpec {
  int rank = 1;
  CurveSide side = CurveSide::Y;
  std::vector<MPoly> funcs;
  double t0 = 0.0, t1 = 1.0;
  RealMatrix initial;
};

inline RealMatrix curve_velocity(const CurveSpec& s, double t) {
  const int n = s.rank + 1;
  RealMatrix a(n, n);
  for (int i = 0; i < s.rank; ++i) {
    double f = eval_univariate(s.funcs[i], t);
    if (s.side == CurveSide::Y) a(i + 1, i) = f; else a(i, i + 1) = f;
  }
  return a;
}

/// Throws DomainError unless every component function keeps one strict sign
/// on [t0, t1] (sampled at 1001 points).
inline void check_nonvanishing(const CurveSpec& s) {
  if (static_cast<int>(s.funcs.size()) != s.rank) throw Error("curve needs one function per simple root");
  for (int i = 0; i < s.rank; ++i) {
    int sign = 0;
    for (int k = 0; k <= 1000; ++k) {
      double t = s.t0 + (s.t1 - s.t0) * k / 1000.0;
      double f = eval_univariate(s.funcs[i], t);
      int sg = f > 0 ? 1 : (f < 0 ? -1 : 0);
      if (sg == 0 || (sign != 0 && sg != sign))
        throw DomainError("component " + std::to_string(i + 1) + " vanishes or changes sign near t = " + std::to_string(t));
      sign = sg;
    }
  }
}

/// Exact projection onto N₋ (Y side) or N₊ (X side).
inline void project_unitriangular(RealMatrix& m, CurveSide side) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (i == j) m(i, j) = 1.0;
      else if ((side == CurveSide::Y) == (j > i)) m(i, j) = 0.0;
    }
}

/// Fixed-step classical RK4; returns the curve at each requested parameter
/// (nondecreasing, all >= t0). Each gap is split into ceil(gap/h) equal steps.
inline std::vector<RealMatrix> integrate_curve(const CurveSpec& s, const std::vector<double>& samples, double h = 1e-3) {
  if (!(h > 0)) throw Error("step must be positive");
  const int n = s.rank + 1;
  RealMatrix m = s.initial.rows() ? s.initial : RealMatrix::identity(n);
  auto rhs = [&](double t, const RealMatrix& x) {
    RealMatrix a = curve_velocity(s, t);
    return s.side == CurveSide::Y ? x * a : a * x;
  };
  std::vector<RealMatrix> out;
  double t = s.t0;
  for (double target : samples) {
    if (target < t - 1e-15) throw Error("curve samples must be nondecreasing from t0");
    const double gap = target - t;
    const long steps = gap > 0 ? static_cast<long>(std::ceil(gap / h - 1e-9)) : 0;
    const double dt = steps ? gap / steps : 0.0;
    const double start = t;
    for (long k = 0; k < steps; ++k) {
      RealMatrix k1 = rhs(t, m);
      RealMatrix k2 = rhs(t + dt / 2, m + k1 * (dt / 2));
      RealMatrix k3 = rhs(t + dt / 2, m + k2 * (dt / 2));
      RealMatrix k4 = rhs(t + dt, m + k3 * dt);
      m += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6);
      project_unitriangular(m, s.side);
      t = start + dt * (k + 1);
    }
    t = target;
    out.push_back(m);
  }
  return out;
}

/// ξ_i = ⟨i|Ψ Φ|i⟩, the i-th leading principal minor (i = 0 gives 1).
template <class T>
T xi_minor(const Matrix<T>& psi, const Matrix<T>& phi, int i) {
  return leading_minor(psi * phi, static_cast<std::size_t>(i));
}

/// The 2×2 determinant of highest-weight pairings in Λ^i (1-based i):
/// rows/columns {1..i} and {1..i-1, i+1} of M.
template <class T>
T jacobi_delta(const Matrix<T>& m, int i) {
  std::vector<std::size_t> top(i), shifted(i);
  for (int k = 0; k < i; ++k) top[k] = shifted[k] = k;
  shifted[i - 1] = i;
  return minor(m, top, top) * minor(m, shifted, shifted) - minor(m, top, shifted) * minor(m, shifted, top);
}

/// ∏_{j≠i} ξ_j^{-a_ij} (1-based i).
template <class T>
T jacobi_product(const Matrix<T>& m, int i, const IntMatrix& cartan) {
  T p(1);
  for (int j = 1; j <= static_cast<int>(cartan.size()); ++j) {
    if (j == i) continue;
    int e = -cartan[i - 1][j - 1];
    if (e == 0) continue;
    T x = leading_minor(m, j);
    for (int k = 0; k < e; ++k) p *= x;
  }
  return p;
}

/// Values of the solution on a tensor grid.
struct SolutionGrid {
  int rank = 0;
  std::vector<double> xs, ys;
  std::vector<RealMatrix> psi, phi;  ///< Ψ(x_a), Φ(y_b)
  /// Node (a, b) stores entry a * ys.size() + b, each a vector of length ℓ.
  std::vector<std::vector<double>> xi, u, residual;

  std::size_t node(std::size_t a, std::size_t b) const { return a * ys.size() + b; }
};

inline std::vector<double> linspace(double a, double b, int n) {
  if (n < 2) throw Error("grid needs at least two points per axis");
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = k + 1 == n ? b : a + (b - a) * k / (n - 1);
  return v;
}

inline std::string node_text(double x, double y) {
  return "(x=" + std::to_string(x) + ", y=" + std::to_string(y) + ")";
}

/// u_i = -log ξ_i + Σ_j a^{ij} log(φ_j ψ_j) on the grid; throws DomainError at
/// the first node where a logarithm argument is not positive.
inline SolutionGrid toda_solution(const CurveSpec& psi_spec, const CurveSpec& phi_spec, const std::vector<double>& xs,
                                  const std::vector<double>& ys, double h = 1e-3) {
  if (psi_spec.side != CurveSide::X || phi_spec.side != CurveSide::Y || psi_spec.rank != phi_spec.rank)
    throw Error("need an x-side and a y-side curve of equal rank");
  const int l = psi_spec.rank;
  SolutionGrid g;
  g.rank = l;
  g.xs = xs;
  g.ys = ys;
  g.psi = integrate_curve(psi_spec, xs, h);
  g.phi = integrate_curve(phi_spec, ys, h);
  RationalMatrix ainv = build_root_system(CartanType::A, l).inverse_cartan();
  std::vector<std::vector<double>> fpsi(xs.size(), std::vector<double>(l)), fphi(ys.size(), std::vector<double>(l));
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (int j = 0; j < l; ++j) fpsi[a][j] = eval_univariate(psi_spec.funcs[j], xs[a]);
  for (std::size_t b = 0; b < ys.size(); ++b)
    for (int j = 0; j < l; ++j) fphi[b][j] = eval_univariate(phi_spec.funcs[j], ys[b]);
  const std::size_t nodes = xs.size() * ys.size();
  g.xi.assign(nodes, std::vector<double>(l));
  g.u.assign(nodes, std::vector<double>(l));
  g.residual.assign(nodes, std::vector<double>(l, std::numeric_limits<double>::quiet_NaN()));
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (std::size_t b = 0; b < ys.size(); ++b) {
      const std::size_t k = g.node(a, b);
      RealMatrix m = g.psi[a] * g.phi[b];
      std::vector<double> logs(l);
      for (int j = 0; j < l; ++j) {
        double pp = fphi[b][j] * fpsi[a][j];
        if (!(pp > 0)) throw DomainError("phi_" + std::to_string(j + 1) + "*psi_" + std::to_string(j + 1) + " <= 0 at " + node_text(xs[a], ys[b]));
        logs[j] = std::log(pp);
      }
      for (int i = 0; i < l; ++i) {
        double xi = leading_minor(m, i + 1);
        if (!(xi > 0)) throw DomainError("xi_" + std::to_string(i + 1) + " <= 0 at " + node_text(xs[a], ys[b]));
        g.xi[k][i] = xi;
        double u = -std::log(xi);
        for (int j = 0; j < l; ++j) u += ainv(i, j).get_d() * logs[j];
        g.u[k][i] = u;
      }
    }
  return g;
}

struct ResidualSummary {
  double max = 0.0, mean = 0.0;
  std::size_t nodes = 0;
};

/// Fills g.residual with |u_{i,xy} + exp(Σ_j a_ij u_j)| at interior nodes,
/// using the centered mixed difference.
inline ResidualSummary pde_residual(SolutionGrid& g) {
  const IntMatrix a = cartan_matrix(CartanType::A, g.rank);
  const std::size_t nx = g.xs.size(), ny = g.ys.size();
  if (nx < 3 || ny < 3) throw Error("residual needs at least a 3x3 grid");
  ResidualSummary s;
  double sum = 0.0;
  for (std::size_t p = 1; p + 1 < nx; ++p)
    for (std::size_t q = 1; q + 1 < ny; ++q) {
      const double dx = g.xs[p + 1] - g.xs[p - 1], dy = g.ys[q + 1] - g.ys[q - 1];
      const auto& upp = g.u[g.node(p + 1, q + 1)];
      const auto& upm = g.u[g.node(p + 1, q - 1)];
      const auto& ump = g.u[g.node(p - 1, q + 1)];
      const auto& umm = g.u[g.node(p - 1, q - 1)];
      const auto& u0 = g.u[g.node(p, q)];
      for (int i = 0; i < g.rank; ++i) {
        double uxy = (upp[i] - upm[i] - ump[i] + umm[i]) / (dx * dy);
        double e = 0.0;
        for (int j = 0; j < g.rank; ++j) e += a[i][j] * u0[j];
        double r = std::fabs(uxy + std::exp(e));
        g.residual[g.node(p, q)][i] = r;
        s.max = std::max(s.max, r);
        sum += r;
        ++s.nodes;
      }
    }
  s.mean = s.nodes ? sum / s.nodes : 0.0;
  return s;
}

/// Residual of an arbitrary u field (same layout as SolutionGrid::u).
inline double residual_of_field(const std::vector<double>& xs, const std::vector<double>& ys,
                                const std::vector<std::vector<double>>& u, int rank) {
  SolutionGrid g;
  g.rank = rank;
  g.xs = xs;
  g.ys = ys;
  g.u = u;
  g.residual.assign(u.size(), std::vector<double>(rank, std::numeric_limits<double>::quiet_NaN()));
  return pde_residual(g).max;
}

/// max over nodes and i of |Δ_i - ∏| / max(1, |∏|) on a floating grid.
inline double jacobi_check(const SolutionGrid& g) {
  const IntMatrix a = cartan_matrix(CartanType::A, g.rank);
  double worst = 0.0;
  for (std::size_t p = 0; p < g.xs.size(); ++p)
    for (std::size_t q = 0; q < g.ys.size(); ++q) {
      RealMatrix m = g.psi[p] * g.phi[q];
      for (int i = 1; i <= g.rank; ++i) {
        double d = jacobi_delta(m, i), pr = jacobi_product(m, i, a);
        worst = std::max(worst, std::fabs(d - pr) / std::max(1.0, std::fabs(pr)));
      }
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Group action on first-order jets and invariance of u⁰.

/// A point of J¹(N₊) × J¹(N₋): Ψ⁰ with velocity ψ⁰ and Φ⁰ with velocity φ⁰.
struct JetPoint {
  RealMatrix psi, phi;
  std::vector<double> psi_dot, phi_dot;
};

/// u_i⁰ = -log ξ_i(Ψ⁰Φ⁰) + Σ_j a^{ij} log(φ_j⁰ ψ_j⁰).
inline std::vector<double> jet_invariants(const JetPoint& p) {
  const int l = static_cast<int>(p.phi_dot.size());
  RationalMatrix ainv = build_root_system(CartanType::A, l).inverse_cartan();
  RealMatrix m = p.psi * p.phi;
  std::vector<double> u(l);
  for (int i = 0; i < l; ++i) {
    double xi = leading_minor(m, i + 1);
    if (!(xi > 0)) throw DomainError("xi_" + std::to_string(i + 1) + " <= 0 at the jet point");
    u[i] = -std::log(xi);
    for (int j = 0; j < l; ++j) {
      double pp = p.phi_dot[j] * p.psi_dot[j];
      if (!(pp > 0)) throw DomainError("phi*psi <= 0 at the jet point");
      u[i] += ainv(i, j).get_d() * std::log(pp);
    }
  }
  return u;
}

/// g·Φ = ñ with gΦ = ñ p, ñ ∈ N₋, p ∈ B₊.
inline BigCellFactors<double> left_factor(const RealMatrix& g, const RealMatrix& phi) {
  return factorize_bigcell(g * phi, 1e-12);
}

/// Ψ g⁻¹ = q ñ with q ∈ B₋, ñ ∈ N₊; returned as {n = ñ, b = q}.
inline BigCellFactors<double> right_factor(const RealMatrix& psi, const RealMatrix& ginv) {
  auto f = factorize_bigcell((psi * ginv).transpose(), 1e-12);
  return {f.n.transpose(), f.b.transpose()};
}

enum class ProlongationMethod { Analytic, CurveDifferentiation };

inline std::string method_name(ProlongationMethod m) {
  return m == ProlongationMethod::Analytic ? "analytic" : "curve-differentiation";
}

/// Transformed jet, velocities from the diagonal of the B factors:
/// φ_i ↦ φ_i p_{i+1,i+1}/p_{ii} and ψ_i ↦ ψ_i q_{i+1,i+1}/q_{ii}.
inline JetPoint act_analytic(const RealMatrix& g, const RealMatrix& ginv, const JetPoint& p) {
  const int l = static_cast<int>(p.phi_dot.size());
  auto lf = left_factor(g, p.phi);
  auto rf = right_factor(p.psi, ginv);
  JetPoint out;
  out.phi = lf.n;
  out.psi = rf.n;
  out.phi_dot.resize(l);
  out.psi_dot.resize(l);
  for (int i = 0; i < l; ++i) {
    out.phi_dot[i] = p.phi_dot[i] * lf.b(i + 1, i + 1) / lf.b(i, i);
    out.psi_dot[i] = p.psi_dot[i] * rf.b(i + 1, i + 1) / rf.b(i, i);
  }
  return out;
}

/// exp of a small dense matrix (Taylor series with scaling and squaring).
inline RealMatrix expm(const RealMatrix& x) {
  double norm = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) norm = std::max(norm, std::fabs(x(i, j)));
  int sq = 0;
  while (norm > 0.125) {
    norm /= 2;
    ++sq;
  }
  RealMatrix a = x * std::ldexp(1.0, -sq);
  RealMatrix out = RealMatrix::identity(x.rows()), term = out;
  for (int k = 1; k <= 20; ++k) {
    term = term * a * (1.0 / k);
    out += term;
  }
  for (int k = 0; k < sq; ++k) out = out * out;
  return out;
}

/// Basis of sl_{ℓ+1}: E_ij (i<j), E_ji, then H_i = E_ii - E_{i+1,i+1}.
inline std::vector<RealMatrix> sl_basis(int n) {
  std::vector<RealMatrix> b;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      RealMatrix e(n, n);
      e(i, j) = 1.0;
      b.push_back(e);
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      RealMatrix f(n, n);
      f(j, i) = 1.0;
      b.push_back(f);
    }
  for (int i = 0; i + 1 < n; ++i) {
    RealMatrix h(n, n);
    h(i, i) = 1.0;
    h(i + 1, i + 1) = -1.0;
    b.push_back(h);
  }
  return b;
}

struct InvarianceSample {
  int basis_index = 0;
  double parameter = 0.0;
  double deviation = 0.0;
  bool skipped = false;
};

struct InvarianceReport {
  ProlongationMethod method = ProlongationMethod::Analytic;
  double step = 0.0;
  int group_elements_sampled = 0;
  int skipped = 0;
  double max_deviation = 0.0;
  std::vector<InvarianceSample> per_element;
};

/// Curves through the base point: Ψ⁰ = Ψ(x0), Φ⁰ = Φ(y0).
struct InvarianceSetup {
  CurveSpec psi, phi;
  double x0 = 0.5, y0 = 0.5;
};

/// Default setup for A_ℓ: polynomial velocities and seeded unitriangular
/// initial values, so the base point is generic.
inline InvarianceSetup default_invariance_setup(int rank, std::uint64_t seed = 20240611) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-0.5, 0.5);
  InvarianceSetup s;
  const int n = rank + 1;
  s.psi = {rank, CurveSide::X, {}, 0.0, 1.0, RealMatrix::identity(n)};
  s.phi = {rank, CurveSide::Y, {}, 0.0, 1.0, RealMatrix::identity(n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      s.phi.initial(i, j) = entry(rng);
      s.psi.initial(j, i) = entry(rng);
    }
  for (int i = 0; i < rank; ++i) {
    // ψ_i = 1 + x²/(i+2), φ_i = 1 + (i+1) y / 3
    s.psi.funcs.push_back(MPoly(1) + MPoly(make_rational(1, i + 2)) * MPoly::var(0, 2));
    s.phi.funcs.push_back(MPoly(1) + MPoly(make_rational(i + 1, 3)) * MPoly::var(0));
  }
  s.x0 = 0.4;
  s.y0 = 0.3;
  return s;
}

namespace detail {

// Five-point centered derivative of a matrix-valued sample list.
inline RealMatrix five_point(const std::vector<RealMatrix>& f, double h) {
  return (f[0] - f[1] * 8.0 + f[3] * 8.0 - f[4]) * (1.0 / (12.0 * h));
}

}  // namespace detail

/// Samples g = exp(s·X_k) with X_k cycling through the basis of sl_{ℓ+1} and
/// s = ±t, ±t/2, ±2t, …; reports |u⁰(g·p) - u⁰(p)|. With CurveDifferentiation
/// the transformed velocities come from a five-point derivative of the
/// transformed curves, sampled on the integrator's own step.
inline InvarianceReport invariance_check(const InvarianceSetup& setup, int samples, double t, double step,
                                         ProlongationMethod method = ProlongationMethod::Analytic) {
  const int l = setup.phi.rank;
  const int n = l + 1;
  check_nonvanishing(setup.phi);
  check_nonvanishing(setup.psi);
  InvarianceReport rep;
  rep.method = method;
  rep.step = step;
  // Base jet and, for the differentiated variant, nearby curve samples.
  std::vector<double> ys, xs;
  for (int k = -2; k <= 2; ++k) {
    ys.push_back(setup.y0 + k * step);
    xs.push_back(setup.x0 + k * step);
  }
  auto phis = integrate_curve(setup.phi, ys, step);
  auto psis = integrate_curve(setup.psi, xs, step);
  JetPoint base{psis[2], phis[2], {}, {}};
  for (int i = 0; i < l; ++i) {
    base.psi_dot.push_back(eval_univariate(setup.psi.funcs[i], setup.x0));
    base.phi_dot.push_back(eval_univariate(setup.phi.funcs[i], setup.y0));
  }
  const std::vector<double> u0 = jet_invariants(base);
  const auto basis = sl_basis(n);
  const double scales[] = {1.0, -1.0, 0.5, -0.5, 2.0, -2.0, 0.25, -0.25};
  for (int k = 0; k < samples; ++k) {
    InvarianceSample smp;
    smp.basis_index = k % static_cast<int>(basis.size());
    smp.parameter = t * scales[(k / basis.size()) % 8];
    const RealMatrix x = basis[smp.basis_index] * smp.parameter;
    const RealMatrix g = expm(x), ginv = expm(-x);
    try {
      JetPoint moved;
      if (method == ProlongationMethod::Analytic) {
        moved = act_analytic(g, ginv, base);
      } else {
        std::vector<RealMatrix> nphi, npsi;
        for (int s = 0; s < 5; ++s) {
          nphi.push_back(left_factor(g, phis[s]).n);
          npsi.push_back(right_factor(psis[s], ginv).n);
        }
        moved.phi = nphi[2];
        moved.psi = npsi[2];
        RealMatrix dphi = unipotent_inverse(nphi[2]) * detail::five_point(nphi, step);
        RealMatrix dpsi = detail::five_point(npsi, step) * inverse(npsi[2]);
        for (int i = 0; i < l; ++i) {
          moved.phi_dot.push_back(dphi(i + 1, i));
          moved.psi_dot.push_back(dpsi(i, i + 1));
        }
      }
      const std::vector<double> u1 = jet_invariants(moved);
      for (int i = 0; i < l; ++i) smp.deviation = std::max(smp.deviation, std::fabs(u1[i] - u0[i]));
    } catch (const NotInBigCell&) {
      smp.skipped = true;
      ++rep.skipped;
    }
    if (!smp.skipped) {
      ++rep.group_elements_sampled;
      rep.max_deviation = std::max(rep.max_deviation, smp.deviation);
    }
    rep.per_element.push_back(smp);
  }
  return rep;
}

}  // namespace toda
