// An explicit A2 solution from two polynomial integral curves, with its
// residual and a few sampled values.

#include <cstdio>

#include "toda/expr.hpp"
#include "toda/solve.hpp"

int main() {
  using namespace toda;
  CurveSpec psi{2, CurveSide::X, parse_polynomials("1 + x, 2", 'x'), 0.0, 1.0, RealMatrix::identity(3)};
  CurveSpec phi{2, CurveSide::Y, parse_polynomials("1, 1 + y^2", 'y'), 0.0, 1.0, RealMatrix::identity(3)};
  auto grid = linspace(0.0, 1.0, 41);
  SolutionGrid g = toda_solution(psi, phi, grid, grid, 1e-3);
  ResidualSummary r = pde_residual(g);
  std::printf("residual  max %.3e  mean %.3e\n", r.max, r.mean);
  std::printf("Jacobi identity deviation %.3e\n", jacobi_check(g));
  for (std::size_t a : {10u, 20u, 40u}) {
    const auto& u = g.u[g.node(a, a)];
    std::printf("u(%.2f, %.2f) = (%.12f, %.12f)\n", g.xs[a], g.ys[a], u[0], u[1]);
  }
}
