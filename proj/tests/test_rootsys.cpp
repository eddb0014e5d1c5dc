#include <gtest/gtest.h>

#include <set>

#include "toda/rootsys.hpp"

using namespace toda;

namespace {

struct TypeRank {
  CartanType t;
  int l;
};

const std::vector<TypeRank> kSmall = {
    {CartanType::A, 1}, {CartanType::A, 2}, {CartanType::A, 3}, {CartanType::A, 4},
    {CartanType::B, 2}, {CartanType::B, 3}, {CartanType::B, 4}, {CartanType::C, 3},
    {CartanType::C, 4}, {CartanType::D, 4}, {CartanType::F, 4}, {CartanType::G, 2}};

// Oracle: the positive roots are the positive members of the Weyl orbit of
// the simple roots, generated by simple reflections.
std::set<Root> weyl_orbit_positive(const IntMatrix& a) {
  const int l = static_cast<int>(a.size());
  std::set<Root> seen;
  std::vector<Root> work;
  for (int i = 0; i < l; ++i) {
    Root r(l, 0);
    r[i] = 1;
    seen.insert(r);
    work.push_back(r);
  }
  while (!work.empty()) {
    Root b = work.back();
    work.pop_back();
    for (int i = 0; i < l; ++i) {
      int c = 0;
      for (int k = 0; k < l; ++k) c += b[k] * a[k][i];
      Root r = b;
      r[i] -= c;
      if (seen.insert(r).second) work.push_back(r);
    }
  }
  std::set<Root> pos;
  for (const auto& r : seen)
    if (std::all_of(r.begin(), r.end(), [](int c) { return c >= 0; })) pos.insert(r);
  return pos;
}

// Elementary matrix E_ij (0-based) as a flat (n*n) integer array.
using Flat = std::vector<long>;
Flat elem(int n, int i, int j) {
  Flat m(n * n, 0);
  m[i * n + j] = 1;
  return m;
}
Flat commutator(int n, const Flat& x, const Flat& y) {
  Flat out(n * n, 0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) out[i * n + j] += x[i * n + k] * y[k * n + j] - y[i * n + k] * x[k * n + j];
  return out;
}

// Type A realization: e_{α_i+..+α_{j-1}} = E_ij, f = E_ji, h_i = E_ii - E_{i+1,i+1}.
Flat type_a_matrix(const ChevalleyAlgebra& g, int b) {
  const int n = g.rank() + 1;
  if (g.is_h(b)) {
    int i = b - 2 * g.num_positive();
    Flat m(n * n, 0);
    m[i * n + i] = 1;
    m[(i + 1) * n + i + 1] = -1;
    return m;
  }
  const Root& r = g.roots().positive_roots[g.root_of(b)];
  int lo = 0;
  while (r[lo] == 0) ++lo;
  int hi = lo;
  while (hi < n - 1 && r[hi] == 1) ++hi;
  return g.is_e(b) ? elem(n, lo, hi) : elem(n, hi, lo);
}

}  // namespace

TEST(RootSystem, CartanMatrices) {
  auto a2 = build_root_system(CartanType::A, 2);
  EXPECT_EQ(a2.cartan_matrix, (IntMatrix{{2, -1}, {-1, 2}}));
  auto a1 = build_root_system(CartanType::A, 1);
  EXPECT_EQ(a1.cartan_matrix, (IntMatrix{{2}}));
  EXPECT_EQ(a1.num_positive(), 1u);
  auto g2 = build_root_system(CartanType::G, 2);
  EXPECT_EQ(g2.num_positive(), 6u);
  EXPECT_EQ(g2.max_height(), 5);
}

TEST(RootSystem, InvalidTypes) {
  EXPECT_THROW(build_root_system(CartanType::D, 3), InvalidCartanType);
  EXPECT_THROW(build_root_system(CartanType::B, 1), InvalidCartanType);
  EXPECT_THROW(build_root_system(CartanType::C, 2), InvalidCartanType);
  EXPECT_THROW(build_root_system(CartanType::E, 5), InvalidCartanType);
  EXPECT_THROW(build_root_system(CartanType::E, 9), InvalidCartanType);
  EXPECT_THROW(build_root_system(CartanType::F, 3), InvalidCartanType);
  EXPECT_THROW(build_root_system(CartanType::G, 3), InvalidCartanType);
  EXPECT_THROW(build_root_system(CartanType::A, 0), InvalidCartanType);
  EXPECT_THROW(parse_cartan_type("X"), InvalidCartanType);
}

TEST(RootSystem, CartanInvariantsAndClosureMatchWeylOrbit) {
  std::vector<TypeRank> all = kSmall;
  all.push_back({CartanType::E, 6});
  all.push_back({CartanType::E, 7});
  all.push_back({CartanType::E, 8});
  all.push_back({CartanType::D, 5});
  all.push_back({CartanType::D, 6});
  const std::map<std::pair<CartanType, int>, std::size_t> counts = {
      {{CartanType::E, 6}, 36}, {{CartanType::E, 7}, 63}, {{CartanType::E, 8}, 120},
      {{CartanType::F, 4}, 24}, {{CartanType::G, 2}, 6},  {{CartanType::D, 4}, 12},
      {{CartanType::B, 3}, 9},  {{CartanType::C, 4}, 16}, {{CartanType::A, 4}, 10}};
  for (auto [t, l] : all) {
    auto rs = build_root_system(t, l);
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) {
        if (i == j) EXPECT_EQ(rs.cartan_matrix[i][j], 2);
        else EXPECT_LE(rs.cartan_matrix[i][j], 0);
        EXPECT_EQ(rs.cartan_matrix[i][j] == 0, rs.cartan_matrix[j][i] == 0);
      }
    auto oracle = weyl_orbit_positive(rs.cartan_matrix);
    std::set<Root> got(rs.positive_roots.begin(), rs.positive_roots.end());
    EXPECT_EQ(got, oracle) << rs.name();
    auto it = counts.find({t, l});
    if (it != counts.end()) {
      EXPECT_EQ(rs.num_positive(), it->second) << rs.name();
    }
    for (int i = 0; i < l; ++i) EXPECT_EQ(rs.height(static_cast<std::size_t>(i)), 1);
  }
}

TEST(Chevalley, SlTwoNormalization) {
  auto g = chevalley_constants(build_root_system(CartanType::A, 1));
  ASSERT_EQ(g->dim(), 3);
  LieVec e = g->unit(0), f = g->unit(1), h = g->unit(2);
  EXPECT_EQ(g->bracket(e, f), h);
  LieVec twice_e = g->zero();
  twice_e[0] = 2;
  EXPECT_EQ(g->bracket(h, e), twice_e);
}

TEST(Chevalley, AntisymmetryJacobiGradingAllSmallTypes) {
  for (auto [t, l] : kSmall) {
    auto g = chevalley_constants(build_root_system(t, l));
    const int n = g->dim();
    for (int a = 0; a < n; ++a) {
      EXPECT_TRUE(g->bracket(a, a).empty());
      for (int b = 0; b < n; ++b) {
        LieVec ab = g->bracket(g->unit(a), g->unit(b));
        LieVec ba = g->bracket(g->unit(b), g->unit(a));
        for (int k = 0; k < n; ++k) {
          EXPECT_EQ(ab[k], -ba[k]);
          if (!is_zero(ab[k])) {
            EXPECT_EQ(g->degree(k), g->degree(a) + g->degree(b));
          }
        }
      }
    }
    EXPECT_FALSE(find_jacobi_violation(*g).has_value()) << g->roots().name();
    // [e_{α_i}, e_{-α_i}] = H_{α_i}, α_i(H_{α_i}) = 2.
    for (int i = 0; i < l; ++i) {
      EXPECT_EQ(g->bracket(g->unit(g->e_index(i)), g->unit(g->f_index(i))), g->unit(g->h_index(i)));
      LieVec he = g->bracket(g->unit(g->h_index(i)), g->unit(g->e_index(i)));
      EXPECT_EQ(he[g->e_index(i)], 2);
    }
  }
}

TEST(Chevalley, TypeAMatchesElementaryMatrices) {
  for (int l = 1; l <= 4; ++l) {
    auto g = chevalley_constants(build_root_system(CartanType::A, l));
    const int n = l + 1;
    for (int a = 0; a < g->dim(); ++a)
      for (int b = 0; b < g->dim(); ++b) {
        Flat expect = commutator(n, type_a_matrix(*g, a), type_a_matrix(*g, b));
        Flat got(n * n, 0);
        for (const auto& t : g->bracket(a, b)) {
          Flat m = type_a_matrix(*g, t.index);
          for (int k = 0; k < n * n; ++k) got[k] += t.coeff * m[k];
        }
        EXPECT_EQ(got, expect) << g->symbol(a) << " " << g->symbol(b);
      }
  }
  auto g = chevalley_constants(build_root_system(CartanType::A, 2));
  EXPECT_EQ(g->structure_constant({1, 0}, {0, 1}), 1);
}

TEST(Chevalley, IntegerConstantsAreStringLengths) {
  for (auto [t, l] : kSmall) {
    auto g = chevalley_constants(build_root_system(t, l));
    const auto& pr = g->roots().positive_roots;
    for (const auto& x : pr)
      for (const auto& y : pr) {
        long n = g->structure_constant(x, y);
        Root s(x.size());
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = x[i] + y[i];
        if (g->roots().find(s) < 0) {
          EXPECT_EQ(n, 0);
          continue;
        }
        int p = 0;
        Root d = y;
        while (true) {
          for (std::size_t i = 0; i < d.size(); ++i) d[i] -= x[i];
          Root nd = d;
          for (auto& c : nd) c = -c;
          if (g->roots().find(d) < 0 && g->roots().find(nd) < 0) break;
          ++p;
        }
        EXPECT_EQ(std::labs(n), p + 1);
      }
  }
}

TEST(Chevalley, InvariantForm) {
  for (auto [t, l] : std::vector<TypeRank>{{CartanType::A, 2}, {CartanType::B, 2}, {CartanType::G, 2}, {CartanType::C, 3}}) {
    auto g = chevalley_constants(build_root_system(t, l));
    const int n = g->dim();
    auto pair = [&](const LieVec& x, const LieVec& y) {
      Rational s = 0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (!is_zero(x[a]) && !is_zero(y[b])) s += x[a] * y[b] * g->form(a, b);
      return s;
    };
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          LieVec x = g->unit(a), y = g->unit(b), z = g->unit(c);
          EXPECT_EQ(pair(g->bracket(x, y), z), pair(x, g->bracket(y, z)));
        }
    for (int i = 0; i < l; ++i) {
      const Root& r = g->roots().positive_roots[i];
      EXPECT_EQ(g->form(g->f_index(i), g->e_index(i)), Rational(2) / g->roots().inner(r, r));
    }
  }
}

TEST(Principal, GradedDimsAndGradingElement) {
  auto g2 = make_lie_data(CartanType::A, 2);
  EXPECT_EQ(g2.principal.graded_dims, (std::vector<int>{2, 1}));
  auto a1 = make_lie_data(CartanType::A, 1);
  EXPECT_EQ(a1.principal.h0[a1.alg->h_index(0)], Rational(1, 2));
  for (auto [t, l] : kSmall) {
    auto d = make_lie_data(t, l);
    EXPECT_EQ(d.alg->bracket(d.principal.h0, d.principal.e), d.principal.e);
    LieVec two_h0 = d.principal.h0;
    for (auto& c : two_h0) c *= 2;
    EXPECT_EQ(d.alg->bracket(d.principal.e, d.principal.f), two_h0);
    for (int b = 0; b < d.alg->dim(); ++b) {
      LieVec v = d.alg->bracket(d.principal.h0, d.alg->unit(b));
      EXPECT_EQ(v[b], d.alg->degree(b));
    }
  }
}

TEST(Slice, A2RootVectorChoice) {
  auto d = make_lie_data(CartanType::A, 2);
  const auto& ks = d.slice;
  EXPECT_EQ(ks.exponents, (std::vector<int>{1, 2}));
  // s_1 = E21 = f_{α1}, s_2 = E31 = f_{α1+α2}
  EXPECT_EQ(ks.slice_basis[0], d.alg->unit(d.alg->f_index(0)));
  EXPECT_EQ(ks.slice_basis[1], d.alg->unit(d.alg->f_index(2)));
  EXPECT_EQ(ks.cji, (RationalMatrix{{-1, -1}, {0, -1}}));
  EXPECT_FALSE(ks.repeated_exponents);
}

TEST(Slice, KnownExponents) {
  const std::map<std::pair<CartanType, int>, std::vector<int>> expect = {
      {{CartanType::A, 1}, {1}},          {{CartanType::A, 3}, {1, 2, 3}},
      {{CartanType::B, 2}, {1, 3}},       {{CartanType::B, 3}, {1, 3, 5}},
      {{CartanType::C, 3}, {1, 3, 5}},    {{CartanType::D, 4}, {1, 3, 3, 5}},
      {{CartanType::F, 4}, {1, 5, 7, 11}}, {{CartanType::G, 2}, {1, 5}},
      {{CartanType::E, 6}, {1, 4, 5, 7, 8, 11}}};
  for (const auto& [key, m] : expect) {
    auto d = make_lie_data(key.first, key.second);
    EXPECT_EQ(d.slice.exponents, m) << d.roots().name();
    EXPECT_EQ(d.slice.repeated_exponents, key.first == CartanType::D);
  }
}

TEST(Slice, StructuralInvariants) {
  for (auto rule : {SliceRule::RootVectorGreedy, SliceRule::LowestWeight}) {
    for (auto [t, l] : kSmall) {
      auto d = make_lie_data(t, l, rule);
      const auto& g = *d.alg;
      const auto& ks = d.slice;
      const int n = g.dim();
      int total = 0;
      for (int m : ks.exponents) total += m;
      EXPECT_EQ(total, g.num_positive());
      EXPECT_EQ(ks.exponents.front(), 1);
      EXPECT_TRUE(std::is_sorted(ks.exponents.begin(), ks.exponents.end()));
      // {s_j^k} is a basis of g.
      std::vector<LieVec> all;
      for (const auto& pw : ks.powers) all.insert(all.end(), pw.begin(), pw.end());
      ASSERT_EQ(static_cast<int>(all.size()), n);
      RationalMatrix m(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = all[r][c];
      EXPECT_EQ(rank(m), static_cast<std::size_t>(n));
      // g = s ⊕ [e, g]
      std::vector<LieVec> split(ks.slice_basis.begin(), ks.slice_basis.end());
      for (int b = 0; b < n; ++b) split.push_back(g.bracket(d.principal.e, g.unit(b)));
      RationalMatrix sm(split.size(), n);
      for (std::size_t r = 0; r < split.size(); ++r)
        for (int c = 0; c < n; ++c) sm(r, c) = split[r][c];
      EXPECT_EQ(rank(sm), static_cast<std::size_t>(n));
      EXPECT_EQ(split.size() - n, static_cast<std::size_t>(l));  // = dim ker ad_e
      // ker ad_e ∩ (h ⊕ n_-) = 0: ad_e injective there.
      std::vector<int> low;
      for (int b = 0; b < n; ++b)
        if (g.degree(b) <= 0) low.push_back(b);
      RationalMatrix adm(low.size(), n);
      for (std::size_t r = 0; r < low.size(); ++r) {
        LieVec v = g.bracket(d.principal.e, g.unit(low[r]));
        for (int c = 0; c < n; ++c) adm(r, c) = v[c];
      }
      EXPECT_EQ(rank(adm), low.size());
      EXPECT_NE(determinant(ks.cji), 0);
      // H_i = Σ_j c_ji s_j^{m_j}
      for (int i = 0; i < l; ++i) {
        LieVec h = g.zero();
        for (int j = 0; j < l; ++j)
          for (int c = 0; c < n; ++c) h[c] += ks.cji(j, i) * ks.powers[j][ks.exponents[j]][c];
        EXPECT_EQ(h, g.unit(g.h_index(i)));
      }
    }
  }
}

TEST(Slice, LowestWeightForA2DiffersFromRootVectors) {
  auto d = make_lie_data(CartanType::A, 2, SliceRule::LowestWeight);
  LieVec s1 = d.alg->zero();
  s1[d.alg->f_index(0)] = 1;
  s1[d.alg->f_index(1)] = 1;
  EXPECT_EQ(d.slice.slice_basis[0], s1);
  EXPECT_EQ(d.slice.cji(0, 0), Rational(-1, 2));
}
