#include <gtest/gtest.h>

#include <random>

#include "toda/brackets.hpp"
#include "toda/dsgauge.hpp"

using namespace toda;

namespace {

struct Fixture {
  LieData lie;
  GaugeResult res;
};

const Fixture& fixture(CartanType t, int l) {
  static std::map<std::pair<CartanType, int>, Fixture> cache;
  auto it = cache.find({t, l});
  if (it == cache.end()) {
    Fixture f;
    f.lie = make_lie_data(t, l);
    f.res = ds_gauge(f.lie);
    it = cache.emplace(std::make_pair(t, l), std::move(f)).first;
  }
  return it->second;
}

const std::vector<std::pair<CartanType, int>> kTypes = {{CartanType::A, 1}, {CartanType::A, 2}, {CartanType::A, 3},
                                                        {CartanType::B, 2}, {CartanType::B, 3}, {CartanType::C, 3},
                                                        {CartanType::G, 2}};

DiffPoly u(const RingPtr& r, int i, int n, int p = 1) { return DiffPoly::var(r, i, n, p); }

using D = GenDerivation;

}  // namespace

TEST(Gauge, A2IntegralsReferenceForm) {
  const auto& f = fixture(CartanType::A, 2);
  const RingPtr& r = f.res.ring;
  DiffPoly i1 = -u(r, 0, 2) - u(r, 1, 2) + u(r, 0, 1, 2) - u(r, 0, 1) * u(r, 1, 1) + u(r, 1, 1, 2);
  DiffPoly i2 = -u(r, 1, 3) + Rational(2) * u(r, 1, 2) * u(r, 1, 1) - u(r, 0, 2) * u(r, 1, 1) +
                u(r, 0, 1, 2) * u(r, 1, 1) - u(r, 0, 1) * u(r, 1, 1, 2);
  ASSERT_EQ(f.res.integrals.size(), 2u);
  EXPECT_EQ(f.res.integrals[0], i1);
  EXPECT_EQ(f.res.integrals[1], i2);
  EXPECT_EQ(f.res.integrals[0].size(), 5u);
  EXPECT_EQ(f.res.integrals[1].size(), 5u);
  EXPECT_EQ(f.res.degrees, (std::vector<int>{2, 3}));
}

TEST(Gauge, A1Integral) {
  const auto& f = fixture(CartanType::A, 1);
  const RingPtr& r = f.res.ring;
  EXPECT_EQ(f.res.integrals[0], u(r, 0, 1, 2) - u(r, 0, 2));
  EXPECT_EQ(f.lie.slice.cji(0, 0), -1);
  // a_1 = u_x f
  ASSERT_EQ(f.res.a.size(), 1u);
  EXPECT_EQ(f.res.a[0].at(f.lie.alg->f_index(0)), u(r, 0, 1));
}

TEST(Gauge, FactorsAreGraded) {
  for (auto [t, l] : kTypes) {
    const auto& f = fixture(t, l);
    for (std::size_t i = 0; i < f.res.a.size(); ++i)
      for (const auto& [b, p] : f.res.a[i].coeffs()) EXPECT_EQ(f.lie.alg->degree(b), -static_cast<int>(i) - 1);
  }
}

TEST(Gauge, VanishesOnZeroJets) {
  for (auto [t, l] : kTypes) {
    const auto& f = fixture(t, l);
    std::map<DiffVar, DiffPoly> zero;
    for (const auto& I : f.res.integrals)
      for (const auto& g : I.generators()) zero.emplace(g.var(), DiffPoly(f.res.ring));
    for (const auto& I : f.res.integrals) EXPECT_TRUE(substitute(I, zero).is_zero());
  }
}

TEST(Gauge, LeadingTermsAndDegrees) {
  for (auto [t, l] : kTypes) {
    const auto& f = fixture(t, l);
    auto rep = leading_term_check(f.res, f.lie.slice);
    EXPECT_TRUE(rep.linear_part_ok) << f.lie.roots().name();
    EXPECT_TRUE(rep.homogeneous) << f.lie.roots().name();
    EXPECT_TRUE(rep.products_ok) << f.lie.roots().name();
    for (int j = 0; j < l; ++j) {
      EXPECT_EQ(weighted_degree(f.res.integrals[j]), f.lie.slice.exponents[j] + 1);
      EXPECT_FALSE(f.res.integrals[j].has_order0());
      EXPECT_FALSE(f.res.integrals[j].has_exp());
    }
  }
  const auto& a2 = fixture(CartanType::A, 2);
  EXPECT_EQ(linear_coefficient(a2.res.integrals[0], {0, 2}), -1);
  EXPECT_EQ(linear_coefficient(a2.res.integrals[0], {1, 2}), -1);
}

TEST(Gauge, LeadingTermCheckRejectsTamperedIntegral) {
  Fixture f = fixture(CartanType::A, 2);
  f.res.integrals[0] += u(f.res.ring, 1, 2);
  EXPECT_FALSE(leading_term_check(f.res, f.lie.slice).linear_part_ok);
  Fixture g = fixture(CartanType::A, 2);
  g.res.integrals[1] += u(g.res.ring, 0, 2);
  EXPECT_FALSE(leading_term_check(g.res, g.lie.slice).homogeneous);
}

TEST(Gauge, IndependentOfFactorOrderAndIteration) {
  for (auto [t, l] : kTypes) {
    const auto& f = fixture(t, l);
    auto rev = ds_gauge(f.lie, {FactorOrder::SecondKind, true});
    EXPECT_EQ(rev.integrals, f.res.integrals);
    ASSERT_EQ(rev.a.size(), f.res.a.size());
    for (std::size_t i = 0; i < rev.a.size(); ++i) EXPECT_TRUE(rev.a[i] == f.res.a[i]);
    auto desc = ds_gauge(f.lie, {FactorOrder::Descending, false});
    EXPECT_EQ(desc.integrals, f.res.integrals) << f.lie.roots().name();
    auto desc_rev = ds_gauge(f.lie, {FactorOrder::Descending, true});
    EXPECT_EQ(desc_rev.integrals, f.res.integrals);
  }
}

TEST(Gauge, CorruptedStructureConstantIsDetected) {
  auto alg = std::make_shared<ChevalleyAlgebra>(build_root_system(CartanType::A, 2));
  // [f_1, f_2] -> -[f_1, f_2]: breaks Jacobi, so the gauge can no longer
  // reach the slice or the integrals stop being characteristic.
  alg->corrupt_constant(alg->f_index(0), alg->f_index(1));
  bool detected = false;
  try {
    LieData lie = make_lie_data(alg);
    GaugeResult res = ds_gauge(lie);
    for (const auto& I : res.integrals)
      if (!y_derivation(I).is_zero()) detected = true;
  } catch (const Error&) {
    detected = true;
  }
  EXPECT_TRUE(detected);
}

TEST(YDerivation, Examples) {
  auto r = make_diff_ring(cartan_matrix(CartanType::A, 2));
  EXPECT_EQ(y_derivation(u(r, 0, 1)), -DiffPoly::exp_gen(r, 0));
  EXPECT_EQ(y_derivation(u(r, 1, 1)), -DiffPoly::exp_gen(r, 1));
  EXPECT_TRUE(y_derivation(DiffPoly(r, Rational(5))).is_zero());
  // Y(u_1^(2)) = -E_1 B_1^1 = -E_1 (2u_1' - u_2')
  EXPECT_EQ(y_derivation(u(r, 0, 2)), -(DiffPoly::exp_gen(r, 0) * b_poly(r, 0, 1)));
  auto r0 = make_diff_ring(cartan_matrix(CartanType::A, 2), true);
  EXPECT_THROW(y_derivation(u(r0, 0, 0)), Unsupported);
  EXPECT_THROW(y_derivation(DiffPoly::exp_gen(r0, 0)), Unsupported);
  EXPECT_TRUE(y_derivation(u(r0, 0, 0), true).is_zero());
}

TEST(YDerivation, AnnihilatesIntegrals) {
  for (auto [t, l] : kTypes) {
    const auto& f = fixture(t, l);
    for (const auto& I : f.res.integrals) EXPECT_TRUE(y_derivation(I).is_zero()) << f.lie.roots().name();
  }
}

TEST(YDerivation, CommutesWithTotalDerivativeOnJets) {
  // Y ∂_x = ∂_x Y on C[U] (both are total derivatives on solutions).
  std::mt19937 rng(3);
  auto r = make_diff_ring(cartan_matrix(CartanType::B, 2));
  for (int trial = 0; trial < 30; ++trial) {
    DiffPoly p(r, Rational(static_cast<int>(rng() % 5) - 2));
    for (int k = 0; k < 3; ++k) p += u(r, rng() % 2, 1 + rng() % 3) * u(r, rng() % 2, 1 + rng() % 2);
    EXPECT_EQ(y_derivation(dx(p)), dx(y_derivation(p)));
  }
}

TEST(NormalForm, A2Rule) {
  const auto& f = fixture(CartanType::A, 2);
  auto t = build_normal_form_table(f.res, f.lie.slice);
  const RingPtr& r = f.res.ring;
  EXPECT_EQ(t.sigma, (std::vector<int>{0, 1}));
  EXPECT_EQ(t.generators, (std::vector<DiffVar>{{0, 1}, {1, 1}, {1, 2}}));
  DiffPoly expect = -u(r, 1, 2) + u(r, 0, 1, 2) - u(r, 0, 1) * u(r, 1, 1) + u(r, 1, 1, 2);
  EXPECT_EQ(t.rewrite.at({0, 2}), expect);
  EXPECT_TRUE(normal_form(f.res.integrals[0], t).is_zero());
  EXPECT_EQ(t.truncation, 6);
  EXPECT_THROW(normal_form(u(r, 0, 7), t), TruncationExceeded);
}

TEST(NormalForm, IdealVanishesAndTableIsTriangular) {
  for (auto [t, l] : kTypes) {
    const auto& f = fixture(t, l);
    auto tab = build_normal_form_table(f.res, f.lie.slice);
    int total = 0;
    for (int m : f.lie.slice.exponents) total += m;
    EXPECT_EQ(static_cast<int>(tab.generators.size()), total);
    for (int j = 0; j < l; ++j)
      for (int m = 0; f.res.degrees[j] + m <= tab.truncation; ++m)
        EXPECT_TRUE(normal_form(dx(f.res.integrals[j], m), tab).is_zero()) << f.lie.roots().name();
    for (const auto& [v, rhs] : tab.rewrite) {
      EXPECT_FALSE(tab.is_generator(v));
      for (const auto& g : rhs.generators()) EXPECT_TRUE(tab.is_generator(g.var()));
      EXPECT_EQ(normal_form(rhs, tab), rhs);  // idempotent
    }
  }
}

TEST(NormalForm, CharacterMatchesProductFormula) {
  for (auto [t, l] : std::vector<std::pair<CartanType, int>>{{CartanType::A, 2}, {CartanType::A, 3}, {CartanType::B, 2}}) {
    const auto& f = fixture(t, l);
    auto tab = build_normal_form_table(f.res, f.lie.slice);
    // Independent expansion of ∏ (1 - q^i)^{-b_i} by repeated polynomial multiplication.
    std::vector<long> series(7, 0);
    series[0] = 1;
    const auto& b = f.lie.principal.graded_dims;
    for (std::size_t i = 1; i <= b.size(); ++i)
      for (int rep = 0; rep < b[i - 1]; ++rep) {
        std::vector<long> next(7, 0);
        for (int n = 0; n <= 6; ++n)
          for (int k = 0; n + k * static_cast<int>(i) <= 6; ++k) next[n + k * i] += series[n];
        series = next;
      }
    EXPECT_EQ(character_series(b, 6), series);
    std::vector<int> w;
    for (const auto& g : tab.generators) w.push_back(g.order);
    EXPECT_EQ(monomial_counts(w, 6), series);
    for (int n = 0; n <= 6; ++n) EXPECT_EQ(quotient_dimension(f.res, n), series[n]) << "n=" << n;
  }
  const auto& a2 = fixture(CartanType::A, 2);
  EXPECT_EQ(character_series(a2.lie.principal.graded_dims, 6), (std::vector<long>{1, 2, 4, 6, 9, 12, 16}));
}

TEST(TildeV, A2Fields) {
  const auto& f = fixture(CartanType::A, 2);
  auto tab = build_normal_form_table(f.res, f.lie.slice);
  const RingPtr& r = f.res.ring;
  D v1 = tilde_v_field(0, tab), v2 = tilde_v_field(1, tab);
  D e1{DiffPoly(r)}, e2{DiffPoly(r)};
  e1.set(DiffGen::u(0, 1), DiffPoly(r, Rational(1)));
  e2.set(DiffGen::u(1, 1), DiffPoly(r, Rational(1)));
  e2.set(DiffGen::u(1, 2), Rational(2) * u(r, 1, 1) - u(r, 0, 1));
  EXPECT_TRUE(v1 == e1);
  EXPECT_TRUE(v2 == e2);
}

TEST(TildeV, CommutationWithTotalDerivative) {
  for (auto [t, l] : std::vector<std::pair<CartanType, int>>{{CartanType::A, 2}, {CartanType::A, 3}, {CartanType::B, 2}, {CartanType::G, 2}}) {
    const auto& f = fixture(t, l);
    auto tab = build_normal_form_table(f.res, f.lie.slice);
    D dxq = quotient_dx(tab);
    for (int j = 0; j < l; ++j) {
      D vj = tilde_v_field(j, tab);
      D lhs = bracket(dxq, vj);
      D rhs = (-rho_x(tab.ring, j)) * vj;
      EXPECT_TRUE(lhs == rhs) << f.lie.roots().name() << " j=" << j;
    }
  }
}

TEST(TildeV, DescendsToQuotient) {
  for (auto [t, l] : std::vector<std::pair<CartanType, int>>{{CartanType::A, 2}, {CartanType::A, 3}, {CartanType::B, 2}}) {
    const auto& f = fixture(t, l);
    auto tab = build_normal_form_table(f.res, f.lie.slice);
    for (int j = 0; j < l; ++j) {
      D raw = raw_tilde_v(tab.ring, j, tab.truncation);
      D quo = tilde_v_field(j, tab);
      // Ṽ_j preserves the ideal.
      for (int k = 0; k < l; ++k)
        for (int m = 0; f.res.degrees[k] + m <= tab.truncation; ++m)
          EXPECT_TRUE(normal_form(raw(dx(f.res.integrals[k], m)), tab).is_zero());
      // normal_form ∘ Ṽ_j = Ṽ_j ∘ normal_form on every variable.
      for (int i = 0; i < l; ++i)
        for (int k = 1; k <= tab.truncation; ++k) {
          DiffPoly x = u(tab.ring, i, k);
          EXPECT_EQ(normal_form(raw(x), tab), quo(normal_form(x, tab)));
        }
    }
  }
}

TEST(TildeV, IteratedBracketsRealizeNegativeNilradical) {
  for (auto [t, l] : std::vector<std::pair<CartanType, int>>{{CartanType::A, 2}, {CartanType::A, 3}, {CartanType::B, 2}, {CartanType::G, 2}}) {
    const auto& f = fixture(t, l);
    auto tab = build_normal_form_table(f.res, f.lie.slice);
    std::vector<D> gen;
    for (int j = 0; j < l; ++j) gen.push_back(tilde_v_field(j, tab));
    auto ch = root_chains(f.lie.roots());
    auto br = [](const D& a, const D& b) { return bracket(a, b); };
    auto w = iterated_fields(gen, ch, br);
    auto kappa = negative_kappa(*f.lie.alg, ch);
    auto rep = check_bracket_table(
        w, f.lie.roots(), kappa, br, [&](const D& x, const Rational& k) { return DiffPoly(tab.ring, k) * x; },
        [](const D& x) { return x.is_zero(); });
    EXPECT_TRUE(rep.ok) << f.lie.roots().name() << " " << (rep.mismatches.empty() ? "" : rep.mismatches[0]);
    for (const auto& x : w) EXPECT_FALSE(x.is_zero());
  }
}

TEST(JetFields, BracketRelations) {
  for (auto [t, l] : std::vector<std::pair<CartanType, int>>{{CartanType::A, 2}, {CartanType::B, 2}}) {
    const auto& f = fixture(t, l);
    JetFields jf = jet_fields(f.lie.roots().cartan_matrix, 5);
    for (int j = 0; j < l; ++j) {
      EXPECT_TRUE(bracket(jf.y, jf.u[j]) == jf.v[j]);
      for (int i = 0; i < l; ++i) {
        D expect = i == j ? jf.v[j] : D(DiffPoly(jf.ring));
        EXPECT_TRUE(bracket(jf.u[i], jf.v[j]) == expect);
      }
      // U_j kills the integrals: they contain only derivative variables.
      for (const auto& I : f.res.integrals) EXPECT_TRUE(jf.u[j](I.rebased(jf.ring)).is_zero());
    }
    // [V_i, V_j] = E_i E_j [Ṽ_i, Ṽ_j]
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) {
        DiffPoly ee = DiffPoly::exp_gen(jf.ring, i) * DiffPoly::exp_gen(jf.ring, j);
        EXPECT_TRUE(bracket(jf.v[i], jf.v[j]) == ee * bracket(jf.v_tilde[i], jf.v_tilde[j]));
      }
    // Y annihilates the integrals and their derivatives inside the truncation.
    for (const auto& I : f.res.integrals) {
      DiffPoly p = I.rebased(jf.ring);
      EXPECT_TRUE(jf.y(p).is_zero());
      EXPECT_TRUE(jf.y(dx(p)).is_zero());
    }
  }
}
