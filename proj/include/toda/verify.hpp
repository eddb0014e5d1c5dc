#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "toda/bigcell.hpp"
#include "toda/brackets.hpp"
#include "toda/dsgauge.hpp"
#include "toda/serialize.hpp"

namespace toda {

struct CheckEntry {
  std::string name;
  std::string suite;
  bool pass = true;
  bool skipped = false;
  double residual = 0;  ///< offending terms / mismatches / count difference
  std::string detail;
};

struct VerifyReport {
  std::string type;
  int rank = 0;
  std::string suite;
  std::string fault;
  std::vector<CheckEntry> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> s{"integrals", "bigcell", "brackets", "character", "all"};
  return s;
}

inline Json report_json(const VerifyReport& r) {
  Json j;
  j["schema"] = kSchema;
  j["command"] = "verify";
  j["type"] = r.type;
  j["rank"] = r.rank;
  j["suite"] = r.suite;
  if (!r.fault.empty()) j["fault"] = r.fault;
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json e;
    e["name"] = c.name;
    e["suite"] = c.suite;
    e["pass"] = c.pass;
    e["skipped"] = c.skipped;
    e["residual"] = c.residual;
    e["detail"] = c.detail;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  j["pass"] = r.pass();
  return j;
}

namespace detail {

/// Lazily built algebra, gauge and normal-form data shared by the suites.
class VerifyContext {
 public:
  VerifyContext(CartanType t, int rank, std::string fault) : type_(t), rank_(rank), fault_(std::move(fault)) {}

  CartanType type() const { return type_; }
  int rank() const { return rank_; }

  const ChevalleyAlgebra& algebra() {
    if (!alg_) {
      auto a = std::make_shared<ChevalleyAlgebra>(*chevalley_constants(build_root_system(type_, rank_)));
      if (fault_ == "structure-constant") {
        // [f_1, f_2] for rank >= 2, [e_1, f_1] in rank one.
        if (rank_ >= 2)
          a->corrupt_constant(a->f_index(0), a->f_index(1));
        else
          a->corrupt_constant(a->e_index(0), a->f_index(0));
      } else if (!fault_.empty()) {
        throw Error("unknown fault '" + fault_ + "'");
      }
      alg_ = a;
    }
    return *alg_;
  }
  /// Throws if the (possibly corrupted) algebra admits no gauge.
  const LieData& lie() {
    if (!lie_) {
      algebra();
      lie_ = std::make_unique<LieData>(make_lie_data(alg_));
    }
    return *lie_;
  }
  const GaugeResult& gauge() {
    if (!res_) res_ = std::make_unique<GaugeResult>(ds_gauge(lie()));
    return *res_;
  }
  const NormalFormTable& table() {
    if (!tab_) tab_ = std::make_unique<NormalFormTable>(build_normal_form_table(gauge(), lie().slice));
    return *tab_;
  }

 private:
  CartanType type_;
  int rank_;
  std::string fault_;
  std::shared_ptr<ChevalleyAlgebra> alg_;
  std::unique_ptr<LieData> lie_;
  std::unique_ptr<GaugeResult> res_;
  std::unique_ptr<NormalFormTable> tab_;
};

/// Runs one check; a thrown library error counts as a failure.
inline void run_check(VerifyReport& rep, const std::string& suite, const std::string& name,
                      const std::function<void(CheckEntry&)>& body) {
  CheckEntry e;
  e.suite = suite;
  e.name = name;
  try {
    body(e);
  } catch (const Error& err) {
    e.pass = false;
    e.residual = 1;
    e.detail = std::string("error: ") + err.what();
  }
  rep.checks.push_back(std::move(e));
}

inline void from_report(CheckEntry& e, const CheckReport& r) {
  e.pass = r.ok;
  e.residual = static_cast<double>(r.failures.size());
  if (!r.failures.empty()) e.detail = r.failures.front();
}

inline void suite_integrals(VerifyContext& cx, VerifyReport& rep) {
  const std::string s = "integrals";
  run_check(rep, s, "gauge", [&](CheckEntry& e) {
    e.detail = std::to_string(cx.gauge().integrals.size()) + " integrals";
  });
  for (int j = 0; j < cx.rank(); ++j)
    run_check(rep, s, "Y(I" + std::to_string(j + 1) + ")=0", [&](CheckEntry& e) {
      DiffPoly y = y_derivation(cx.gauge().integrals[j]);
      e.pass = y.is_zero();
      e.residual = static_cast<double>(y.terms().size());
      if (!e.pass) e.detail = to_text(y);
    });
  run_check(rep, s, "leading-terms", [&](CheckEntry& e) {
    auto lt = leading_term_check(cx.gauge(), cx.lie().slice);
    e.pass = lt.ok();
    e.residual = (lt.linear_part_ok ? 0 : 1) + (lt.homogeneous ? 0 : 1) + (lt.products_ok ? 0 : 1);
    if (!lt.linear_part_ok) e.detail = "linear part differs from cji rows";
    else if (!lt.homogeneous) e.detail = "not homogeneous of degree m_j + 1";
    else if (!lt.products_ok) e.detail = "lower-order term with a single factor";
  });
  run_check(rep, s, "order-independence", [&](CheckEntry& e) {
    const auto& base = cx.gauge();
    int differ = 0;
    for (auto opt : {GaugeOptions{FactorOrder::SecondKind, true}, GaugeOptions{FactorOrder::Descending, false},
                     GaugeOptions{FactorOrder::Descending, true}})
      if (ds_gauge(cx.lie(), opt).integrals != base.integrals) ++differ;
    e.pass = differ == 0;
    e.residual = differ;
    if (!e.pass) e.detail = "gauge result depends on factor order or traversal";
  });
}

inline void suite_bigcell(VerifyContext& cx, VerifyReport& rep) {
  const std::string s = "bigcell";
  if (cx.type() != CartanType::A) {
    CheckEntry e;
    e.suite = s;
    e.name = "bigcell";
    e.skipped = true;
    e.detail = "big-cell realization is implemented for type A only";
    rep.checks.push_back(e);
    return;
  }
  BigCell bc = make_bigcell(cx.rank());
  run_check(rep, s, "phi(I)=0", [&](CheckEntry& e) { from_report(e, phi_kills_integrals(bc, cx.gauge())); });
  run_check(rep, s, "kostant-bracket", [&](CheckEntry& e) { from_report(e, kostant_bracket_check(bc)); });
  run_check(rep, s, "identification", [&](CheckEntry& e) {
    PhiMap phi(bc);
    from_report(e, tilde_v_identification(bc, cx.table(), phi));
  });
  run_check(rep, s, "right-field-table", [&](CheckEntry& e) { from_report(e, right_field_table_check(bc)); });
  run_check(rep, s, "bar-relations", [&](CheckEntry& e) { from_report(e, bar_relations_check(bc)); });
  run_check(rep, s, "Le-vs-action", [&](CheckEntry& e) {
    PolyField le = le_field(bc);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> num(-9, 9), den(1, 5);
    int bad = 0;
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<Rational> pt;
      for (int c = 0; c < bc.num_coords(); ++c) pt.push_back(make_rational(num(rng), den(rng)));
      auto act = le_by_action(bc, pt);
      for (int c = 0; c < bc.num_coords(); ++c)
        if (evaluate(le.get(c), pt) != act[c]) ++bad;
    }
    e.pass = bad == 0;
    e.residual = bad;
    if (!e.pass) e.detail = "closed-form Le differs from the differentiated action";
  });
}

inline void suite_brackets(VerifyContext& cx, VerifyReport& rep) {
  const std::string s = "brackets";
  run_check(rep, s, "jacobi-constants", [&](CheckEntry& e) {
    auto v = find_jacobi_violation(cx.algebra());
    e.pass = !v;
    e.residual = v ? 1 : 0;
    if (v) {
      const auto& g = cx.algebra();
      e.detail = "Jacobi fails on (" + g.symbol((*v)[0]) + ", " + g.symbol((*v)[1]) + ", " + g.symbol((*v)[2]) + ")";
    }
  });
  run_check(rep, s, "tilde-v-table", [&](CheckEntry& e) {
    const auto& tab = cx.table();
    std::vector<GenDerivation> gen;
    for (int j = 0; j < cx.rank(); ++j) gen.push_back(tilde_v_field(j, tab));
    auto ch = root_chains(cx.lie().roots());
    auto br = [](const GenDerivation& a, const GenDerivation& b) { return bracket(a, b); };
    auto w = iterated_fields(gen, ch, br);
    auto t = check_bracket_table(
        w, cx.lie().roots(), negative_kappa(cx.algebra(), ch), br,
        [&](const GenDerivation& x, const Rational& k) { return DiffPoly(tab.ring, k) * x; },
        [](const GenDerivation& x) { return x.is_zero(); });
    e.pass = t.ok;
    e.residual = static_cast<double>(t.mismatches.size());
    e.detail = std::to_string(t.pairs_checked) + " pairs";
    if (!t.mismatches.empty()) e.detail = t.mismatches.front();
  });
  run_check(rep, s, "jet-relations", [&](CheckEntry& e) {
    const int l = cx.rank();
    JetFields jf = jet_fields(cx.lie().roots().cartan_matrix, cx.table().truncation);
    int bad = 0;
    for (int j = 0; j < l; ++j) {
      if (!(bracket(jf.y, jf.u[j]) == jf.v[j])) ++bad;
      for (int i = 0; i < l; ++i) {
        GenDerivation expect = i == j ? jf.v[j] : GenDerivation(DiffPoly(jf.ring));
        if (!(bracket(jf.u[i], jf.v[j]) == expect)) ++bad;
      }
    }
    for (const auto& I : cx.gauge().integrals)
      if (!jf.y(I.rebased(jf.ring)).is_zero()) ++bad;
    e.pass = bad == 0;
    e.residual = bad;
    if (!e.pass) e.detail = std::to_string(bad) + " relations fail";
  });
}

inline constexpr int kCharacterDegree = 6;

inline void suite_character(VerifyContext& cx, VerifyReport& rep) {
  const std::string s = "character";
  auto compare = [](CheckEntry& e, const std::vector<long>& got, const std::vector<long>& want) {
    double diff = 0;
    for (std::size_t n = 0; n < want.size(); ++n) diff = std::max(diff, std::fabs(double(got[n] - want[n])));
    e.pass = diff == 0;
    e.residual = diff;
    std::string series;
    for (long c : got) series += (series.empty() ? "" : ",") + std::to_string(c);
    e.detail = "series " + series;
  };
  run_check(rep, s, "generator-count", [&](CheckEntry& e) {
    std::vector<int> w;
    for (const auto& g : cx.table().generators) w.push_back(g.order);
    compare(e, monomial_counts(w, kCharacterDegree), character_series(cx.lie().principal.graded_dims, kCharacterDegree));
  });
  run_check(rep, s, "quotient-dimension", [&](CheckEntry& e) {
    std::vector<long> q;
    for (int n = 0; n <= kCharacterDegree; ++n) q.push_back(quotient_dimension(cx.gauge(), n));
    compare(e, q, character_series(cx.lie().principal.graded_dims, kCharacterDegree));
  });
}

}  // namespace detail

/// Runs the named suite ("all" runs each in turn). Library errors inside a
/// check become failed entries; an unknown suite throws.
inline VerifyReport run_verify(const std::string& suite, CartanType t, int rank, const std::string& fault = "") {
  bool known = false;
  for (const auto& s : verify_suites()) known |= s == suite;
  if (!known) throw Error("unknown suite '" + suite + "'");
  if (!fault.empty() && fault != "structure-constant") throw Error("unknown fault '" + fault + "'");
  VerifyReport rep;
  rep.type = std::string(1, type_letter(t));
  rep.rank = rank;
  rep.suite = suite;
  rep.fault = fault;
  detail::VerifyContext cx(t, rank, fault);
  auto want = [&](const char* s) { return suite == "all" || suite == s; };
  if (want("integrals")) detail::suite_integrals(cx, rep);
  if (want("bigcell")) detail::suite_bigcell(cx, rep);
  if (want("brackets")) detail::suite_brackets(cx, rep);
  if (want("character")) detail::suite_character(cx, rep);
  return rep;
}

}  // namespace toda
