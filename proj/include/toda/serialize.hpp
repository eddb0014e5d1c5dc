#pragma once

#include <json.hpp>
#include <string>

#include "toda/diffring.hpp"
#include "toda/dsgauge.hpp"
#include "toda/rootsys.hpp"

namespace toda {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "toda-forge/1";

inline Json rational_json(const Rational& r) { return to_string(r); }

inline Json rational_matrix_json(const RationalMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(rational_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Sparse Lie vector as [[symbol, "p/q"], ...] in basis order.
inline Json lie_vec_json(const ChevalleyAlgebra& g, const LieVec& v) {
  Json out = Json::array();
  for (int b = 0; b < g.dim(); ++b)
    if (!is_zero(v[b])) out.push_back(Json::array({g.symbol(b), rational_json(v[b])}));
  return out;
}

/// Basis symbols plus [a, b, c, n] meaning [a, b] ∋ n·c, for a < b only.
inline Json algebra_json(const ChevalleyAlgebra& g) {
  Json j;
  j["type"] = std::string(1, type_letter(g.roots().cartan_type));
  j["rank"] = g.rank();
  j["dim"] = g.dim();
  j["sign_variant"] = g.sign_variant();
  Json cartan = Json::array();
  for (const auto& row : g.roots().cartan_matrix) cartan.push_back(row);
  j["cartan"] = std::move(cartan);
  Json basis = Json::array();
  for (int b = 0; b < g.dim(); ++b) basis.push_back(g.symbol(b));
  j["basis"] = std::move(basis);
  Json br = Json::array();
  for (int a = 0; a < g.dim(); ++a)
    for (int b = a + 1; b < g.dim(); ++b)
      for (const auto& t : g.bracket(a, b)) br.push_back(Json::array({g.symbol(a), g.symbol(b), g.symbol(t.index), to_long(t.coeff)}));
  j["brackets"] = std::move(br);
  return j;
}

inline Json slice_json(const ChevalleyAlgebra& g, const KostantSliceData& s) {
  Json j;
  j["rule"] = slice_rule_name(s.rule);
  j["exponents"] = s.exponents;
  Json basis = Json::array();
  for (const auto& v : s.slice_basis) basis.push_back(lie_vec_json(g, v));
  j["basis"] = std::move(basis);
  j["cji"] = rational_matrix_json(s.cji);
  j["repeated_exponents"] = s.repeated_exponents;
  return j;
}

inline Json algebra_document(const LieData& lie) {
  Json j;
  j["schema"] = kSchema;
  j["algebra"] = algebra_json(*lie.alg);
  j["slice"] = slice_json(*lie.alg, lie.slice);
  return j;
}

/// Terms of a polynomial in jet variables; indices are 1-based.
inline Json diff_poly_terms_json(const DiffPoly& p) {
  Json terms = Json::array();
  for (const auto& [m, c] : p.terms()) {
    Json vars = Json::array();
    for (const auto& [v, pw] : m.factors) vars.push_back({{"i", v.index + 1}, {"order", v.order}, {"power", pw}});
    Json t;
    t["coeff"] = rational_json(c);
    t["vars"] = std::move(vars);
    if (m.has_exp()) t["exp"] = m.exps;
    terms.push_back(std::move(t));
  }
  return terms;
}

inline Json integrals_json(const LieData& lie, const GaugeResult& res) {
  Json j;
  j["schema"] = kSchema;
  j["type"] = std::string(1, type_letter(lie.roots().cartan_type));
  j["rank"] = lie.rank();
  j["exponents"] = lie.slice.exponents;
  j["cji"] = rational_matrix_json(lie.slice.cji);
  Json ints = Json::array();
  for (std::size_t k = 0; k < res.integrals.size(); ++k) {
    Json e;
    e["j"] = static_cast<int>(k + 1);
    e["degree"] = res.degrees[k];
    e["terms"] = diff_poly_terms_json(res.integrals[k]);
    ints.push_back(std::move(e));
  }
  j["integrals"] = std::move(ints);
  j["slice_rule"] = slice_rule_name(lie.slice.rule);
  j["repeated_exponents"] = lie.slice.repeated_exponents;
  return j;
}

inline std::string integrals_text(const GaugeResult& res) {
  std::string out;
  for (std::size_t k = 0; k < res.integrals.size(); ++k)
    out += "I" + std::to_string(k + 1) + " = " + to_text(res.integrals[k]) + "\n";
  return out;
}

}  // namespace toda
