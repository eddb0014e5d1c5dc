#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toda/rootsys.hpp"

namespace toda {

/// For every positive root β a decomposition β = α_{simple[k]} + β_{rest[k]}
/// (rest = -1 for simple roots), using the smallest admissible simple index.
struct RootChains {
  std::vector<int> simple;
  std::vector<int> rest;
};

inline RootChains root_chains(const RootSystemData& rs) {
  RootChains ch;
  for (std::size_t k = 0; k < rs.num_positive(); ++k) {
    const Root& b = rs.positive_roots[k];
    if (RootSystemData::height(b) == 1) {
      int i = 0;
      while (b[i] == 0) ++i;
      ch.simple.push_back(i);
      ch.rest.push_back(-1);
      continue;
    }
    for (int i = 0; i < rs.rank; ++i) {
      Root g = b;
      g[i] -= 1;
      int gi = rs.find(g);
      if (gi >= 0) {
        ch.simple.push_back(i);
        ch.rest.push_back(gi);
        break;
      }
    }
  }
  return ch;
}

/// W_{-α_i} = gen[i], W_{-β} = [W_{-α_i}, W_{-γ}] along the chains.
template <class Field, class Bracket>
std::vector<Field> iterated_fields(const std::vector<Field>& gen, const RootChains& ch, Bracket&& br) {
  std::vector<Field> w;
  for (std::size_t k = 0; k < ch.simple.size(); ++k)
    w.push_back(ch.rest[k] < 0 ? gen[ch.simple[k]] : br(gen[ch.simple[k]], w[ch.rest[k]]));
  return w;
}

/// κ with [F_{-β}, F_{-γ}] = κ F_{-(β+γ)} for the iterated elements
/// F_{-α_i} = f_i of the Chevalley basis. Only pairs with β+γ a root appear.
inline std::map<std::pair<int, int>, Rational> negative_kappa(const ChevalleyAlgebra& g, const RootChains& ch) {
  std::vector<LieVec> gen;
  for (int i = 0; i < g.rank(); ++i) gen.push_back(g.unit(g.f_index(i)));
  auto f = iterated_fields(gen, ch, [&](const LieVec& a, const LieVec& b) { return g.bracket(a, b); });
  const auto& rs = g.roots();
  std::map<std::pair<int, int>, Rational> kappa;
  for (std::size_t b = 0; b < f.size(); ++b)
    for (std::size_t c = 0; c < f.size(); ++c) {
      Root s = rs.positive_roots[b];
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += rs.positive_roots[c][i];
      int si = rs.find(s);
      if (si < 0) continue;
      LieVec br = g.bracket(f[b], f[c]);
      const int fb = g.f_index(si);
      if (is_zero(f[si][fb])) throw Error("iterated element vanished");
      kappa[{static_cast<int>(b), static_cast<int>(c)}] = br[fb] / f[si][fb];
    }
  return kappa;
}

struct BracketTableReport {
  bool ok = true;
  int pairs_checked = 0;
  std::vector<std::string> mismatches;
};

/// Checks [W_b, W_c] = κ_{bc} W_{b+c} for every tabulated pair, and that
/// brackets of pairs whose root sum is no root vanish.
template <class Field, class Bracket, class Scale, class IsZero>
BracketTableReport check_bracket_table(const std::vector<Field>& w, const RootSystemData& rs,
                                       const std::map<std::pair<int, int>, Rational>& kappa, Bracket&& br,
                                       Scale&& scale, IsZero&& is_zero_field) {
  BracketTableReport rep;
  for (std::size_t b = 0; b < w.size(); ++b)
    for (std::size_t c = 0; c < w.size(); ++c) {
      Field lhs = br(w[b], w[c]);
      auto it = kappa.find({static_cast<int>(b), static_cast<int>(c)});
      bool good;
      if (it == kappa.end()) {
        good = is_zero_field(lhs);
      } else {
        Root s = rs.positive_roots[b];
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += rs.positive_roots[c][i];
        good = is_zero_field(lhs - scale(w[rs.find(s)], it->second));
      }
      ++rep.pairs_checked;
      if (!good) {
        rep.ok = false;
        rep.mismatches.push_back("[W" + std::to_string(b) + ", W" + std::to_string(c) + "]");
      }
    }
  return rep;
}

}  // namespace toda
