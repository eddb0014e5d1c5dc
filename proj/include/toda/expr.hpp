#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "toda/errors.hpp"
#include "toda/mpoly.hpp"

namespace toda {

/// Recursive-descent parser for comma-separated univariate polynomials:
///   list    := expr (',' expr)*
///   expr    := term (('+' | '-') term)*
///   term    := factor (('*' | '/') factor)*      divisor must be constant
///   factor  := unary ('^' integer)?
///   unary   := '-' unary | '+' unary | primary
///   primary := number | variable | '(' expr ')'
/// Numbers are integers, decimals (read exactly: 0.25 = 1/4) or p/q via '/'.
/// The single variable becomes MPoly variable 0.
class PolyParser {
 public:
  PolyParser(std::string text, char variable) : s_(std::move(text)), var_(variable) {}

  std::vector<MPoly> parse_list() {
    std::vector<MPoly> out;
    out.push_back(expr());
    skip();
    while (peek() == ',') {
      ++pos_;
      out.push_back(expr());
      skip();
    }
    if (pos_ != s_.size()) fail("unexpected character");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at position " + std::to_string(pos_) + " in \"" + s_ + "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  MPoly expr() {
    MPoly v = term();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      MPoly r = term();
      v = c == '+' ? v + r : v - r;
    }
    return v;
  }
  MPoly term() {
    MPoly v = factor();
    for (char c = peek(); c == '*' || c == '/'; c = peek()) {
      ++pos_;
      MPoly r = factor();
      if (c == '*') {
        v = v * r;
      } else {
        if (!r.is_constant() || r.is_zero()) fail("division by a non-constant or zero");
        v = v / r;
      }
    }
    return v;
  }
  MPoly factor() {
    MPoly base = unary();
    if (peek() != '^') return base;
    ++pos_;
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be a nonnegative integer");
    if (pos_ - start > 4) fail("exponent too large");
    int e = std::stoi(s_.substr(start, pos_ - start));
    MPoly out(1);
    for (int k = 0; k < e; ++k) out = out * base;
    return out;
  }
  MPoly unary() {
    char c = peek();
    if (c == '-') {
      ++pos_;
      return -unary();
    }
    if (c == '+') {
      ++pos_;
      return unary();
    }
    return primary();
  }
  MPoly primary() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      MPoly v = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return v;
    }
    if (c == var_) {
      ++pos_;
      return MPoly::var(0);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) fail(std::string("unknown variable '") + c + "'");
    fail("expected a number, variable or '('");
  }
  MPoly number() {
    std::size_t start = pos_;
    std::string digits;
    int frac = -1;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
      if (s_[pos_] == '.') {
        if (frac >= 0) fail("malformed number");
        frac = 0;
      } else {
        digits += s_[pos_];
        if (frac >= 0) ++frac;
      }
      ++pos_;
    }
    if (digits.empty()) {
      pos_ = start;
      fail("malformed number");
    }
    Rational v(digits, 10);
    v.canonicalize();
    if (frac > 0) {
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac));
      v /= Rational(den);
    }
    return MPoly(v);
  }

  std::string s_;
  char var_;
  std::size_t pos_ = 0;
};

inline std::vector<MPoly> parse_polynomials(const std::string& text, char variable) {
  return PolyParser(text, variable).parse_list();
}

inline double eval_univariate(const MPoly& p, double t) { return evaluate(p, std::vector<double>{t}); }

}  // namespace toda
