#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "toda/errors.hpp"

namespace toda {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational parse_rational(const std::string& text) {
  Rational r;
  if (r.set_str(text, 10) != 0) throw ParseError("not a rational literal: " + text);
  r.canonicalize();
  return r;
}

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

inline long to_long(const Rational& r) {
  if (!is_integer(r) || !r.get_num().fits_slong_p())
    throw Error("rational is not a machine integer: " + r.get_str());
  return r.get_num().get_si();
}

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace toda
