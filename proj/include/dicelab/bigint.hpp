#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string_view>

namespace dicelab {

/// Arbitrary-precision signed integer. Victory counts, run lengths and
/// enumeration totals are kept exact; no floating point enters the word
/// calculus.
using BigInt = boost::multiprecision::cpp_int;

/// Arbitrary-precision rational, used wherever a probability must be exact
/// (finite-law coefficients, the p = 1/2 test, blow-up checks).
using BigRat = boost::multiprecision::cpp_rational;

/// Strict base-10 integer parse (optional sign, digits only). cpp_int's own
/// string constructor honors 0x/0 prefixes, which is never wanted here.
inline bool parse_decimal(std::string_view text, BigInt& out) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-'))
    negative = text[pos++] == '-';
  if (pos == text.size()) return false;
  BigInt value = 0;
  for (; pos < text.size(); ++pos) {
    if (text[pos] < '0' || text[pos] > '9') return false;
    value *= 10;
    value += text[pos] - '0';
  }
  out = negative ? -value : value;
  return true;
}

inline double to_double(const BigInt& v) { return v.convert_to<double>(); }
inline double to_double(const BigRat& v) { return v.convert_to<double>(); }

/// Quotient of two big integers as a double, stable even when both operands
/// overflow the double range.
inline double ratio_as_double(const BigInt& num, const BigInt& den) {
  return BigRat(num, den).convert_to<double>();
}

}  // namespace dicelab
