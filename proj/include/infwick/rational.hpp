#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace infwick {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Always "p/q", so exact values are unambiguous in CSV and JSON artifacts.
inline std::string rational_to_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

inline Rational pow_rational(const Rational& base, int exponent) {
  Rational r = 1;
  if (exponent >= 0) {
    for (int i = 0; i < exponent; ++i) r *= base;
  } else {
    for (int i = 0; i < -exponent; ++i) r /= base;
  }
  return r;
}

inline BigInt pow_bigint(long long base, int exponent) {
  BigInt r = 1;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

}  // namespace infwick
