#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "jetcalc/error.hpp"

namespace jetcalc {

using Rational = mpq_class;

/// Exact value of a decimal or integer literal such as "12", "0.25" or ".5".
inline Rational rational_from_literal(std::string_view lit) {
  const auto dot = lit.find('.');
  std::string digits(lit);
  mpz_class scale = 1;
  if (dot != std::string_view::npos) {
    digits.erase(dot, 1);
    for (std::size_t i = dot; i < digits.size(); ++i) scale *= 10;
  }
  if (digits.empty()) throw SyntaxError("malformed number '" + std::string(lit) + "'", 0);
  Rational r(mpz_class(digits), scale);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

/// Complex number with exact rational parts; entries of the gamma matrices.
struct GaussianRational {
  Rational re;
  Rational im;

  GaussianRational() = default;
  GaussianRational(long r) : re(r), im(0) {}
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static GaussianRational i() { return {0, 1}; }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  bool is_zero() const { return re == 0 && im == 0; }
};

}  // namespace jetcalc
