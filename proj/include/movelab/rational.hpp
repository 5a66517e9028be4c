#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>

#include "movelab/errors.hpp"

namespace movelab {

// Exact scalar for the "exact" measure mode. GMP rationals keep themselves
// canonical under arithmetic; parsing goes through rat_from_string below so
// denominators are validated once at the boundary.
using Rat = mpq_class;

// Per-scalar-mode knobs. Algorithms templated on the scalar type branch on
// `exact` for normalization checks and solver tolerances.
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Rat> {
  static constexpr bool exact = true;
  static Rat zero() { return Rat(0); }
  static Rat one() { return Rat(1); }
  // Comparisons are exact; no slack anywhere.
  static Rat sum_slack() { return Rat(0); }
  static Rat flow_slack() { return Rat(0); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double sum_slack() { return 1e-12; }
  static double flow_slack() { return 1e-9; }
};

inline double to_double(const Rat& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

inline Rat rat_pow(const Rat& base, unsigned long e) {
  Rat out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), e);
  return out;  // base canonical => base^e canonical
}

inline Rat binomial_coeff(unsigned long n, unsigned long k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return Rat(b);
}

// Accepts "a/b", plain integers, and decimal/scientific literals ("0.25",
// "1e-3"); decimals convert exactly (digits over a power of ten).
Rat rat_from_string(const std::string& s);

// Canonical form: "num" when the denominator is 1, else "num/den".
std::string rat_to_string(const Rat& q);

// Shortest decimal that round-trips through strtod.
std::string double_to_string(double x);

double double_from_string(const std::string& s);

}  // namespace movelab
