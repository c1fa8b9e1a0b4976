#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace negadep {

/// Exact arbitrary-precision rational. All certified inequalities in this
/// library are evaluated with this type; doubles appear only in empirical
/// estimates and report rendering.
using Rat = mpq_class;
using Int = mpz_class;

/// num/den as a canonical rational (mpq_class constructors do not
/// canonicalize on their own).
inline Rat rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rat: zero denominator");
  Rat q(num, den);
  q.canonicalize();
  return q;
}

inline Rat rat(const Int& num, const Int& den) {
  if (den == 0) throw std::invalid_argument("rat: zero denominator");
  Rat q(num);
  q /= Rat(den);
  return q;
}

/// base^exp for exp >= 0.
inline Int ipow(long base, long exp) {
  if (exp < 0) throw std::invalid_argument("ipow: negative exponent");
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base),
                static_cast<unsigned long>(exp));
  return r;
}

/// base^exp as a rational, any sign of exp.
inline Rat rat_pow(long base, long exp) {
  if (exp >= 0) return Rat(ipow(base, exp));
  return rat(Int(1), ipow(base, -exp));
}

/// q^exp for a rational q, any sign of exp (q != 0 when exp < 0).
inline Rat rat_pow(const Rat& q, long exp) {
  Rat r(1);
  Rat x = exp >= 0 ? q : Rat(1) / q;
  long e = exp >= 0 ? exp : -exp;
  while (e > 0) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

/// Binomial coefficient; 0 outside the triangle.
inline Int binom(long n, long k) {
  if (k < 0 || n < 0 || k > n) return Int(0);
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  return r;
}

/// floor(q) as big integer.
inline Int rat_floor(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

/// ceil(q) as big integer.
inline Int rat_ceil(const Rat& q) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline double rat_double(const Rat& q) { return q.get_d(); }

}  // namespace negadep
