#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgv {

// All arithmetic in this library is exact; Int is an unbounded integer.
using Int = mpz_class;

inline const Int& int_zero() {
  static const Int z = 0;
  return z;
}

// floor division: a = q*b + r with 0 <= r < |b|
inline void fdiv_qr(Int& q, Int& r, const Int& a, const Int& b) {
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
}

inline Int fdiv_q(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Int fdiv_r(const Int& a, const Int& b) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

// g = u*a + v*b
inline Int gcdext(const Int& a, const Int& b, Int& u, Int& v) {
  Int g;
  mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), a.get_mpz_t(),
             b.get_mpz_t());
  return g;
}

inline Int binomial(const Int& n, unsigned long k) {
  Int b;
  mpz_bin_ui(b.get_mpz_t(), n.get_mpz_t(), k);
  return b;
}

inline Int ipow(unsigned long base, unsigned long exp) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

inline bool fits_long(const Int& a) { return mpz_fits_slong_p(a.get_mpz_t()); }

inline long to_long(const Int& a) {
  if (!fits_long(a)) throw std::overflow_error("integer too large for long");
  return mpz_get_si(a.get_mpz_t());
}

// inverse of a mod m (m > 0); throws if not coprime
inline Int modinv(const Int& a, const Int& m) {
  Int r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::domain_error("modinv: not invertible");
  return r;
}

// largest k with p^k | n, for n != 0
inline unsigned valuation(Int n, const Int& p) {
  unsigned k = 0;
  if (n == 0) throw std::domain_error("valuation of zero");
  Int q, r;
  for (;;) {
    fdiv_qr(q, r, n, p);
    if (r != 0) return k;
    n = q;
    ++k;
  }
}

// true iff n = p^k for some k >= 0
inline bool is_prime_power_of(const Int& n, long p) {
  if (n <= 0) return false;
  Int m = n;
  while (m > 1) {
    if (!mpz_divisible_ui_p(m.get_mpz_t(), (unsigned long)p)) return false;
    mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), (unsigned long)p);
  }
  return true;
}

inline bool is_odd_prime(long p) {
  if (p < 3 || p % 2 == 0) return false;
  for (long d = 3; d * d <= p; d += 2)
    if (p % d == 0) return false;
  return true;
}

inline std::string int_str(const Int& a) { return a.get_str(); }

}  // namespace pgv
