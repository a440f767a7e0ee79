#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace zhopf {

// Exact rational scalar. mpq_class arithmetic keeps results canonical
// (reduested gcd, positive denominator); the factory below canonicalizes
// explicitly constructed fractions.
using Rat = mpq_class;
using Int = mpz_class;

inline Rat make_rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline int rat_sign(const Rat& q) { return sgn(q); }

inline Rat rat_abs(const Rat& q) { return abs(q); }

inline Rat rat_pow(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    if (base == 0 && e < 0) throw std::domain_error("rat_pow: 0^negative");
    Rat acc(1);
    Rat b = e > 0 ? base : Rat(1) / base;
    long n = e > 0 ? e : -e;
    while (n > 0) {
        if (n & 1) acc *= b;
        b *= b;
        n >>= 1;
    }
    return acc;
}

inline Int int_factorial(long n) {
    Int f = 1;
    for (long i = 2; i <= n; ++i) f *= i;
    return f;
}

// (n-1)!! with (-1)!! = 1.
inline Int int_double_factorial(long n) {
    Int f = 1;
    for (long i = n; i >= 2; i -= 2) f *= i;
    return f;
}

inline Int int_binomial(long n, long k) {
    if (k < 0 || k > n) return 0;
    Int b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return b;
}

// Parses "p", "-p/q" style exact rationals.
inline Rat parse_rat(const std::string& s) {
    Rat q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("parse_rat: bad literal '" + s + "'");
    q.canonicalize();
    return q;
}

inline std::string rat_to_string(const Rat& q) { return q.get_str(); }

// gcd on rationals: gcd of numerators over lcm of denominators. Used for
// content extraction; gcd(0, x) = |x|.
inline Rat rat_gcd(const Rat& a, const Rat& b) {
    if (a == 0) return rat_abs(b);
    if (b == 0) return rat_abs(a);
    Int gn, ld;
    mpz_gcd(gn.get_mpz_t(), a.get_num_mpz_t(), b.get_num_mpz_t());
    mpz_lcm(ld.get_mpz_t(), a.get_den_mpz_t(), b.get_den_mpz_t());
    return make_rat(gn, ld);
}

}  // namespace zhopf
