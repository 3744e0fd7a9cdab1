#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dspectra {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational pow2(long e) {
    if (e >= 0) return Rational(BigInt(1) << e, 1);
    return Rational(1, BigInt(1) << (-e));
}

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

inline BigInt num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt den(const Rational& r) { return boost::multiprecision::denominator(r); }

inline Rational rational_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

// Integer power with small non-negative exponent.
inline Rational rpow(const Rational& x, unsigned e) {
    Rational acc(1);
    Rational base = x;
    unsigned k = e;
    while (k) {
        if (k & 1u) acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

// Exact test of  x < 2^a * y  for rational exponent a = p/q and x, y >= 0.
inline bool less_than_pow2_times(const Rational& x, const Rational& a, const Rational& y) {
    if (x < 0 || y < 0) throw std::invalid_argument("less_than_pow2_times: operands must be non-negative");
    if (x == 0) return y > 0;
    if (y == 0) return false;
    {
        // double-precision screen: only near-ties fall through to the exact path
        double lx = std::log2(to_double(x)), ly = std::log2(to_double(y)) + to_double(a);
        if (lx < ly - 1e-9) return true;
        if (lx > ly + 1e-9) return false;
    }
    const BigInt p = num(a);
    const BigInt q = den(a);  // q >= 1
    const auto qe = q.convert_to<unsigned>();
    Rational lhs = rpow(x, qe);
    Rational rhs = rpow(y, qe);
    if (p >= 0)
        rhs *= Rational(BigInt(1) << p.convert_to<unsigned>(), 1);
    else
        lhs *= Rational(BigInt(1) << (-p).convert_to<unsigned>(), 1);
    return lhs < rhs;
}

// Exact floor of 2^e for rational e >= 0 (e = p/q): the largest t with t^q <= 2^p.
inline BigInt floor_pow2(const Rational& e) {
    if (e < 0) throw std::invalid_argument("floor_pow2: exponent must be non-negative");
    const BigInt p = num(e);
    const auto q = den(e).convert_to<unsigned>();
    if (q == 1) return BigInt(1) << p.convert_to<unsigned>();
    const BigInt target = BigInt(1) << p.convert_to<unsigned>();
    // Double estimate, then exact adjustment.
    BigInt t(static_cast<long long>(std::pow(2.0, to_double(e))));
    if (t < 1) t = 1;
    auto powq = [q](const BigInt& v) {
        BigInt acc(1);
        for (unsigned i = 0; i < q; ++i) acc *= v;
        return acc;
    };
    while (powq(t) > target) --t;
    while (powq(t + 1) <= target) ++t;
    return t;
}

// Exact comparison  count < 2^e  for integer count >= 0 and rational e >= 0.
inline bool count_below_pow2(const BigInt& count, const Rational& e) {
    return less_than_pow2_times(Rational(count), e, Rational(1));
}

// Closest dyadic lower approximation of 2^a - 1 (a rational, 2^a evaluated in
// extended precision, rounded down to `bits` fractional bits). Used where the
// constants of interest involve irrational powers of two but exact-rational
// comparisons are still wanted downstream.
inline Rational pow2_minus_one_lower(const Rational& a, unsigned bits = 48) {
    long double x = std::pow(2.0L, static_cast<long double>(to_double(a)));
    long double scaled = x * std::pow(2.0L, static_cast<long double>(bits));
    BigInt n(static_cast<long long>(scaled));
    Rational r(n, BigInt(1) << bits);
    return r - 1;
}

inline std::string rational_to_string(const Rational& r) {
    return num(r).str() + "/" + den(r).str();
}

inline Rational rational_from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

}  // namespace dspectra
