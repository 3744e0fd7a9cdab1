#pragma once

#include <complex>

#include "dspectra/rational.hpp"

namespace dspectra {

inline Rational frac_part(const Rational& x) {
    BigInt n = num(x), d = den(x);
    BigInt m = n % d;
    if (m < 0) m += d;
    return Rational(m, d);
}

/// e^{-2 pi i turns}, with the angle reduced exactly in rational arithmetic so
/// large frequencies lose no precision.
inline std::complex<double> unit_phase(const Rational& turns) {
    double a = -2.0 * M_PI * to_double(frac_part(turns));
    return {std::cos(a), std::sin(a)};
}

}  // namespace dspectra
