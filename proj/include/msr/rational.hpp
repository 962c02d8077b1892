// Exact rational scalars.  boost's cpp_rational already maintains the
// invariants we care about (gcd-reduced, denominator > 0), so this header
// only adds the few helpers the rest of the engine wants.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace msr {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(long num, long den = 1) { return Rational(num, den); }

inline Rational rat_pow(const Rational& base, unsigned e) {
    Rational acc(1);
    Rational b = base;
    unsigned k = e;
    while (k) {
        if (k & 1u) acc *= b;
        b *= b;
        k >>= 1u;
    }
    return acc;
}

inline std::string rat_str(const Rational& r) {
    return r.str(); // "n" or "n/d"
}

} // namespace msr
