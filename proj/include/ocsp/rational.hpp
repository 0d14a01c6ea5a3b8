#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "ocsp/errors.hpp"

namespace ocsp {

// Exact rational scalar used for all probabilities, weights and payoffs.
using Rational = mpq_class;

// Canonicalized fraction. mpq_class(n, d) alone does not reduce.
inline Rational frac(long num, long den) {
    if (den == 0) throw BadParameter("frac: zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// gmpxx has no long long constructors; LP64 makes this lossless.
static_assert(sizeof(long) == sizeof(long long));
inline Rational to_rational(long long v) { return Rational(static_cast<long>(v)); }

// Parses "p/q", "p", or a plain decimal like "0.05" (read exactly as 5/100).
Rational parse_rational(const std::string& text);

// Lowest-terms "p" or "p/q".
std::string format_rational(const Rational& r);

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace ocsp
