#pragma once

#include <gmpxx.h>

#include <string>

namespace tgd {

// All coefficients in the library are exact rationals.  mpq_class keeps
// values canonical (gcd-reduced, positive denominator), so equality is
// plain comparison and rendering is deterministic.
using Scalar = mpq_class;

inline bool is_zero(const Scalar& q) { return sgn(q) == 0; }

// Canonical text: "p" for integers, "p/q" otherwise, '-' on the numerator.
std::string scalar_to_string(const Scalar& q);

// Accepts an optionally signed integer or integer/integer pair.  Throws
// Error(InvalidInput) on malformed text or zero denominator.
Scalar scalar_from_string(const std::string& text);

}  // namespace tgd
