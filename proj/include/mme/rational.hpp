#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace mme {

using Rational = mpq_class;
using BigInt = mpz_class;

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& q);

/// Accepts "p", "p/q", "-p/q" and decimals such as "0.25" or "-1.5e-2".
Rational parse_rational(std::string_view text);

double to_double(const Rational& q);

Rational factorial(unsigned k);

/// num/den in lowest terms with a positive denominator.
inline Rational ratio(long num, long den) {
  Rational out(num, den);
  out.canonicalize();
  return out;
}

}  // namespace mme
