// Exact rational scalars: canonicalizing construction, parsing, formatting, floor/mod helpers.
#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <string>

namespace circleflow {

using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

// Canonical p/q. Throws validation_error on q == 0. Sign is normalized to the numerator.
Rat make_rat(const Int& num, const Int& den);

// Accepts "p" or "p/q" (optional leading +/-, surrounding whitespace; q > 0 required).
// Always returns a canonical rational regardless of the input's reduced-ness.
Rat parse_rat(const std::string& text);

// Lowest terms; integers print bare ("0", "-3"), everything else as "p/q" with q > 0.
std::string format_rat(const Rat& x);

double to_double(const Rat& x);

// Exact dyadic value of a finite double. Throws validation_error on NaN/inf.
Rat rat_of_double(double x);

// Largest integer <= x.
Int floor_rat(const Rat& x);

// x - m*floor(x/m), in [0, m). Requires m > 0.
Rat reduce_mod(const Rat& x, const Rat& m);

}  // namespace circleflow
