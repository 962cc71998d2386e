#pragma once

#include <gmpxx.h>

#include <string>

namespace qreflect {

// Exact rational coefficients. mpq_class keeps fractions reduced with a
// positive denominator, which is exactly the canonical form we need.
using Rat = mpq_class;

// Parses "p", "-p", "p/q". Throws UserError on malformed text or q = 0.
Rat rat_parse(const std::string& text);

// Canonical rendering: "p" for integers, "p/q" otherwise.
std::string rat_str(const Rat& r);

bool rat_is_integer(const Rat& r);

// Requires an integer value that fits in long.
long rat_to_long(const Rat& r);

// base^e with e possibly negative (base nonzero in that case).
Rat rat_pow(const Rat& base, long e);

} // namespace qreflect
