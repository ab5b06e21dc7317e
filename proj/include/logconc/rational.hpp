#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace logconc {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses "p/q", "-p/q" or a plain integer. The result is canonical.
/// Throws Error(format) on anything else (including decimals like "1.5").
Rational parse_rational(std::string_view text);

/// Canonical "numerator/denominator" in decimal, always with the slash.
std::string to_fraction_string(const Rational& q);

Integer binomial(std::int64_t n, std::int64_t k);  // 0 outside 0 <= k <= n

/// Least common multiple of all denominators.
Integer common_denominator(std::span<const Rational> values);

/// Cross-multiplied comparison of a*b against c*d, no gcd work.
int compare_products(const Rational& a, const Rational& b, const Rational& c, const Rational& d);
int compare_products(const Integer& a, const Integer& b, const Integer& c, const Integer& d);

std::size_t bit_length(const Integer& z);

/// 64-bit FNV-1a, used for row checksums in logs and cache summaries.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);

}  // namespace logconc
