#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace fsdim {

using BigInt = mpz_class;
// Always kept canonical (lowest terms, positive denominator).
using Rational = mpq_class;

// Parses "a", "-a", "a/b". Throws InvalidArgument on malformed input or b == 0.
Rational parse_rational(std::string_view text);

// "a/b", or "a" when the denominator is 1.
std::string to_string(const Rational& q);
std::string to_string(const BigInt& z);

Rational make_rational(const BigInt& num, const BigInt& den);
Rational make_rational(std::int64_t num, std::int64_t den = 1);

// floor(q) and q - floor(q).
BigInt floor(const Rational& q);
Rational frac(const Rational& q);

// True when the denominator divides some power of k.
bool is_k_adic(const Rational& q, unsigned k);

BigInt pow(unsigned base, std::size_t exponent);

std::uint64_t to_u64(const BigInt& z);

}  // namespace fsdim
