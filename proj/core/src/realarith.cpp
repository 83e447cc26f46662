#include "fsdim/realarith.hpp"

#include <algorithm>
#include <string>

#include "fsdim/error.hpp"

namespace fsdim {

namespace {

BigInt digits_to_integer(std::span<const Digit> digits, unsigned k) {
  if (digits.empty()) return BigInt(0);
  std::string text;
  text.reserve(digits.size());
  for (Digit d : digits) text.push_back(d < 10 ? static_cast<char>('0' + d)
                                               : static_cast<char>('a' + (d - 10)));
  return BigInt(text, static_cast<int>(k));
}

// The `count` low-order base-k digits of z >= 0, most significant first,
// zero padded on the left.
std::vector<Digit> integer_to_digits(const BigInt& z, unsigned k, std::size_t count) {
  std::vector<Digit> out(count, 0);
  if (count == 0 || z == 0) return out;
  const std::string text = z.get_str(static_cast<int>(k));
  const std::size_t take = std::min(text.size(), count);
  for (std::size_t i = 0; i < take; ++i) {
    out[count - take + i] = *char_to_digit(text[text.size() - take + i]);
  }
  return out;
}

BigInt floor_scaled(const Rational& x, const BigInt& scale) {
  BigInt num = x.get_num() * scale;
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), x.get_den_mpz_t());
  return out;
}

struct Certified {
  std::size_t count = 0;
  std::vector<Digit> digits;
};

// Longest prefix of digits shared by every point of the closed interval
// [lo, hi] with 0 <= lo <= hi, capped at `count`.
Certified common_prefix(const Rational& lo, const Rational& hi, unsigned k, std::size_t count) {
  if (hi >= 1) return {};
  const BigInt kc = pow(k, count);
  const auto lo_digits = integer_to_digits(floor_scaled(lo, kc), k, count);
  const auto hi_digits = integer_to_digits(floor_scaled(hi, kc), k, count);
  std::size_t same = 0;
  while (same < count && lo_digits[same] == hi_digits[same]) ++same;
  return {same, std::vector<Digit>(lo_digits.begin(), lo_digits.begin() + static_cast<std::ptrdiff_t>(same))};
}

}  // namespace

std::vector<Digit> expand_fraction(const Rational& x, unsigned k, std::size_t count) {
  return integer_to_digits(floor_scaled(frac(x), pow(k, count)), k, count);
}

CertifiedDigitResult affine_mod1(const DigitSequence& alpha, const Rational& scale,
                                 const Rational& shift, std::size_t count,
                                 std::size_t lookahead_cap) {
  const unsigned k = alpha.base();
  if (alpha.exact_value()) {
    const Rational x = frac(scale * *alpha.exact_value() + shift);
    DigitSequence digits(alpha.alphabet(), expand_fraction(x, k, count));
    digits.set_exact_value(x);
    return {std::move(digits), count, 0, false, std::nullopt, true};
  }

  std::size_t guard = std::min(kInitialLookahead, std::max<std::size_t>(lookahead_cap, 1));
  while (true) {
    const std::size_t wanted = count + guard;
    auto prefix = alpha.prefix_at_most(wanted);
    const std::size_t read = prefix.size();
    const BigInt p = digits_to_integer(prefix, k);
    const BigInt kd = pow(k, read);

    // α lies in the closed interval [p, p+1] / k^read.
    Rational a = scale * Rational(p, kd) + shift;
    Rational b = scale * Rational(p + 1, kd) + shift;
    a.canonicalize();
    b.canonicalize();
    if (b < a) std::swap(a, b);
    const Rational whole(floor(a));
    a -= whole;
    b -= whole;

    Certified c = common_prefix(a, b, k, count);
    const bool exhausted = read < wanted;
    if (c.count >= count || exhausted || guard >= lookahead_cap) {
      CertifiedDigitResult out{DigitSequence(alpha.alphabet(), std::move(c.digits)), c.count,
                               read > count ? read - count : 0, false, std::nullopt, false};
      if (c.count < count) {
        out.unresolved = true;
        out.unresolved_at = c.count;
      }
      return out;
    }
    guard = std::min(guard * 2, lookahead_cap);
  }
}

CertifiedDigitResult mul_int_mod1(const DigitSequence& alpha, const BigInt& m, std::size_t count,
                                  std::size_t lookahead_cap) {
  if (m < 1) throw InvalidArgument("multiplier must be a positive integer");
  return affine_mod1(alpha, Rational(m), Rational(0), count, lookahead_cap);
}

CertifiedDigitResult div_int(const DigitSequence& alpha, const BigInt& b, std::size_t count,
                             std::size_t lookahead_cap) {
  if (b < 1) throw InvalidArgument("divisor must be a positive integer");
  return affine_mod1(alpha, make_rational(BigInt(1), b), Rational(0), count, lookahead_cap);
}

CertifiedDigitResult add_rational_mod1(const DigitSequence& alpha, const Rational& q,
                                       std::size_t count, std::size_t lookahead_cap) {
  return affine_mod1(alpha, Rational(1), q, count, lookahead_cap);
}

CertifiedDigitResult mul_rational_mod1(const DigitSequence& alpha, const Rational& q,
                                       std::size_t count, std::size_t lookahead_cap) {
  if (q == 0) throw InvalidArgument("rational multiplier must be nonzero");
  return affine_mod1(alpha, q, Rational(0), count, lookahead_cap);
}

MultiplierDigits multiplier_digits(std::uint64_t m, unsigned k) {
  if (m == 0) throw InvalidArgument("multiplier must be a positive integer");
  (void)Alphabet(k);
  MultiplierDigits md;
  md.m = m;
  md.k = k;
  md.s = 0;
  for (std::uint64_t v = m; v > 0; v /= k) {
    md.digits.push_back(v % k);
    md.s += v % k;
  }
  md.r = static_cast<unsigned>(md.digits.size() - 1);
  return md;
}

BlockCode block_image_code(const MultiplierDigits& md, unsigned l, BlockCode x, std::uint64_t c,
                           std::span<const Digit> z) {
  __extension__ typedef unsigned __int128 u128;
  const std::uint64_t kl = block_space_size(md.k, l);
  if (x >= kl) throw InvalidArgument("block code outside Σ^l");
  if (c > md.s) {
    throw InvalidArgument("carry " + std::to_string(c) + " exceeds digit sum " +
                          std::to_string(md.s));
  }
  if (z.size() != md.r) {
    throw InvalidArgument("advice has " + std::to_string(z.size()) + " digits, expected " +
                          std::to_string(md.r));
  }
  u128 value = (static_cast<u128>(md.m % kl) * x) % kl;
  value += c % kl;
  // Shift term: the i-shifted copy pulls z[0..i-1] into the low digits.
  u128 pulled = 0;
  for (unsigned i = 1; i <= md.r; ++i) {
    pulled = (pulled * md.k + z[i - 1]) % kl;
    value += static_cast<u128>(md.digits[i] % kl) * pulled % kl;
    value %= kl;
  }
  return static_cast<BlockCode>(value % kl);
}

std::vector<Digit> block_image_f(std::span<const Digit> x, std::uint64_t c,
                                 std::span<const Digit> z, std::uint64_t m, Alphabet alphabet) {
  const unsigned k = alphabet.base();
  if (x.empty()) throw InvalidArgument("empty block");
  for (Digit d : x) {
    if (!alphabet.contains(d)) throw InvalidArgument("block digit outside alphabet");
  }
  for (Digit d : z) {
    if (!alphabet.contains(d)) throw InvalidArgument("advice digit outside alphabet");
  }
  const auto md = multiplier_digits(m, k);
  const auto l = static_cast<unsigned>(x.size());
  return decode_block(block_image_code(md, l, encode_block(x, k), c, z), l, k);
}

}  // namespace fsdim
