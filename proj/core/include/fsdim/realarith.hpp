#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsdim/blockstats.hpp"
#include "fsdim/digitseq.hpp"
#include "fsdim/rational.hpp"

namespace fsdim {

inline constexpr std::size_t kDefaultLookaheadCap = 4096;
inline constexpr std::size_t kInitialLookahead = 8;

// Digits of an exact arithmetic result on a digit stream.
//
// `digits` holds exactly `certified_count` digits, each proven equal to the
// corresponding digit of the true result (terminating form for k-adic
// results). When fewer digits than requested could be certified,
// `unresolved` is set and `unresolved_at` names the first uncertain position.
struct CertifiedDigitResult {
  DigitSequence digits;
  std::size_t certified_count = 0;
  std::size_t lookahead_used = 0;
  bool unresolved = false;
  std::optional<std::size_t> unresolved_at;
  // True when the input carried an exact rational value and the result was
  // computed from it directly.
  bool exact_path = false;
};

// frac(scale·α + shift) for α = 0.S, evaluated on a single interval
// enclosure of α. All four public operations below are instances.
CertifiedDigitResult affine_mod1(const DigitSequence& alpha, const Rational& scale,
                                 const Rational& shift, std::size_t count,
                                 std::size_t lookahead_cap = kDefaultLookaheadCap);

// frac(m·α), m >= 1.
CertifiedDigitResult mul_int_mod1(const DigitSequence& alpha, const BigInt& m, std::size_t count,
                                  std::size_t lookahead_cap = kDefaultLookaheadCap);

// α / b, b >= 1.
CertifiedDigitResult div_int(const DigitSequence& alpha, const BigInt& b, std::size_t count,
                             std::size_t lookahead_cap = kDefaultLookaheadCap);

// frac(q + α), any rational q.
CertifiedDigitResult add_rational_mod1(const DigitSequence& alpha, const Rational& q,
                                       std::size_t count,
                                       std::size_t lookahead_cap = kDefaultLookaheadCap);

// frac(q·α), q != 0. Negative q gives frac(-(|q|α)).
CertifiedDigitResult mul_rational_mod1(const DigitSequence& alpha, const Rational& q,
                                       std::size_t count,
                                       std::size_t lookahead_cap = kDefaultLookaheadCap);

// The first `count` base-k digits of frac(x), terminating form.
std::vector<Digit> expand_fraction(const Rational& x, unsigned k, std::size_t count);

// Base-k digits of a positive multiplier m, least significant first
// (m = Σ m_i k^i), together with r = floor(log_k m) and s = Σ m_i.
struct MultiplierDigits {
  std::uint64_t m = 1;
  unsigned k = 2;
  std::vector<std::uint64_t> digits;  // m_0, m_1, ..., m_r
  unsigned r = 0;
  std::uint64_t s = 1;
};

MultiplierDigits multiplier_digits(std::uint64_t m, unsigned k);

// The block map: the l-digit base-k expansion of
//   (m·n_x + c + Σ_{i=1..r} m_i · n_{z[0..i-1]}) mod k^l
// where n_w is the integer a digit string denotes (most significant first).
// Requires |x| = l, |z| = r and 0 <= c <= s.
std::vector<Digit> block_image_f(std::span<const Digit> x, std::uint64_t c,
                                 std::span<const Digit> z, std::uint64_t m, Alphabet alphabet);

// Same map on block codes, for bulk use.
BlockCode block_image_code(const MultiplierDigits& md, unsigned l, BlockCode x, std::uint64_t c,
                           std::span<const Digit> z);

struct CarryAdviceEntry {
  std::uint64_t j = 0;
  BlockCode u = 0;          // j-th l-block of α
  std::uint64_t carry = 0;  // floor of the scaled tail sum, in [0, s]
  std::vector<Digit> advice;  // the r digits following the block
  BlockCode v = 0;          // block image, the j-th l-block of frac(mα)
};

struct CarryAdviceTrace {
  MultiplierDigits multiplier;
  unsigned l = 1;
  std::vector<CarryAdviceEntry> entries;

  std::uint64_t max_carry() const;
  // v_0 v_1 ... concatenated.
  std::vector<Digit> output_digits() const;
};

// Decomposes frac(mα) block by block. Each carry is resolved with an
// interval enclosure of the scaled tail sum; throws UnresolvedCarry when the
// lookahead cap or the end of the stream is reached first.
CarryAdviceTrace carry_advice_trace(const DigitSequence& alpha, std::uint64_t m, unsigned l,
                                    std::uint64_t n_blocks,
                                    std::size_t lookahead_cap = kDefaultLookaheadCap);

}  // namespace fsdim
