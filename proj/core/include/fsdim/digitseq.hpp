#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsdim/rational.hpp"

namespace fsdim {

using Digit = std::uint8_t;

// Base-k alphabet {0, ..., k-1}, 2 <= k <= 36 so every digit has a one
// character ASCII form (0-9, A-Z).
class Alphabet {
 public:
  static constexpr unsigned kMinBase = 2;
  static constexpr unsigned kMaxBase = 36;

  explicit Alphabet(unsigned k);

  unsigned base() const noexcept { return k_; }
  bool contains(unsigned digit) const noexcept { return digit < k_; }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  unsigned k_;
};

char digit_to_char(Digit d);
// Case-insensitive; returns nullopt for anything outside 0-9A-Za-z.
std::optional<Digit> char_to_digit(char c);

// Pull-based producer behind a generator-backed DigitSequence. append()
// pushes at most `want` further digits onto `out` and returns how many it
// produced; zero means the source is exhausted.
class DigitSource {
 public:
  virtual ~DigitSource() = default;
  virtual std::size_t append(std::vector<Digit>& out, std::size_t want) = 0;
};

// A finite or lazily extended stream of base-k digits.
//
// Materialized sequences are immutable and may be shared across threads.
// Generator-backed sequences buffer everything they have produced, so a
// position always replays the same digit, but they are single-consumer:
// concurrent reads of an unmaterialized tail are not synchronized.
class DigitSequence {
 public:
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();
  // Finite source whose length is not known until it is drained.
  static constexpr std::size_t kFiniteUnknown = kUnbounded - 1;

  DigitSequence(Alphabet alphabet, std::vector<Digit> digits);
  DigitSequence(Alphabet alphabet, std::unique_ptr<DigitSource> source,
                std::size_t length_hint = kUnbounded);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  unsigned base() const noexcept { return alphabet_.base(); }

  // Extends the buffer as needed; throws InsufficientDigits past the end.
  Digit at(std::size_t i) const;

  // Whether at least n digits can be produced (may pull from the source).
  bool provides(std::size_t n) const;

  // Number of digits currently buffered.
  std::size_t buffered() const noexcept;

  // kUnbounded for open-ended generators, otherwise the exact length once
  // known (a file reader reports its length after exhaustion).
  std::size_t length_available() const;

  // First n digits; throws InsufficientDigits if the stream is shorter.
  std::span<const Digit> prefix(std::size_t n) const;

  // Everything the source can produce. Throws InvalidArgument on unbounded
  // generators.
  std::span<const Digit> all() const;

  // Up to n digits, fewer if the stream ends first.
  std::span<const Digit> prefix_at_most(std::size_t n) const;

  // Exact value of 0.d0 d1 d2 ... when known (rational expansions and
  // arithmetic on them); enables exact fast paths downstream.
  const std::optional<Rational>& exact_value() const noexcept { return exact_; }
  DigitSequence& set_exact_value(std::optional<Rational> value);

  // Copy of the first n digits as a materialized sequence.
  DigitSequence materialize(std::size_t n) const;

 private:
  struct Buffer;

  void fill_to(std::size_t n) const;

  Alphabet alphabet_;
  std::shared_ptr<Buffer> buffer_;
  std::optional<Rational> exact_;
};

enum class ChampernowneOrder {
  kStrings,   // every string over Σ by length, then lexicographically: 0, 1, 00, 01, ...
  kNumerals,  // base-k numerals of 1, 2, 3, ...
};

// kStrings for k = 2, kNumerals otherwise.
ChampernowneOrder default_champernowne_order(unsigned k);

// Unbounded generators.
DigitSequence champernowne(Alphabet alphabet);
DigitSequence champernowne(Alphabet alphabet, ChampernowneOrder order);
DigitSequence rational_expansion(const Rational& q, Alphabet alphabet);
DigitSequence periodic(Alphabet alphabet, std::vector<Digit> pattern);
// T[2i] = S[i], T[2i+1] = 0; as long as S allows.
DigitSequence dilution(DigitSequence source);

// Materialized prefixes. gen_rational_expansion requires 0 <= q < 1 and
// uses the terminating expansion for k-adic q.
DigitSequence gen_champernowne(Alphabet alphabet, std::size_t count);
DigitSequence gen_champernowne(Alphabet alphabet, std::size_t count, ChampernowneOrder order);
DigitSequence gen_rational_expansion(const Rational& q, Alphabet alphabet, std::size_t count);
DigitSequence gen_dilution(const DigitSequence& source, std::size_t count);

// source[offset], source[offset + stride], ...; `count` digits.
DigitSequence select_progression(const DigitSequence& source, std::size_t offset,
                                 std::size_t stride, std::size_t count);

// Digit file I/O. ASCII: "k=<base>\n" then digits 0-9A-Z (case-insensitive,
// whitespace ignored). Binary: magic "FSD1", one base byte, one byte per digit.
enum class DigitFileMode { kAscii, kBinary };

DigitSequence read_digit_file(const std::filesystem::path& path);
// Lazily reads digits on demand instead of loading the whole file.
DigitSequence open_digit_file(const std::filesystem::path& path);
void write_digit_file(const DigitSequence& seq, std::size_t count,
                      const std::filesystem::path& path,
                      DigitFileMode mode = DigitFileMode::kAscii);

DigitSequence parse_digit_text(std::string_view text);
std::string format_digit_text(const DigitSequence& seq, std::size_t count);

// Renders digits as their ASCII characters, without header.
std::string digits_to_string(std::span<const Digit> digits);
std::vector<Digit> digits_from_string(std::string_view text, Alphabet alphabet);

}  // namespace fsdim
