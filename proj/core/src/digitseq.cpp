#include "fsdim/digitseq.hpp"

#include <algorithm>
#include <utility>

#include "fsdim/error.hpp"

namespace fsdim {

Alphabet::Alphabet(unsigned k) : k_(k) {
  if (k < kMinBase || k > kMaxBase) {
    throw InvalidArgument("base " + std::to_string(k) + " outside [2, 36]");
  }
}

char digit_to_char(Digit d) {
  return d < 10 ? static_cast<char>('0' + d) : static_cast<char>('A' + (d - 10));
}

std::optional<Digit> char_to_digit(char c) {
  if (c >= '0' && c <= '9') return static_cast<Digit>(c - '0');
  if (c >= 'A' && c <= 'Z') return static_cast<Digit>(c - 'A' + 10);
  if (c >= 'a' && c <= 'z') return static_cast<Digit>(c - 'a' + 10);
  return std::nullopt;
}

struct DigitSequence::Buffer {
  std::vector<Digit> data;
  std::unique_ptr<DigitSource> source;
  std::size_t length_hint = kUnbounded;
  bool exhausted = false;
};

DigitSequence::DigitSequence(Alphabet alphabet, std::vector<Digit> digits)
    : alphabet_(alphabet), buffer_(std::make_shared<Buffer>()) {
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (!alphabet_.contains(digits[i])) {
      throw InvalidArgument("digit " + std::to_string(digits[i]) + " at position " +
                            std::to_string(i) + " is not below base " +
                            std::to_string(alphabet_.base()));
    }
  }
  buffer_->data = std::move(digits);
  buffer_->exhausted = true;
  buffer_->length_hint = buffer_->data.size();
}

DigitSequence::DigitSequence(Alphabet alphabet, std::unique_ptr<DigitSource> source,
                             std::size_t length_hint)
    : alphabet_(alphabet), buffer_(std::make_shared<Buffer>()) {
  if (!source) throw InvalidArgument("null digit source");
  buffer_->source = std::move(source);
  buffer_->length_hint = length_hint;
}

void DigitSequence::fill_to(std::size_t n) const {
  Buffer& b = *buffer_;
  while (!b.exhausted && b.data.size() < n) {
    const std::size_t before = b.data.size();
    const std::size_t want = std::clamp<std::size_t>(n - before, 4096, std::size_t{1} << 20);
    const std::size_t got = b.source->append(b.data, want);
    for (std::size_t i = before; i < b.data.size(); ++i) {
      if (!alphabet_.contains(b.data[i])) {
        throw FormatError("source produced digit " + std::to_string(b.data[i]) +
                          " outside base " + std::to_string(alphabet_.base()));
      }
    }
    if (got == 0) {
      b.exhausted = true;
      b.length_hint = b.data.size();
      b.source.reset();
    }
  }
}

Digit DigitSequence::at(std::size_t i) const {
  fill_to(i + 1);
  if (i >= buffer_->data.size()) throw InsufficientDigits(i + 1, buffer_->data.size());
  return buffer_->data[i];
}

bool DigitSequence::provides(std::size_t n) const {
  fill_to(n);
  return buffer_->data.size() >= n;
}

std::size_t DigitSequence::buffered() const noexcept { return buffer_->data.size(); }

std::size_t DigitSequence::length_available() const {
  return buffer_->exhausted ? buffer_->data.size() : buffer_->length_hint;
}

std::span<const Digit> DigitSequence::prefix(std::size_t n) const {
  fill_to(n);
  if (buffer_->data.size() < n) throw InsufficientDigits(n, buffer_->data.size());
  return {buffer_->data.data(), n};
}

std::span<const Digit> DigitSequence::prefix_at_most(std::size_t n) const {
  fill_to(n);
  return {buffer_->data.data(), std::min(n, buffer_->data.size())};
}

std::span<const Digit> DigitSequence::all() const {
  if (!buffer_->exhausted && buffer_->length_hint == kUnbounded) {
    throw InvalidArgument("cannot materialize an unbounded sequence");
  }
  fill_to(kUnbounded);
  return {buffer_->data.data(), buffer_->data.size()};
}

DigitSequence& DigitSequence::set_exact_value(std::optional<Rational> value) {
  if (value && (*value < 0 || *value >= 1)) {
    throw InvalidArgument("exact value " + to_string(*value) + " outside [0,1)");
  }
  exact_ = std::move(value);
  return *this;
}

DigitSequence DigitSequence::materialize(std::size_t n) const {
  auto p = prefix(n);
  DigitSequence out(alphabet_, std::vector<Digit>(p.begin(), p.end()));
  return out;
}

namespace {

class ChampernowneSource final : public DigitSource {
 public:
  ChampernowneSource(unsigned k, ChampernowneOrder order) : k_(k) {
    if (order == ChampernowneOrder::kStrings) {
      word_ = {0};
    } else {
      word_ = {1};
      numerals_ = true;
    }
  }

  std::size_t append(std::vector<Digit>& out, std::size_t want) override {
    std::size_t produced = 0;
    while (produced < want) {
      out.push_back(word_[pos_]);
      ++produced;
      if (++pos_ == word_.size()) {
        pos_ = 0;
        advance();
      }
    }
    return produced;
  }

 private:
  // Next word: increment the base-k counter. Strings widen to all zeros
  // after the last word of a length; numerals gain a leading 1.
  void advance() {
    for (std::size_t i = word_.size(); i-- > 0;) {
      if (++word_[i] < k_) return;
      word_[i] = 0;
    }
    word_.insert(word_.begin(), numerals_ ? Digit{1} : Digit{0});
  }

  unsigned k_;
  bool numerals_ = false;
  std::vector<Digit> word_;
  std::size_t pos_ = 0;
};

class RationalSource final : public DigitSource {
 public:
  RationalSource(const Rational& q, unsigned k)
      : remainder_(q.get_num()), den_(q.get_den()), k_(k) {}

  std::size_t append(std::vector<Digit>& out, std::size_t want) override {
    BigInt digit;
    for (std::size_t i = 0; i < want; ++i) {
      remainder_ *= k_;
      mpz_fdiv_qr(digit.get_mpz_t(), remainder_.get_mpz_t(), remainder_.get_mpz_t(),
                  den_.get_mpz_t());
      out.push_back(static_cast<Digit>(digit.get_ui()));
    }
    return want;
  }

 private:
  BigInt remainder_;
  BigInt den_;
  unsigned k_;
};

class PeriodicSource final : public DigitSource {
 public:
  explicit PeriodicSource(std::vector<Digit> pattern) : pattern_(std::move(pattern)) {}

  std::size_t append(std::vector<Digit>& out, std::size_t want) override {
    for (std::size_t i = 0; i < want; ++i) {
      out.push_back(pattern_[pos_]);
      pos_ = (pos_ + 1) % pattern_.size();
    }
    return want;
  }

 private:
  std::vector<Digit> pattern_;
  std::size_t pos_ = 0;
};

class DilutionSource final : public DigitSource {
 public:
  explicit DilutionSource(DigitSequence s) : source_(std::move(s)) {}

  std::size_t append(std::vector<Digit>& out, std::size_t want) override {
    std::size_t produced = 0;
    while (produced < want) {
      if (odd_) {
        out.push_back(0);
      } else {
        if (!source_.provides(index_ + 1)) break;
        out.push_back(source_.at(index_));
        ++index_;
      }
      odd_ = !odd_;
      ++produced;
    }
    return produced;
  }

 private:
  DigitSequence source_;
  std::size_t index_ = 0;
  bool odd_ = false;
};

}  // namespace

ChampernowneOrder default_champernowne_order(unsigned k) {
  return k == 2 ? ChampernowneOrder::kStrings : ChampernowneOrder::kNumerals;
}

DigitSequence champernowne(Alphabet alphabet) {
  return champernowne(alphabet, default_champernowne_order(alphabet.base()));
}

DigitSequence champernowne(Alphabet alphabet, ChampernowneOrder order) {
  return DigitSequence(alphabet, std::make_unique<ChampernowneSource>(alphabet.base(), order));
}

DigitSequence rational_expansion(const Rational& q, Alphabet alphabet) {
  if (q < 0 || q >= 1) {
    throw InvalidArgument("rational " + to_string(q) + " outside [0,1)");
  }
  DigitSequence seq(alphabet, std::make_unique<RationalSource>(q, alphabet.base()));
  seq.set_exact_value(q);
  return seq;
}

DigitSequence periodic(Alphabet alphabet, std::vector<Digit> pattern) {
  if (pattern.empty()) throw InvalidArgument("empty period");
  for (Digit d : pattern) {
    if (!alphabet.contains(d)) throw InvalidArgument("period digit outside alphabet");
  }
  return DigitSequence(alphabet, std::make_unique<PeriodicSource>(std::move(pattern)));
}

DigitSequence dilution(DigitSequence source) {
  const Alphabet a = source.alphabet();
  const std::size_t n = source.length_available();
  const std::size_t hint = n >= DigitSequence::kFiniteUnknown ? n : 2 * n;
  return DigitSequence(a, std::make_unique<DilutionSource>(std::move(source)), hint);
}

DigitSequence gen_champernowne(Alphabet alphabet, std::size_t count) {
  return champernowne(alphabet).materialize(count);
}

DigitSequence gen_champernowne(Alphabet alphabet, std::size_t count, ChampernowneOrder order) {
  return champernowne(alphabet, order).materialize(count);
}

DigitSequence gen_rational_expansion(const Rational& q, Alphabet alphabet, std::size_t count) {
  DigitSequence out = rational_expansion(q, alphabet).materialize(count);
  out.set_exact_value(q);
  return out;
}

DigitSequence gen_dilution(const DigitSequence& source, std::size_t count) {
  const std::size_t needed = (count + 1) / 2;
  if (!source.provides(needed)) {
    throw InsufficientDigits(needed, source.buffered());
  }
  auto s = source.prefix(needed);
  std::vector<Digit> out(count, 0);
  for (std::size_t i = 0; 2 * i < count; ++i) out[2 * i] = s[i];
  return DigitSequence(source.alphabet(), std::move(out));
}

DigitSequence select_progression(const DigitSequence& source, std::size_t offset,
                                 std::size_t stride, std::size_t count) {
  if (stride == 0) throw InvalidArgument("zero stride");
  const std::size_t needed = count == 0 ? 0 : offset + (count - 1) * stride + 1;
  auto s = source.prefix(needed);
  std::vector<Digit> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(s[offset + i * stride]);
  return DigitSequence(source.alphabet(), std::move(out));
}

std::string digits_to_string(std::span<const Digit> digits) {
  std::string out;
  out.reserve(digits.size());
  for (Digit d : digits) out.push_back(digit_to_char(d));
  return out;
}

std::vector<Digit> digits_from_string(std::string_view text, Alphabet alphabet) {
  std::vector<Digit> out;
  out.reserve(text.size());
  for (char c : text) {
    auto d = char_to_digit(c);
    if (!d || !alphabet.contains(*d)) {
      throw InvalidArgument(std::string("character '") + c + "' is not a base-" +
                            std::to_string(alphabet.base()) + " digit");
    }
    out.push_back(*d);
  }
  return out;
}

}  // namespace fsdim
