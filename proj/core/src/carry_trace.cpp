#include <algorithm>
#include <cmath>

#include "fsdim/error.hpp"
#include "fsdim/realarith.hpp"

namespace fsdim {

namespace {

__extension__ typedef unsigned __int128 u128;

// floor(Σ_i m_i · 0.S[p+i] S[p+i+1] ...), the carry into the block ending
// just before position p.
class CarryResolver {
 public:
  CarryResolver(const MultiplierDigits& md, std::span<const Digit> digits, std::size_t cap)
      : md_(md), digits_(digits), cap_(cap) {
    const double bits_per_digit = std::log2(static_cast<double>(md.k));
    const double budget = 124.0 - std::log2(static_cast<double>(md.s) + 1.0) -
                          std::log2(static_cast<double>(md.r) + 2.0);
    fast_guard_ = static_cast<std::size_t>(std::max(1.0, std::floor(budget / bits_per_digit)));
    fast_guard_ = std::min(fast_guard_, cap_);
    fast_pow_ = 1;
    for (std::size_t g = 0; g < fast_guard_; ++g) fast_pow_ *= md.k;
  }

  std::uint64_t carry_at(std::size_t p) const {
    if (auto c = try_fast(p)) return *c;
    return slow(p);
  }

 private:
  std::optional<std::uint64_t> try_fast(std::size_t p) const {
    const std::size_t last = p + md_.r + fast_guard_;
    if (last > digits_.size()) return std::nullopt;
    u128 lower = 0;
    for (unsigned i = 0; i <= md_.r; ++i) {
      if (md_.digits[i] == 0) continue;
      u128 w = 0;
      for (std::size_t t = 0; t < fast_guard_; ++t) w = w * md_.k + digits_[p + i + t];
      lower += static_cast<u128>(md_.digits[i]) * w;
    }
    const u128 upper = lower + md_.s;
    const u128 lo = lower / fast_pow_;
    if (lo != upper / fast_pow_) return std::nullopt;
    return static_cast<std::uint64_t>(lo);
  }

  std::uint64_t slow(std::size_t p) const {
    std::size_t guard = std::max<std::size_t>(kInitialLookahead, fast_guard_);
    while (true) {
      guard = std::min(guard, cap_);
      const std::size_t available =
          digits_.size() > p + md_.r ? digits_.size() - p - md_.r : 0;
      const std::size_t g = std::min(guard, available);
      BigInt lower = 0;
      for (unsigned i = 0; i <= md_.r; ++i) {
        if (md_.digits[i] == 0) continue;
        BigInt w = 0;
        for (std::size_t t = 0; t < g; ++t) {
          w *= md_.k;
          w += digits_[p + i + t];
        }
        lower += BigInt(static_cast<unsigned long>(md_.digits[i])) * w;
      }
      const BigInt kg = pow(md_.k, g);
      BigInt lo, hi;
      mpz_fdiv_q(lo.get_mpz_t(), lower.get_mpz_t(), kg.get_mpz_t());
      BigInt upper = lower + BigInt(static_cast<unsigned long>(md_.s));
      mpz_fdiv_q(hi.get_mpz_t(), upper.get_mpz_t(), kg.get_mpz_t());
      if (lo == hi) return lo.get_ui();
      if (g < guard || guard >= cap_) throw UnresolvedCarry(p);
      guard *= 2;
    }
  }

  const MultiplierDigits& md_;
  std::span<const Digit> digits_;
  std::size_t cap_;
  std::size_t fast_guard_ = 1;
  u128 fast_pow_ = 1;
};

}  // namespace

std::uint64_t CarryAdviceTrace::max_carry() const {
  std::uint64_t best = 0;
  for (const auto& e : entries) best = std::max(best, e.carry);
  return best;
}

std::vector<Digit> CarryAdviceTrace::output_digits() const {
  std::vector<Digit> out;
  out.reserve(entries.size() * l);
  for (const auto& e : entries) {
    auto block = decode_block(e.v, l, multiplier.k);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

CarryAdviceTrace carry_advice_trace(const DigitSequence& alpha, std::uint64_t m, unsigned l,
                                    std::uint64_t n_blocks, std::size_t lookahead_cap) {
  const unsigned k = alpha.base();
  block_space_size(k, l);
  CarryAdviceTrace trace;
  trace.multiplier = multiplier_digits(m, k);
  trace.l = l;
  const auto& md = trace.multiplier;

  // Rational inputs get an unbounded stream so carries always resolve.
  const DigitSequence source =
      alpha.exact_value() ? rational_expansion(*alpha.exact_value(), alpha.alphabet()) : alpha;
  const std::size_t body = static_cast<std::size_t>(n_blocks) * l;
  const std::size_t wanted = body + md.r + lookahead_cap;
  auto digits = source.prefix_at_most(wanted);
  if (digits.size() < body + md.r) throw InsufficientDigits(body + md.r, digits.size());

  CarryResolver resolver(md, digits, lookahead_cap);
  trace.entries.reserve(n_blocks);
  for (std::uint64_t j = 0; j < n_blocks; ++j) {
    const std::size_t start = j * l;
    const std::size_t next = start + l;
    CarryAdviceEntry e;
    e.j = j;
    e.u = encode_block(digits.subspan(start, l), k);
    e.carry = resolver.carry_at(next);
    e.advice.assign(digits.begin() + static_cast<std::ptrdiff_t>(next),
                    digits.begin() + static_cast<std::ptrdiff_t>(next + md.r));
    e.v = block_image_code(md, l, e.u, e.carry, e.advice);
    trace.entries.push_back(std::move(e));
  }
  return trace;
}

}  // namespace fsdim
