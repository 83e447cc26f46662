#include "fsdim/blockstats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "fsdim/error.hpp"
#include "parallel.hpp"

namespace fsdim {

std::uint64_t block_space_size(unsigned k, unsigned l) {
  if (l == 0) throw InvalidArgument("block length must be positive");
  std::uint64_t size = 1;
  for (unsigned i = 0; i < l; ++i) {
    if (size > (std::uint64_t{1} << 62) / k) {
      throw InvalidArgument("block space " + std::to_string(k) + "^" + std::to_string(l) +
                            " exceeds 2^62");
    }
    size *= k;
  }
  return size;
}

BlockCode encode_block(std::span<const Digit> block, unsigned k) {
  BlockCode code = 0;
  for (Digit d : block) code = code * k + d;
  return code;
}

std::vector<Digit> decode_block(BlockCode code, unsigned l, unsigned k) {
  std::vector<Digit> out(l, 0);
  for (unsigned i = l; i-- > 0;) {
    out[i] = static_cast<Digit>(code % k);
    code /= k;
  }
  return out;
}

std::string block_to_string(BlockCode code, unsigned l, unsigned k) {
  return digits_to_string(decode_block(code, l, k));
}

BlockDistribution::BlockDistribution(Alphabet alphabet, unsigned l, std::uint64_t n,
                                     std::map<BlockCode, std::uint64_t> counts)
    : alphabet_(alphabet), l_(l), n_(n), counts_(std::move(counts)) {
  if (n_ == 0) throw InvalidArgument("block distribution over zero blocks");
  const std::uint64_t space = block_space_size(alphabet_.base(), l_);
  std::uint64_t total = 0;
  for (auto it = counts_.begin(); it != counts_.end();) {
    if (it->first >= space) throw InvalidArgument("block code outside Σ^l");
    if (it->second == 0) {
      it = counts_.erase(it);
      continue;
    }
    total += it->second;
    ++it;
  }
  if (total != n_) {
    throw InvalidArgument("block counts sum to " + std::to_string(total) + ", expected " +
                          std::to_string(n_));
  }
}

std::uint64_t BlockDistribution::count(BlockCode w) const {
  auto it = counts_.find(w);
  return it == counts_.end() ? 0 : it->second;
}

Rational BlockDistribution::probability(BlockCode w) const {
  return make_rational(BigInt(static_cast<unsigned long>(count(w))),
                       BigInt(static_cast<unsigned long>(n_)));
}

namespace {

// Counts either densely (small block spaces) or in a hash map.
// Σ (c/n)·log2(n/c), with a count equal to n contributing exactly 0.
class EntropyAccumulator {
 public:
  explicit EntropyAccumulator(std::uint64_t n)
      : n_(n), log_n_(std::log2l(static_cast<long double>(n))) {}

  void add(std::uint64_t c) {
    if (c == 0 || c == n_) return;
    acc_ += static_cast<long double>(c) * (log_n_ - std::log2l(static_cast<long double>(c)));
  }

  long double bits() const { return acc_ / static_cast<long double>(n_); }

 private:
  std::uint64_t n_;
  long double log_n_;
  long double acc_ = 0;
};

class BlockCounter {
 public:
  explicit BlockCounter(std::uint64_t space) {
    if (space <= (std::uint64_t{1} << 22)) dense_.assign(space, 0);
  }

  void add(BlockCode code) {
    if (!dense_.empty()) {
      ++dense_[code];
    } else {
      ++sparse_[code];
    }
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    if (!dense_.empty()) {
      for (std::size_t c = 0; c < dense_.size(); ++c) {
        if (dense_[c] != 0) fn(static_cast<BlockCode>(c), dense_[c]);
      }
    } else {
      for (const auto& [code, count] : sparse_) fn(code, count);
    }
  }

  // Entropy in bits of the counts over n blocks.
  long double entropy(std::uint64_t n) const {
    EntropyAccumulator acc(n);
    for_each([&](BlockCode, std::uint64_t c) { acc.add(c); });
    return acc.bits();
  }

 private:
  std::vector<std::uint64_t> dense_;
  std::unordered_map<BlockCode, std::uint64_t> sparse_;
};

long double log2_big(const BigInt& z) {
  if (mpz_fits_ulong_p(z.get_mpz_t())) {
    return std::log2l(static_cast<long double>(z.get_ui()));
  }
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, z.get_mpz_t());
  return std::log2l(static_cast<long double>(mantissa)) + static_cast<long double>(exponent);
}


}  // namespace

BlockDistribution block_frequencies(const DigitSequence& seq, unsigned l, std::uint64_t n) {
  if (l == 0) throw InvalidArgument("block length must be positive");
  if (n == 0) throw InvalidArgument("block count must be positive");
  const unsigned k = seq.base();
  block_space_size(k, l);
  auto digits = seq.prefix(static_cast<std::size_t>(n) * l);
  std::map<BlockCode, std::uint64_t> counts;
  for (std::uint64_t j = 0; j < n; ++j) {
    ++counts[encode_block(digits.subspan(j * l, l), k)];
  }
  return BlockDistribution(seq.alphabet(), l, n, std::move(counts));
}

BlockDistribution distribution_of_codes(Alphabet alphabet, unsigned l,
                                        std::span<const BlockCode> codes) {
  std::map<BlockCode, std::uint64_t> counts;
  for (BlockCode c : codes) ++counts[c];
  return BlockDistribution(alphabet, l, codes.size(), std::move(counts));
}

long double shannon_entropy(const BlockDistribution& dist) {
  EntropyAccumulator acc(dist.block_count());
  for (const auto& [code, c] : dist.counts()) acc.add(c);
  return acc.bits();
}

long double shannon_entropy(std::span<const Rational> p) {
  Rational total = 0;
  for (const Rational& x : p) {
    if (x < 0) throw InvalidArgument("negative probability " + to_string(x));
    total += x;
  }
  if (total != 1) throw InvalidArgument("probabilities sum to " + to_string(total) + ", not 1");
  long double h = 0;
  for (const Rational& x : p) {
    if (x == 0) continue;
    const long double lnum = log2_big(x.get_num());
    const long double lden = log2_big(x.get_den());
    h += std::exp2l(lnum - lden) * (lden - lnum);
  }
  return h;
}

long double entropy_from_counts(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  if (total == 0) throw InvalidArgument("entropy of an empty count vector");
  EntropyAccumulator acc(total);
  for (std::uint64_t c : counts) acc.add(c);
  return acc.bits();
}

const GridEntry& DimensionEstimateGrid::at(unsigned l, std::size_t n_index) const {
  if (l == 0 || l > max_block_len || n_index >= n_schedule.size()) {
    throw InvalidArgument("grid index out of range");
  }
  return entries[(l - 1) * n_schedule.size() + n_index];
}

DimensionEstimateGrid entropy_rate_grid(const DigitSequence& seq, unsigned max_block_len,
                                        std::vector<std::uint64_t> n_schedule, unsigned threads) {
  if (max_block_len == 0) throw InvalidArgument("max block length must be positive");
  if (n_schedule.empty()) throw InvalidArgument("empty block-count schedule");
  for (std::size_t i = 0; i < n_schedule.size(); ++i) {
    if (n_schedule[i] == 0 || (i > 0 && n_schedule[i] <= n_schedule[i - 1])) {
      throw InvalidArgument("block-count schedule must be positive and strictly increasing");
    }
  }
  const unsigned k = seq.base();
  block_space_size(k, max_block_len);

  DimensionEstimateGrid grid;
  grid.base = k;
  grid.requested_max_block_len = max_block_len;
  grid.requested_n_schedule = n_schedule;

  const std::size_t wanted = static_cast<std::size_t>(max_block_len) * n_schedule.back();
  auto digits = seq.prefix_at_most(wanted);
  const std::size_t have = digits.size();

  // Shrink to the largest rectangular grid the prefix supports.
  unsigned lmax = max_block_len;
  std::vector<std::uint64_t> schedule = n_schedule;
  if (have < wanted) {
    grid.truncated = true;
    while (lmax > 0) {
      std::erase_if(schedule, [&](std::uint64_t n) { return n * lmax > have; });
      if (!schedule.empty()) break;
      schedule = n_schedule;
      --lmax;
    }
    if (lmax == 0) throw InsufficientDigits(n_schedule.front(), have);
  }
  grid.max_block_len = lmax;
  grid.n_schedule = schedule;
  grid.entries.resize(static_cast<std::size_t>(lmax) * schedule.size());

  const long double log2k = std::log2l(static_cast<long double>(k));
  detail::parallel_for(lmax, threads, [&](std::size_t row) {
    const unsigned l = static_cast<unsigned>(row + 1);
    BlockCounter counter(block_space_size(k, l));
    std::uint64_t j = 0;
    for (std::size_t c = 0; c < schedule.size(); ++c) {
      const std::uint64_t n = schedule[c];
      for (; j < n; ++j) counter.add(encode_block(digits.subspan(j * l, l), k));
      long double h = counter.entropy(n) / (l * log2k);
      h = std::clamp<long double>(h, 0, 1);
      grid.entries[row * schedule.size() + c] = GridEntry{l, n, h};
    }
  });
  return grid;
}

DimensionEstimates dim_estimates(const DimensionEstimateGrid& grid, double tail_fraction) {
  if (grid.entries.empty() || grid.n_schedule.empty()) throw InvalidArgument("empty grid");
  if (!(tail_fraction > 0 && tail_fraction <= 1)) {
    throw InvalidArgument("tail fraction must lie in (0, 1]");
  }
  const std::size_t cols = grid.n_schedule.size();
  const auto tail = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(cols))));
  const std::size_t first = cols - std::min(tail, cols);

  DimensionEstimates out{1, 1};
  bool any = false;
  for (unsigned l = 1; l <= grid.max_block_len; ++l) {
    long double row_min = 1;
    long double row_max = 0;
    for (std::size_t c = first; c < cols; ++c) {
      const long double h = grid.at(l, c).h;
      row_min = std::min(row_min, h);
      row_max = std::max(row_max, h);
    }
    if (!any) {
      out = {row_min, row_max};
      any = true;
    } else {
      out.lower = std::min(out.lower, row_min);
      out.upper = std::min(out.upper, row_max);
    }
  }
  return out;
}

Rational sliding_frequency(const DigitSequence& seq, std::span<const Digit> w, std::uint64_t n) {
  if (w.empty()) throw InvalidArgument("empty pattern");
  if (n == 0) throw InvalidArgument("window count must be positive");
  for (Digit d : w) {
    if (!seq.alphabet().contains(d)) throw InvalidArgument("pattern digit outside alphabet");
  }
  auto digits = seq.prefix(static_cast<std::size_t>(n) + w.size() - 1);
  std::uint64_t hits = 0;
  for (std::uint64_t p = 0; p < n; ++p) {
    if (std::equal(w.begin(), w.end(), digits.begin() + static_cast<std::ptrdiff_t>(p))) ++hits;
  }
  return make_rational(BigInt(static_cast<unsigned long>(hits)),
                       BigInt(static_cast<unsigned long>(n)));
}

NormalityDeviation normality_deviation(const DigitSequence& seq, unsigned max_len,
                                       std::uint64_t n) {
  if (max_len == 0) throw InvalidArgument("max pattern length must be positive");
  if (n == 0) throw InvalidArgument("window count must be positive");
  const unsigned k = seq.base();
  auto digits = seq.prefix(static_cast<std::size_t>(n) + max_len - 1);

  NormalityDeviation worst{Rational(-1), {}};
  const BigInt nn(static_cast<unsigned long>(n));
  for (unsigned len = 1; len <= max_len; ++len) {
    const std::uint64_t space = block_space_size(k, len);
    const BigInt kl = pow(k, len);
    const Rational expected = make_rational(BigInt(1), kl);
    BlockCounter counter(space);
    for (std::uint64_t p = 0; p < n; ++p) counter.add(encode_block(digits.subspan(p, len), k));

    std::vector<BlockCode> seen;
    counter.for_each([&](BlockCode code, std::uint64_t c) {
      seen.push_back(code);
      Rational dev = make_rational(BigInt(static_cast<unsigned long>(c)), nn) - expected;
      if (dev < 0) dev = -dev;
      if (dev > worst.deviation) worst = {dev, decode_block(code, len, k)};
    });
    // Every unseen block deviates by exactly k^{-len}; report the smallest.
    if (seen.size() < space && expected > worst.deviation) {
      std::sort(seen.begin(), seen.end());
      BlockCode gap = 0;
      while (gap < seen.size() && seen[gap] == gap) ++gap;
      worst = {expected, decode_block(gap, len, k)};
    }
  }
  return worst;
}

}  // namespace fsdim
