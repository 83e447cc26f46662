#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fsdim/digitseq.hpp"
#include "fsdim/rational.hpp"

namespace fsdim {

// A block w in Σ^l encoded as the integer it denotes in base k (most
// significant digit first, leading zeros kept implicit by the block length).
using BlockCode = std::uint64_t;

// k^l, rejecting block spaces too large to index with a 64-bit code.
std::uint64_t block_space_size(unsigned k, unsigned l);

BlockCode encode_block(std::span<const Digit> block, unsigned k);
std::vector<Digit> decode_block(BlockCode code, unsigned l, unsigned k);
std::string block_to_string(BlockCode code, unsigned l, unsigned k);

// Empirical distribution of the first n aligned l-blocks of a sequence.
// Counts are exact; probabilities count/n are exact rationals.
class BlockDistribution {
 public:
  BlockDistribution(Alphabet alphabet, unsigned l, std::uint64_t n,
                    std::map<BlockCode, std::uint64_t> counts);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  unsigned block_length() const noexcept { return l_; }
  std::uint64_t block_count() const noexcept { return n_; }
  // Only blocks with a positive count are stored.
  const std::map<BlockCode, std::uint64_t>& counts() const noexcept { return counts_; }

  std::uint64_t count(BlockCode w) const;
  Rational probability(BlockCode w) const;

  friend bool operator==(const BlockDistribution&, const BlockDistribution&) = default;

 private:
  Alphabet alphabet_;
  unsigned l_;
  std::uint64_t n_;
  std::map<BlockCode, std::uint64_t> counts_;
};

BlockDistribution block_frequencies(const DigitSequence& seq, unsigned l, std::uint64_t n);

// Distribution of an explicit list of block codes (each in Σ^l).
BlockDistribution distribution_of_codes(Alphabet alphabet, unsigned l,
                                        std::span<const BlockCode> codes);

// Shannon entropy in bits, with 0·log(1/0) = 0.
long double shannon_entropy(const BlockDistribution& dist);
// Throws InvalidArgument unless the entries are nonnegative and sum to 1.
long double shannon_entropy(std::span<const Rational> p);
long double entropy_from_counts(std::span<const std::uint64_t> counts);

struct GridEntry {
  unsigned l;
  std::uint64_t n;
  // H(π^{(l)}_{S,n}) / (l · log2 k), in [0, 1].
  long double h;
};

// Normalized block entropies over a rectangular (l, n) grid.
struct DimensionEstimateGrid {
  unsigned base = 2;
  unsigned max_block_len = 0;
  std::vector<std::uint64_t> n_schedule;
  // Row-major: l = 1..max_block_len, each across n_schedule.
  std::vector<GridEntry> entries;
  // Set when the sequence could not supply the requested grid and a smaller
  // feasible one was computed instead.
  bool truncated = false;
  unsigned requested_max_block_len = 0;
  std::vector<std::uint64_t> requested_n_schedule;

  const GridEntry& at(unsigned l, std::size_t n_index) const;
};

// threads == 0 uses the machine's hardware concurrency.
DimensionEstimateGrid entropy_rate_grid(const DigitSequence& seq, unsigned max_block_len,
                                        std::vector<std::uint64_t> n_schedule,
                                        unsigned threads = 0);

struct DimensionEstimates {
  long double lower = 0;
  long double upper = 0;
};

// lower = min over l of the minimum across the tail of the n schedule,
// upper = min over l of the maximum across that tail. The tail is the last
// ceil(tail_fraction · |schedule|) columns, at least one.
DimensionEstimates dim_estimates(const DimensionEstimateGrid& grid, double tail_fraction = 0.5);

// Fraction of offsets p < n where w occurs at S[p .. p+|w|-1].
Rational sliding_frequency(const DigitSequence& seq, std::span<const Digit> w, std::uint64_t n);

struct NormalityDeviation {
  Rational deviation;
  std::vector<Digit> worst_block;
};

// max over nonempty w with |w| <= max_len of |sliding_frequency(w) - k^{-|w|}|.
NormalityDeviation normality_deviation(const DigitSequence& seq, unsigned max_len,
                                       std::uint64_t n);

}  // namespace fsdim
