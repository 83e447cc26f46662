#pragma once

#include <cstdint>

#include "fsdim/blockstats.hpp"
#include "fsdim/dispersion.hpp"
#include "fsdim/realarith.hpp"

namespace fsdim {

// The coupling certificate between the l-block statistics of α and of
// frac(mα). Column x of `matrix` spreads the occurrences of block x over
// the output blocks they map to; unobserved columns are implicit identity.
struct MainLemmaCertificate {
  SparseStochasticCertificate matrix;
  BlockDistribution pi_alpha;
  BlockDistribution pi_m_alpha;
  MultiplierDigits multiplier;
  unsigned l = 1;
  std::uint64_t n = 1;
  std::uint64_t g = 1;              // gcd(m, k^l)
  std::uint64_t column_bound = 1;   // (s+1)·m
  std::uint64_t row_bound = 1;      // g·(s+1)·m, also the declared m
  long double bound_bits = 0;       // log2(g·(s+1)·m)
  std::size_t max_row_support = 0;
  std::size_t max_col_support = 0;
};

// Builds the certificate from the first n blocks of a carry/advice trace
// (n <= trace length).
MainLemmaCertificate build_main_lemma_matrix(const CarryAdviceTrace& trace, std::uint64_t n);

MainLemmaCertificate build_main_lemma_matrix(const DigitSequence& alpha, std::uint64_t m,
                                             unsigned l, std::uint64_t n,
                                             std::size_t lookahead_cap = kDefaultLookaheadCap);

std::uint64_t gcd_with_power(std::uint64_t m, unsigned k, unsigned l);

}  // namespace fsdim
