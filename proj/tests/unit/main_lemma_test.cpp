#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fsdim/error.hpp"
#include "fsdim/main_lemma.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace fsdim {
namespace {

using test::digits;
using test::to_vector;

CertificateCheck revalidate(const MainLemmaCertificate& c) {
  return validate_certificate(c.matrix, ProbabilityVector::from_distribution(c.pi_alpha),
                              ProbabilityVector::from_distribution(c.pi_m_alpha));
}

TEST(MainLemma, OneThirdDoubled) {
  const auto alpha = rational_expansion(make_rational(1, 3), Alphabet(10));
  const auto c = build_main_lemma_matrix(alpha, 2, 1, 100);
  ASSERT_EQ(c.pi_alpha.counts().size(), 1u);
  EXPECT_EQ(c.pi_alpha.count(3), 100u);
  ASSERT_EQ(c.pi_m_alpha.counts().size(), 1u);
  EXPECT_EQ(c.pi_m_alpha.count(6), 100u);
  bool found = false;
  for (const auto& e : c.matrix.entries) {
    if (e.row == 6 && e.col == 3) {
      EXPECT_EQ(e.value, 1);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_TRUE(revalidate(c).ok);
}

TEST(MainLemma, IdentityMultiplier) {
  const auto alpha = champernowne(Alphabet(10));
  for (unsigned l = 1; l <= 3; ++l) {
    const auto c = build_main_lemma_matrix(alpha, 1, l, 500);
    EXPECT_EQ(c.g, 1u);
    EXPECT_EQ(c.row_bound, 2u);
    EXPECT_EQ(c.bound_bits, 1.0L);
    EXPECT_EQ(c.max_row_support, 1u);
    EXPECT_EQ(c.max_col_support, 1u);
    EXPECT_EQ(c.pi_alpha, c.pi_m_alpha);
    EXPECT_TRUE(revalidate(c).ok);
  }
}

TEST(MainLemma, BinaryChampernoneTimesThree) {
  const auto alpha = champernowne(Alphabet(2));
  const auto c = build_main_lemma_matrix(alpha, 3, 4, 1000);
  EXPECT_EQ(c.g, 1u);
  EXPECT_EQ(c.column_bound, 9u);
  EXPECT_EQ(c.row_bound, 9u);
  const auto check = revalidate(c);
  EXPECT_TRUE(check.ok) << check.detail;
  EXPECT_LE(check.max_col_support, 9u);
  EXPECT_LE(check.max_row_support, 9u);
}

TEST(MainLemma, GcdWithPower) {
  EXPECT_EQ(gcd_with_power(12, 10, 1), 2u);
  EXPECT_EQ(gcd_with_power(12, 10, 2), 4u);
  EXPECT_EQ(gcd_with_power(12, 10, 5), 4u);
  EXPECT_EQ(gcd_with_power(3, 2, 8), 1u);
  EXPECT_EQ(gcd_with_power(8, 2, 2), 4u);
}

TEST(MainLemma, MatrixEntriesAreTransitionFrequencies) {
  // a_{y,x} = |{j : u_j = x, v_j = y}| / |{j : u_j = x}|.
  const auto alpha = champernowne(Alphabet(3));
  const auto trace = carry_advice_trace(alpha, 5, 2, 400);
  const auto c = build_main_lemma_matrix(trace, 400);
  std::map<std::pair<BlockCode, BlockCode>, std::uint64_t> pairs;
  std::map<BlockCode, std::uint64_t> from;
  for (const auto& e : trace.entries) {
    ++pairs[{e.v, e.u}];
    ++from[e.u];
  }
  std::size_t stored = 0;
  for (const auto& e : c.matrix.entries) {
    if (!from.count(e.col)) continue;
    ++stored;
    EXPECT_EQ(e.value, make_rational(static_cast<std::int64_t>(pairs[{e.row, e.col}]),
                                     static_cast<std::int64_t>(from[e.col])));
  }
  EXPECT_EQ(stored, pairs.size());
}

TEST(MainLemma, PrefixOfTraceMatchesFreshBuild) {
  const auto alpha = champernowne(Alphabet(10));
  const auto trace = carry_advice_trace(alpha, 7, 2, 1000);
  const auto from_trace = build_main_lemma_matrix(trace, 300);
  const auto fresh = build_main_lemma_matrix(alpha, 7, 2, 300);
  EXPECT_EQ(from_trace.pi_alpha, fresh.pi_alpha);
  EXPECT_EQ(from_trace.pi_m_alpha, fresh.pi_m_alpha);
  EXPECT_THROW(build_main_lemma_matrix(trace, 1001), InvalidArgument);
}

TEST(MainLemma, CertificatesValidateAcrossRandomInputs) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 60; ++trial) {
    const unsigned k = 2 + static_cast<unsigned>(rng() % 9);
    const std::uint64_t m = 1 + rng() % 60;
    const unsigned l = 1 + static_cast<unsigned>(rng() % 3);
    const std::uint64_t n = 50 + rng() % 500;
    const DigitSequence alpha(Alphabet(k), test::random_digits(rng, k, n * l + 200));
    const auto c = build_main_lemma_matrix(alpha, m, l, n);
    const auto md = multiplier_digits(m, k);
    const std::uint64_t g = std::gcd(m, block_space_size(k, l));
    EXPECT_EQ(c.g, g);
    EXPECT_EQ(c.column_bound, (md.s + 1) * m);
    EXPECT_EQ(c.row_bound, g * (md.s + 1) * m);
    EXPECT_EQ(c.matrix.declared_m, c.row_bound);
    const auto check = revalidate(c);
    ASSERT_TRUE(check.ok) << check.detail << " k=" << k << " m=" << m << " l=" << l;
    EXPECT_LE(check.max_col_support, c.column_bound);
    EXPECT_LE(check.max_row_support, c.row_bound);
    // The bound is at most log2(m²(s+1)) and does not grow with l or n.
    EXPECT_LE(c.bound_bits,
              std::log2(static_cast<long double>(m * m * (md.s + 1))) + kEntropySlack);
    const long double dh =
        std::fabs(shannon_entropy(c.pi_alpha) - shannon_entropy(c.pi_m_alpha));
    EXPECT_LE(dh, c.bound_bits + kEntropySlack);
  }
}

TEST(MainLemma, OutputDistributionMatchesProductBlocks) {
  const auto alpha = champernowne(Alphabet(10));
  for (std::uint64_t m : {2u, 9u, 12u, 125u}) {
    const auto c = build_main_lemma_matrix(alpha, m, 3, 800);
    const auto product = mul_int_mod1(alpha, BigInt(static_cast<unsigned long>(m)), 2400);
    ASSERT_EQ(product.certified_count, 2400u);
    const auto want = oracle::aligned_counts(to_vector(product.digits.prefix(2400)), 3, 800);
    ASSERT_EQ(c.pi_m_alpha.counts().size(), want.size());
    for (const auto& [code, count] : c.pi_m_alpha.counts()) {
      EXPECT_EQ(count, want.at(block_to_string(code, 3, 10)));
    }
  }
}

TEST(MainLemma, BoundIsConstantInBlockLength) {
  // For k = 10 and m = 3, g = 1 at every l.
  const auto alpha = champernowne(Alphabet(10));
  long double first = -1;
  for (unsigned l = 1; l <= 5; ++l) {
    const auto c = build_main_lemma_matrix(alpha, 3, l, 200);
    if (first < 0) first = c.bound_bits;
    EXPECT_EQ(c.bound_bits, first);
  }
}

TEST(MainLemma, UnresolvedTailPropagates) {
  const DigitSequence s(Alphabet(10), digits({0, 9, 9, 9, 9}));
  EXPECT_THROW(build_main_lemma_matrix(s, 10, 1, 2), UnresolvedCarry);
}

}  // namespace
}  // namespace fsdim
