#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fsdim/error.hpp"
#include "fsdim/report_json.hpp"
#include "fsdim/verify.hpp"
#include "test_support.hpp"

namespace fsdim {
namespace {

TEST(HalvingSchedule, IncreasingHalvings) {
  EXPECT_EQ(halving_schedule(10000), (std::vector<std::uint64_t>{1250, 2500, 5000, 10000}));
  EXPECT_EQ(halving_schedule(3, 4), (std::vector<std::uint64_t>{1, 3}));
  EXPECT_EQ(halving_schedule(100, 1), (std::vector<std::uint64_t>{100}));
}

TEST(WallExtension, IdentityMultiplierChangesNothing) {
  const auto alpha = champernowne(Alphabet(10));
  const auto r = verify_wall_extension(alpha, make_rational(1), 3, {200, 400});
  EXPECT_TRUE(r.passed());
  EXPECT_FALSE(r.partial);
  ASSERT_FALSE(r.records.empty());
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.delta_h, 0.0L);
    EXPECT_TRUE(rec.pass);
  }
  ASSERT_NE(r.check("integer_shift_identity"), nullptr);
  EXPECT_TRUE(r.check("integer_shift_identity")->pass());
}

TEST(WallExtension, TripledChampernowneRecordsStayUnderTheBound) {
  const auto alpha = champernowne(Alphabet(10));
  const auto r = verify_wall_extension(alpha, make_rational(3), 4, {250, 500, 1000});
  EXPECT_TRUE(r.passed());
  const long double support_bound = std::log2(9.0L * 4.0L);
  for (const auto& rec : r.records) {
    EXPECT_TRUE(rec.pass) << rec.leg << " l=" << rec.l;
    EXPECT_TRUE(rec.certificate_valid);
    EXPECT_LE(rec.delta_h, rec.bound_bits + kEntropySlack);
    EXPECT_LE(rec.bound_bits, support_bound + kEntropySlack);
    EXPECT_EQ(rec.pass, rec.delta_h <= rec.bound_bits + kEntropySlack);
  }
  for (const char* name : {"alpha", "q_alpha", "q_plus_alpha"}) {
    const auto* s = r.stream(name);
    ASSERT_NE(s, nullptr) << name;
    EXPECT_TRUE(s->grid.has_value());
    EXPECT_TRUE(s->estimates.has_value());
  }
  EXPECT_EQ(r.gaps.size(), 2u);
}

TEST(WallExtension, RationalMultiplierHasTwoLegs) {
  const auto alpha = champernowne(Alphabet(2));
  const auto r = verify_wall_extension(alpha, make_rational(-2, 3), 4, {500, 1000});
  EXPECT_TRUE(r.passed());
  std::set<std::string> legs;
  std::set<std::uint64_t> ms;
  for (const auto& rec : r.records) {
    legs.insert(rec.leg);
    ms.insert(rec.m);
  }
  EXPECT_EQ(legs.size(), 2u);
  EXPECT_EQ(ms, (std::set<std::uint64_t>{2, 3}));
  EXPECT_EQ(r.check("integer_shift_identity"), nullptr);
}

TEST(WallExtension, IntegerShiftKeepsDigits) {
  const auto alpha = champernowne(Alphabet(7));
  const auto r = verify_wall_extension(alpha, make_rational(5), 2, {100, 300});
  ASSERT_NE(r.check("integer_shift_identity"), nullptr);
  EXPECT_TRUE(r.check("integer_shift_identity")->pass());
  const auto* a = r.stream("alpha");
  const auto* b = r.stream("q_plus_alpha");
  ASSERT_TRUE(a && b && a->estimates && b->estimates);
  EXPECT_EQ(a->estimates->lower, b->estimates->lower);
  EXPECT_EQ(a->estimates->upper, b->estimates->upper);
}

TEST(WallExtension, NegationIsARelabeling) {
  // frac(-α) has digits k-1-d up to a tail effect on the last digit, so the
  // grid entries agree within the edge correction.
  const auto alpha = champernowne(Alphabet(10));
  const auto r = verify_wall_extension(alpha, make_rational(-1), 3, {300, 600});
  const auto* a = r.stream("alpha");
  const auto* b = r.stream("q_alpha");
  ASSERT_TRUE(a && b && a->grid && b->grid);
  ASSERT_EQ(a->grid->entries.size(), b->grid->entries.size());
  for (std::size_t i = 0; i < a->grid->entries.size(); ++i) {
    const auto n = static_cast<long double>(a->grid->entries[i].n);
    EXPECT_NEAR(static_cast<double>(a->grid->entries[i].h),
                static_cast<double>(b->grid->entries[i].h),
                static_cast<double>(std::log2(n) / n));
  }
}

TEST(WallExtension, UnresolvedStreamYieldsPartialReport) {
  auto third = rational_expansion(make_rational(1, 3), Alphabet(10));
  third.set_exact_value(std::nullopt);
  VerifyOptions opts;
  opts.lookahead_cap = 64;
  const auto r = verify_wall_extension(third, make_rational(3), 2, {100, 200}, opts);
  EXPECT_TRUE(r.partial);
  EXPECT_TRUE(r.unresolved);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Dilution, EstimatesAtTheEndsAndInTheMiddle) {
  const auto r = verify_dilution_counterexample(1 << 16, 6);
  EXPECT_TRUE(r.passed());
  const auto* zeros = r.stream("zeros");
  ASSERT_TRUE(zeros && zeros->estimates);
  EXPECT_EQ(zeros->estimates->lower, 0.0L);
  EXPECT_EQ(zeros->estimates->upper, 0.0L);
  const auto* t = r.stream("T");
  ASSERT_TRUE(t && t->estimates);
  EXPECT_GE(t->estimates->lower, 0.40L);
  EXPECT_LE(t->estimates->upper, 0.65L);
  const auto* s = r.stream("S");
  ASSERT_TRUE(s && s->grid);
  for (unsigned l = 1; l <= 4; ++l) {
    EXPECT_GE(s->grid->at(l, s->grid->n_schedule.size() - 1).h, 0.85L) << "l=" << l;
  }
}

TEST(Dilution, RequiresEnoughDigits) {
  EXPECT_THROW(verify_dilution_counterexample(1000), InvalidArgument);
}

TEST(PseudometricSuite, SmallRunPasses) {
  const auto r = verify_pseudometric_suite(40, 3, 7);
  EXPECT_TRUE(r.passed());
  for (const char* name : {"nonnegativity", "identity", "symmetry", "triangle",
                           "permutation_zero", "witness_valid", "reverse_valid", "compose_valid"}) {
    const auto* c = r.check(name);
    ASSERT_NE(c, nullptr) << name;
    EXPECT_GT(c->checked, 0u) << name;
    EXPECT_EQ(c->violations, 0u) << name;
  }
}

TEST(ContractivitySuite, SmallRunPasses) {
  const auto r = verify_contractivity_suite(40, 4, 7);
  EXPECT_TRUE(r.passed());
  for (const char* name : {"entropy_contractive", "b_majorizes_q", "entropy_r_le_q",
                           "entropy_p_le_r_plus_log_m", "entropy_q_le_p_plus_delta"}) {
    const auto* c = r.check(name);
    ASSERT_NE(c, nullptr) << name;
    EXPECT_GT(c->checked, 0u) << name;
  }
}

TEST(Reports, SameSeedGivesIdenticalJson) {
  const auto a = to_json(verify_pseudometric_suite(20, 3, 99)).dump();
  const auto b = to_json(verify_pseudometric_suite(20, 3, 99)).dump();
  EXPECT_EQ(a, b);
  const auto c = to_json(verify_contractivity_suite(20, 3, 99)).dump();
  const auto d = to_json(verify_contractivity_suite(20, 3, 99)).dump();
  EXPECT_EQ(c, d);
  const auto alpha = champernowne(Alphabet(10));
  const auto w1 = to_json(verify_wall_extension(alpha, make_rational(3, 7), 2, {100, 200})).dump();
  const auto w2 = to_json(verify_wall_extension(alpha, make_rational(3, 7), 2, {100, 200})).dump();
  EXPECT_EQ(w1, w2);
}

}  // namespace
}  // namespace fsdim
