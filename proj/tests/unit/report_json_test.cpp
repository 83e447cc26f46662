#include <gtest/gtest.h>

#include <random>

#include "fsdim/error.hpp"
#include "fsdim/report_json.hpp"

namespace fsdim {
namespace {

using nlohmann::json;

TEST(DistributionJson, RoundTrip) {
  std::mt19937_64 rng(61);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_distribution(rng, 1 + uniform_draw(rng, 0, 7), 64);
    const json j = distribution_to_json(p);
    EXPECT_EQ(j["n"], p.size());
    EXPECT_EQ(j["p"].size(), p.size());
    EXPECT_EQ(distribution_from_json(j), p);
    EXPECT_EQ(distribution_from_json(json::parse(j.dump())), p);
  }
}

TEST(DistributionJson, ParsesRationalStrings) {
  const auto p = distribution_from_json(json::parse(R"({"n":3,"p":["1/2","1/4","1/4"]})"));
  EXPECT_EQ(p.at(0), make_rational(1, 2));
  EXPECT_EQ(p.at(2), make_rational(1, 4));
  EXPECT_EQ(distribution_to_json(p).dump(), R"({"n":3,"p":["1/2","1/4","1/4"]})");
}

TEST(DistributionJson, RejectsMalformedInput) {
  EXPECT_THROW(distribution_from_json(json::parse(R"({"n":2,"p":["1/2","1/4"]})")), Error);
  EXPECT_THROW(distribution_from_json(json::parse(R"({"n":3,"p":["1/2","1/2"]})")), Error);
  EXPECT_THROW(distribution_from_json(json::parse(R"({"n":2,"p":["x","1/2"]})")), Error);
  EXPECT_THROW(distribution_from_json(json::parse(R"({"n":1})")), FormatError);
  // The length field is optional.
  EXPECT_EQ(distribution_from_json(json::parse(R"({"p":["1"]})")).size(), 1u);
}

TEST(CertificateJson, RoundTrip) {
  SparseStochasticCertificate a;
  a.n = 3;
  a.declared_m = 2;
  a.identity_on_empty_columns = true;
  a.entries = {{0, 0, make_rational(1, 3)}, {1, 0, make_rational(2, 3)}, {2, 1, Rational(1)}};
  const json j = certificate_to_json(a);
  EXPECT_EQ(j["m"], 2);
  EXPECT_EQ(j["identity_on_empty_columns"], true);
  EXPECT_EQ(j["entries"][0]["value"], "1/3");
  const auto back = certificate_from_json(json::parse(j.dump()));
  EXPECT_EQ(back.n, a.n);
  EXPECT_EQ(back.declared_m, a.declared_m);
  EXPECT_EQ(back.identity_on_empty_columns, true);
  ASSERT_EQ(back.entries.size(), a.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    EXPECT_EQ(back.entries[i].row, a.entries[i].row);
    EXPECT_EQ(back.entries[i].col, a.entries[i].col);
    EXPECT_EQ(back.entries[i].value, a.entries[i].value);
  }
}

TEST(DispersionJson, PowerOfTwoGivesIntegerBits) {
  const auto pi = ProbabilityVector::dense(std::vector<Rational>{Rational(1), Rational(0)});
  const auto mu =
      ProbabilityVector::dense(std::vector<Rational>{make_rational(1, 2), make_rational(1, 2)});
  const json j = dispersion_to_json(delta_exact(pi, mu), false);
  EXPECT_EQ(j["m"], 2);
  EXPECT_TRUE(j["delta_bits"].is_number_integer());
  EXPECT_EQ(j["delta_bits"], 1);
  EXPECT_EQ(j["method"], "exact-search");
  EXPECT_FALSE(j.contains("witness"));
  EXPECT_TRUE(dispersion_to_json(delta_exact(pi, mu), true).contains("witness"));
}

TEST(DispersionJson, OtherValuesAreFloatingBits) {
  const auto pi = ProbabilityVector::dense(
      std::vector<Rational>{Rational(1), Rational(0), Rational(0)});
  const std::vector<Rational> third(3, make_rational(1, 3));
  const json j = dispersion_to_json(delta_exact(pi, ProbabilityVector::dense(third)), false);
  EXPECT_EQ(j["m"], 3);
  EXPECT_TRUE(j["delta_bits"].is_number_float());
  EXPECT_NEAR(j["delta_bits"].get<double>(), std::log2(3.0), 1e-12);
}

TEST(GridJson, FieldsAndValues) {
  const auto grid = entropy_rate_grid(periodic(Alphabet(2), {0, 1}), 2, {10, 20});
  const auto est = dim_estimates(grid);
  const json j = grid_report_json(grid, est, 0.5);
  EXPECT_EQ(j["k"], 2);
  EXPECT_EQ(j["grid"].size(), 4u);
  EXPECT_EQ(j["grid"][0]["l"], 1);
  EXPECT_EQ(j["grid"][0]["n"], 10);
  EXPECT_EQ(j["grid"][0]["h"].get<double>(), 1.0);
  EXPECT_EQ(j["dim_lower"].get<double>(), 0.0);
  EXPECT_EQ(j["dim_upper"].get<double>(), 0.0);
  EXPECT_EQ(j["truncated"], false);
}

TEST(ReportJson, TimingOnlyWhenRequested) {
  const auto r = verify_pseudometric_suite(5, 3, 1);
  const json plain = to_json(r);
  EXPECT_FALSE(plain.contains("timing_ms"));
  EXPECT_TRUE(to_json(r, true).contains("timing_ms"));
  EXPECT_EQ(plain["scenario"], "pseudometric");
  EXPECT_EQ(plain["passed"], true);
  EXPECT_TRUE(plain["checks"].is_array());
}

TEST(MainLemmaJson, MatrixOptional) {
  const auto c = build_main_lemma_matrix(champernowne(Alphabet(10)), 3, 2, 100);
  const auto check = validate_certificate(c.matrix, ProbabilityVector::from_distribution(c.pi_alpha),
                                          ProbabilityVector::from_distribution(c.pi_m_alpha));
  const json lean = main_lemma_to_json(c, check, false);
  const json full = main_lemma_to_json(c, check, true);
  EXPECT_FALSE(lean.contains("certificate"));
  ASSERT_TRUE(full.contains("certificate"));
  const auto back = certificate_from_json(full["certificate"]);
  EXPECT_TRUE(validate_certificate(back, ProbabilityVector::from_distribution(c.pi_alpha),
                                   ProbabilityVector::from_distribution(c.pi_m_alpha))
                  .ok);
}

}  // namespace
}  // namespace fsdim
