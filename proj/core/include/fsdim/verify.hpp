#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsdim/blockstats.hpp"
#include "fsdim/digitseq.hpp"
#include "fsdim/realarith.hpp"
#include "fsdim/rational.hpp"

namespace fsdim {

struct ReportInputs {
  // Unset for scenarios that do not read digits.
  std::optional<unsigned> k;
  std::optional<Rational> q;
  std::optional<std::uint64_t> m;
  std::string source;
  unsigned max_block_len = 0;
  std::vector<std::uint64_t> n_schedule;
  std::optional<std::uint64_t> digit_count;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<std::size_t> n_max;
};

// One digit stream of a scenario with its entropy-rate grid.
struct StreamSummary {
  std::string name;
  std::string description;
  std::size_t digits = 0;
  // Empty when the stream is too short for even one grid cell.
  std::optional<DimensionEstimateGrid> grid;
  std::optional<DimensionEstimates> estimates;
  std::optional<NormalityDeviation> normality;
  std::optional<std::size_t> unresolved_at;
};

// One main-lemma certificate check at block length l and prefix n blocks.
struct CertificateRecord {
  std::string leg;
  std::uint64_t m = 1;
  unsigned l = 1;
  std::uint64_t n = 1;
  long double h_in = 0;
  long double h_out = 0;
  long double delta_h = 0;
  long double bound_bits = 0;
  std::uint64_t g = 1;
  std::uint64_t column_bound = 1;
  std::uint64_t row_bound = 1;
  std::size_t max_row_support = 0;
  std::size_t max_col_support = 0;
  bool certificate_valid = false;
  std::string violation;
  // |ΔH| <= bound_bits + kEntropySlack.
  bool pass = false;
};

struct EstimateGap {
  std::string a;
  std::string b;
  long double lower_gap = 0;
  long double upper_gap = 0;
};

// A named assertion evaluated `checked` times.
struct CheckRecord {
  std::string name;
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  std::uint64_t inconclusive = 0;
  std::string detail;

  bool pass() const { return violations == 0; }
};

struct VerificationReport {
  std::string scenario;
  ReportInputs inputs;
  std::vector<StreamSummary> streams;
  std::vector<CertificateRecord> records;
  std::vector<EstimateGap> gaps;
  std::vector<CheckRecord> checks;
  bool partial = false;
  // Some digit or carry could not be certified within the lookahead cap.
  bool unresolved = false;
  std::vector<std::string> notes;
  double elapsed_ms = 0;

  bool passed() const;
  const StreamSummary* stream(const std::string& name) const;
  const CheckRecord* check(const std::string& name) const;
};

struct VerifyOptions {
  unsigned threads = 0;
  std::size_t lookahead_cap = kDefaultLookaheadCap;
  double tail_fraction = 0.5;
  unsigned normality_max_len = 3;
};

// Runs the wall-extension chain for α ↦ frac(qα) and α ↦ frac(q+α): grids
// for all three streams, main-lemma certificates for every integer
// multiplication leg, and estimate gaps.
VerificationReport verify_wall_extension(const DigitSequence& alpha, const Rational& q,
                                         unsigned max_block_len,
                                         std::vector<std::uint64_t> n_schedule,
                                         const VerifyOptions& options = {});

// Binary Champernowne S, its dilution T, 0^∞ and the even/odd selections
// of T, each estimated on N digits.
VerificationReport verify_dilution_counterexample(std::size_t digit_count,
                                                  unsigned max_block_len = 8,
                                                  const VerifyOptions& options = {});

VerificationReport verify_pseudometric_suite(std::uint64_t sample_count, std::size_t n_max,
                                             std::uint64_t seed);

VerificationReport verify_contractivity_suite(std::uint64_t sample_count, std::size_t n_max,
                                              std::uint64_t seed);

// n_max, n_max/2, ..., n_max/2^(count-1) in increasing order, duplicates
// and zeros dropped.
std::vector<std::uint64_t> halving_schedule(std::uint64_t n_max, unsigned count = 4);

}  // namespace fsdim
