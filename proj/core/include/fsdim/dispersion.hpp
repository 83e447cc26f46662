#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fsdim/blockstats.hpp"
#include "fsdim/rational.hpp"

namespace fsdim {

// A probability measure on {0, ..., n-1} with exact rational masses. Only
// positive entries are stored, so block spaces like Σ^6 stay cheap.
class ProbabilityVector {
 public:
  ProbabilityVector(std::size_t n, std::map<std::size_t, Rational> masses);

  static ProbabilityVector dense(std::span<const Rational> p);
  static ProbabilityVector from_distribution(const BlockDistribution& dist);

  std::size_t size() const noexcept { return n_; }
  Rational at(std::size_t i) const;
  const std::map<std::size_t, Rational>& support() const noexcept { return masses_; }
  std::vector<Rational> to_dense() const;

  friend bool operator==(const ProbabilityVector&, const ProbabilityVector&) = default;

 private:
  std::size_t n_;
  std::map<std::size_t, Rational> masses_;
};

struct CertificateEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  Rational value;
};

// An n×n nonnegative matrix in triplet form, claimed column-stochastic with
// at most declared_m nonzeros in any row or column. With
// identity_on_empty_columns set, a column that has no stored entries is read
// as the unit vector e_col (this keeps k^l-sized certificates sparse).
struct SparseStochasticCertificate {
  std::size_t n = 0;
  std::vector<CertificateEntry> entries;
  std::uint64_t declared_m = 1;
  bool identity_on_empty_columns = false;

  // Expands implicit identity columns into stored entries.
  SparseStochasticCertificate materialized() const;
  // Entries sorted by (col, row).
  void normalize();
};

enum class CertificateViolation {
  kNone,
  kMalformed,         // dimension, index, duplicate or non-positive entry
  kNotStochastic,     // (i) some column does not sum to 1
  kMarginalMismatch,  // (ii) A·π != μ
  kSupportExceeded,   // (iii) a row or column exceeds declared_m nonzeros
};

std::string to_string(CertificateViolation v);

struct CertificateCheck {
  bool ok = false;
  CertificateViolation violation = CertificateViolation::kNone;
  std::string detail;
  std::size_t max_row_support = 0;
  std::size_t max_col_support = 0;
  // log2(declared_m) when ok.
  long double bound_bits = 0;
};

CertificateCheck validate_certificate(const SparseStochasticCertificate& a,
                                      const ProbabilityVector& pi, const ProbabilityVector& mu);

// A·p.
ProbabilityVector apply(const SparseStochasticCertificate& a, const ProbabilityVector& p);

struct DeltaOptions {
  std::size_t n_cap = 6;
  std::chrono::milliseconds budget{10000};
};

enum class DeltaMethod { kExactSearch, kCertificateUpperBound };

std::string to_string(DeltaMethod m);

struct DispersionResult {
  std::uint64_t m_star = 1;
  long double delta_bits = 0;
  SparseStochasticCertificate witness;
  DeltaMethod method = DeltaMethod::kExactSearch;
};

// Least m for which a column-stochastic A with at most m nonzeros per row
// and column maps π to μ, with a witness. Positive-mass columns reduce to a
// transportation plan with marginals (π, μ); each support pattern of bounded
// degree is tested by exact max-flow. When the time budget runs out the best
// certificate found so far is returned and the method is flagged.
DispersionResult delta_exact(const ProbabilityVector& pi, const ProbabilityVector& mu,
                             const DeltaOptions& options = {});

// Given A with A·μ = π, builds A' with A'·π = μ and the same support bound.
SparseStochasticCertificate reverse_certificate(const SparseStochasticCertificate& a,
                                                const ProbabilityVector& mu,
                                                const ProbabilityVector& pi);

// A2·A1 for A1: π → μ and A2: μ → ν; declared bound m1·m2.
SparseStochasticCertificate compose_certificates(const SparseStochasticCertificate& a2,
                                                 const SparseStochasticCertificate& a1,
                                                 const ProbabilityVector& pi,
                                                 const ProbabilityVector& mu,
                                                 const ProbabilityVector& nu);

// Banded 0/1 matrix: row i holds ones in columns [i·m, min((i+1)·m, n)).
SparseStochasticCertificate build_worst_case_B(std::size_t n, std::uint64_t m);

std::vector<Rational> sorted_nonincreasing(std::span<const Rational> x);

// x ≽ y on the nonincreasing rearrangements of both.
bool majorizes(std::span<const Rational> x, std::span<const Rational> y);

// The majorization chain behind entropy contractivity for a pair with a
// certificate of bound m: r = B·p↓ must majorize q↓, H(r) <= H(q) and
// H(p) <= H(r) + log2 m.
struct SchurChainCheck {
  std::vector<Rational> r;
  long double h_p = 0;
  long double h_q = 0;
  long double h_r = 0;
  bool r_majorizes_q = false;
  bool entropy_r_le_q = false;
  bool entropy_p_le_r_plus_log_m = false;

  bool holds() const { return r_majorizes_q && entropy_r_le_q && entropy_p_le_r_plus_log_m; }
};

inline constexpr long double kEntropySlack = 0x1p-30L;

SchurChainCheck check_schur_chain(const ProbabilityVector& p, const ProbabilityVector& q,
                                  std::uint64_t m);

// A random rational measure on n points: a uniform composition of a random
// denominator D <= max_den into n nonnegative parts, divided by D.
ProbabilityVector random_distribution(std::mt19937_64& rng, std::size_t n,
                                      std::uint64_t max_den = 64);

// Uniform integer in [lo, hi] drawn directly from the engine's output, so
// results match across standard libraries.
std::uint64_t uniform_draw(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi);

}  // namespace fsdim
