#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "fsdim/dispersion.hpp"
#include "fsdim/error.hpp"

namespace fsdim {

ProbabilityVector::ProbabilityVector(std::size_t n, std::map<std::size_t, Rational> masses)
    : n_(n), masses_(std::move(masses)) {
  if (n_ == 0) throw InvalidArgument("probability vector of dimension 0");
  Rational total = 0;
  for (auto it = masses_.begin(); it != masses_.end();) {
    if (it->first >= n_) throw InvalidArgument("probability index out of range");
    if (it->second < 0) throw InvalidArgument("negative probability " + to_string(it->second));
    if (it->second == 0) {
      it = masses_.erase(it);
      continue;
    }
    total += it->second;
    ++it;
  }
  if (total != 1) {
    throw InvalidArgument("probabilities sum to " + to_string(total) + ", not 1");
  }
}

ProbabilityVector ProbabilityVector::dense(std::span<const Rational> p) {
  std::map<std::size_t, Rational> masses;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] != 0) masses.emplace(i, p[i]);
    if (p[i] < 0) throw InvalidArgument("negative probability " + to_string(p[i]));
  }
  return ProbabilityVector(p.size(), std::move(masses));
}

ProbabilityVector ProbabilityVector::from_distribution(const BlockDistribution& dist) {
  std::map<std::size_t, Rational> masses;
  const BigInt n(static_cast<unsigned long>(dist.block_count()));
  for (const auto& [code, c] : dist.counts()) {
    masses.emplace(static_cast<std::size_t>(code),
                   make_rational(BigInt(static_cast<unsigned long>(c)), n));
  }
  return ProbabilityVector(
      static_cast<std::size_t>(block_space_size(dist.alphabet().base(), dist.block_length())),
      std::move(masses));
}

Rational ProbabilityVector::at(std::size_t i) const {
  if (i >= n_) throw InvalidArgument("probability index out of range");
  auto it = masses_.find(i);
  return it == masses_.end() ? Rational(0) : it->second;
}

std::vector<Rational> ProbabilityVector::to_dense() const {
  if (n_ > (std::size_t{1} << 24)) throw InvalidArgument("vector too large to densify");
  std::vector<Rational> out(n_, Rational(0));
  for (const auto& [i, p] : masses_) out[i] = p;
  return out;
}

void SparseStochasticCertificate::normalize() {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
}

SparseStochasticCertificate SparseStochasticCertificate::materialized() const {
  SparseStochasticCertificate out = *this;
  out.identity_on_empty_columns = false;
  if (!identity_on_empty_columns) return out;
  std::vector<bool> used(n, false);
  for (const auto& e : entries) {
    if (e.col < n) used[e.col] = true;
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!used[j]) out.entries.push_back({j, j, Rational(1)});
  }
  out.normalize();
  return out;
}

std::string to_string(CertificateViolation v) {
  switch (v) {
    case CertificateViolation::kNone: return "none";
    case CertificateViolation::kMalformed: return "malformed";
    case CertificateViolation::kNotStochastic: return "not-stochastic";
    case CertificateViolation::kMarginalMismatch: return "marginal-mismatch";
    case CertificateViolation::kSupportExceeded: return "support-exceeded";
  }
  return "unknown";
}

namespace {

CertificateCheck fail(CertificateViolation v, std::string detail) {
  CertificateCheck c;
  c.ok = false;
  c.violation = v;
  c.detail = std::move(detail);
  return c;
}

struct SupportCounts {
  std::unordered_map<std::size_t, std::size_t> rows;
  std::unordered_map<std::size_t, std::size_t> cols;
};

}  // namespace

CertificateCheck validate_certificate(const SparseStochasticCertificate& a,
                                      const ProbabilityVector& pi, const ProbabilityVector& mu) {
  if (pi.size() != a.n || mu.size() != a.n) {
    return fail(CertificateViolation::kMalformed,
                "dimension mismatch: certificate " + std::to_string(a.n) + ", pi " +
                    std::to_string(pi.size()) + ", mu " + std::to_string(mu.size()));
  }
  if (a.declared_m == 0) return fail(CertificateViolation::kMalformed, "declared m is 0");

  SupportCounts support;
  std::unordered_map<std::size_t, Rational> col_sums;
  {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : a.entries) {
      if (e.row >= a.n || e.col >= a.n) {
        return fail(CertificateViolation::kMalformed, "entry index out of range");
      }
      if (e.value <= 0) {
        return fail(CertificateViolation::kMalformed,
                    "non-positive entry at (" + std::to_string(e.row) + "," +
                        std::to_string(e.col) + ")");
      }
      if (!seen.emplace(e.row, e.col).second) {
        return fail(CertificateViolation::kMalformed,
                    "duplicate entry at (" + std::to_string(e.row) + "," +
                        std::to_string(e.col) + ")");
      }
      ++support.rows[e.row];
      ++support.cols[e.col];
      col_sums[e.col] += e.value;
    }
  }
  auto column_empty = [&](std::size_t j) { return support.cols.find(j) == support.cols.end(); };

  // (i) stochastic columns.
  {
    std::vector<std::size_t> cols;
    cols.reserve(col_sums.size());
    for (const auto& [j, s] : col_sums) cols.push_back(j);
    std::sort(cols.begin(), cols.end());
    for (std::size_t j : cols) {
      if (col_sums[j] != 1) {
        return fail(CertificateViolation::kNotStochastic,
                    "column " + std::to_string(j) + " sums to " + to_string(col_sums[j]));
      }
    }
    if (!a.identity_on_empty_columns && support.cols.size() < a.n) {
      std::size_t j = 0;
      while (!column_empty(j)) ++j;
      return fail(CertificateViolation::kNotStochastic,
                  "column " + std::to_string(j) + " is empty");
    }
  }

  // (ii) A·π = μ.
  {
    std::unordered_map<std::size_t, Rational> image;
    for (const auto& e : a.entries) {
      auto it = pi.support().find(e.col);
      if (it != pi.support().end()) image[e.row] += e.value * it->second;
    }
    if (a.identity_on_empty_columns) {
      for (const auto& [j, p] : pi.support()) {
        if (column_empty(j)) image[j] += p;
      }
    }
    for (const auto& [i, m] : mu.support()) {
      auto it = image.find(i);
      const Rational got = it == image.end() ? Rational(0) : it->second;
      if (got != m) {
        return fail(CertificateViolation::kMarginalMismatch,
                    "row " + std::to_string(i) + ": (A·pi) = " + to_string(got) +
                        ", mu = " + to_string(m));
      }
    }
    for (const auto& [i, v] : image) {
      if (v != 0 && mu.support().find(i) == mu.support().end()) {
        return fail(CertificateViolation::kMarginalMismatch,
                    "row " + std::to_string(i) + ": (A·pi) = " + to_string(v) + ", mu = 0");
      }
    }
  }

  // (iii) support bound.
  CertificateCheck out;
  for (const auto& [j, c] : support.cols) out.max_col_support = std::max(out.max_col_support, c);
  for (const auto& [i, c] : support.rows) {
    const std::size_t total = c + ((a.identity_on_empty_columns && column_empty(i)) ? 1 : 0);
    out.max_row_support = std::max(out.max_row_support, total);
  }
  if (a.identity_on_empty_columns && support.cols.size() < a.n) {
    out.max_col_support = std::max<std::size_t>(out.max_col_support, 1);
    out.max_row_support = std::max<std::size_t>(out.max_row_support, 1);
  }
  if (out.max_row_support > a.declared_m || out.max_col_support > a.declared_m) {
    auto f = fail(CertificateViolation::kSupportExceeded,
                  "max row support " + std::to_string(out.max_row_support) +
                      ", max column support " + std::to_string(out.max_col_support) +
                      " exceed declared m = " + std::to_string(a.declared_m));
    f.max_row_support = out.max_row_support;
    f.max_col_support = out.max_col_support;
    return f;
  }
  out.ok = true;
  out.bound_bits = std::log2l(static_cast<long double>(a.declared_m));
  return out;
}

ProbabilityVector apply(const SparseStochasticCertificate& a, const ProbabilityVector& p) {
  if (p.size() != a.n) throw InvalidArgument("dimension mismatch in apply");
  std::map<std::size_t, Rational> image;
  std::unordered_set<std::size_t> used;
  for (const auto& e : a.entries) {
    used.insert(e.col);
    auto it = p.support().find(e.col);
    if (it != p.support().end()) image[e.row] += e.value * it->second;
  }
  if (a.identity_on_empty_columns) {
    for (const auto& [j, x] : p.support()) {
      if (!used.count(j)) image[j] += x;
    }
  }
  return ProbabilityVector(a.n, std::move(image));
}

SparseStochasticCertificate reverse_certificate(const SparseStochasticCertificate& a_in,
                                                const ProbabilityVector& mu,
                                                const ProbabilityVector& pi) {
  const auto check = validate_certificate(a_in, mu, pi);
  if (!check.ok) {
    throw InvalidArgument("reverse_certificate: input does not map mu to pi (" +
                          to_string(check.violation) + ": " + check.detail + ")");
  }
  const SparseStochasticCertificate a = a_in.materialized();
  const std::size_t n = a.n;

  std::unordered_map<std::size_t, Rational> row_sums;
  std::vector<std::size_t> col_count(n, 0);  // nonzeros per column of A = per row of A'
  for (const auto& e : a.entries) {
    row_sums[e.row] += e.value;
    ++col_count[e.col];
  }

  SparseStochasticCertificate out;
  out.n = n;
  out.declared_m = a.declared_m;
  out.entries.reserve(a.entries.size());
  for (const auto& e : a.entries) {
    // a'_{ij} with i = e.col, j = e.row.
    const std::size_t i = e.col;
    const std::size_t j = e.row;
    const Rational pj = pi.at(j);
    Rational v = pj > 0 ? Rational(e.value * mu.at(i) / pj) : Rational(e.value / row_sums[j]);
    if (v != 0) out.entries.push_back({i, j, v});
  }
  // A zero row j of A (so pi(j) = 0) leaves column j of A' empty; give it a
  // single unit entry in the least loaded row of A'. Some row has spare
  // capacity because A's n columns share at most (n-1)·m nonzeros.
  std::vector<std::size_t> out_col_count(n, 0);
  for (const auto& e : out.entries) ++out_col_count[e.col];
  for (std::size_t j = 0; j < n; ++j) {
    if (out_col_count[j] != 0) continue;
    const auto target = static_cast<std::size_t>(
        std::min_element(col_count.begin(), col_count.end()) - col_count.begin());
    out.entries.push_back({target, j, Rational(1)});
    ++col_count[target];
  }
  out.normalize();
  return out;
}

SparseStochasticCertificate compose_certificates(const SparseStochasticCertificate& a2,
                                                 const SparseStochasticCertificate& a1,
                                                 const ProbabilityVector& pi,
                                                 const ProbabilityVector& mu,
                                                 const ProbabilityVector& nu) {
  if (a1.n != a2.n) throw InvalidArgument("compose_certificates: inner dimension mismatch");
  const auto c1 = validate_certificate(a1, pi, mu);
  if (!c1.ok) {
    throw InvalidArgument("compose_certificates: A1 does not map pi to mu (" + c1.detail + ")");
  }
  const auto c2 = validate_certificate(a2, mu, nu);
  if (!c2.ok) {
    throw InvalidArgument("compose_certificates: A2 does not map mu to nu (" + c2.detail + ")");
  }
  const auto m1 = a1.materialized();
  const auto m2 = a2.materialized();

  // Row lists of A2 keyed by column (the shared index).
  std::unordered_map<std::size_t, std::vector<const CertificateEntry*>> a2_by_col;
  for (const auto& e : m2.entries) a2_by_col[e.col].push_back(&e);

  std::map<std::pair<std::size_t, std::size_t>, Rational> product;  // (col, row)
  for (const auto& e1 : m1.entries) {
    auto it = a2_by_col.find(e1.row);
    if (it == a2_by_col.end()) continue;
    for (const CertificateEntry* e2 : it->second) {
      product[{e1.col, e2->row}] += e2->value * e1.value;
    }
  }
  SparseStochasticCertificate out;
  out.n = a1.n;
  out.declared_m = a1.declared_m * a2.declared_m;
  for (const auto& [key, v] : product) {
    if (v != 0) out.entries.push_back({key.second, key.first, v});
  }
  out.normalize();
  return out;
}

SparseStochasticCertificate build_worst_case_B(std::size_t n, std::uint64_t m) {
  if (m < 1 || m > n) throw InvalidArgument("worst-case matrix needs 1 <= m <= n");
  SparseStochasticCertificate b;
  b.n = n;
  b.declared_m = m;
  for (std::size_t j = 0; j < n; ++j) b.entries.push_back({j / m, j, Rational(1)});
  return b;
}

std::vector<Rational> sorted_nonincreasing(std::span<const Rational> x) {
  std::vector<Rational> out(x.begin(), x.end());
  std::sort(out.begin(), out.end(), [](const Rational& a, const Rational& b) { return a > b; });
  return out;
}

bool majorizes(std::span<const Rational> x, std::span<const Rational> y) {
  if (x.size() != y.size()) throw InvalidArgument("majorizes: length mismatch");
  const auto xs = sorted_nonincreasing(x);
  const auto ys = sorted_nonincreasing(y);
  Rational px = 0;
  Rational py = 0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    px += xs[t];
    py += ys[t];
    if (px < py) return false;
  }
  return px == py;
}

SchurChainCheck check_schur_chain(const ProbabilityVector& p, const ProbabilityVector& q,
                                  std::uint64_t m) {
  if (p.size() != q.size()) throw InvalidArgument("check_schur_chain: dimension mismatch");
  const std::size_t n = p.size();
  const auto ps = sorted_nonincreasing(p.to_dense());
  const auto qs = sorted_nonincreasing(q.to_dense());
  const auto b = build_worst_case_B(n, std::min<std::uint64_t>(m, n));
  const auto r = apply(b, ProbabilityVector::dense(ps)).to_dense();

  SchurChainCheck out;
  out.r = r;
  out.h_p = shannon_entropy(ps);
  out.h_q = shannon_entropy(qs);
  out.h_r = shannon_entropy(r);
  out.r_majorizes_q = majorizes(r, qs);
  out.entropy_r_le_q = out.h_r <= out.h_q + kEntropySlack;
  out.entropy_p_le_r_plus_log_m =
      out.h_p <= out.h_r + std::log2l(static_cast<long double>(m)) + kEntropySlack;
  return out;
}

std::uint64_t uniform_draw(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw InvalidArgument("uniform_draw: empty range");
  const std::uint64_t span = hi - lo;
  if (span == std::numeric_limits<std::uint64_t>::max()) return rng();
  const std::uint64_t range = span + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + x % range;
}

ProbabilityVector random_distribution(std::mt19937_64& rng, std::size_t n, std::uint64_t max_den) {
  if (n == 0) throw InvalidArgument("random_distribution: n must be positive");
  if (max_den == 0) throw InvalidArgument("random_distribution: max_den must be positive");
  const std::uint64_t d = uniform_draw(rng, 1, max_den);
  std::vector<std::uint64_t> cuts;
  cuts.reserve(n + 1);
  cuts.push_back(0);
  for (std::size_t i = 0; i + 1 < n; ++i) cuts.push_back(uniform_draw(rng, 0, d));
  cuts.push_back(d);
  std::sort(cuts.begin(), cuts.end());
  std::map<std::size_t, Rational> masses;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t part = cuts[i + 1] - cuts[i];
    if (part != 0) {
      masses.emplace(i, make_rational(static_cast<std::int64_t>(part), static_cast<std::int64_t>(d)));
    }
  }
  return ProbabilityVector(n, std::move(masses));
}

}  // namespace fsdim
