#include "fsdim/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fsdim/dispersion.hpp"
#include "fsdim/error.hpp"
#include "fsdim/main_lemma.hpp"

namespace fsdim {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fmt(long double x) {
  std::ostringstream os;
  os.precision(6);
  os << static_cast<double>(x);
  return os.str();
}

StreamSummary summarize(std::string name, std::string description, const DigitSequence& seq,
                        unsigned max_block_len, const std::vector<std::uint64_t>& schedule,
                        const VerifyOptions& options, VerificationReport& report) {
  StreamSummary s;
  s.name = std::move(name);
  s.description = std::move(description);
  s.digits = seq.prefix_at_most(static_cast<std::size_t>(max_block_len) * schedule.back()).size();
  try {
    s.grid = entropy_rate_grid(seq, max_block_len, schedule, options.threads);
    s.estimates = dim_estimates(*s.grid, options.tail_fraction);
    if (s.grid->truncated) {
      report.partial = true;
      report.notes.push_back(s.name + ": grid truncated to " +
                             std::to_string(s.grid->max_block_len) + " x " +
                             std::to_string(s.grid->n_schedule.size()));
    }
  } catch (const InsufficientDigits&) {
    report.partial = true;
    report.notes.push_back(s.name + ": too few digits for any grid cell");
  }
  if (options.normality_max_len > 0 && s.digits >= options.normality_max_len) {
    const unsigned len = std::min(options.normality_max_len, max_block_len);
    s.normality = normality_deviation(seq, len, s.digits - len + 1);
  }
  return s;
}

DigitSequence certified_stream(const CertifiedDigitResult& r) { return r.digits; }

void add_gap(VerificationReport& report, const std::string& a, const std::string& b) {
  const auto* sa = report.stream(a);
  const auto* sb = report.stream(b);
  if (!sa || !sb || !sa->estimates || !sb->estimates) return;
  report.gaps.push_back({a, b, std::fabs(sa->estimates->lower - sb->estimates->lower),
                         std::fabs(sa->estimates->upper - sb->estimates->upper)});
}

// Certificates for α ↦ frac(mα) at every feasible (l, n) cell.
void run_leg(VerificationReport& report, const std::string& leg, const DigitSequence& input,
             std::uint64_t m, unsigned max_block_len, const std::vector<std::uint64_t>& schedule,
             const VerifyOptions& options) {
  const auto md = multiplier_digits(m, input.base());
  for (unsigned l = 1; l <= max_block_len; ++l) {
    std::uint64_t n_top = schedule.back();
    if (!input.exact_value()) {
      const std::size_t have =
          input.prefix_at_most(static_cast<std::size_t>(n_top) * l + md.r).size();
      n_top = std::min<std::uint64_t>(n_top, have > md.r ? (have - md.r) / l : 0);
    }
    std::optional<CarryAdviceTrace> trace;
    while (n_top > 0 && !trace) {
      try {
        trace = carry_advice_trace(input, m, l, n_top, options.lookahead_cap);
      } catch (const UnresolvedCarry& e) {
        // The carry into block j is read at position (j+1)·l.
        const std::uint64_t j = e.position() / l;
        n_top = j > 0 ? j - 1 : 0;
        report.partial = true;
        report.unresolved = true;
        report.notes.push_back(leg + ": unresolved carry at digit " +
                               std::to_string(e.position()) + ", l = " + std::to_string(l));
      }
    }
    if (!trace) continue;
    for (std::uint64_t n : schedule) {
      if (n > n_top) {
        report.partial = true;
        continue;
      }
      const auto cert = build_main_lemma_matrix(*trace, n);
      CertificateRecord rec;
      rec.leg = leg;
      rec.m = m;
      rec.l = l;
      rec.n = n;
      rec.h_in = shannon_entropy(cert.pi_alpha);
      rec.h_out = shannon_entropy(cert.pi_m_alpha);
      rec.delta_h = std::fabs(rec.h_in - rec.h_out);
      rec.bound_bits = cert.bound_bits;
      rec.g = cert.g;
      rec.column_bound = cert.column_bound;
      rec.row_bound = cert.row_bound;
      const auto check = validate_certificate(cert.matrix,
                                              ProbabilityVector::from_distribution(cert.pi_alpha),
                                              ProbabilityVector::from_distribution(cert.pi_m_alpha));
      rec.max_row_support = cert.max_row_support;
      rec.max_col_support = cert.max_col_support;
      rec.certificate_valid = check.ok && cert.max_col_support <= cert.column_bound;
      rec.violation = check.ok ? (rec.certificate_valid ? "" : "column support exceeds (s+1)m")
                               : to_string(check.violation) + ": " + check.detail;
      rec.pass = rec.delta_h <= rec.bound_bits + kEntropySlack;
      report.records.push_back(std::move(rec));
    }
  }
}

CheckRecord tally_records(const VerificationReport& report) {
  CheckRecord c{"certificate_bound", 0, 0, 0, ""};
  long double worst = -std::numeric_limits<long double>::infinity();
  for (const auto& r : report.records) {
    ++c.checked;
    if (!r.pass) ++c.violations;
    worst = std::max(worst, r.delta_h - r.bound_bits);
  }
  if (c.checked > 0) c.detail = "max(|dH| - bound) = " + fmt(worst);
  return c;
}

CheckRecord tally_validity(const VerificationReport& report) {
  CheckRecord c{"certificate_valid", 0, 0, 0, ""};
  for (const auto& r : report.records) {
    ++c.checked;
    if (!r.certificate_valid) {
      if (c.violations == 0) c.detail = r.leg + " l=" + std::to_string(r.l) + ": " + r.violation;
      ++c.violations;
    }
  }
  return c;
}

// log2(g(s+1)m) never exceeds the l-free bound log2(m^2 (s+1)).
CheckRecord tally_uniform_bound(const VerificationReport& report) {
  CheckRecord c{"bound_uniform_in_l", 0, 0, 0, ""};
  for (const auto& r : report.records) {
    ++c.checked;
    const long double s1 = static_cast<long double>(r.column_bound) / r.m;
    const long double cap = std::log2l(static_cast<long double>(r.m) * r.m * s1);
    if (r.bound_bits > cap + kEntropySlack) ++c.violations;
  }
  return c;
}

CheckRecord range_check(const std::string& name, const StreamSummary* s, long double lo,
                        long double hi) {
  CheckRecord c{name, 1, 0, 0, ""};
  if (!s || !s->estimates) {
    c.violations = 1;
    c.detail = "no estimates";
    return c;
  }
  const auto& e = *s->estimates;
  if (!(e.lower >= lo && e.lower <= hi && e.upper >= lo && e.upper <= hi)) c.violations = 1;
  c.detail = "(" + fmt(e.lower) + ", " + fmt(e.upper) + ") in [" + fmt(lo) + ", " + fmt(hi) + "]";
  return c;
}

struct Triple {
  ProbabilityVector pi, mu, nu;
};

// Shared by both suites so a seed yields the same pairs in each.
std::vector<Triple> draw_triples(std::uint64_t sample_count, std::size_t n_max,
                                 std::uint64_t seed) {
  if (n_max < 2) throw InvalidArgument("n_max must be at least 2");
  const DeltaOptions caps;
  if (n_max > caps.n_cap) {
    throw InvalidArgument("n_max " + std::to_string(n_max) + " exceeds solver cap " +
                          std::to_string(caps.n_cap));
  }
  std::mt19937_64 rng(seed);
  std::vector<Triple> out;
  out.reserve(sample_count);
  for (std::uint64_t i = 0; i < sample_count; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(i % (n_max - 1));
    auto pi = random_distribution(rng, n);
    auto mu = random_distribution(rng, n);
    auto nu = random_distribution(rng, n);
    out.push_back({std::move(pi), std::move(mu), std::move(nu)});
  }
  return out;
}

ProbabilityVector permuted(const ProbabilityVector& p, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(p.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[uniform_draw(rng, 0, i - 1)]);
  }
  std::map<std::size_t, Rational> masses;
  for (const auto& [i, x] : p.support()) masses.emplace(perm[i], x);
  return ProbabilityVector(p.size(), std::move(masses));
}

CheckRecord named(std::string name) {
  CheckRecord c;
  c.name = std::move(name);
  return c;
}

void note_violation(CheckRecord& c, std::uint64_t sample, const std::string& what) {
  if (c.violations == 0) c.detail = "sample " + std::to_string(sample) + ": " + what;
  ++c.violations;
}

ReportInputs suite_inputs(std::uint64_t sample_count, std::size_t n_max, std::uint64_t seed) {
  ReportInputs in;
  in.source = "random rational distributions, denominators <= 64";
  in.samples = sample_count;
  in.n_max = n_max;
  in.seed = seed;
  return in;
}

}  // namespace

bool VerificationReport::passed() const {
  for (const auto& r : records) {
    if (!r.pass || !r.certificate_valid) return false;
  }
  for (const auto& c : checks) {
    if (!c.pass()) return false;
  }
  return true;
}

const StreamSummary* VerificationReport::stream(const std::string& name) const {
  for (const auto& s : streams) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const CheckRecord* VerificationReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<std::uint64_t> halving_schedule(std::uint64_t n_max, unsigned count) {
  std::vector<std::uint64_t> out;
  std::uint64_t n = n_max;
  for (unsigned i = 0; i < count && n > 0; ++i, n /= 2) out.push_back(n);
  std::reverse(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

VerificationReport verify_wall_extension(const DigitSequence& alpha, const Rational& q,
                                         unsigned max_block_len,
                                         std::vector<std::uint64_t> n_schedule,
                                         const VerifyOptions& options) {
  const auto start = Clock::now();
  if (q == 0) throw InvalidArgument("q must be nonzero");
  if (max_block_len == 0) throw InvalidArgument("max block length must be positive");
  if (n_schedule.empty()) throw InvalidArgument("empty block-count schedule");
  for (std::size_t i = 1; i < n_schedule.size(); ++i) {
    if (n_schedule[i] <= n_schedule[i - 1]) {
      throw InvalidArgument("block-count schedule must be strictly increasing");
    }
  }
  const unsigned k = alpha.base();
  block_space_size(k, max_block_len);

  VerificationReport report;
  report.scenario = "wall-extension";
  report.inputs.k = k;
  report.inputs.q = q;
  report.inputs.source =
      alpha.exact_value() ? "rational " + to_string(*alpha.exact_value()) : "digit stream";
  report.inputs.max_block_len = max_block_len;
  report.inputs.n_schedule = n_schedule;

  const std::size_t total = static_cast<std::size_t>(max_block_len) * n_schedule.back();
  report.inputs.digit_count = total;

  const BigInt a = abs(q.get_num());
  const BigInt b = q.get_den();
  const auto q_alpha = mul_rational_mod1(alpha, q, total, options.lookahead_cap);
  const auto q_plus = add_rational_mod1(alpha, q, total, options.lookahead_cap);

  report.streams.push_back(
      summarize("alpha", report.inputs.source, alpha, max_block_len, n_schedule, options, report));
  report.streams.push_back(summarize("q_alpha", "frac(" + to_string(q) + " * alpha)",
                                     certified_stream(q_alpha), max_block_len, n_schedule,
                                     options, report));
  report.streams.back().unresolved_at = q_alpha.unresolved_at;
  report.streams.push_back(summarize("q_plus_alpha", "frac(" + to_string(q) + " + alpha)",
                                     certified_stream(q_plus), max_block_len, n_schedule, options,
                                     report));
  report.streams.back().unresolved_at = q_plus.unresolved_at;
  if (q_alpha.unresolved || q_plus.unresolved) {
    report.partial = true;
    report.unresolved = true;
  }

  add_gap(report, "alpha", "q_alpha");
  add_gap(report, "alpha", "q_plus_alpha");

  if (!a.fits_ulong_p() || !b.fits_ulong_p()) {
    throw InvalidArgument("numerator and denominator of q must fit in 64 bits");
  }
  const std::uint64_t am = a.get_ui();
  const std::uint64_t bm = b.get_ui();
  run_leg(report, "alpha -> " + std::to_string(am) + " alpha", alpha, am, max_block_len,
          n_schedule, options);
  if (bm > 1) {
    // β = frac(|a|α / b); then frac(bβ) = frac(|a|α).
    const auto md = multiplier_digits(bm, k);
    const auto beta = mul_rational_mod1(alpha, make_rational(a, b),
                                        total + md.r + options.lookahead_cap,
                                        options.lookahead_cap);
    run_leg(report,
            "beta -> " + std::to_string(bm) + " beta, beta = frac(" + std::to_string(am) + "/" +
                std::to_string(bm) + " alpha)",
            beta.digits, bm, max_block_len, n_schedule, options);
  }

  report.checks.push_back(tally_records(report));
  report.checks.push_back(tally_validity(report));
  report.checks.push_back(tally_uniform_bound(report));

  if (q.get_den() == 1) {
    CheckRecord c{"integer_shift_identity", 1, 0, 0, ""};
    const auto x = alpha.prefix_at_most(q_plus.certified_count);
    const auto y = q_plus.digits.prefix_at_most(q_plus.certified_count);
    if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) c.violations = 1;
    c.detail = std::to_string(y.size()) + " digits compared";
    report.checks.push_back(c);
  }

  report.elapsed_ms = elapsed_ms(start);
  return report;
}

VerificationReport verify_dilution_counterexample(std::size_t digit_count, unsigned max_block_len,
                                                  const VerifyOptions& options) {
  const auto start = Clock::now();
  if (digit_count < (std::size_t{1} << 12)) {
    throw InvalidArgument("dilution scenario needs at least 4096 digits");
  }
  if (max_block_len == 0) throw InvalidArgument("max block length must be positive");
  const Alphabet binary(2);

  VerificationReport report;
  report.scenario = "dilution";
  report.inputs.k = 2;
  report.inputs.source = "binary Champernowne and its dilution";
  report.inputs.max_block_len = max_block_len;
  report.inputs.digit_count = digit_count;

  const auto s = gen_champernowne(binary, digit_count);
  const auto t = gen_dilution(s, digit_count);
  const DigitSequence zeros(binary, std::vector<Digit>(digit_count, 0));
  const std::size_t half = digit_count / 2;
  const auto even = select_progression(t, 0, 2, half);
  const auto odd = select_progression(t, 1, 2, half);

  const auto full = halving_schedule(digit_count / max_block_len);
  const auto halved = halving_schedule(half / max_block_len);
  report.inputs.n_schedule = full;

  report.streams.push_back(
      summarize("S", "binary Champernowne", s, max_block_len, full, options, report));
  report.streams.push_back(
      summarize("T", "dilution of S", t, max_block_len, full, options, report));
  report.streams.push_back(
      summarize("zeros", "0^inf", zeros, max_block_len, full, options, report));
  report.streams.push_back(summarize("T_even", "T at positions 0, 2, 4, ...", even,
                                     max_block_len, halved, options, report));
  report.streams.push_back(summarize("T_odd", "T at positions 1, 3, 5, ...", odd, max_block_len,
                                     halved, options, report));

  report.checks.push_back(range_check("zeros_dimension_zero", report.stream("zeros"), 0, 0));
  report.checks.push_back(range_check("dilution_in_range", report.stream("T"), 0.40L, 0.65L));
  report.checks.push_back(range_check("champernowne_high", report.stream("S"), 0.80L, 1));
  report.checks.push_back(range_check("even_selection_high", report.stream("T_even"), 0.80L, 1));
  report.checks.push_back(range_check("odd_selection_zero", report.stream("T_odd"), 0, 0));

  report.elapsed_ms = elapsed_ms(start);
  return report;
}

VerificationReport verify_pseudometric_suite(std::uint64_t sample_count, std::size_t n_max,
                                             std::uint64_t seed) {
  const auto start = Clock::now();
  const auto triples = draw_triples(sample_count, n_max, seed);
  std::mt19937_64 perm_rng(seed ^ 0x9e3779b97f4a7c15ULL);

  VerificationReport report;
  report.scenario = "pseudometric";
  report.inputs = suite_inputs(sample_count, n_max, seed);

  CheckRecord nonneg = named("nonnegativity");
  CheckRecord identity = named("identity");
  CheckRecord symmetry = named("symmetry");
  CheckRecord triangle = named("triangle");
  CheckRecord perm = named("permutation_zero");
  CheckRecord witness = named("witness_valid");
  CheckRecord reverse = named("reverse_valid");
  CheckRecord compose = named("compose_valid");

  for (std::uint64_t i = 0; i < triples.size(); ++i) {
    const auto& [pi, mu, nu] = triples[i];
    const auto d_pm = delta_exact(pi, mu);
    const auto d_mp = delta_exact(mu, pi);
    const auto d_mn = delta_exact(mu, nu);
    const auto d_pn = delta_exact(pi, nu);
    const auto d_pp = delta_exact(pi, pi);
    const auto exact = [](const DispersionResult& r) {
      return r.method == DeltaMethod::kExactSearch;
    };

    ++nonneg.checked;
    for (const auto* r : {&d_pm, &d_mp, &d_mn, &d_pn, &d_pp}) {
      if (r->m_star < 1 || r->delta_bits < 0) {
        note_violation(nonneg, i, "negative delta");
        break;
      }
    }

    ++identity.checked;
    if (d_pp.m_star != 1) note_violation(identity, i, "delta(pi, pi) != 0");

    ++symmetry.checked;
    if (!exact(d_pm) || !exact(d_mp)) {
      ++symmetry.inconclusive;
    } else if (d_pm.m_star != d_mp.m_star) {
      note_violation(symmetry, i,
                     "m(pi,mu) = " + std::to_string(d_pm.m_star) +
                         ", m(mu,pi) = " + std::to_string(d_mp.m_star));
    }

    // δ(π,ν) <= δ(π,μ) + δ(μ,ν) is m(π,ν) <= m(π,μ)·m(μ,ν).
    ++triangle.checked;
    if (!exact(d_pn)) {
      ++triangle.inconclusive;
    } else if (d_pn.m_star > d_pm.m_star * d_mn.m_star) {
      note_violation(triangle, i,
                     "m(pi,nu) = " + std::to_string(d_pn.m_star) + " > " +
                         std::to_string(d_pm.m_star) + " * " + std::to_string(d_mn.m_star));
    }

    ++perm.checked;
    const auto shuffled = permuted(pi, perm_rng);
    if (delta_exact(pi, shuffled).m_star != 1) {
      note_violation(perm, i, "delta(pi, sigma(pi)) != 0");
    }

    const auto check_cert = [&](CheckRecord& c, const SparseStochasticCertificate& a,
                                const ProbabilityVector& from, const ProbabilityVector& to) {
      ++c.checked;
      const auto v = validate_certificate(a, from, to);
      if (!v.ok) note_violation(c, i, to_string(v.violation) + ": " + v.detail);
    };
    check_cert(witness, d_pm.witness, pi, mu);
    check_cert(witness, d_mn.witness, mu, nu);
    check_cert(reverse, reverse_certificate(d_pm.witness, pi, mu), mu, pi);
    check_cert(compose, compose_certificates(d_mn.witness, d_pm.witness, pi, mu, nu), pi, nu);
  }

  report.checks = {nonneg, identity, symmetry, triangle, perm, witness, reverse, compose};
  report.elapsed_ms = elapsed_ms(start);
  return report;
}

VerificationReport verify_contractivity_suite(std::uint64_t sample_count, std::size_t n_max,
                                              std::uint64_t seed) {
  const auto start = Clock::now();
  const auto triples = draw_triples(sample_count, n_max, seed);

  VerificationReport report;
  report.scenario = "contractivity";
  report.inputs = suite_inputs(sample_count, n_max, seed);

  CheckRecord contract = named("entropy_contractive");
  CheckRecord majorize = named("b_majorizes_q");
  CheckRecord schur = named("entropy_r_le_q");
  CheckRecord logm = named("entropy_p_le_r_plus_log_m");
  CheckRecord upper = named("entropy_q_le_p_plus_delta");

  long double tightest = -std::numeric_limits<long double>::infinity();
  for (std::uint64_t i = 0; i < triples.size(); ++i) {
    const auto& pi = triples[i].pi;
    const auto& mu = triples[i].mu;
    const auto d = delta_exact(pi, mu);
    const long double h_pi = shannon_entropy(pi.to_dense());
    const long double h_mu = shannon_entropy(mu.to_dense());
    const long double gap = std::fabs(h_pi - h_mu);
    tightest = std::max(tightest, gap - d.delta_bits);

    ++contract.checked;
    if (gap > d.delta_bits + kEntropySlack) {
      note_violation(contract, i, "|dH| = " + fmt(gap) + " > delta = " + fmt(d.delta_bits));
    }

    // The chain runs in both directions of the witness pair.
    for (const auto& [p, q] : {std::pair{&pi, &mu}, std::pair{&mu, &pi}}) {
      const auto chain = check_schur_chain(*p, *q, d.m_star);
      ++majorize.checked;
      if (!chain.r_majorizes_q) note_violation(majorize, i, "B p does not majorize q");
      ++schur.checked;
      if (!chain.entropy_r_le_q) note_violation(schur, i, "H(r) > H(q)");
      ++logm.checked;
      if (!chain.entropy_p_le_r_plus_log_m) note_violation(logm, i, "H(p) > H(r) + log m");
      ++upper.checked;
      if (chain.h_q > chain.h_p + d.delta_bits + kEntropySlack) {
        note_violation(upper, i, "H(q) > H(p) + delta");
      }
    }
  }
  if (contract.violations == 0 && !triples.empty()) {
    contract.detail = "max(|dH| - delta) = " + fmt(tightest);
  }

  report.checks = {contract, majorize, schur, logm, upper};
  report.elapsed_ms = elapsed_ms(start);
  return report;
}

}  // namespace fsdim
