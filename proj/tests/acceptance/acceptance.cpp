// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fsdim/blockstats.hpp"
#include "fsdim/digitseq.hpp"
#include "fsdim/dispersion.hpp"
#include "fsdim/error.hpp"
#include "fsdim/main_lemma.hpp"
#include "fsdim/realarith.hpp"
#include "fsdim/verify.hpp"
#include "oracles.hpp"

namespace {

using namespace fsdim;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(long double x) {
  std::ostringstream os;
  os.precision(4);
  os << std::fixed << static_cast<double>(x);
  return os.str();
}

const CheckRecord& require_check(const VerificationReport& r, const std::string& name) {
  const auto* c = r.check(name);
  if (!c) throw Error("report lacks check " + name);
  return *c;
}

std::string tally(const VerificationReport& r) {
  std::uint64_t checked = 0, violations = 0;
  for (const auto& c : r.checks) {
    checked += c.checked;
    violations += c.violations;
  }
  return std::to_string(violations) + " violations in " + std::to_string(checked) + " checks";
}

// 1. δ is a pseudometric on random rational triples.
Outcome pseudometric() {
  const auto r = verify_pseudometric_suite(200, 4, 20240601);
  bool pass = r.passed();
  for (const auto& c : r.checks) pass = pass && c.inconclusive == 0;
  return {pass, tally(r)};
}

// 2. Entropy is δ-contractive, with the majorization chain behind it.
Outcome contractivity() {
  const auto r = verify_contractivity_suite(200, 4, 20240601);
  return {r.passed(), tally(r) + "; " + require_check(r, "entropy_contractive").detail};
}

// 3. Main-lemma certificates across bases, multipliers and block lengths.
Outcome main_lemma() {
  constexpr std::size_t kPrefix = 100000;
  std::uint64_t cells = 0, failures = 0;
  long double worst_slack = -1e9L;
  std::string first_failure;
  auto fail = [&](const std::string& what) {
    if (failures++ == 0) first_failure = what;
  };

  for (unsigned k : {2u, 10u}) {
    const auto alpha = gen_champernowne(Alphabet(k), kPrefix);
    for (std::uint64_t m : {2u, 3u, 5u, 7u, 12u}) {
      const auto md = multiplier_digits(m, k);
      const auto product = mul_int_mod1(alpha, BigInt(static_cast<unsigned long>(m)), kPrefix);
      for (unsigned l = 1; l <= 6; ++l) {
        ++cells;
        const std::string where =
            "k=" + std::to_string(k) + " m=" + std::to_string(m) + " l=" + std::to_string(l);
        // Keep at least 64 lookahead digits past the advice for the carries.
        const std::uint64_t guard = (md.r + 64 + l - 1) / l;
        const std::uint64_t n = kPrefix / l - guard;
        try {
          const auto c = build_main_lemma_matrix(alpha, m, l, n);
          const auto pi = ProbabilityVector::from_distribution(c.pi_alpha);
          const auto mu = ProbabilityVector::from_distribution(c.pi_m_alpha);
          const auto check = validate_certificate(c.matrix, pi, mu);
          const std::uint64_t g = std::gcd(m, block_space_size(k, l));
          const long double bound = std::log2l(static_cast<long double>(g * (md.s + 1) * m));
          const long double dh =
              std::fabs(shannon_entropy(c.pi_alpha) - shannon_entropy(c.pi_m_alpha));
          worst_slack = std::max(worst_slack, dh - bound);

          if (!check.ok) fail(where + ": " + to_string(check.violation) + " " + check.detail);
          else if (check.max_col_support > (md.s + 1) * m) fail(where + ": column support");
          else if (check.max_row_support > g * (md.s + 1) * m) fail(where + ": row support");
          else if (dh > bound + kEntropySlack) fail(where + ": entropy gap " + num(dh));
          else if (c.row_bound != g * (md.s + 1) * m) fail(where + ": declared bound");
          else if (product.certified_count < n * l ||
                   !(c.pi_m_alpha == block_frequencies(product.digits, l, n))) {
            fail(where + ": output blocks disagree with the certified product stream");
          }
        } catch (const Error& e) {
          fail(where + ": " + e.what());
        }
      }
    }
  }
  return {failures == 0, std::to_string(failures) + " failures in " + std::to_string(cells) +
                             " cells; max(|dH| - bound) = " + num(worst_slack) +
                             (first_failure.empty() ? "" : "; first: " + first_failure)};
}

// 4. Certified digits agree with exact rational arithmetic.
Outcome arithmetic() {
  constexpr unsigned k = 10;
  constexpr std::size_t kDigits = 256;
  const Alphabet alphabet(k);
  std::mt19937_64 rng(777);
  const std::vector<Rational> qs = {make_rational(1, 3), make_rational(-1, 3), make_rational(2),
                                    make_rational(-2),   make_rational(5, 4),  make_rational(7),
                                    make_rational(1, 7)};
  std::uint64_t compared = 0, mismatches = 0, short_exact = 0, bad_unresolved = 0, ops = 0;
  std::string first;

  auto compare = [&](const CertifiedDigitResult& r, const Rational& exact, bool exact_path,
                     const std::string& what) {
    ++ops;
    const auto want = oracle::long_division(exact, k, kDigits);
    const auto got = r.digits.prefix_at_most(r.certified_count);
    for (std::size_t i = 0; i < got.size(); ++i) {
      ++compared;
      if (got[i] != want[i]) {
        if (mismatches++ == 0) first = what + " digit " + std::to_string(i);
        break;
      }
    }
    if (exact_path && r.certified_count != kDigits) {
      if (short_exact++ == 0 && first.empty()) first = what + " exact path short";
    }
    // Streams can only stall where the true result has two expansions.
    if (!exact_path && r.certified_count < kDigits && !oracle::k_adic(exact, k)) {
      if (bad_unresolved++ == 0 && first.empty()) first = what + " unresolved off a k-adic point";
    }
  };

  for (int i = 0; i < 100; ++i) {
    const std::uint64_t den = uniform_draw(rng, 1, 10000);
    const std::uint64_t nu = uniform_draw(rng, 0, den - 1);
    const Rational alpha = make_rational(static_cast<std::int64_t>(nu),
                                         static_cast<std::int64_t>(den));
    const DigitSequence exact_seq = rational_expansion(alpha, alphabet);
    DigitSequence stream = rational_expansion(alpha, alphabet);
    stream.set_exact_value(std::nullopt);

    for (const Rational& q : qs) {
      const std::string tag = to_string(alpha) + " q=" + to_string(q);
      const BigInt b = q.get_den() > 1 ? BigInt(q.get_den()) : BigInt(abs(q.get_num()));
      for (bool exact_path : {true, false}) {
        const DigitSequence& a = exact_path ? exact_seq : stream;
        compare(add_rational_mod1(a, q, kDigits), alpha + q, exact_path, tag + " q+a");
        compare(mul_rational_mod1(a, q, kDigits), q * alpha, exact_path, tag + " q*a");
        compare(div_int(a, b, kDigits), alpha / Rational(b), exact_path, tag + " a/b");
      }
    }
  }
  const bool pass = mismatches == 0 && short_exact == 0 && bad_unresolved == 0;
  return {pass, std::to_string(mismatches) + " mismatches over " + std::to_string(compared) +
                    " certified digits in " + std::to_string(ops) + " results" +
                    (first.empty() ? "" : "; first: " + first)};
}

// 5. Estimates at the ends of the dimension scale.
Outcome endpoints() {
  const Alphabet binary(2);
  const auto zeros = periodic(binary, {0});
  const auto alternating = periodic(binary, {0, 1});
  const auto zg = entropy_rate_grid(zeros, 4, {250, 500, 1000});
  const auto ag = entropy_rate_grid(alternating, 2, {250, 500, 1000});
  const auto ze = dim_estimates(zg);
  const auto ae = dim_estimates(ag);

  constexpr std::size_t kN = 200000;
  constexpr unsigned kL = 8;
  const auto champ = gen_champernowne(binary, kN);
  const auto cg = entropy_rate_grid(champ, kL, halving_schedule(kN / kL));
  const auto ce = dim_estimates(cg);

  const bool pass = ze.lower == 0 && ze.upper == 0 && ae.lower == 0 && ae.upper == 0 &&
                    ce.lower >= 0.80L && ce.upper >= 0.80L;
  return {pass, "0^inf (" + num(ze.lower) + ", " + num(ze.upper) + "), (01)^inf (" +
                    num(ae.lower) + ", " + num(ae.upper) + "), Champernowne (" + num(ce.lower) +
                    ", " + num(ce.upper) + ")"};
}

// 6. Dilution halves the dimension; its selections do not preserve it.
Outcome dilution_selections() {
  const auto r = verify_dilution_counterexample(200000, 8);
  auto est = [&](const char* name) {
    const auto* s = r.stream(name);
    return s && s->estimates ? "(" + num(s->estimates->lower) + ", " + num(s->estimates->upper) + ")"
                             : std::string("(none)");
  };
  const bool pass = require_check(r, "dilution_in_range").pass() &&
                    require_check(r, "even_selection_high").pass() &&
                    require_check(r, "odd_selection_zero").pass();
  return {pass, "T " + est("T") + ", even " + est("T_even") + ", odd " + est("T_odd")};
}

// 7. Wall extension: qα keeps the estimates of α for q = 3 and 1/3.
Outcome wall_extension() {
  const auto alpha = champernowne(Alphabet(10));
  const auto schedule = halving_schedule(10000);
  bool pass = true;
  std::string detail;
  for (const Rational& q : {make_rational(3), make_rational(1, 3)}) {
    const auto r = verify_wall_extension(alpha, q, 6, schedule);
    const EstimateGap* gap = nullptr;
    for (const auto& g : r.gaps) {
      if (g.b == "q_alpha") gap = &g;
    }
    const bool ok = gap && gap->lower_gap <= 0.1L && gap->upper_gap <= 0.1L && r.passed() &&
                    !r.records.empty() && !r.partial;
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += "q=" + to_string(q) + ": ";
    detail += gap ? "gaps " + num(gap->lower_gap) + "/" + num(gap->upper_gap) : "no gap";
    detail += ", " + std::to_string(r.records.size()) + " certificate records" +
              (r.passed() ? "" : " (failing)") + (r.partial ? " (partial)" : "");
  }
  return {pass, detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "pseudometric suite", 60, pseudometric},
      {2, "contractivity suite", 60, contractivity},
      {3, "main-lemma certificates", 300, main_lemma},
      {4, "arithmetic oracle equivalence", 30, arithmetic},
      {5, "dimension endpoints", 60, endpoints},
      {6, "dilution counterexample", 60, dilution_selections},
      {7, "wall-extension report", 180, wall_extension},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += "; over the " + std::to_string(static_cast<int>(c.budget_s)) + " s budget";
    }
    if (!o.pass) ++failed;
    std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
