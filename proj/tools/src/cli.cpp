#include "fsdim/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>

#include <nlohmann/json.hpp>

#include "fsdim/blockstats.hpp"
#include "fsdim/digitseq.hpp"
#include "fsdim/dispersion.hpp"
#include "fsdim/error.hpp"
#include "fsdim/main_lemma.hpp"
#include "fsdim/realarith.hpp"
#include "fsdim/report_json.hpp"
#include "fsdim/verify.hpp"

namespace fsdim::cli {

namespace {

using nlohmann::json;

struct Globals {
  unsigned threads = 0;
  std::string format = "json";
  bool timing = false;
};

bool human(const Globals& g) { return g.format == "human"; }

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot open " + path + " for writing");
  f << doc.dump(2) << '\n';
  if (!f) throw Error("failed writing " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

Rational rational_from_flags(const std::string& num, const std::string& den) {
  return parse_rational(num + "/" + den);
}

BigInt integer_flag(const std::string& text) {
  const Rational q = parse_rational(text);
  if (q.get_den() != 1) throw InvalidArgument("expected an integer, got '" + text + "'");
  return q.get_num();
}

std::string fixed(long double x, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << static_cast<double>(x);
  return os.str();
}

DigitFileMode file_mode(bool binary) {
  return binary ? DigitFileMode::kBinary : DigitFileMode::kAscii;
}

void print_report(const VerificationReport& r, const json& doc, const std::string& report_path,
                  const Globals& g, std::ostream& out) {
  if (!report_path.empty()) write_json_file(report_path, doc);
  if (!human(g)) {
    if (report_path.empty()) {
      out << doc.dump(2) << '\n';
    } else {
      out << json{{"scenario", r.scenario},
                  {"passed", r.passed()},
                  {"partial", r.partial},
                  {"report", report_path}}
                 .dump()
          << '\n';
    }
    return;
  }
  out << "scenario: " << r.scenario << (r.passed() ? "  PASSED" : "  FAILED")
      << (r.partial ? " (partial)" : "") << '\n';
  for (const auto& s : r.streams) {
    out << "  stream " << s.name << " [" << s.digits << " digits]";
    if (s.estimates) {
      out << " dim_lower=" << fixed(s.estimates->lower) << " dim_upper="
          << fixed(s.estimates->upper);
    }
    out << '\n';
  }
  for (const auto& gap : r.gaps) {
    out << "  gap " << gap.a << " vs " << gap.b << ": lower " << fixed(gap.lower_gap)
        << ", upper " << fixed(gap.upper_gap) << '\n';
  }
  for (const auto& c : r.checks) {
    out << "  check " << c.name << ": " << (c.pass() ? "ok" : "VIOLATED") << " ("
        << c.violations << "/" << c.checked << ")";
    if (!c.detail.empty()) out << " " << c.detail;
    out << '\n';
  }
  for (const auto& n : r.notes) out << "  note: " << n << '\n';
  if (!report_path.empty()) out << "report written to " << report_path << '\n';
}

int report_status(const VerificationReport& r) {
  if (!r.passed()) return kExitValidation;
  if (r.unresolved) return kExitUnresolved;
  return kExitOk;
}

// ---- gen ----------------------------------------------------------------

struct GenArgs {
  unsigned base = 2;
  std::size_t count = 0;
  std::string num;
  std::string den = "1";
  std::string in;
  std::string out;
  std::string order;
  bool binary = false;
};

ChampernowneOrder order_flag(const std::string& order, unsigned k) {
  if (order.empty()) return default_champernowne_order(k);
  return order == "strings" ? ChampernowneOrder::kStrings : ChampernowneOrder::kNumerals;
}

int finish_gen(const DigitSequence& seq, const GenArgs& a, const Globals& g, std::ostream& out) {
  write_digit_file(seq, a.count, a.out, file_mode(a.binary));
  if (human(g)) {
    out << "wrote " << a.count << " base-" << seq.base() << " digits to " << a.out << '\n';
  } else {
    out << json{{"k", seq.base()}, {"count", a.count}, {"out", a.out}}.dump() << '\n';
  }
  return kExitOk;
}

void add_gen(CLI::App& app, std::function<int()>& action, const Globals& g, std::ostream& out) {
  auto* gen = app.add_subcommand("gen", "Generate a digit sequence file");
  gen->require_subcommand(1);
  auto a = std::make_shared<GenArgs>();

  auto common = [&, a](CLI::App* sub, bool with_base) {
    if (with_base) {
      sub->add_option("--base", a->base, "Base k")->check(CLI::Range(2u, 36u));
    }
    sub->add_option("--count", a->count, "Number of digits")->required();
    sub->add_option("--out", a->out, "Output digit file")->required();
    sub->add_flag("--binary", a->binary, "Write the binary FSD1 format");
  };

  auto* champ = gen->add_subcommand("champernowne", "Concatenated base-k numerals 1, 2, 3, ...");
  common(champ, true);
  champ->add_option("--order", a->order, "strings (0,1,00,01,...) or numerals (1,2,3,...)")
      ->check(CLI::IsMember({"strings", "numerals"}));
  champ->callback([&, a] {
    action = [&, a] {
      const Alphabet alphabet(a->base);
      return finish_gen(
          gen_champernowne(alphabet, a->count, order_flag(a->order, a->base)), *a, g, out);
    };
  });

  auto* rat = gen->add_subcommand("rational", "Expansion of A/B in [0, 1)");
  common(rat, true);
  rat->add_option("--num", a->num, "Numerator A")->required();
  rat->add_option("--den", a->den, "Denominator B")->required();
  rat->callback([&, a] {
    action = [&, a] {
      const Rational q = rational_from_flags(a->num, a->den);
      return finish_gen(gen_rational_expansion(q, Alphabet(a->base), a->count), *a, g, out);
    };
  });

  auto* dil = gen->add_subcommand("dilution", "Interleave a source with zeros");
  common(dil, true);
  dil->add_option("--in", a->in, "Source digit file (default: Champernowne in --base)");
  dil->callback([&, a] {
    action = [&, a] {
      const DigitSequence src =
          a->in.empty() ? champernowne(Alphabet(a->base)) : open_digit_file(a->in);
      return finish_gen(gen_dilution(src, a->count), *a, g, out);
    };
  });
}

// ---- dim ----------------------------------------------------------------

struct DimArgs {
  std::string in;
  unsigned max_block_len = 1;
  std::vector<std::uint64_t> blocks;
  double tail_fraction = 0.5;
  std::string report;
};

void add_dim(CLI::App& app, std::function<int()>& action, const Globals& g, std::ostream& out) {
  auto a = std::make_shared<DimArgs>();
  auto* dim = app.add_subcommand("dim", "Block-entropy grid and dimension estimates");
  dim->add_option("--in", a->in, "Digit file")->required()->check(CLI::ExistingFile);
  dim->add_option("--max-block-len", a->max_block_len, "Largest block length L")
      ->required()
      ->check(CLI::PositiveNumber);
  dim->add_option("--blocks", a->blocks, "Increasing block counts n1,n2,...")
      ->required()
      ->delimiter(',');
  dim->add_option("--tail-fraction", a->tail_fraction, "Tail window of the n schedule")
      ->check(CLI::Range(0.0, 1.0));
  dim->add_option("--report", a->report, "Write the JSON report here");
  dim->callback([&, a] {
    action = [&, a] {
      if (a->tail_fraction <= 0) throw InvalidArgument("tail fraction must be positive");
      const auto seq = open_digit_file(a->in);
      const auto grid = entropy_rate_grid(seq, a->max_block_len, a->blocks, g.threads);
      const auto est = dim_estimates(grid, a->tail_fraction);
      const json doc = grid_report_json(grid, est, a->tail_fraction);
      if (!a->report.empty()) write_json_file(a->report, doc);
      if (human(g)) {
        out << "k=" << grid.base << (grid.truncated ? " (grid truncated)" : "") << '\n';
        for (unsigned l = 1; l <= grid.max_block_len; ++l) {
          out << "  l=" << l << ':';
          for (std::size_t c = 0; c < grid.n_schedule.size(); ++c) {
            out << ' ' << fixed(grid.at(l, c).h, 4);
          }
          out << '\n';
        }
        out << "dim_lower=" << fixed(est.lower) << " dim_upper=" << fixed(est.upper) << '\n';
      } else {
        out << (a->report.empty() ? doc.dump(2) : json{{"k", grid.base},
                                                      {"dim_lower", doc["dim_lower"]},
                                                      {"dim_upper", doc["dim_upper"]},
                                                      {"report", a->report}}
                                                     .dump())
            << '\n';
      }
      return kExitOk;
    };
  });
}

// ---- arith --------------------------------------------------------------

struct ArithArgs {
  std::string in;
  std::string m;
  std::string num;
  std::string den = "1";
  std::size_t count = 0;
  std::size_t lookahead = kDefaultLookaheadCap;
  std::string out;
  bool binary = false;
};

void add_arith(CLI::App& app, std::function<int()>& action, const Globals& g,
               std::ostream& out) {
  auto* arith = app.add_subcommand("arith", "Certified digits of frac(m·α), α/b, q+α, q·α");
  arith->require_subcommand(1);
  auto a = std::make_shared<ArithArgs>();

  auto run = [&, a](const std::string& op) {
    const auto alpha = open_digit_file(a->in);
    if (a->lookahead == 0) throw InvalidArgument("lookahead must be positive");
    CertifiedDigitResult r = [&] {
      if (op == "mul-int") return mul_int_mod1(alpha, integer_flag(a->m), a->count, a->lookahead);
      if (op == "div-int") return div_int(alpha, integer_flag(a->m), a->count, a->lookahead);
      const Rational q = rational_from_flags(a->num, a->den);
      if (op == "add-q") return add_rational_mod1(alpha, q, a->count, a->lookahead);
      return mul_rational_mod1(alpha, q, a->count, a->lookahead);
    }();
    write_digit_file(r.digits, r.certified_count, a->out, file_mode(a->binary));
    json doc{{"op", op},
             {"k", alpha.base()},
             {"requested", a->count},
             {"certified_count", r.certified_count},
             {"lookahead_used", r.lookahead_used},
             {"out", a->out}};
    if (r.unresolved) doc["unresolved_at"] = *r.unresolved_at;
    if (human(g)) {
      out << "certified " << r.certified_count << " of " << a->count << " digits -> " << a->out
          << '\n';
      if (r.unresolved) out << "unresolved at digit " << *r.unresolved_at << '\n';
    } else {
      out << doc.dump() << '\n';
    }
    return r.unresolved ? kExitUnresolved : kExitOk;
  };

  auto common = [&, a](CLI::App* sub) {
    sub->add_option("--in", a->in, "Digit file holding α")->required()->check(CLI::ExistingFile);
    sub->add_option("--count", a->count, "Digits to certify")->required();
    sub->add_option("--lookahead", a->lookahead, "Lookahead cap in digits");
    sub->add_option("--out", a->out, "Output digit file")->required();
    sub->add_flag("--binary", a->binary, "Write the binary FSD1 format");
  };
  for (const char* op : {"mul-int", "div-int"}) {
    auto* sub = arith->add_subcommand(op, std::string(op) == "mul-int" ? "frac(m·α)" : "α / m");
    common(sub);
    sub->add_option("--m", a->m, "Positive integer")->required();
    const std::string name = op;
    sub->callback([&, run, name] { action = [run, name] { return run(name); }; });
  }
  for (const char* op : {"add-q", "mul-q"}) {
    auto* sub = arith->add_subcommand(op, std::string(op) == "add-q" ? "frac(q+α)" : "frac(q·α)");
    common(sub);
    sub->add_option("--num", a->num, "Numerator of q")->required();
    sub->add_option("--den", a->den, "Denominator of q");
    const std::string name = op;
    sub->callback([&, run, name] { action = [run, name] { return run(name); }; });
  }
}

// ---- delta --------------------------------------------------------------

struct DeltaArgs {
  std::string pi;
  std::string mu;
  std::size_t n_cap = DeltaOptions{}.n_cap;
  std::int64_t budget_ms = DeltaOptions{}.budget.count();
  std::string witness;
  std::string alpha;
  std::uint64_t m = 1;
  unsigned l = 1;
  std::uint64_t n = 1;
  std::size_t lookahead = kDefaultLookaheadCap;
  std::string out;
};

void add_delta(CLI::App& app, std::function<int()>& action, const Globals& g,
               std::ostream& out) {
  auto* delta = app.add_subcommand("delta", "Logarithmic dispersion and certificates");
  delta->require_subcommand(1);
  auto a = std::make_shared<DeltaArgs>();

  auto* ex = delta->add_subcommand("exact", "Least m with an m-sparse stochastic map pi -> mu");
  ex->add_option("--pi", a->pi, "Distribution JSON")->required()->check(CLI::ExistingFile);
  ex->add_option("--mu", a->mu, "Distribution JSON")->required()->check(CLI::ExistingFile);
  ex->add_option("--n-cap", a->n_cap, "Largest dimension accepted")->check(CLI::PositiveNumber);
  ex->add_option("--budget-ms", a->budget_ms, "Search time budget")->check(CLI::PositiveNumber);
  ex->add_option("--witness", a->witness, "Write the witness certificate JSON here");
  ex->callback([&, a] {
    action = [&, a] {
      const auto pi = distribution_from_json(read_json_file(a->pi));
      const auto mu = distribution_from_json(read_json_file(a->mu));
      DeltaOptions opts;
      opts.n_cap = a->n_cap;
      opts.budget = std::chrono::milliseconds(a->budget_ms);
      const auto r = delta_exact(pi, mu, opts);
      if (!a->witness.empty()) write_json_file(a->witness, certificate_to_json(r.witness));
      if (human(g)) {
        out << "m* = " << r.m_star << ", delta = " << fixed(r.delta_bits) << " bits ("
            << to_string(r.method) << ")\n";
      } else {
        out << dispersion_to_json(r, false).dump() << '\n';
      }
      return r.method == DeltaMethod::kExactSearch ? kExitOk : kExitBudget;
    };
  });

  auto* cert = delta->add_subcommand("certificate", "Main-lemma certificate for α -> frac(m·α)");
  cert->add_option("--alpha", a->alpha, "Digit file holding α")
      ->required()
      ->check(CLI::ExistingFile);
  cert->add_option("--m", a->m, "Positive integer multiplier")
      ->required()
      ->check(CLI::PositiveNumber);
  cert->add_option("--l", a->l, "Block length")->required()->check(CLI::PositiveNumber);
  cert->add_option("--n", a->n, "Number of blocks")->required()->check(CLI::PositiveNumber);
  cert->add_option("--lookahead", a->lookahead, "Lookahead cap in digits");
  cert->add_option("--out", a->out, "Write the certificate JSON here");
  cert->callback([&, a] {
    action = [&, a] {
      const auto alpha = open_digit_file(a->alpha);
      const auto c = build_main_lemma_matrix(alpha, a->m, a->l, a->n, a->lookahead);
      const auto check = validate_certificate(c.matrix,
                                              ProbabilityVector::from_distribution(c.pi_alpha),
                                              ProbabilityVector::from_distribution(c.pi_m_alpha));
      const bool ok = check.ok && c.max_col_support <= c.column_bound;
      if (!a->out.empty()) write_json_file(a->out, certificate_to_json(c.matrix));
      const json doc = main_lemma_to_json(c, check, false);
      if (human(g)) {
        out << "m=" << c.multiplier.m << " l=" << c.l << " n=" << c.n << ": "
            << (ok ? "valid" : "INVALID") << ", bound " << fixed(c.bound_bits) << " bits, |dH| = "
            << fixed(std::fabs(doc["h_alpha"].get<double>() - doc["h_m_alpha"].get<double>()))
            << '\n';
      } else {
        out << doc.dump() << '\n';
      }
      return ok ? kExitOk : kExitValidation;
    };
  });
}

// ---- verify -------------------------------------------------------------

struct VerifyArgs {
  std::string in;
  unsigned base = 10;
  std::string num;
  std::string den = "1";
  unsigned max_block_len = 6;
  std::vector<std::uint64_t> blocks;
  std::size_t lookahead = kDefaultLookaheadCap;
  double tail_fraction = 0.5;
  std::size_t count = 200000;
  std::uint64_t seed = 1;
  std::uint64_t samples = 200;
  std::size_t n_max = 4;
  std::string report;
};

void add_verify(CLI::App& app, std::function<int()>& action, const Globals& g,
                std::ostream& out) {
  auto* verify = app.add_subcommand("verify", "End-to-end verification scenarios");
  verify->require_subcommand(1);
  auto a = std::make_shared<VerifyArgs>();

  auto emit = [&](const VerificationReport& r, const std::string& path) {
    print_report(r, to_json(r, g.timing), path, g, out);
    return report_status(r);
  };

  auto* wall = verify->add_subcommand("wall", "Dimension preservation under α -> qα, q+α");
  wall->add_option("--in", a->in, "Digit file holding α (default: Champernowne in --base)")
      ->check(CLI::ExistingFile);
  wall->add_option("--base", a->base, "Base k")->check(CLI::Range(2u, 36u));
  wall->add_option("--num", a->num, "Numerator of q")->required();
  wall->add_option("--den", a->den, "Denominator of q");
  wall->add_option("--max-block-len", a->max_block_len, "Largest block length L")
      ->check(CLI::PositiveNumber);
  wall->add_option("--blocks", a->blocks, "Increasing block counts n1,n2,...")
      ->required()
      ->delimiter(',');
  wall->add_option("--lookahead", a->lookahead, "Lookahead cap in digits");
  wall->add_option("--tail-fraction", a->tail_fraction, "Tail window of the n schedule")
      ->check(CLI::Range(0.0, 1.0));
  wall->add_option("--report", a->report, "Write the JSON report here");
  auto* base_opt = wall->get_option("--base");
  wall->callback([&, a, emit, base_opt] {
    action = [&, a, emit, base_opt] {
      DigitSequence alpha = a->in.empty() ? champernowne(Alphabet(a->base))
                                          : open_digit_file(a->in);
      if (!a->in.empty() && base_opt->count() > 0 && alpha.base() != a->base) {
        throw InvalidArgument("--base " + std::to_string(a->base) + " does not match file base " +
                              std::to_string(alpha.base()));
      }
      VerifyOptions opts;
      opts.threads = g.threads;
      opts.lookahead_cap = a->lookahead;
      opts.tail_fraction = a->tail_fraction;
      const auto r = verify_wall_extension(alpha, rational_from_flags(a->num, a->den),
                                           a->max_block_len, a->blocks, opts);
      return emit(r, a->report);
    };
  });

  auto* dil = verify->add_subcommand("dilution", "Dilution counterexample on binary Champernowne");
  dil->add_option("--count", a->count, "Digits per stream")->check(CLI::Range(4096, 1 << 26));
  dil->add_option("--max-block-len", a->max_block_len, "Largest block length L")
      ->check(CLI::PositiveNumber);
  dil->add_option("--report", a->report, "Write the JSON report here");
  auto* dil_len = dil->get_option("--max-block-len");
  dil->callback([&, a, emit, dil_len] {
    action = [&, a, emit, dil_len] {
      VerifyOptions opts;
      opts.threads = g.threads;
      const unsigned len = dil_len->count() > 0 ? a->max_block_len : 8;
      return emit(verify_dilution_counterexample(a->count, len, opts), a->report);
    };
  });

  for (const char* name : {"pseudometric", "contractivity"}) {
    auto* sub = verify->add_subcommand(name, std::string(name) == "pseudometric"
                                                 ? "Pseudometric axioms of delta"
                                                 : "Entropy contractivity under delta");
    sub->add_option("--seed", a->seed, "Random seed");
    sub->add_option("--samples", a->samples, "Number of random samples")
        ->check(CLI::PositiveNumber);
    sub->add_option("--n-max", a->n_max, "Largest dimension")->check(CLI::Range(2, 6));
    sub->add_option("--report", a->report, "Write the JSON report here");
    const bool pseudo = std::string(name) == "pseudometric";
    sub->callback([&, a, emit, pseudo] {
      action = [a, emit, pseudo] {
        return emit(pseudo ? verify_pseudometric_suite(a->samples, a->n_max, a->seed)
                           : verify_contractivity_suite(a->samples, a->n_max, a->seed),
                    a->report);
      };
    });
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-state dimension toolkit: digit streams, block entropy, certified "
               "arithmetic and logarithmic dispersion."};
  app.name("fsdim");
  app.set_version_flag("--version", std::string("fsdim ") + FSDIM_VERSION);
  app.require_subcommand(1);

  Globals g;
  app.add_option("--threads", g.threads, "Worker thread cap (0 = all cores)")
      ->envname("FSDIM_THREADS")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--format", g.format, "Console output format")
      ->check(CLI::IsMember({"json", "human"}));
  app.add_flag("--timing", g.timing, "Include wall-clock timing in reports");

  std::function<int()> action;
  add_gen(app, action, g, out);
  add_dim(app, action, g, out);
  add_arith(app, action, g, out);
  add_delta(app, action, g, out);
  add_verify(app, action, g, out);

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("fsdim");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    return action ? action() : kExitValidation;
  } catch (const UnresolvedCarry& e) {
    out << json{{"unresolved_at", e.position()}}.dump() << '\n';
    err << "fsdim: " << e.what() << '\n';
    return kExitUnresolved;
  } catch (const Error& e) {
    err << "fsdim: " << e.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& e) {
    err << "fsdim: malformed JSON input: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace fsdim::cli
