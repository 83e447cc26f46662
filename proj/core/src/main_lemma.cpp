#include "fsdim/main_lemma.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "fsdim/error.hpp"

namespace fsdim {

std::uint64_t gcd_with_power(std::uint64_t m, unsigned k, unsigned l) {
  // gcd(m, k^l) without forming k^l: peel common factors one power at a time.
  std::uint64_t g = 1;
  std::uint64_t rest = m;
  for (unsigned i = 0; i < l; ++i) {
    const std::uint64_t d = std::gcd(rest, static_cast<std::uint64_t>(k));
    if (d == 1) break;
    g *= d;
    rest /= d;
  }
  return g;
}

MainLemmaCertificate build_main_lemma_matrix(const CarryAdviceTrace& trace, std::uint64_t n) {
  if (n == 0) throw InvalidArgument("main-lemma certificate needs n >= 1");
  if (n > trace.entries.size()) {
    throw InvalidArgument("trace has " + std::to_string(trace.entries.size()) +
                          " blocks, requested " + std::to_string(n));
  }
  const auto& md = trace.multiplier;
  const Alphabet alphabet(md.k);
  const unsigned l = trace.l;

  std::map<BlockCode, std::uint64_t> in_counts;
  std::map<BlockCode, std::uint64_t> out_counts;
  std::map<std::pair<BlockCode, BlockCode>, std::uint64_t> pair_counts;  // (x, y)
  for (std::uint64_t j = 0; j < n; ++j) {
    const auto& e = trace.entries[j];
    ++in_counts[e.u];
    ++out_counts[e.v];
    ++pair_counts[{e.u, e.v}];
  }

  MainLemmaCertificate out{
      SparseStochasticCertificate{},
      BlockDistribution(alphabet, l, n, in_counts),
      BlockDistribution(alphabet, l, n, out_counts),
      md,
      l,
      n,
  };
  out.g = gcd_with_power(md.m, md.k, l);
  out.column_bound = (md.s + 1) * md.m;
  out.row_bound = out.g * out.column_bound;
  out.bound_bits = std::log2l(static_cast<long double>(out.row_bound));

  auto& a = out.matrix;
  a.n = static_cast<std::size_t>(block_space_size(md.k, l));
  a.declared_m = out.row_bound;
  a.identity_on_empty_columns = true;
  a.entries.reserve(pair_counts.size());
  for (const auto& [xy, c] : pair_counts) {
    // a_{y,x} = #{j : u_j = x, v_j = y} / (n·π_α(x)) = c / count(x).
    a.entries.push_back({static_cast<std::size_t>(xy.second), static_cast<std::size_t>(xy.first),
                         make_rational(BigInt(static_cast<unsigned long>(c)),
                                       BigInt(static_cast<unsigned long>(in_counts[xy.first])))});
  }

  std::map<std::size_t, std::size_t> rows, cols;
  for (const auto& e : a.entries) {
    ++rows[e.row];
    ++cols[e.col];
  }
  for (const auto& [r, c] : rows) {
    // Implicit identity entry when column r is unobserved.
    const std::size_t extra = cols.count(r) ? 0 : 1;
    out.max_row_support = std::max(out.max_row_support, c + extra);
  }
  for (const auto& [col, c] : cols) out.max_col_support = std::max(out.max_col_support, c);
  if (cols.size() < a.n) {
    out.max_row_support = std::max<std::size_t>(out.max_row_support, 1);
    out.max_col_support = std::max<std::size_t>(out.max_col_support, 1);
  }
  return out;
}

MainLemmaCertificate build_main_lemma_matrix(const DigitSequence& alpha, std::uint64_t m,
                                             unsigned l, std::uint64_t n,
                                             std::size_t lookahead_cap) {
  return build_main_lemma_matrix(carry_advice_trace(alpha, m, l, n, lookahead_cap), n);
}

}  // namespace fsdim
