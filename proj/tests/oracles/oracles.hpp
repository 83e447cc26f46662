#pragma once

// Reference computations that share no code with the library: string
// slicing for block counts, schoolbook long division for expansions, and
// Gale's supply-demand condition for dispersion.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace fsdim::oracle {

using Digits = std::vector<std::uint8_t>;

// Digits of frac(x) in base k by long division.
inline Digits long_division(mpq_class x, unsigned k, std::size_t count) {
  x.canonicalize();
  mpz_class num = x.get_num();
  const mpz_class den = x.get_den();
  num %= den;
  if (num < 0) num += den;
  Digits out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    num *= k;
    const mpz_class d = num / den;
    out.push_back(static_cast<std::uint8_t>(d.get_ui()));
    num -= d * den;
  }
  return out;
}

// The value 0.d0 d1 ... d_{n-1} in base k.
inline mpq_class prefix_value(const Digits& digits, unsigned k) {
  mpz_class p = 0;
  for (auto d : digits) p = p * k + d;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), k, digits.size());
  mpq_class v(p, scale);
  v.canonicalize();
  return v;
}

// True iff x·k^e is an integer for some e, i.e. the denominator only has
// prime factors of k.
inline bool k_adic(mpq_class x, unsigned k) {
  x.canonicalize();
  mpz_class d = x.get_den();
  const mpz_class kk = k;
  while (d != 1) {
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), kk.get_mpz_t());
    if (g == 1) return false;
    d /= g;
  }
  return true;
}

inline std::string to_text(const Digits& digits, std::size_t from, std::size_t len) {
  std::string s;
  for (std::size_t i = from; i < from + len; ++i) {
    const auto d = digits[i];
    s.push_back(d < 10 ? static_cast<char>('0' + d) : static_cast<char>('a' + d - 10));
  }
  return s;
}

// Aligned block counts keyed by the block's digit string.
inline std::map<std::string, std::uint64_t> aligned_counts(const Digits& digits, unsigned l,
                                                           std::uint64_t n) {
  std::map<std::string, std::uint64_t> counts;
  for (std::uint64_t j = 0; j < n; ++j) ++counts[to_text(digits, j * l, l)];
  return counts;
}

// Occurrences of w starting at positions 0..n-1.
inline std::uint64_t sliding_count(const Digits& digits, const Digits& w, std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t p = 0; p < n; ++p) {
    if (std::equal(w.begin(), w.end(), digits.begin() + static_cast<std::ptrdiff_t>(p))) ++c;
  }
  return c;
}

// Entropy in bits by the textbook formula.
inline double entropy(const std::map<std::string, std::uint64_t>& counts, std::uint64_t n) {
  double h = 0;
  for (const auto& [w, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

// Champernowne digits built from strings: every word of length 1, 2, ...
// in lexicographic order, or the numerals 1, 2, 3, ...
inline Digits champernowne_strings(unsigned k, std::size_t count) {
  Digits out;
  for (std::size_t len = 1; out.size() < count; ++len) {
    Digits w(len, 0);
    while (out.size() < count) {
      out.insert(out.end(), w.begin(), w.end());
      std::size_t i = len;
      while (i > 0 && ++w[i - 1] == k) w[--i] = 0;
      if (i == 0) break;
    }
  }
  out.resize(count);
  return out;
}

inline Digits champernowne_numerals(unsigned k, std::size_t count) {
  Digits out;
  for (mpz_class v = 1; out.size() < count; ++v) {
    const std::string s = v.get_str(static_cast<int>(k));
    for (char ch : s) {
      out.push_back(static_cast<std::uint8_t>(ch <= '9' ? ch - '0' : ch - 'a' + 10));
    }
  }
  out.resize(count);
  return out;
}

// Least m such that an n×n column-stochastic A with at most m nonzeros per
// row and column maps pi to mu. Support patterns are enumerated directly and
// a pattern admits a plan on its positive-mass columns iff every set S of
// those columns satisfies pi(S) <= mu(N(S)) and every row with mu > 0 is
// reached (Gale). Zero-mass columns only need a nonzero cell. Meant for
// n <= 3.
inline std::uint64_t brute_force_m(const std::vector<mpq_class>& pi,
                                   const std::vector<mpq_class>& mu) {
  const std::size_t n = pi.size();
  const std::size_t cells = n * n;
  for (std::uint64_t m = 1; m <= n; ++m) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask) {
      auto on = [&](std::size_t i, std::size_t j) { return (mask >> (i * n + j)) & 1U; };
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i) {
        std::uint64_t row = 0, col = 0;
        for (std::size_t j = 0; j < n; ++j) {
          row += on(i, j);
          col += on(j, i);
        }
        if (row > m || col > m || col == 0) ok = false;
      }
      if (!ok) continue;
      for (std::uint64_t s = 1; s < (std::uint64_t{1} << n) && ok; ++s) {
        mpq_class supply = 0, reach = 0;
        std::vector<bool> hit(n, false);
        for (std::size_t j = 0; j < n; ++j) {
          if (!((s >> j) & 1U) || pi[j] == 0) continue;
          supply += pi[j];
          for (std::size_t i = 0; i < n; ++i) {
            if (on(i, j)) hit[i] = true;
          }
        }
        for (std::size_t i = 0; i < n; ++i) {
          if (hit[i]) reach += mu[i];
        }
        if (supply > reach) ok = false;
      }
      // Rows with mass must be fed by a positive-mass column.
      for (std::size_t i = 0; i < n && ok; ++i) {
        if (mu[i] == 0) continue;
        bool fed = false;
        for (std::size_t j = 0; j < n; ++j) fed = fed || (on(i, j) && pi[j] > 0);
        if (!fed) ok = false;
      }
      if (ok) return m;
    }
  }
  return n;
}

}  // namespace fsdim::oracle
