#include "fsdim/rational.hpp"

#include <limits>

#include "fsdim/error.hpp"

namespace fsdim {

namespace {

bool valid_integer(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

BigInt parse_integer(std::string_view s) {
  if (!valid_integer(s)) {
    throw InvalidArgument("malformed integer '" + std::string(s) + "'");
  }
  if (s[0] == '+') s.remove_prefix(1);
  return BigInt(std::string(s), 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    return Rational(parse_integer(text));
  }
  BigInt num = parse_integer(text.substr(0, slash));
  BigInt den = parse_integer(text.substr(slash + 1));
  if (den == 0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
  return make_rational(num, den);
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const BigInt& z) { return z.get_str(); }

Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw InvalidArgument("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational make_rational(std::int64_t num, std::int64_t den) {
  return make_rational(BigInt(static_cast<long>(num)), BigInt(static_cast<long>(den)));
}

BigInt floor(const Rational& q) {
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

Rational frac(const Rational& q) { return q - Rational(floor(q)); }

bool is_k_adic(const Rational& q, unsigned k) {
  BigInt d = q.get_den();
  BigInt g;
  const BigInt kk(k);
  while (d != 1) {
    mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), kk.get_mpz_t());
    if (g == 1) return false;
    while (mpz_divisible_p(d.get_mpz_t(), g.get_mpz_t())) d /= g;
  }
  return true;
}

BigInt pow(unsigned base, std::size_t exponent) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, exponent);
  return out;
}

std::uint64_t to_u64(const BigInt& z) {
  if (z < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 64) {
    throw InvalidArgument("integer " + z.get_str() + " does not fit in 64 bits");
  }
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, z.get_mpz_t());
  return out;
}

}  // namespace fsdim
