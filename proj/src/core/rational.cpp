#include "logconc/rational.hpp"

#include <cctype>

#include "logconc/error.hpp"

namespace logconc {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::resource: return "resource";
    case ErrorKind::precision: return "precision";
    case ErrorKind::format: return "format";
    case ErrorKind::domain: return "domain";
    case ErrorKind::identity: return "identity";
    case ErrorKind::io: return "io";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  std::string_view num = text, den = "1";
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  if (!all_digits(num) || !all_digits(den))
    fail(ErrorKind::format, "not an exact rational: '" + std::string(text) + "'");
  Integer n_int(std::string{num}), d_int(std::string{den});
  if (d_int == 0) fail(ErrorKind::format, "zero denominator in '" + std::string(text) + "'");
  Rational q(n_int, d_int);
  q.canonicalize();
  if (negative) q = -q;
  return q;
}

std::string to_fraction_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Integer binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

Integer common_denominator(std::span<const Rational> values) {
  Integer l = 1;
  for (const Rational& q : values)
    if (q.get_den() != 1) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
  return l;
}

int compare_products(const Rational& a, const Rational& b, const Rational& c, const Rational& d) {
  // a*b ? c*d  <=>  an*bn*cd*dd ? cn*dn*ad*bd  (denominators positive)
  Integer lhs = a.get_num() * b.get_num();
  Integer rhs = c.get_num() * d.get_num();
  if (sgn(lhs) == 0 || sgn(rhs) == 0 || sgn(lhs) != sgn(rhs)) {
    int s = cmp(lhs, rhs);
    return (s > 0) - (s < 0);
  }
  lhs *= c.get_den();
  lhs *= d.get_den();
  rhs *= a.get_den();
  rhs *= b.get_den();
  int s = cmp(lhs, rhs);
  return (s > 0) - (s < 0);
}

int compare_products(const Integer& a, const Integer& b, const Integer& c, const Integer& d) {
  int s = cmp(Integer(a * b), Integer(c * d));
  return (s > 0) - (s < 0);
}

std::size_t bit_length(const Integer& z) {
  return sgn(z) == 0 ? 0 : mpz_sizeinbase(z.get_mpz_t(), 2);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace logconc
