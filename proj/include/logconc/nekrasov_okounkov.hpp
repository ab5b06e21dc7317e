#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "logconc/logconcavity.hpp"
#include "logconc/rational.hpp"
#include "logconc/report.hpp"

namespace logconc {

struct Partition {
  std::vector<unsigned> parts;  // non-increasing, all positive
  unsigned size = 0;

  /// lambda'_j for j = 1..parts[0].
  std::vector<unsigned> conjugate() const;
  bool valid() const;
};

/// Enumerates the partitions of n in reverse lexicographic order,
/// starting from (n). n = 0 yields the empty partition once.
class PartitionGenerator {
 public:
  explicit PartitionGenerator(unsigned n);
  bool done() const noexcept { return done_; }
  const Partition& current() const noexcept { return current_; }
  void next();

 private:
  Partition current_;
  bool done_ = false;
};

std::vector<Partition> partitions(unsigned n);

/// p(0..N) by Euler's pentagonal recurrence.
std::vector<Integer> partition_numbers(std::size_t N);

/// Multiset of hook lengths, sorted non-increasing.
std::vector<unsigned> hook_lengths(const Partition& lambda);

/// Polynomial in z with exact coefficients; coeffs[j] multiplies z^j.
struct ZPolynomial {
  std::vector<Rational> coeffs{Rational(0)};

  std::size_t degree() const;
  Rational eval(const Rational& z) const;
  void trim();
  friend bool operator==(const ZPolynomial& a, const ZPolynomial& b);
};

ZPolynomial operator+(const ZPolynomial& a, const ZPolynomial& b);
ZPolynomial operator*(const ZPolynomial& a, const ZPolynomial& b);

inline constexpr unsigned kBruteforceMaxN = 25;

/// Sum over partitions of n of prod_h (1 + z/h^2). Throws Error(resource)
/// above kBruteforceMaxN; use q_recurrence for larger n.
ZPolynomial q_bruteforce(unsigned n);

enum class QProvenance { bruteforce, recurrence };

struct QTable {
  std::vector<ZPolynomial> polys;  // Q_0..Q_N
  QProvenance provenance = QProvenance::recurrence;
  std::size_t N() const noexcept { return polys.size() - 1; }
};

/// n Q_n = (z + 1) sum_{m=1}^n sigma_1(m) Q_{n-m}.
QTable q_recurrence(std::size_t N);
QTable q_bruteforce_table(unsigned N);

/// Coefficients of prod_{m<=N} (1 - q^m)^{-z-1} mod q^{N+1} at a rational z.
std::vector<Rational> nk_product_coefficients(std::size_t N, const Rational& z);

/// One pass/fail record per z comparing the product expansion with Q_n(z).
std::vector<CheckRecord> identity_spotcheck(const QTable& table, std::span<const Rational> z_values);

struct NkScanEntry {
  std::size_t n = 0;
  std::size_t degree = 0;
  UnimodalityReport unimodal;
  ConcavityReport concavity;
  bool all_positive = true;
  std::optional<bool> bruteforce_confirms;  // only set for flagged n within brute-force reach
};

std::vector<NkScanEntry> unimodality_scan(const QTable& table, unsigned jobs = 1);

nlohmann::ordered_json to_json(const NkScanEntry& e);
/// {"provenance", "N", "polys": [{"n", "coeffs": ["num/den", ...]}, ...]}
nlohmann::ordered_json to_json(const QTable& t);

/// Rough memory of q_recurrence(N) in bytes, used to cap N.
std::size_t estimate_q_table_bytes(std::size_t N);

}  // namespace logconc
