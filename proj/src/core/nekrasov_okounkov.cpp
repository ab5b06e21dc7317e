#include "logconc/nekrasov_okounkov.hpp"

#include <algorithm>
#include <cmath>

#include "logconc/error.hpp"
#include "logconc/parallel.hpp"
#include "logconc/sequences.hpp"

namespace logconc {

std::vector<unsigned> Partition::conjugate() const {
  std::vector<unsigned> c(parts.empty() ? 0 : parts.front(), 0);
  for (unsigned p : parts)
    for (unsigned j = 0; j < p; ++j) ++c[j];
  return c;
}

bool Partition::valid() const {
  unsigned s = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] == 0 || (i > 0 && parts[i] > parts[i - 1])) return false;
    s += parts[i];
  }
  return s == size;
}

PartitionGenerator::PartitionGenerator(unsigned n) {
  current_.size = n;
  if (n > 0) current_.parts = {n};
}

void PartitionGenerator::next() {
  auto& p = current_.parts;
  unsigned ones = 0;
  while (!p.empty() && p.back() == 1) {
    ++ones;
    p.pop_back();
  }
  if (p.empty()) {
    done_ = true;
    return;
  }
  const unsigned v = --p.back();
  unsigned rest = ones + 1;
  while (rest > v) {
    p.push_back(v);
    rest -= v;
  }
  if (rest > 0) p.push_back(rest);
}

std::vector<Partition> partitions(unsigned n) {
  std::vector<Partition> out;
  for (PartitionGenerator g(n); !g.done(); g.next()) out.push_back(g.current());
  return out;
}

std::vector<Integer> partition_numbers(std::size_t N) {
  std::vector<Integer> p(N + 1, 0);
  p[0] = 1;
  for (std::size_t n = 1; n <= N; ++n) {
    Integer s = 0;
    for (std::size_t k = 1;; ++k) {
      const std::size_t g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
      if (g1 > n) break;
      Integer term = p[n - g1];
      if (g2 <= n) term += p[n - g2];
      if (k % 2)
        s += term;
      else
        s -= term;
    }
    p[n] = s;
  }
  return p;
}

std::vector<unsigned> hook_lengths(const Partition& lambda) {
  if (!lambda.valid()) fail(ErrorKind::invalid_argument, "hook_lengths needs a valid partition");
  const auto conj = lambda.conjugate();
  std::vector<unsigned> h;
  h.reserve(lambda.size);
  for (std::size_t i = 0; i < lambda.parts.size(); ++i)
    for (unsigned j = 0; j < lambda.parts[i]; ++j) h.push_back(lambda.parts[i] - j + conj[j] - static_cast<unsigned>(i) - 1);
  std::sort(h.begin(), h.end(), std::greater<>());
  return h;
}

std::size_t ZPolynomial::degree() const {
  std::size_t d = coeffs.size() - 1;
  while (d > 0 && coeffs[d] == 0) --d;
  return d;
}

Rational ZPolynomial::eval(const Rational& z) const {
  Rational acc = 0;
  for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * z + coeffs[j];
  return acc;
}

void ZPolynomial::trim() {
  while (coeffs.size() > 1 && coeffs.back() == 0) coeffs.pop_back();
  if (coeffs.empty()) coeffs.push_back(Rational(0));
}

bool operator==(const ZPolynomial& a, const ZPolynomial& b) {
  const std::size_t n = std::max(a.coeffs.size(), b.coeffs.size());
  for (std::size_t j = 0; j < n; ++j) {
    const Rational x = j < a.coeffs.size() ? a.coeffs[j] : Rational(0);
    const Rational y = j < b.coeffs.size() ? b.coeffs[j] : Rational(0);
    if (x != y) return false;
  }
  return true;
}

ZPolynomial operator+(const ZPolynomial& a, const ZPolynomial& b) {
  ZPolynomial r;
  r.coeffs.assign(std::max(a.coeffs.size(), b.coeffs.size()), Rational(0));
  for (std::size_t j = 0; j < a.coeffs.size(); ++j) r.coeffs[j] += a.coeffs[j];
  for (std::size_t j = 0; j < b.coeffs.size(); ++j) r.coeffs[j] += b.coeffs[j];
  r.trim();
  return r;
}

ZPolynomial operator*(const ZPolynomial& a, const ZPolynomial& b) {
  ZPolynomial r;
  r.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) r.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  r.trim();
  return r;
}

ZPolynomial q_bruteforce(unsigned n) {
  if (n > kBruteforceMaxN)
    fail(ErrorKind::resource, "brute-force Q_n is capped at n = " + std::to_string(kBruteforceMaxN) +
                                  " (p(n) partitions); use q_recurrence for n = " + std::to_string(n));
  std::vector<Rational> sum(n + 1, Rational(0));
  std::vector<Rational> prod;
  for (PartitionGenerator g(n); !g.done(); g.next()) {
    prod.assign(n + 1, Rational(0));
    prod[0] = 1;
    std::size_t deg = 0;
    for (unsigned h : hook_lengths(g.current())) {
      const Rational c(1, static_cast<unsigned long>(h) * h);
      // multiply by (1 + c z) in place, high degree first
      ++deg;
      for (std::size_t j = deg; j > 0; --j) prod[j] += c * prod[j - 1];
    }
    for (std::size_t j = 0; j <= n; ++j) sum[j] += prod[j];
  }
  ZPolynomial q;
  q.coeffs = std::move(sum);
  q.trim();
  return q;
}

QTable q_bruteforce_table(unsigned N) {
  QTable t;
  t.provenance = QProvenance::bruteforce;
  for (unsigned n = 0; n <= N; ++n) t.polys.push_back(q_bruteforce(n));
  return t;
}

QTable q_recurrence(std::size_t N) {
  const auto sigma = sigma_one_table(N);
  QTable t;
  t.provenance = QProvenance::recurrence;
  t.polys.reserve(N + 1);
  ZPolynomial one;
  one.coeffs = {Rational(1)};
  t.polys.push_back(one);
  std::vector<Rational> s;
  for (std::size_t n = 1; n <= N; ++n) {
    s.assign(n, Rational(0));  // degree n - 1
    for (std::size_t m = 1; m <= n; ++m) {
      const Rational sm(static_cast<unsigned long>(sigma[m]));
      const auto& q = t.polys[n - m].coeffs;
      for (std::size_t j = 0; j < q.size(); ++j) s[j] += sm * q[j];
    }
    ZPolynomial qn;
    qn.coeffs.assign(n + 1, Rational(0));
    const Rational inv_n(1, static_cast<unsigned long>(n));
    for (std::size_t j = 0; j < n; ++j) {
      const Rational v = s[j] * inv_n;
      qn.coeffs[j] += v;
      qn.coeffs[j + 1] += v;
    }
    qn.trim();
    t.polys.push_back(std::move(qn));
  }
  return t;
}

std::vector<Rational> nk_product_coefficients(std::size_t N, const Rational& z) {
  const Rational a = z + 1;
  std::vector<Rational> c(N + 1, Rational(0)), next(N + 1);
  c[0] = 1;
  // generalized binomial series (1 - x)^{-a} = sum_j g_j x^j
  std::vector<Rational> g(N + 1);
  g[0] = 1;
  for (std::size_t j = 1; j <= N; ++j) g[j] = g[j - 1] * (a + static_cast<long>(j) - 1) / static_cast<long>(j);
  for (std::size_t m = 1; m <= N; ++m) {
    for (std::size_t n = 0; n <= N; ++n) {
      Rational acc = 0;
      for (std::size_t j = 0; j * m <= n; ++j) acc += g[j] * c[n - j * m];
      next[n] = std::move(acc);
    }
    std::swap(c, next);
  }
  return c;
}

std::vector<CheckRecord> identity_spotcheck(const QTable& table, std::span<const Rational> z_values) {
  std::vector<CheckRecord> out;
  const std::size_t N = table.N();
  for (const Rational& z : z_values) {
    const auto prod = nk_product_coefficients(N, z);
    CheckRecord r;
    r.id = "nk_identity z=" + to_fraction_string(z) + " N=" + std::to_string(N);
    r.status = Status::pass;
    for (std::size_t n = 0; n <= N; ++n) {
      const Rational q = table.polys[n].eval(z);
      if (q != prod[n]) {
        r.status = Status::fail;
        r.measure("first_mismatch_n", std::to_string(n))
            .measure("product_coefficient", to_fraction_string(prod[n]))
            .measure("Q_n(z)", to_fraction_string(q));
        break;
      }
    }
    r.measure("coefficients_compared", std::to_string(N + 1));
    r.envelope = "exact equality";
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<NkScanEntry> unimodality_scan(const QTable& table, unsigned jobs) {
  std::vector<NkScanEntry> out(table.polys.size());
  parallel_for(out.size(), jobs, [&](std::size_t n) {
    const auto& q = table.polys[n];
    NkScanEntry e;
    e.n = n;
    e.degree = q.degree();
    for (std::size_t j = 0; j <= e.degree; ++j)
      if (q.coeffs[j] <= 0) e.all_positive = false;
    std::span<const Rational> c(q.coeffs.data(), e.degree + 1);
    e.unimodal = unimodal_check(c, UnimodalMode::strict);
    e.concavity = logconcave_prefix(c);
    if ((!e.unimodal.unimodal || !e.all_positive) && n <= kBruteforceMaxN) {
      const auto bf = q_bruteforce(static_cast<unsigned>(n));
      e.bruteforce_confirms = bf == q;
    }
    out[n] = std::move(e);
  });
  return out;
}

nlohmann::ordered_json to_json(const NkScanEntry& e) {
  nlohmann::ordered_json j;
  j["n"] = e.n;
  j["degree"] = e.degree;
  j["unimodal"] = to_json(e.unimodal);
  j["logconcave_prefix"] = to_json(e.concavity);
  j["all_positive"] = e.all_positive;
  if (e.bruteforce_confirms) j["bruteforce_confirms"] = *e.bruteforce_confirms;
  return j;
}

nlohmann::ordered_json to_json(const QTable& t) {
  nlohmann::ordered_json j;
  j["provenance"] = t.provenance == QProvenance::bruteforce ? "bruteforce" : "recurrence";
  j["N"] = t.N();
  auto& polys = j["polys"] = nlohmann::ordered_json::array();
  for (std::size_t n = 0; n < t.polys.size(); ++n) {
    nlohmann::ordered_json p;
    p["n"] = n;
    auto& c = p["coeffs"] = nlohmann::ordered_json::array();
    for (const auto& q : t.polys[n].coeffs) c.push_back(to_fraction_string(q));
    polys.push_back(std::move(p));
  }
  return j;
}

std::size_t estimate_q_table_bytes(std::size_t N) {
  // denominators divide the squared hook products, about 2 n log2 n bits
  double bytes = 0;
  for (std::size_t n = 1; n <= N; ++n)
    bytes += static_cast<double>(n + 1) * (4.0 * n * std::log2(n + 1.0) / 8.0 + 64.0);
  return static_cast<std::size_t>(bytes);
}

}  // namespace logconc
