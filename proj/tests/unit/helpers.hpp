#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "logconc/rational.hpp"
#include "logconc/series.hpp"

namespace testing {

inline logconc::Rational q(const char* s) { return logconc::parse_rational(s); }

inline std::vector<logconc::Rational> qs(std::initializer_list<const char*> xs) {
  std::vector<logconc::Rational> v;
  for (auto x : xs) v.push_back(q(x));
  return v;
}

inline logconc::TruncatedSeries series_of(std::initializer_list<const char*> xs) {
  return logconc::TruncatedSeries(qs(xs));
}

/// Non-negative rationals with small numerators and denominators.
inline std::vector<logconc::Rational> random_sequence(std::mt19937_64& rng, std::size_t len, unsigned max_num = 20,
                                                      unsigned max_den = 6, bool allow_zero = true) {
  std::uniform_int_distribution<unsigned> num(allow_zero ? 0 : 1, max_num), den(1, max_den);
  std::vector<logconc::Rational> v;
  for (std::size_t i = 0; i < len; ++i) {
    logconc::Rational x(num(rng), den(rng));
    x.canonicalize();
    v.push_back(x);
  }
  return v;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("logconc-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing
