#pragma once

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

namespace logconc {

inline constexpr const char* kToolkitVersion = "0.3.0";
inline constexpr int kReportSchemaVersion = 1;

/// pass/fail are for exact, falsifiable identities; empirical measurements
/// against existential constants are only ever `reported`.
enum class Status { pass, fail, reported };

const char* to_string(Status s) noexcept;

struct CheckRecord {
  std::string id;
  Status status = Status::reported;
  std::vector<std::pair<std::string, std::string>> measured;
  std::string envelope;
  std::string notes;

  CheckRecord& measure(std::string key, std::string value) {
    measured.emplace_back(std::move(key), std::move(value));
    return *this;
  }
};

struct VerificationReport {
  std::string suite;
  std::vector<CheckRecord> records;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json results = nlohmann::ordered_json::object();  // suite-specific structured payload
  /// Timestamps and timings; excluded from determinism comparisons.
  nlohmann::ordered_json volatile_info = nlohmann::ordered_json::object();

  CheckRecord& add(CheckRecord r) {
    records.push_back(std::move(r));
    return records.back();
  }
  std::size_t count(Status s) const;
  bool any_fail() const { return count(Status::fail) > 0; }
  nlohmann::ordered_json to_json() const;
};

/// Drops the volatile block so two runs can be compared byte for byte.
nlohmann::ordered_json stable_view(nlohmann::ordered_json report);

}  // namespace logconc
