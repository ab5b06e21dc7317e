#include "logconc/report.hpp"

#include <algorithm>

namespace logconc {

const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::reported: return "reported";
  }
  return "reported";
}

std::size_t VerificationReport::count(Status s) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [s](const CheckRecord& r) { return r.status == s; }));
}

nlohmann::ordered_json VerificationReport::to_json() const {
  using oj = nlohmann::ordered_json;
  oj j;
  j["schema_version"] = kReportSchemaVersion;
  j["toolkit_version"] = kToolkitVersion;
  j["suite"] = suite;
  j["config"] = config;
  j["summary"] = {{"pass", count(Status::pass)}, {"fail", count(Status::fail)}, {"reported", count(Status::reported)}};
  oj recs = oj::array();
  for (const auto& r : records) {
    oj m = oj::object();
    for (const auto& [k, v] : r.measured) m[k] = v;
    recs.push_back({{"id", r.id}, {"status", to_string(r.status)}, {"measured", m}, {"envelope", r.envelope},
                    {"notes", r.notes}});
  }
  j["records"] = recs;
  j["results"] = results;
  j["volatile"] = volatile_info;
  return j;
}

nlohmann::ordered_json stable_view(nlohmann::ordered_json report) {
  report.erase("volatile");
  return report;
}

}  // namespace logconc
