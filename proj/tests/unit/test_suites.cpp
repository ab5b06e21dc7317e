#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "logconc/error.hpp"
#include "logconc/suites.hpp"

using namespace logconc;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(const fs::path& dir, const std::string& series, unsigned K, std::size_t N) {
  RunConfig c;
  c.series = series;
  c.K = K;
  c.N = N;
  c.cache_dir = dir / "cache";
  c.output = dir / "out";
  return c;
}

const LogSink quiet = [](const std::string&) {};

}  // namespace

TEST_CASE("config loading and overrides") {
  const auto dir = testing::scratch_dir("config");
  {
    std::ofstream out(dir / "c.json");
    out << R"({"series": "geometric", "K": 4, "N": 30, "C": "3/2", "residual_ks": [3, 4]})";
  }
  auto c = load_config(dir / "c.json");
  CHECK(c.series == "geometric");
  CHECK(c.K == 4);
  CHECK(*c.C == Rational(3, 2));
  CHECK(c.residual_ks == std::vector<unsigned>{3, 4});
  apply_overrides(c, nlohmann::json{{"K", 7}, {"series", "sigma-shifted"}});
  CHECK(c.K == 7);
  CHECK(c.N == 30);
  CHECK(c.series == "sigma-shifted");
  c.validate();
  CHECK_THROWS_AS(apply_overrides(c, nlohmann::json{{"bogus", 1}}), Error);
  CHECK_THROWS_AS(apply_overrides(c, nlohmann::json{{"K", "x"}}), Error);

  auto bad = c;
  bad.K = 0;
  try {
    bad.validate();
    FAIL("K = 0 accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_argument);
  }
  bad = c;
  bad.series = "nonsense";
  CHECK_THROWS_AS(bad.validate(), Error);

  const auto j = c.to_json();
  const auto back = RunConfig::from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.to_json() == j);
  fs::remove_all(dir);
}

TEST_CASE("tables are cached and corrupt files are rebuilt") {
  const auto dir = testing::scratch_dir("tables");
  auto cfg = small_config(dir, "sigma-shifted", 4, 40);
  std::vector<std::string> log;
  const LogSink sink = [&](const std::string& s) { log.push_back(s); };
  const auto first = obtain_table(cfg.series, cfg.K, cfg.N, cfg.cache_dir, cfg.max_table_bytes, sink);
  CHECK_FALSE(first.cache_hit);
  const auto second = obtain_table(cfg.series, cfg.K, cfg.N, cfg.cache_dir, cfg.max_table_bytes, sink);
  CHECK(second.cache_hit);
  CHECK(second.table == first.table);
  CHECK(second.checksums == first.checksums);

  { std::ofstream(first.path, std::ios::trunc) << "{ not json"; }
  log.clear();
  const auto third = obtain_table(cfg.series, cfg.K, cfg.N, cfg.cache_dir, cfg.max_table_bytes, sink);
  CHECK(third.rebuilt_corrupt);
  CHECK(third.table == first.table);
  bool warned = false;
  for (const auto& s : log)
    if (s.find("corrupt") != std::string::npos) warned = true;
  CHECK(warned);

  const auto j1 = cmd_gen_table(cfg, quiet);
  const auto j2 = cmd_gen_table(cfg, quiet);
  CHECK(j1["row_checksums"] == j2["row_checksums"]);

  const auto entries = cache_list(cfg.cache_dir);
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].series_id == "sigma-shifted");
  CHECK(entries[0].K == 4);
  CHECK(cache_remove(cfg.cache_dir, std::string("geometric:1"), std::nullopt, std::nullopt) == 0);
  CHECK(cache_remove(cfg.cache_dir, std::nullopt, 4u, std::nullopt) == 1);
  CHECK(cache_list(cfg.cache_dir).empty());

  CHECK_THROWS_AS(obtain_table(cfg.series, 4, 40, cfg.cache_dir, 64, quiet), Error);
  fs::remove_all(dir);
}

TEST_CASE("unknown suite names list the choices") {
  const auto dir = testing::scratch_dir("unknown");
  const auto cfg = small_config(dir, "geometric", 3, 10);
  try {
    cmd_check(cfg, "nope", quiet);
    FAIL("accepted an unknown suite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_argument);
    const std::string msg = e.what();
    for (const auto& s : check_suites()) CHECK(msg.find(s) != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("prefix suite on the geometric series") {
  const auto dir = testing::scratch_dir("prefix");
  const auto cfg = small_config(dir, "geometric", 6, 60);
  const auto rep = cmd_check(cfg, "prefix", quiet);
  CHECK(rep.count(Status::fail) == 0);
  CHECK(rep.count(Status::pass) > 0);
  CHECK(fs::exists(cfg.output / "check-prefix.json"));
  fs::remove_all(dir);
}

TEST_CASE("reports are deterministic outside the volatile block") {
  const auto dir = testing::scratch_dir("determinism");
  auto cfg = small_config(dir, "sigma-shifted", 5, 80);
  const auto a = cmd_check(cfg, "breakpoints", quiet).to_json();
  cfg.jobs = 3;
  const auto b = cmd_check(cfg, "breakpoints", quiet).to_json();
  CHECK(stable_view(a).dump() == stable_view(b).dump());
  CHECK(a.contains("volatile"));
  fs::remove_all(dir);
}

TEST_CASE("constants needs residual or saddle data") {
  const auto dir = testing::scratch_dir("constants");
  auto cfg = small_config(dir, "constant:2", 4, 60);
  fs::create_directories(cfg.output);
  try {
    cmd_constants(cfg, quiet);
    FAIL("constants ran without data");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("decomposition") != std::string::npos);
  }
  cfg.residual_ks = {3, 4};
  cfg.identity_n = 20;
  const auto dec = cmd_check(cfg, "decomposition", quiet);
  CHECK_FALSE(dec.any_fail());
  const auto rep = cmd_constants(cfg, quiet);
  CHECK(fs::exists(cfg.output / "constants.json"));
  bool saw = false;
  for (const auto& r : rep.records)
    if (r.id.find("constant:2") != std::string::npos) saw = true;
  CHECK(saw);
  fs::remove_all(dir);
}
