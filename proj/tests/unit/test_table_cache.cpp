#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "logconc/error.hpp"
#include "logconc/sequences.hpp"
#include "logconc/table_cache.hpp"

using namespace logconc;

TEST_CASE("table JSON round trip is bit exact") {
  const auto f = generate(SeriesSpec::parse("sigma-shifted"), 60);
  const auto t = power_table(f, 4, 60);
  std::stringstream ss;
  write_table_json(ss, t, "sigma-shifted");
  const std::string first = ss.str();
  const auto back = read_table_json(ss);
  CHECK(back.series_id == "sigma-shifted");
  CHECK(back.K == 4);
  CHECK(back.N == 60);
  CHECK(back.format_version == kTableFormatVersion);
  CHECK(back.table == t);
  std::stringstream again;
  write_table_json(again, back.table, "sigma-shifted");
  CHECK(again.str() == first);
}

TEST_CASE("malformed tables raise format errors") {
  auto expect_format = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_table_json(in);
      FAIL("accepted: " << text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::format);
    }
  };
  expect_format("{");
  expect_format("{\"format_version\":1,\"series_id\":\"x\",\"K\":1,\"N\":1,\"rows\":[[\"1/1\"]]}");
  expect_format("{\"format_version\":99,\"series_id\":\"x\",\"K\":1,\"N\":0,\"rows\":[[\"1/1\"]]}");
  expect_format("{\"format_version\":1,\"series_id\":\"x\",\"K\":2,\"N\":0,\"rows\":[[\"1/1\"]]}");
  expect_format("{\"format_version\":1,\"series_id\":\"x\",\"K\":1,\"N\":0,\"rows\":[[\"0.5\"]]}");
}

TEST_CASE("checksums and cache names") {
  const auto f = generate(SeriesSpec::parse("geometric"), 20);
  const auto t = power_table(f, 3, 20);
  CHECK(row_checksum(t.row(2)) == row_checksum(power_table(f, 3, 20).row(2)));
  CHECK(row_checksum(t.row(2)) != row_checksum(t.row(3)));
  const auto a = cache_file_name("file:/tmp/a b", 3, 20), b = cache_file_name("file:/tmp/a_b", 3, 20);
  CHECK(a != b);
  CHECK(a.find("_K3_N20_v") != std::string::npos);
}

TEST_CASE("save and load through the filesystem") {
  const auto dir = testing::scratch_dir("cache");
  const auto f = generate(SeriesSpec::parse("constant:3/2"), 15);
  const auto t = power_table(f, 2, 15);
  const auto path = dir / cache_file_name("constant:3/2", 2, 15);
  save_table(path, t, "constant:3/2");
  const auto back = load_table(path);
  CHECK(back.table == t);
  CHECK_THROWS_AS(load_table(dir / "missing.json"), Error);
  std::filesystem::remove_all(dir);
}
