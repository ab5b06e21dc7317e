// Drives the logconc executable. Usage: cli_test WORKDIR
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int failures = 0;
fs::path work;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    std::cerr << "FAILED: " << what << '\n';
    ++failures;
  }
}

struct Run {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const auto out = work / "stdout.txt", err = work / "stderr.txt";
  const std::string cmd = std::string("cd '") + work.string() + "' && '" + LOGCONC_CLI + "' " + args + " >'" +
                          out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

int main(int argc, char** argv) {
  work = fs::absolute(argc > 1 ? argv[1] : "cli_work");
  fs::remove_all(work);
  fs::create_directories(work);

  {
    const auto r = run("--version");
    expect(r.code == 0 && !r.out.empty(), "--version exits 0");
  }
  {
    const auto r = run("gen-table --series geometric -K 5 -N 40 -q");
    expect(r.code == 0, "gen-table exits 0");
    const auto j = nlohmann::json::parse(r.out);
    expect(j["cache_hit"] == false, "first gen-table builds the table");
    const auto again = run("gen-table --series geometric -K 5 -N 40");
    const auto j2 = nlohmann::json::parse(again.out);
    expect(j2["cache_hit"] == true, "second gen-table hits the cache");
    expect(again.err.find("cache hit") != std::string::npos, "cache hit is logged");
    expect(j["row_checksums"] == j2["row_checksums"], "row checksums are stable");
  }
  {
    const auto r = run("check prefix --series geometric -K 0");
    expect(r.code == 2, "K = 0 is a usage error (exit 2)");
    expect(r.err.find("K") != std::string::npos, "K = 0 message names K");
  }
  {
    const auto r = run("check nosuch");
    expect(r.code == 2, "unknown suite exits 2");
    expect(r.err.find("breakpoints") != std::string::npos, "unknown suite lists the suites");
  }
  {
    const auto r = run("check prefix --series bogus");
    expect(r.code == 2, "unknown series exits 2");
  }
  {
    const auto r = run("check prefix --series geometric -K 6 -N 60 -q");
    expect(r.code == 0, "prefix suite on geometric passes");
    expect(r.out.find("suite prefix:") != std::string::npos, "summary line printed");
    expect(fs::exists(work / "logconc-out" / "check-prefix.json"), "report written to the default output");
  }
  {
    // config file, overridden by a flag
    std::ofstream(work / "cfg.json") << R"({"series": "constant:2", "K": 3, "N": 20, "output": "cfgout"})";
    const auto r = run("check prefix --config cfg.json -K 4 -q --json");
    expect(r.code == 0, "prefix with config exits 0");
    const auto j = nlohmann::json::parse(r.out);
    expect(j["config"]["K"] == 4, "flag overrides the config file");
    expect(j["config"]["series"] == "constant:2", "config file value kept");
    expect(fs::exists(work / "cfgout" / "check-prefix.json"), "config output directory honoured");
    std::ofstream(work / "bad.json") << R"({"series": "geometric", "colour": 1})";
    expect(run("check prefix --config bad.json").code == 3, "unknown config key is rejected");
  }
  {
    const std::string file = std::string("file:") + LOGCONC_TEST_DATA + "/shifted_harmonic.txt";
    const auto r = run("check prefix --series " + file + " -K 4 -N 60 -q --json");
    expect(r.code == 0, "custom series file runs");
    const auto short_file = run("check prefix --series " + file + " -K 4 -N 100 -q");
    expect(short_file.code == 3 && short_file.err.find("only 61") != std::string::npos,
           "too short custom series is a format error");
  }
  {
    const auto a = run("check breakpoints --series sigma-shifted -K 6 -N 120 --out det -q --json");
    const auto b = run("check breakpoints --series sigma-shifted -K 6 -N 120 --out det --jobs 4 -q --json");
    expect(a.code == 0 && b.code == 0, "breakpoints runs");
    auto ja = nlohmann::json::parse(a.out), jb = nlohmann::json::parse(b.out);
    expect(ja.contains("volatile"), "report carries a volatile block");
    ja.erase("volatile");
    jb.erase("volatile");
    expect(ja == jb, "reports are identical outside the volatile block");
    expect(fs::exists(work / "det" / "breakpoints-sigma-shifted.csv"), "breakpoint CSV written");
  }
  {
    const auto r = run("constants --out empty-dir");
    expect(r.code == 3, "constants without data fails");
    expect(r.err.find("check decomposition") != std::string::npos, "message says which suite to run");
    const auto d = run("check decomposition --series constant:2 -K 4 -N 80 --out flat -q");
    expect(d.code == 0, "decomposition on a constant series has no failures");
    const auto c = run("constants --out flat -q --json");
    expect(c.code == 0, "constants after decomposition");
    expect(fs::exists(work / "flat" / "constants.json"), "constants.json written");
  }
  {
    const auto ls = run("cache ls");
    expect(ls.code == 0, "cache ls exits 0");
    const auto entries = nlohmann::json::parse(ls.out);
    expect(entries.is_array() && !entries.empty(), "cache ls lists tables");
    expect(run("cache rm").code == 2, "cache rm without filters is refused");
    const auto rm = run("cache rm --series geometric:1 -K 5");
    expect(rm.code == 0, "filtered cache rm");
    const auto after = nlohmann::json::parse(run("cache ls").out);
    expect(after.size() + 1 == entries.size(), "exactly one table removed");
    expect(run("cache rm --all").code == 0, "cache rm --all");
    expect(nlohmann::json::parse(run("cache ls").out).empty(), "cache empty after rm --all");
  }

  if (failures) {
    std::cerr << failures << " CLI expectations failed\n";
    return 1;
  }
  std::cout << "CLI: all expectations met\n";
  return 0;
}
