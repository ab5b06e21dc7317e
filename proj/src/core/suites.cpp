#include "logconc/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "logconc/decomposition.hpp"
#include "logconc/error.hpp"
#include "logconc/logconcavity.hpp"
#include "logconc/nekrasov_okounkov.hpp"
#include "logconc/saddle.hpp"
#include "logconc/sequences.hpp"
#include "logconc/table_cache.hpp"

namespace logconc {

namespace fs = std::filesystem;
using oj = nlohmann::ordered_json;

// ---------------------------------------------------------------- config

void RunConfig::validate() const {
  if (K == 0) fail(ErrorKind::invalid_argument, "K must be positive");
  if (N == 0) fail(ErrorKind::invalid_argument, "N must be positive");
  if (precision_bits < 64) fail(ErrorKind::invalid_argument, "precision_bits must be at least 64");
  if (saddle_bits < 128) fail(ErrorKind::invalid_argument, "saddle_bits must be at least 128");
  if (jobs == 0) fail(ErrorKind::invalid_argument, "jobs must be positive");
  if (!(tolerance > 0)) fail(ErrorKind::invalid_argument, "tolerance must be positive");
  if (C && *C <= 1) fail(ErrorKind::invalid_argument, "C must exceed 1");
  if (alpha && (*alpha < 0 || *alpha >= 1)) fail(ErrorKind::invalid_argument, "alpha must lie in [0, 1)");
  for (auto [k, n] : saddle_points)
    if (k == 0 || n == 0) fail(ErrorKind::invalid_argument, "saddle points need k, n >= 1");
  SeriesSpec::parse(series);
}

oj RunConfig::to_json() const {
  oj j;
  j["series"] = series;
  j["K"] = K;
  j["N"] = N;
  j["precision_bits"] = precision_bits;
  j["cache_dir"] = cache_dir.string();
  j["output"] = output.string();
  j["tolerance"] = tolerance;
  j["C"] = C ? to_fraction_string(*C) : "";
  j["alpha"] = alpha ? to_fraction_string(*alpha) : "";
  j["identity_n"] = identity_n;
  j["bruteforce_k"] = bruteforce_k;
  j["residual_ks"] = residual_ks;
  oj pts = oj::array();
  for (auto [k, n] : saddle_points) pts.push_back({k, n});
  j["saddle_points"] = pts;
  j["saddle_bits"] = saddle_bits;
  j["quad_tolerance"] = quad_tolerance;
  j["nk_spotcheck_N"] = nk_spotcheck_N;
  j["max_table_bytes"] = max_table_bytes;
  return j;
}

namespace {

Rational json_rational(const nlohmann::json& v, const char* key) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  fail(ErrorKind::format, std::string("config key '") + key + "' must be a rational string like \"17/10\"");
}

}  // namespace

void apply_overrides(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::format, "config must be a JSON object");
  static const std::set<std::string> known = {
      "series",      "K",           "N",         "precision_bits", "cache_dir",    "output",
      "jobs",        "tolerance",   "C",         "alpha",          "identity_n",   "bruteforce_k",
      "residual_ks", "saddle_points", "saddle_bits", "quad_tolerance", "nk_spotcheck_N", "max_table_bytes"};
  try {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!known.count(it.key())) fail(ErrorKind::format, "unknown config key '" + it.key() + "'");
    if (j.contains("series")) c.series = j["series"].get<std::string>();
    if (j.contains("K")) c.K = j["K"].get<unsigned>();
    if (j.contains("N")) c.N = j["N"].get<std::size_t>();
    if (j.contains("precision_bits")) c.precision_bits = j["precision_bits"].get<long>();
    if (j.contains("cache_dir")) c.cache_dir = j["cache_dir"].get<std::string>();
    if (j.contains("output")) c.output = j["output"].get<std::string>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<unsigned>();
    if (j.contains("tolerance")) c.tolerance = j["tolerance"].get<double>();
    if (j.contains("C")) {
      if (j["C"].is_string() && j["C"].get<std::string>().empty())
        c.C.reset();
      else
        c.C = json_rational(j["C"], "C");
    }
    if (j.contains("alpha")) {
      if (j["alpha"].is_string() && j["alpha"].get<std::string>().empty())
        c.alpha.reset();
      else
        c.alpha = json_rational(j["alpha"], "alpha");
    }
    if (j.contains("identity_n")) c.identity_n = j["identity_n"].get<std::size_t>();
    if (j.contains("bruteforce_k")) c.bruteforce_k = j["bruteforce_k"].get<unsigned>();
    if (j.contains("residual_ks")) c.residual_ks = j["residual_ks"].get<std::vector<unsigned>>();
    if (j.contains("saddle_points")) {
      c.saddle_points.clear();
      for (const auto& p : j["saddle_points"]) c.saddle_points.emplace_back(p.at(0).get<unsigned>(), p.at(1).get<unsigned>());
    }
    if (j.contains("saddle_bits")) c.saddle_bits = j["saddle_bits"].get<long>();
    if (j.contains("quad_tolerance")) c.quad_tolerance = j["quad_tolerance"].get<double>();
    if (j.contains("nk_spotcheck_N")) c.nk_spotcheck_N = j["nk_spotcheck_N"].get<std::size_t>();
    if (j.contains("max_table_bytes")) c.max_table_bytes = j["max_table_bytes"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::format, std::string("config value has the wrong type: ") + e.what());
  }
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  apply_overrides(c, j);
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot read config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::format, path.string() + ": " + e.what());
  }
  return RunConfig::from_json(j);
}

// ---------------------------------------------------------------- helpers

namespace {

std::string safe_name(const std::string& id) {
  std::string s;
  for (char c : id) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
  return s;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string opt_index(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "none"; }

struct SeriesDefaults {
  std::optional<Rational> C;
  Rational alpha = 0;
};

SeriesDefaults defaults_for(const SeriesSpec& s) {
  SeriesDefaults d;
  switch (s.kind) {
    case SeriesKind::geometric:
    case SeriesKind::constant:
      if (s.scale > 1) d.C = s.scale;
      d.alpha = 0;
      break;
    case SeriesKind::sigma_shifted:
    case SeriesKind::sigma:
      d.C = Rational(17, 10);
      d.alpha = Rational(1, 2);
      break;
    case SeriesKind::custom_file:
      break;
  }
  return d;
}

bool is_sigma(const SeriesSpec& s) { return s.kind == SeriesKind::sigma || s.kind == SeriesKind::sigma_shifted; }
bool is_flat(const SeriesSpec& s) { return s.kind == SeriesKind::geometric || s.kind == SeriesKind::constant; }

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) fail(ErrorKind::io, "cannot create directory " + p.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& p) {
  ensure_dir(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + p.string());
  return out;
}

/// Log-concavity report of f^k for f = z g, from the report of g^k.
ConcavityReport shift_report(ConcavityReport r, unsigned k) {
  r.prefix_length += k;
  if (r.first_violation) *r.first_violation += k;
  r.scanned_up_to += k;
  r.first_nonzero += k;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- tables

TableSource obtain_table(const std::string& series_id, unsigned K, std::size_t N, const fs::path& cache_dir,
                         std::size_t max_bytes, const LogSink& log) {
  const SeriesSpec spec = SeriesSpec::parse(series_id);
  const std::string id = spec.id();
  const fs::path path = cache_dir / cache_file_name(id, K, N);
  bool rebuilt_corrupt = false;
  std::optional<PowerTable> table;
  std::error_code ec;
  if (fs::exists(path, ec)) {
    try {
      TableFile tf = load_table(path);
      if (tf.series_id != id || tf.K != K || tf.N != N || tf.format_version != kTableFormatVersion)
        fail(ErrorKind::format, "header does not match the requested table");
      table = std::move(tf.table);
      log("cache hit " + path.string());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::format) throw;
      log(std::string("warning: corrupt cache file ") + path.string() + " (" + e.what() + "); rebuilding");
      rebuilt_corrupt = true;
    }
  }
  const bool hit = table.has_value();
  if (!hit) {
    table = power_table(generate(spec, N), K, N, TableBudget{max_bytes});
    ensure_dir(cache_dir);
    save_table(path, *table, id);
    log("wrote " + path.string());
  }
  TableSource src{std::move(*table), path, hit, rebuilt_corrupt, {}};
  for (unsigned k = 1; k <= K; ++k) src.checksums.push_back(row_checksum(src.table.row(k)));
  return src;
}

oj cmd_gen_table(const RunConfig& cfg, const LogSink& log) {
  cfg.validate();
  Stopwatch sw;
  TableSource src = obtain_table(cfg.series, cfg.K, cfg.N, cfg.cache_dir, cfg.max_table_bytes, log);
  oj j;
  j["series_id"] = SeriesSpec::parse(cfg.series).id();
  j["K"] = cfg.K;
  j["N"] = cfg.N;
  j["path"] = src.path.string();
  j["cache_hit"] = src.cache_hit;
  j["rebuilt_corrupt"] = src.rebuilt_corrupt;
  oj sums = oj::array();
  for (unsigned k = 1; k <= cfg.K; ++k) {
    sums.push_back({{"k", k}, {"checksum", hex64(src.checksums[k - 1])}});
    log("row k=" + std::to_string(k) + " checksum " + hex64(src.checksums[k - 1]));
  }
  j["row_checksums"] = sums;
  j["elapsed_seconds"] = sw.seconds();
  return j;
}

// ---------------------------------------------------------------- suites

namespace {

struct TableView {
  TableSource src;
  bool shifted = false;  // table holds g^k with f = z g
};

TableView table_for(const RunConfig& cfg, const LogSink& log) {
  const bool shifted = SeriesSpec::parse(cfg.series).kind == SeriesKind::sigma;
  const std::string table_id = shifted ? "sigma-shifted" : cfg.series;
  if (shifted) log("sigma has a_0 = 0; scanning g = f/z and shifting indices by k");
  return TableView{obtain_table(table_id, cfg.K, cfg.N, cfg.cache_dir, cfg.max_table_bytes, log), shifted};
}

void table_volatile(VerificationReport& rep, const TableSource& src) {
  rep.volatile_info["table_path"] = src.path.string();
  rep.volatile_info["cache_hit"] = src.cache_hit;
  rep.volatile_info["rebuilt_corrupt"] = src.rebuilt_corrupt;
}

oj checksums_json(const TableSource& src) {
  oj a = oj::array();
  for (std::size_t i = 0; i < src.checksums.size(); ++i) a.push_back({{"k", i + 1}, {"checksum", hex64(src.checksums[i])}});
  return a;
}

/// f^k computed directly from the unshifted sigma series agrees with z^k g^k.
CheckRecord shift_identity_record(const PowerTable& g_table, std::size_t n_max) {
  const std::size_t Nc = std::min(n_max, g_table.N());
  const TruncatedSeries f = generate(SeriesSpec::parse("sigma"), Nc);
  CheckRecord r;
  r.id = "shift_identity n<=" + std::to_string(Nc);
  r.status = Status::pass;
  r.envelope = "exact equality";
  for (unsigned k = 1; k <= g_table.K(); ++k) {
    const TruncatedSeries fk = series_pow(f, k, Nc);
    const TruncatedSeries gk = shift_up(g_table.row(k).truncated(Nc), k, Nc);
    if (!(fk == gk)) {
      r.status = Status::fail;
      r.measure("first_bad_k", std::to_string(k));
      break;
    }
  }
  r.measure("K", std::to_string(g_table.K()));
  return r;
}

VerificationReport suite_prefix(const RunConfig& cfg, const LogSink& log) {
  const SeriesSpec spec = SeriesSpec::parse(cfg.series);
  TableView tv = table_for(cfg, log);
  const PowerTable& t = tv.src.table;
  VerificationReport rep;
  rep.suite = "prefix";
  table_volatile(rep, tv.src);
  oj rows = oj::array();
  for (unsigned k = 1; k <= t.K(); ++k) {
    const auto& row = t.row(k);
    ConcavityReport cr = logconcave_prefix(row);
    std::vector<RatioResult> ratios;
    if (k >= 2 && t.N() >= 2)
      for (std::size_t n : ratio_sample_points(t.N())) ratios.push_back(ratio_criterion(row.coeffs(), k, n));
    if (tv.shifted) {
      cr = shift_report(cr, k);
      for (auto& q : ratios) q.n += k;
    }
    rows.push_back(row_report_json(spec.id(), k, cr, ratios));
    if (is_flat(spec)) {
      // c^k binom(n+k-1, k-1) closed form
      CheckRecord o;
      o.id = "binomial_oracle k=" + std::to_string(k);
      o.status = Status::pass;
      o.envelope = "exact equality";
      Rational ck = 1;
      for (unsigned i = 0; i < k; ++i) ck *= spec.scale;
      for (std::size_t n = 0; n <= t.N(); ++n) {
        if (row[n] != ck * Rational(binomial(static_cast<long>(n + k - 1), k - 1))) {
          o.status = Status::fail;
          o.measure("first_mismatch_n", std::to_string(n));
          break;
        }
      }
      rep.add(std::move(o));
      CheckRecord l;
      l.id = "logconcave k=" + std::to_string(k);
      l.status = cr.first_violation ? Status::fail : Status::pass;
      l.envelope = "no violation (binomial rows are log-concave)";
      l.measure("prefix_length", std::to_string(cr.prefix_length)).measure("first_violation", opt_index(cr.first_violation));
      rep.add(std::move(l));
    } else {
      CheckRecord l;
      l.id = "logconcave_prefix k=" + std::to_string(k);
      l.status = Status::reported;
      l.measure("prefix_length", std::to_string(cr.prefix_length))
          .measure("first_violation", opt_index(cr.first_violation))
          .measure("scanned_up_to", std::to_string(cr.scanned_up_to));
      if (tv.shifted) l.notes = "indices of f^k via f^k = z^k g^k";
      rep.add(std::move(l));
    }
  }
  if (tv.shifted) rep.add(shift_identity_record(t, 60));
  rep.results["rows"] = rows;
  rep.results["row_checksums"] = checksums_json(tv.src);
  return rep;
}

/// ceil(1.59^k), exactly.
std::size_t ceil_159_pow(unsigned k) {
  Integer num = 1, den = 1;
  for (unsigned i = 0; i < k; ++i) {
    num *= 159;
    den *= 100;
  }
  Integer q = (num + den - 1) / den;
  if (!q.fits_ulong_p()) return SIZE_MAX;
  return q.get_ui();
}

VerificationReport suite_breakpoints(const RunConfig& cfg, const LogSink& log) {
  const SeriesSpec spec = SeriesSpec::parse(cfg.series);
  TableView tv = table_for(cfg, log);
  const PowerTable& t = tv.src.table;
  VerificationReport rep;
  rep.suite = "breakpoints";
  table_volatile(rep, tv.src);
  std::vector<ConcavityReport> reps;
  std::vector<unsigned> ks;
  for (unsigned k = 1; k <= t.K(); ++k) {
    ConcavityReport cr = logconcave_prefix(t.row(k));
    if (tv.shifted) cr = shift_report(cr, k);
    reps.push_back(cr);
    ks.push_back(k);
  }
  const BreakpointCurve curve = breakpoint_curve(reps, ks);
  for (const auto& e : curve.entries) {
    CheckRecord r;
    r.id = "breakpoint k=" + std::to_string(e.k);
    r.measure("prefix_length", std::to_string(e.prefix_length))
        .measure("first_violation", opt_index(e.first_violation))
        .measure("censored", yes_no(e.censored));
    rep.add(std::move(r));
  }
  {
    CheckRecord r;
    r.id = "breakpoint_fit";
    if (curve.fit_cuberoot)
      r.measure("slope_vs_cuberoot_k", num(curve.fit_cuberoot->slope))
          .measure("r2_cuberoot", num(curve.fit_cuberoot->r2));
    if (curve.fit_linear)
      r.measure("slope_vs_k", num(curve.fit_linear->slope)).measure("r2_linear", num(curve.fit_linear->r2));
    r.notes = curve.diagnostics;
    rep.add(std::move(r));
  }
  if (is_sigma(spec)) {
    // Conjecture window n <= min(5000, ceil(1.59^k) + k) in the indexing of f = z g
    oj window = oj::array();
    for (unsigned k = 2; k <= t.K(); ++k) {
      const std::size_t c = ceil_159_pow(k);
      const std::size_t W = std::min<std::size_t>(5000, c == SIZE_MAX ? SIZE_MAX : c + k);
      ConcavityReport cr = reps[k - 1];
      if (!tv.shifted) cr = shift_report(cr, k);  // sigma-shifted table, report in f-indices
      // an index n is decided when n + 1 is inside the scanned row
      const std::size_t decided_to = cr.scanned_up_to == 0 ? 0 : cr.scanned_up_to - 1;
      const bool violation = cr.first_violation && *cr.first_violation <= W;
      const bool complete = violation || decided_to >= W;
      CheckRecord r;
      r.id = "conjecture_window k=" + std::to_string(k);
      r.measure("window_end", std::to_string(W))
          .measure("decided_up_to", std::to_string(std::min(decided_to, W)))
          .measure("violation_in_window", violation ? std::to_string(*cr.first_violation) : "none")
          .measure("window_complete", yes_no(complete));
      r.envelope = "no violation for n <= window_end";
      if (!complete) r.notes = "N too small to cover the window; raise N";
      if (violation) r.notes = "violation inside the window: significant finding";
      rep.add(std::move(r));
      window.push_back({{"k", k}, {"window_end", W}, {"violation", violation}, {"complete", complete}});
    }
    rep.results["conjecture_window"] = window;
  }
  rep.results["curve"] = to_json(curve);
  rep.results["row_checksums"] = checksums_json(tv.src);
  const fs::path csv = cfg.output / ("breakpoints-" + safe_name(spec.id()) + ".csv");
  auto out = open_out(csv);
  out << "k,prefix_length,first_violation,censored\n";
  for (const auto& e : curve.entries)
    out << e.k << ',' << e.prefix_length << ',' << (e.first_violation ? std::to_string(*e.first_violation) : "")
        << ',' << (e.censored ? 1 : 0) << '\n';
  rep.volatile_info["csv"] = csv.string();
  return rep;
}

VerificationReport suite_decomposition(const RunConfig& cfg, const LogSink& log) {
  const SeriesSpec spec = SeriesSpec::parse(cfg.series);
  const std::string id = spec.id();
  VerificationReport rep;
  rep.suite = "decomposition";
  const unsigned K = cfg.K;
  const std::size_t Nid = std::min(cfg.N, cfg.identity_n);
  log("exact identities for k <= " + std::to_string(K) + ", n <= " + std::to_string(Nid));
  {
    const TruncatedSeries f = generate(spec, Nid);
    const PowerTable table = power_table(f, K, Nid, TableBudget{cfg.max_table_bytes});
    Decomposition d(f, Nid);
    for (unsigned k = 1; k <= K; ++k) {
      CheckRecord r;
      r.id = "partition_sum k=" + std::to_string(k) + " n<=" + std::to_string(Nid);
      r.status = Status::pass;
      r.envelope = "exact equality";
      for (std::size_t n = 0; n <= Nid; ++n) {
        CheckRecord one = partition_sum_identity(table, d, k, n);
        if (one.status == Status::fail) {
          r.status = Status::fail;
          r.measure("first_failure", one.id);
          for (auto& m : one.measured) r.measured.push_back(m);
          break;
        }
      }
      rep.add(std::move(r));
    }
    for (unsigned k = 2; k <= K; ++k)
      for (unsigned k0 = 2; k0 <= k; ++k0) {
        const unsigned k1 = k - k0;
        CheckRecord r;
        r.id = "second_diff k0=" + std::to_string(k0) + " k1=" + std::to_string(k1) + " n<" + std::to_string(Nid);
        r.status = Status::pass;
        r.envelope = "exact equality";
        for (long n = -1; n < static_cast<long>(Nid); ++n) {
          CheckRecord one = second_diff_identity(d, k0, k1, n);
          if (one.status == Status::fail) {
            r.status = Status::fail;
            r.measure("first_failure", one.id);
            break;
          }
        }
        rep.add(std::move(r));
      }
    const unsigned kb = std::min(K, cfg.bruteforce_k);
    for (unsigned k = 1; k <= kb; ++k) {
      CheckRecord r;
      r.id = "tuple_bruteforce k=" + std::to_string(k) + " n<=" + std::to_string(Nid);
      r.status = Status::pass;
      r.envelope = "exact equality";
      const auto sum = tuple_sum_bruteforce_sequence(d.split(), k, Nid);
      for (std::size_t n = 0; n <= Nid; ++n)
        if (sum[n] != table.coefficient(n, k)) {
          r.status = Status::fail;
          r.measure("first_mismatch_n", std::to_string(n));
          break;
        }
      if (r.status == Status::pass)
        for (unsigned k1 = 0; k1 <= k && r.status == Status::pass; ++k1) {
          std::vector<int> tuple(k, 0);
          for (unsigned i = 0; i < k1; ++i) tuple[k - 1 - i] = 1;  // zeros first, ones last
          const auto seq = a_I_bruteforce_sequence(d.split(), tuple, Nid);
          for (std::size_t n = 0; n <= Nid; ++n)
            if (seq[n] != d.a_I(k - k1, k1, static_cast<long>(n))) {
              r.status = Status::fail;
              r.measure("first_mismatch", "k1=" + std::to_string(k1) + " n=" + std::to_string(n));
              break;
            }
        }
      rep.add(std::move(r));
    }
  }

  const SeriesDefaults def = defaults_for(spec);
  const std::optional<Rational> C = cfg.C ? cfg.C : def.C;
  const Rational alpha = cfg.alpha ? *cfg.alpha : def.alpha;
  if (!C) {
    CheckRecord r;
    r.id = "residuals";
    r.notes = "skipped: no growth constant C > 1 for this series; pass --config with \"C\"";
    rep.add(std::move(r));
    return rep;
  }
  const std::size_t Nres = cfg.N;
  log("residuals with C = " + to_fraction_string(*C) + ", alpha = " + to_fraction_string(alpha) + ", n <= " +
      std::to_string(Nres));
  ResidualOptions opt{*C, alpha, static_cast<mpfr_prec_t>(cfg.precision_bits), false};
  const TruncatedSeries f = generate(spec, Nres + 1);
  Decomposition d(f, Nres);
  const ScaledSeries fs_scaled = ScaledSeries::from_series(f);
  std::vector<ResidualRecord> all;
  // sparse n-grid for the per-tuple residuals
  std::vector<std::size_t> grid;
  const std::size_t step = std::max<std::size_t>(1, Nres / 400);
  for (std::size_t n = 0; n <= Nres; ++n)
    if (n <= 200 || n % step == 0 || n == Nres) grid.push_back(n);
  std::set<unsigned> ks;
  for (unsigned k : cfg.residual_ks)
    if (k >= 2 && k <= K) ks.insert(k);
  for (unsigned k : ks) {
    log("residuals k=" + std::to_string(k));
    auto rz = one_zero_records(d, k, Nres, opt, cfg.jobs);
    all.insert(all.end(), std::make_move_iterator(rz.begin()), std::make_move_iterator(rz.end()));
    for (unsigned k0 : std::set<unsigned>{2u, k - 1}) {
      if (k0 < 1 || k0 >= k) continue;
      for (std::size_t n : grid) all.push_back(residual_at_least_one_zero(d, k0, k - k0, n, opt));
    }
    if (k >= 4)
      for (unsigned k0 : std::set<unsigned>{3u, k - 1})
        for (std::size_t n : grid) {
          if (n == 0 || n + 1 > Nres) continue;
          all.push_back(residual_aux_second_diff(d, k0, k - k0, static_cast<long>(n), opt));
        }
    if (k >= 3) {
      const ScaledSeries row = scaled_pow(fs_scaled, k, Nres + 1);
      auto dr = difference_records(row, k, Nres, opt, cfg.jobs);
      all.insert(all.end(), std::make_move_iterator(dr.begin()), std::make_move_iterator(dr.end()));
    }
    d.clear_cache();
  }
  if (all.empty()) {
    CheckRecord r;
    r.id = "residuals";
    r.notes = "skipped: no residual_ks inside 2..K";
    rep.add(std::move(r));
    return rep;
  }
  const auto fits = fit_constants(all, cfg.tolerance);
  oj fj = oj::array();
  for (const auto& fit : fits) {
    CheckRecord r;
    r.id = std::string("residual_constant ") + to_string(fit.kind) + " k=" + std::to_string(fit.k);
    r.status = Status::reported;
    r.measure("records", std::to_string(fit.records))
        .measure("n_max", std::to_string(fit.n_max))
        .measure("constant", fit.constant.str(8))
        .measure("constant_half_range", fit.constant_half.str(8))
        .measure("growth_under_doubling", num(fit.growth))
        .measure("stable", yes_no(fit.stable))
        .measure("sign_violations", std::to_string(fit.sign_violations));
    if (fit.kind == ResidualKind::second_diff || fit.kind == ResidualKind::first_diff || fit.kind == ResidualKind::zeroth)
      r.measure("window_records", std::to_string(fit.window_records))
          .measure("window_within_1_over_k2", std::to_string(fit.window_within_one_over_k2));
    r.envelope = "stable within " + num(cfg.tolerance) + " relative";
    rep.add(std::move(r));
    fj.push_back(to_json(fit));
  }
  if (is_flat(spec)) {
    // a^I_n has the closed form exactly for constant coefficients
    CheckRecord r;
    r.id = "constant_series_zero_residuals";
    r.status = Status::pass;
    r.envelope = "R and S0 exactly 0";
    for (const auto& rec : all)
      if ((rec.kind == ResidualKind::one_zero || rec.kind == ResidualKind::at_least_one_zero) && rec.sign != 0) {
        r.status = Status::fail;
        r.measure("first_nonzero", std::string(to_string(rec.kind)) + " k0=" + std::to_string(rec.k0) +
                                       " k1=" + std::to_string(rec.k1) + " n=" + std::to_string(rec.n));
        break;
      }
    rep.add(std::move(r));
  }
  rep.results["fits"] = fj;
  rep.results["C"] = to_fraction_string(*C);
  rep.results["alpha"] = to_fraction_string(alpha);
  const fs::path csv = cfg.output / ("residuals-" + safe_name(id) + ".csv");
  auto out = open_out(csv);
  write_residual_csv(out, id, all, fits);
  rep.volatile_info["csv"] = csv.string();
  return rep;
}

struct SaddleSeries {
  SeriesSpec spec;
  CoefficientMajorant majorant;
  std::string note;
};

SaddleSeries saddle_series(const RunConfig& cfg) {
  SaddleSeries s{SeriesSpec::parse(cfg.series), {}, {}};
  if (auto m = analytic_majorant(s.spec)) {
    s.majorant = *m;
    return s;
  }
  const SeriesDefaults def = defaults_for(s.spec);
  const std::optional<Rational> C = cfg.C ? cfg.C : def.C;
  if (!C) fail(ErrorKind::invalid_argument, "saddle suite on a custom series needs C (growth certificate)");
  const Rational alpha = cfg.alpha ? *cfg.alpha : def.alpha;
  const TruncatedSeries f = generate(s.spec, cfg.N);
  s.majorant = certify_growth(f, *C, alpha).get().majorant();
  s.note = "majorant from a growth certificate verified up to N = " + std::to_string(cfg.N) +
           "; tail bounds assume it continues";
  return s;
}

VerificationReport suite_saddle(const RunConfig& cfg, const LogSink& log) {
  const SaddleSeries ss = saddle_series(cfg);
  const std::string id = ss.spec.id();
  const mpfr_prec_t bits = static_cast<mpfr_prec_t>(cfg.saddle_bits);
  VerificationReport rep;
  rep.suite = "saddle";
  oj manifests = oj::array();
  for (auto [k, n] : cfg.saddle_points) {
    const std::string tag = " k=" + std::to_string(k) + " n=" + std::to_string(n);
    SaddleConfig sc;
    sc.k = k;
    sc.n = n;
    sc.precision_bits = bits;
    sc.quadrature.abs_tolerance = cfg.quad_tolerance;
    // the truncation order grows until every evaluation near r0 is certified
    std::size_t N = std::max<std::size_t>(cfg.N, 64);
    std::unique_ptr<SaddleContext> ctx;
    SaddlePoint sp;
    for (;;) {
      if (ss.spec.kind == SeriesKind::custom_file && N > cfg.N)
        fail(ErrorKind::precision, "custom series of order " + std::to_string(cfg.N) + " is too short for" + tag);
      ctx = std::make_unique<SaddleContext>(id, generate(ss.spec, N), ss.majorant, bits);
      try {
        sp = solve_r0(*ctx, n, k, sc.solver_tolerance);
        modulus_bounds_check(*ctx, sp.r0, 64);  // cheap probe of the full circle
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::precision || N >= (std::size_t(1) << 22)) throw;
        N *= 2;
        log("raising truncation to N = " + std::to_string(N) + " for" + tag);
      }
    }
    log("saddle" + tag + ": r0 = " + sp.r0.str(20) + ", N = " + std::to_string(N));
    // ctx's tail tolerance is fixed; keep N for the manifest
    const ConcavityRun run = concavity_integral(*ctx, sc, second_deriv_alphas(n));
    VerificationReport part = f_second_deriv_report(*ctx, sc, run);
    for (auto& r : part.records) rep.add(std::move(r));

    const Real& r0 = run.saddle.r0;
    const Real one_minus = 1.0 - r0;
    if (is_flat(ss.spec)) {
      const Real exact(Rational(n, n + k), bits);
      const Real diff = abs(r0 - exact);
      CheckRecord r;
      r.id = "r0_closed_form" + tag;
      r.measure("r0", r0.str(25)).measure("n/(n+k)", exact.str(25)).measure("abs_diff", diff.str(6));
      r.measure("within_1e-12", yes_no(diff < 1e-12));
      r.envelope = "|r0 - n/(n+k)| <= 1e-12";
      rep.add(std::move(r));
    }
    {
      // central difference: error term h^2 psi'''(0)/6
      const Real A = A_of_r(*ctx, r0).value;
      const Real h = one_minus * 1e-3;
      const Real fd = psi_first_derivative_fd(*ctx, r0, h);
      const Real fd_half = psi_first_derivative_fd(*ctx, r0, h * 0.5);
      const Real p3 = psi_third_derivative(*ctx, r0);
      const Real predicted = abs(p3) * h * h / 6.0;
      const Real err = abs(fd - A), err_half = abs(fd_half - A);
      CheckRecord r;
      r.id = "psi_prime_equals_A" + tag;
      r.measure("A", A.str(20))
          .measure("fd", fd.str(20))
          .measure("abs_error", err.str(6))
          .measure("predicted_h2_term", predicted.str(6))
          .measure("error_ratio_h_over_h_half", err_half.sign() == 0 ? "inf" : (err / err_half).str(6))
          .measure("second_order", yes_no(err <= predicted * 2.0 + 1e-25));
      r.envelope = "|fd - A| <= 2 h^2 |psi'''| / 6";
      rep.add(std::move(r));
      const Real p3fd = psi_third_derivative_fd(*ctx, r0, one_minus * 1e-2);
      CheckRecord t;
      t.id = "psi_third_derivative" + tag;
      t.measure("analytic", p3.str(15)).measure("finite_difference", p3fd.str(15));
      t.measure("relative_difference", abs((p3fd - p3) / p3).str(6));
      rep.add(std::move(t));
    }
    {
      // F(n) = 2 pi r0^n a_{n,k} / f(r0)^k from the exact coefficient
      const TruncatedSeries fn = generate(ss.spec, n);
      const ScaledSeries pk = scaled_pow(ScaledSeries::from_series(fn), k, n);
      const Real a_nk(pk.coefficient(n), bits + 64);
      const Real f0 = ctx->real_jet(r0, 0).d[0];
      const Real expected = pi(bits) * 2.0 * pow(r0, static_cast<long>(n)) * a_nk / pow(f0, static_cast<long>(k));
      const Real got = run.splits[1].total[0];
      CheckRecord r;
      r.id = "cauchy_coefficient_crosscheck" + tag;
      r.measure("F_n", got.str(20)).measure("2pi r0^n a_nk / f(r0)^k", expected.str(20));
      r.measure("relative_difference", abs((got - expected) / expected).str(6));
      rep.add(std::move(r));
    }
    {
      SaddleConfig tight = sc;
      tight.quadrature.abs_tolerance = sc.quadrature.abs_tolerance / 100;
      tight.quadrature.order = sc.quadrature.order + 10;  // different nodes, so agreement is not by construction
      const ConcavityRun run2 = concavity_integral(*ctx, tight, second_deriv_alphas(n));
      double worst = 0;
      for (std::size_t j = 0; j < run.splits.size(); ++j)
        for (unsigned w = 0; w < 2; ++w) {
          const Real& a = run.splits[j].total[w];
          const Real& b = run2.splits[j].total[w];
          if (b.sign() != 0) worst = std::max(worst, abs((a - b) / b).to_double());
        }
      CheckRecord r;
      r.id = "quadrature_stability" + tag;
      r.measure("max_relative_change", num(worst))
          .measure("tolerance", num(sc.quadrature.abs_tolerance))
          .measure("tightened_tolerance", num(tight.quadrature.abs_tolerance))
          .measure("tightened_order", std::to_string(tight.quadrature.order))
          .measure("within_1e-6", yes_no(worst <= 1e-6));
      r.envelope = "relative change <= 1e-6";
      rep.add(std::move(r));
    }
    {
      CheckRecord r;
      r.id = "constant_fits" + tag;
      r.measure("C2_fit", run.arg.C2_fit.str(8))
          .measure("C2_limit", run.arg.limit.str(8))
          .measure("C2_stable", yes_no(run.arg.stable))
          .measure("C1_fit", run.modulus.C1_fit.str(8))
          .measure("c8_fit", run.modulus.c8_fit.str(8))
          .measure("modulus_stable", yes_no(run.modulus.stable))
          .measure("modulus_exceeds_f_r", yes_no(run.modulus.exceeded_f_r))
          .measure("implied_C10", run.saddle.implied_C10.str(8))
          .measure("implied_c6", run.saddle.implied_c6.str(8))
          .measure("A_monotone_on_bracket", yes_no(run.saddle.monotone_on_bracket));
      if (run.modulus.exceeded_f_r) r.notes = "certified |f(r e^{i theta})| above f(r): evaluator bug";
      rep.add(std::move(r));
      if (run.modulus.exceeded_f_r) {
        CheckRecord m;
        m.id = "modulus_at_most_f_r" + tag;
        m.status = Status::fail;
        m.envelope = "|f(r e^{i theta})| <= f(r) for non-negative coefficients";
        rep.add(std::move(m));
      }
    }
    {
      oj db = oj::array();
      for (unsigned i = 0; i <= 3; ++i) {
        auto b = derivative_bounds(*ctx, r0, i);
        db.push_back({{"i", i}, {"scaled", b.scaled.str(10)}, {"lower_reference", b.lower_reference.str(10)},
                      {"above_lower", b.within_reference}});
      }
      oj man = part.results;
      man["N"] = N;
      man["derivative_bounds"] = db;
      const fs::path mp = cfg.output / ("saddle-" + safe_name(id) + "-k" + std::to_string(k) + "-n" +
                                        std::to_string(n) + ".json");
      auto out = open_out(mp);
      out << man.dump(2) << '\n';
      const fs::path pp = cfg.output / ("psi-" + safe_name(id) + "-k" + std::to_string(k) + "-n" +
                                        std::to_string(n) + ".csv");
      auto pout = open_out(pp);
      write_plot_csv(pout, *ctx, r0, min(pi(bits) * 0.999, one_minus * 4.0), 400);
      manifests.push_back(man);
    }
  }
  if (!ss.note.empty()) rep.results["note"] = ss.note;
  rep.results["manifests"] = manifests;
  return rep;
}

VerificationReport suite_nk(const RunConfig& cfg, const LogSink& log) {
  VerificationReport rep;
  rep.suite = "nk";
  const std::size_t N = cfg.N;
  if (estimate_q_table_bytes(N) > cfg.max_table_bytes)
    fail(ErrorKind::resource, "Q table for N = " + std::to_string(N) + " needs about " +
                                  std::to_string(estimate_q_table_bytes(N) >> 20) + " MiB; lower N or raise max_table_bytes");
  log("Q_n by recurrence, n <= " + std::to_string(N));
  const QTable table = q_recurrence(N);
  {
    const unsigned nb = static_cast<unsigned>(std::min<std::size_t>(N, 12));
    CheckRecord r;
    r.id = "recurrence_vs_bruteforce n<=" + std::to_string(nb);
    r.status = Status::pass;
    r.envelope = "exact equality";
    for (unsigned n = 0; n <= nb; ++n)
      if (!(q_bruteforce(n) == table.polys[n])) {
        r.status = Status::fail;
        r.measure("first_mismatch_n", std::to_string(n));
        break;
      }
    rep.add(std::move(r));
  }
  {
    const std::size_t Ns = std::min(N, cfg.nk_spotcheck_N);
    QTable small;
    small.polys.assign(table.polys.begin(), table.polys.begin() + static_cast<long>(Ns) + 1);
    const std::vector<Rational> zs = {Rational(0), Rational(1), Rational(-1)};
    for (auto& r : identity_spotcheck(small, zs)) rep.add(std::move(r));
    // z = 1: the product is prod (1 - q^m)^{-2}, the square of the partition series
    const auto p = partition_numbers(Ns);
    const auto prod = nk_product_coefficients(Ns, Rational(1));
    CheckRecord r;
    r.id = "z1_partition_self_convolution N=" + std::to_string(Ns);
    r.status = Status::pass;
    r.envelope = "exact equality";
    for (std::size_t n = 0; n <= Ns; ++n) {
      Integer s = 0;
      for (std::size_t j = 0; j <= n; ++j) s += p[j] * p[n - j];
      if (prod[n] != Rational(s)) {
        r.status = Status::fail;
        r.measure("first_mismatch_n", std::to_string(n));
        break;
      }
    }
    rep.add(std::move(r));
  }
  {
    const auto p = partition_numbers(N);
    CheckRecord z0, zm1, deg;
    z0.id = "Q_n(0)=p(n) n<=" + std::to_string(N);
    zm1.id = "Q_n(-1)=0 n<=" + std::to_string(N);
    deg.id = "degree_Q_n=n n<=" + std::to_string(N);
    for (CheckRecord* c : {&z0, &zm1, &deg}) {
      c->status = Status::pass;
      c->envelope = "exact equality";
    }
    for (std::size_t n = 0; n <= N; ++n) {
      const auto& q = table.polys[n];
      if (z0.status == Status::pass && q.coeffs[0] != Rational(p[n])) {
        z0.status = Status::fail;
        z0.measure("first_mismatch_n", std::to_string(n));
      }
      if (zm1.status == Status::pass && n >= 1 && q.eval(Rational(-1)) != 0) {
        zm1.status = Status::fail;
        zm1.measure("first_mismatch_n", std::to_string(n));
      }
      if (deg.status == Status::pass && q.degree() != n) {
        deg.status = Status::fail;
        deg.measure("first_mismatch_n", std::to_string(n));
      }
    }
    rep.add(std::move(z0));
    rep.add(std::move(zm1));
    rep.add(std::move(deg));
  }
  const auto scan = unimodality_scan(table, cfg.jobs);
  std::vector<std::size_t> bad, nonpositive;
  oj entries = oj::array();
  for (const auto& e : scan) {
    if (!e.unimodal.unimodal) bad.push_back(e.n);
    if (!e.all_positive) nonpositive.push_back(e.n);
    entries.push_back(to_json(e));
  }
  {
    CheckRecord r;
    r.id = "unimodality n<=" + std::to_string(N);
    std::string list;
    for (std::size_t n : bad) list += (list.empty() ? "" : " ") + std::to_string(n);
    r.measure("scanned", std::to_string(scan.size()))
        .measure("unimodal", std::to_string(scan.size() - bad.size()))
        .measure("not_unimodal", list.empty() ? "none" : list);
    r.envelope = "strict unimodality";
    rep.add(std::move(r));
  }
  for (std::size_t n : bad) {
    const auto& e = scan[n];
    CheckRecord r;
    r.id = "not_unimodal n=" + std::to_string(n);
    r.measure("first_offense", e.unimodal.first_offense ? std::to_string(e.unimodal.first_offense->first) + "," +
                                                              std::to_string(e.unimodal.first_offense->second)
                                                        : "none")
        .measure("bruteforce_confirms",
                 e.bruteforce_confirms ? yes_no(*e.bruteforce_confirms) : "beyond brute-force reach");
    r.notes = "flagged";
    rep.add(std::move(r));
  }
  {
    CheckRecord r;
    r.id = "positive_coefficients n<=" + std::to_string(N);
    std::string list;
    for (std::size_t n : nonpositive) list += (list.empty() ? "" : " ") + std::to_string(n);
    r.measure("non_positive_at", list.empty() ? "none" : list);
    if (!nonpositive.empty()) r.notes = "non-positive coefficient: major finding";
    rep.add(std::move(r));
  }
  rep.results["scan"] = entries;
  const fs::path qp = cfg.output / ("q-table-N" + std::to_string(N) + ".json");
  auto out = open_out(qp);
  out << to_json(table).dump() << '\n';
  rep.volatile_info["q_table"] = qp.string();
  return rep;
}

VerificationReport suite_growth(const RunConfig& cfg, const LogSink& log) {
  const SeriesSpec spec = SeriesSpec::parse(cfg.series);
  VerificationReport rep;
  rep.suite = "growth";
  const TruncatedSeries f = generate(spec, cfg.N);
  const SeriesDefaults def = defaults_for(spec);
  const std::optional<Rational> C = cfg.C ? cfg.C : def.C;
  if (C) {
    const auto avg = check_average_bound(f, *C);
    CheckRecord r;
    r.id = "average_bound C=" + to_fraction_string(*C);
    r.measure("holds", yes_no(avg.holds))
        .measure("first_violation", opt_index(avg.first_violation))
        .measure("max_average", avg.max_average)
        .measure("argmax", std::to_string(avg.argmax))
        .measure("scanned_up_to", std::to_string(avg.scanned_up_to));
    rep.add(std::move(r));
    std::vector<Rational> alphas;
    if (cfg.alpha)
      alphas = {*cfg.alpha};
    else
      alphas = {Rational(1, 10), Rational(1, 5), Rational(1, 2)};
    for (const Rational& a : alphas) {
      const auto scan = certify_growth(f, *C, a);
      CheckRecord g;
      g.id = "growth_certificate C=" + to_fraction_string(*C) + " alpha=" + to_fraction_string(a);
      g.measure("certified", yes_no(scan.ok))
          .measure("first_negative", opt_index(scan.first_negative))
          .measure("D", decimal(scan.D, 12))
          .measure("D_half_range", decimal(scan.D_half, 12))
          .measure("growth_base", growth_base(*C, a).str(15));
      if (!scan.ok) g.notes = scan.reason;
      rep.add(std::move(g));
    }
  }
  if (is_sigma(spec)) {
    log("sigma partial-sum bounds for n <= " + std::to_string(cfg.N));
    CheckRecord r;
    r.id = "sigma_partial_sum_bounds n<=" + std::to_string(cfg.N);
    r.envelope = "pi^2/6 (n+1) - log(n+1) - 1 <= S <= pi^2/6 (n+1), directed rounding";
    try {
      const auto b = sigma_partial_sum_bounds(cfg.N, static_cast<mpfr_prec_t>(cfg.precision_bits));
      r.status = b.all_hold ? Status::pass : Status::fail;
      r.measure("first_failure", opt_index(b.first_failure))
          .measure("min_upper_margin", b.min_upper_margin.str(10))
          .measure("argmin_upper", std::to_string(b.argmin_upper))
          .measure("min_lower_margin", b.min_lower_margin.str(10))
          .measure("argmin_lower", std::to_string(b.argmin_lower));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::precision) throw;
      r.status = Status::reported;
      r.notes = std::string("undecided: ") + e.what();
    }
    rep.add(std::move(r));
    const auto neg = check_average_bound(f, Rational(164493, 100000));
    CheckRecord n;
    n.id = "average_bound_negative_control C=164493/100000";
    n.measure("holds", yes_no(neg.holds)).measure("first_violation", opt_index(neg.first_violation));
    n.notes = "C below pi^2/6; a violation is expected";
    rep.add(std::move(n));
  }
  {
    const Real lo = eta0(256, MPFR_RNDD), hi = eta0(256, MPFR_RNDU);
    CheckRecord r;
    r.id = "eta0_interval";
    r.status = (lo > 1.59 && hi < 1.60) ? Status::pass : Status::fail;
    r.measure("lower", lo.str(20)).measure("upper", hi.str(20));
    r.envelope = "1.59 < eta0 < 1.60";
    rep.add(std::move(r));
    // growth bases as C decreases to pi^2/6 and alpha to 0
    const unsigned digits[] = {2, 3, 4, 6};
    const Rational alphas[] = {Rational(1, 2), Rational(1, 5), Rational(1, 10), Rational(1, 20)};
    oj seq = oj::array();
    bool monotone = true, below = true;
    Real prev(0.0, 256);
    for (int i = 0; i < 4; ++i) {
      const Rational Ci = rational_above_pi2_over_6(digits[i]);
      const Real gb = growth_base(Ci, alphas[i]);
      if (i > 0 && !(gb > prev)) monotone = false;
      if (!(gb < lo)) below = false;
      oj e{{"C", to_fraction_string(Ci)}, {"alpha", to_fraction_string(alphas[i])}, {"growth_base", gb.str(15)}};
      if (is_sigma(spec)) e["certified_on_series"] = certify_growth(f, Ci, alphas[i]).ok;
      seq.push_back(e);
      prev = gb;
    }
    CheckRecord c;
    c.id = "growth_base_convergence";
    c.measure("monotone_increasing", yes_no(monotone))
        .measure("below_eta0", yes_no(below))
        .measure("last", prev.str(15))
        .measure("eta0_minus_last", (lo - prev).str(6));
    rep.add(std::move(c));
    rep.results["growth_base_sequence"] = seq;
  }
  return rep;
}

}  // namespace

void write_report(const fs::path& path, const VerificationReport& report) {
  auto out = open_out(path);
  out << report.to_json().dump(2) << '\n';
  if (!out) fail(ErrorKind::resource, "write failed for " + path.string());
}

VerificationReport cmd_check(const RunConfig& cfg, std::string_view suite, const LogSink& log) {
  const auto& names = check_suites();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    std::string list;
    for (const auto& s : names) list += (list.empty() ? "" : ", ") + s;
    fail(ErrorKind::invalid_argument, "unknown suite '" + std::string(suite) + "'; choose one of: " + list);
  }
  cfg.validate();
  Stopwatch sw;
  VerificationReport rep;
  if (suite == "prefix") rep = suite_prefix(cfg, log);
  else if (suite == "breakpoints") rep = suite_breakpoints(cfg, log);
  else if (suite == "decomposition") rep = suite_decomposition(cfg, log);
  else if (suite == "saddle") rep = suite_saddle(cfg, log);
  else if (suite == "nk") rep = suite_nk(cfg, log);
  else rep = suite_growth(cfg, log);
  rep.config = cfg.to_json();
  rep.config.erase("cache_dir");
  rep.config.erase("output");
  rep.config.erase("jobs");
  rep.volatile_info["timestamp"] = utc_now();
  rep.volatile_info["elapsed_seconds"] = sw.seconds();
  rep.volatile_info["jobs"] = cfg.jobs;
  write_report(cfg.output / ("check-" + std::string(suite) + ".json"), rep);
  return rep;
}

// ---------------------------------------------------------------- constants

namespace {

const char* constant_label(ResidualKind k) {
  switch (k) {
    case ResidualKind::one_zero: return "C1";
    case ResidualKind::at_least_one_zero: return "C0";
    case ResidualKind::aux_second_diff: return "C2";
    case ResidualKind::second_diff: return "E2";
    case ResidualKind::first_diff: return "E1";
    case ResidualKind::zeroth: return "E0";
  }
  return "?";
}

}  // namespace

VerificationReport cmd_constants(const RunConfig& cfg, const LogSink& log) {
  Stopwatch sw;
  std::vector<fs::path> csvs, manifests;
  std::error_code ec;
  if (fs::is_directory(cfg.output, ec))
    for (const auto& e : fs::directory_iterator(cfg.output)) {
      const std::string name = e.path().filename().string();
      if (name.rfind("residuals-", 0) == 0 && e.path().extension() == ".csv") csvs.push_back(e.path());
      if (name.rfind("saddle-", 0) == 0 && e.path().extension() == ".json") manifests.push_back(e.path());
    }
  std::sort(csvs.begin(), csvs.end());
  std::sort(manifests.begin(), manifests.end());
  if (csvs.empty() && manifests.empty())
    fail(ErrorKind::domain, "no residual dumps or saddle manifests under " + cfg.output.string() +
                                "; run `logconc check decomposition` (residual constants) and `logconc check saddle`"
                                " (saddle constants) with the same --out first");
  VerificationReport rep;
  rep.suite = "constants";
  oj table = oj::array();
  for (const auto& p : csvs) {
    std::ifstream in(p);
    if (!in) fail(ErrorKind::io, "cannot read " + p.string());
    log("reading " + p.string());
    const auto rows = read_residual_csv(in, p.filename().string());
    struct Acc {
      double c = 0, c_half = 0;
      long n_max = 0;
      std::size_t count = 0, negative = 0;
      bool all_zero = true;
      std::vector<std::pair<long, double>> q;
    };
    std::map<std::tuple<std::string, int, unsigned>, Acc> groups;
    for (const auto& r : rows) {
      Acc& a = groups[{r.series_id, static_cast<int>(r.kind), r.k0 + r.k1}];
      ++a.count;
      a.n_max = std::max(a.n_max, r.n);
      if (r.residual != 0) a.all_zero = false;
      if (!r.pass) ++a.negative;
      if (r.envelope > 0) a.q.emplace_back(r.n, std::abs(r.residual) / r.envelope);
    }
    for (auto& [key, a] : groups) {
      for (auto [n, q] : a.q) {
        a.c = std::max(a.c, q);
        if (2 * n <= a.n_max) a.c_half = std::max(a.c_half, q);
      }
      const double growth = a.c_half > 0 ? a.c / a.c_half : (a.c > 0 ? INFINITY : 1.0);
      const bool stable = growth <= 1 + cfg.tolerance;
      const auto kind = static_cast<ResidualKind>(std::get<1>(key));
      CheckRecord r;
      r.id = std::string("fitted ") + constant_label(kind) + " (" + to_string(kind) + ") series=" + std::get<0>(key) +
             " k=" + std::to_string(std::get<2>(key));
      std::ostringstream c, ch;
      c.precision(8);
      ch.precision(8);
      c << a.c;
      ch << a.c_half;
      r.measure("constant", a.all_zero ? "0" : c.str())
          .measure("constant_half_range", a.all_zero ? "0" : ch.str())
          .measure("growth_under_doubling", num(growth))
          .measure("stable", yes_no(stable))
          .measure("records", std::to_string(a.count))
          .measure("records_outside_envelope", std::to_string(a.negative))
          .measure("all_exactly_zero", yes_no(a.all_zero));
      if (!stable) r.notes = "instability flagged: constant keeps growing when the n-range doubles";
      rep.add(std::move(r));
      table.push_back({{"series_id", std::get<0>(key)},
                       {"constant", constant_label(kind)},
                       {"lemma", to_string(kind)},
                       {"k", std::get<2>(key)},
                       {"value", a.all_zero ? 0.0 : a.c},
                       {"half_range", a.all_zero ? 0.0 : a.c_half},
                       {"stable", stable}});
    }
  }
  struct SaddleAcc {
    double lo = INFINITY, hi = -INFINITY;
    std::size_t points = 0;
  };
  std::map<std::pair<std::string, std::string>, SaddleAcc> saddle;
  for (const auto& p : manifests) {
    std::ifstream in(p);
    nlohmann::json m;
    try {
      in >> m;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::format, p.string() + ": " + e.what());
    }
    for (const char* key : {"C2_fit", "C1_fit", "c8_fit", "implied_C10", "implied_c6"}) {
      if (!m.contains(key)) continue;
      const double v = std::stod(m[key].get<std::string>());
      auto& a = saddle[{m.value("series_id", "?"), key}];
      a.lo = std::min(a.lo, v);
      a.hi = std::max(a.hi, v);
      ++a.points;
    }
  }
  for (const auto& [key, a] : saddle) {
    CheckRecord r;
    r.id = "saddle " + key.second + " series=" + key.first;
    const double spread = a.lo > 0 ? a.hi / a.lo - 1 : INFINITY;
    r.measure("min", num(a.lo))
        .measure("max", num(a.hi))
        .measure("points", std::to_string(a.points))
        .measure("relative_spread", num(spread));
    table.push_back({{"series_id", key.first}, {"constant", key.second}, {"min", a.lo}, {"max", a.hi}});
    rep.add(std::move(r));
  }
  rep.results["constants"] = table;
  rep.config = {{"tolerance", cfg.tolerance}};
  rep.volatile_info["timestamp"] = utc_now();
  rep.volatile_info["elapsed_seconds"] = sw.seconds();
  oj srcs = oj::array();
  for (const auto& p : csvs) srcs.push_back(p.string());
  for (const auto& p : manifests) srcs.push_back(p.string());
  rep.volatile_info["sources"] = srcs;
  write_report(cfg.output / "constants.json", rep);
  return rep;
}

// ---------------------------------------------------------------- cache

std::vector<CacheEntry> cache_list(const fs::path& cache_dir) {
  std::vector<CacheEntry> out;
  std::error_code ec;
  if (!fs::is_directory(cache_dir, ec)) return out;
  for (const auto& e : fs::directory_iterator(cache_dir)) {
    if (e.path().extension() != ".json") continue;
    CacheEntry c;
    c.path = e.path();
    c.bytes = fs::file_size(e.path(), ec);
    // only the header is needed; it precedes the rows
    std::ifstream in(e.path());
    std::string head(4096, '\0');
    in.read(head.data(), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<std::size_t>(in.gcount()));
    const auto rows = head.find("\"rows\"");
    try {
      if (rows == std::string::npos) fail(ErrorKind::format, "no header");
      std::string h = head.substr(0, rows);
      while (!h.empty() && (h.back() == ',' || std::isspace(static_cast<unsigned char>(h.back())))) h.pop_back();
      const auto j = nlohmann::json::parse(h + "}");
      c.series_id = j.at("series_id").get<std::string>();
      c.K = j.at("K").get<unsigned>();
      c.N = j.at("N").get<std::size_t>();
      c.format_version = j.at("format_version").get<int>();
    } catch (...) {
      c.readable = false;
    }
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const CacheEntry& a, const CacheEntry& b) { return a.path < b.path; });
  return out;
}

std::size_t cache_remove(const fs::path& cache_dir, std::optional<std::string> series_id, std::optional<unsigned> K,
                         std::optional<std::size_t> N) {
  if (series_id) series_id = SeriesSpec::parse(*series_id).id();
  std::size_t removed = 0;
  for (const auto& e : cache_list(cache_dir)) {
    const bool match = (!series_id || (e.readable && e.series_id == *series_id)) && (!K || (e.readable && e.K == *K)) &&
                       (!N || (e.readable && e.N == *N));
    if (!match) continue;
    std::error_code ec;
    if (fs::remove(e.path, ec)) ++removed;
    if (ec) fail(ErrorKind::io, "cannot remove " + e.path.string() + ": " + ec.message());
  }
  return removed;
}

}  // namespace logconc
