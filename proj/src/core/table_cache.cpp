#include "logconc/table_cache.hpp"

#include <fstream>
#include <json.hpp>
#include <optional>

#include "logconc/error.hpp"

namespace logconc {

namespace {

using json = nlohmann::json;

class TableSax : public nlohmann::json_sax<json> {
 public:
  bool null() override { return scalar(); }
  bool boolean(bool) override { return scalar(); }
  bool number_integer(number_integer_t v) override { return number(static_cast<long long>(v)); }
  bool number_unsigned(number_unsigned_t v) override { return number(static_cast<long long>(v)); }
  bool number_float(number_float_t, const string_t&) override { return scalar(); }
  bool binary(binary_t&) override { return scalar(); }
  bool string(string_t& s) override {
    if (depth_ == 3 && in_rows_) {
      current_.push_back(parse_rational(s));
      return true;
    }
    if (depth_ == 1 && key_ == "series_id") series_id = s;
    return true;
  }
  bool start_object(std::size_t) override {
    ++depth_;
    return true;
  }
  bool end_object() override {
    --depth_;
    return true;
  }
  bool start_array(std::size_t) override {
    ++depth_;
    if (depth_ == 2 && key_ == "rows") in_rows_ = true;
    if (depth_ == 3 && in_rows_) current_.clear();
    return true;
  }
  bool end_array() override {
    if (depth_ == 3 && in_rows_) rows.push_back(std::move(current_));
    if (depth_ == 2 && in_rows_) in_rows_ = false;
    --depth_;
    return true;
  }
  bool key(string_t& k) override {
    if (depth_ == 1) key_ = k;
    return true;
  }
  bool parse_error(std::size_t position, const std::string&, const nlohmann::detail::exception& ex) override {
    fail(ErrorKind::format, "table cache parse error at byte " + std::to_string(position) + ": " + ex.what());
  }

  std::optional<long long> format_version, K, N;
  std::string series_id;
  std::vector<std::vector<Rational>> rows;

 private:
  bool scalar() { return true; }
  bool number(long long v) {
    if (depth_ != 1) return true;
    if (key_ == "format_version") format_version = v;
    if (key_ == "K") K = v;
    if (key_ == "N") N = v;
    return true;
  }

  int depth_ = 0;
  bool in_rows_ = false;
  std::string key_;
  std::vector<Rational> current_;
};

}  // namespace

void write_table_json(std::ostream& out, const PowerTable& table, const std::string& series_id) {
  out << "{\"format_version\":" << kTableFormatVersion << ",\"series_id\":" << json(series_id).dump()
      << ",\"K\":" << table.K() << ",\"N\":" << table.N() << ",\"rows\":[";
  for (unsigned k = 1; k <= table.K(); ++k) {
    out << (k > 1 ? ",\n[" : "\n[");
    const auto& row = table.row(k);
    for (std::size_t n = 0; n <= row.order(); ++n) out << (n ? ",\"" : "\"") << to_fraction_string(row[n]) << '"';
    out << ']';
  }
  out << "]}\n";
}

TableFile read_table_json(std::istream& in) {
  TableSax sax;
  nlohmann::json::sax_parse(in, &sax);
  if (!sax.format_version || !sax.K || !sax.N) fail(ErrorKind::format, "table cache header incomplete");
  if (*sax.format_version != kTableFormatVersion)
    fail(ErrorKind::format, "unsupported table format_version " + std::to_string(*sax.format_version));
  if (*sax.K < 1 || *sax.N < 0 || static_cast<long long>(sax.rows.size()) != *sax.K)
    fail(ErrorKind::format, "table cache header disagrees with its rows");
  std::vector<TruncatedSeries> rows;
  for (auto& r : sax.rows) {
    if (static_cast<long long>(r.size()) != *sax.N + 1) fail(ErrorKind::format, "table cache row has wrong length");
    rows.emplace_back(std::move(r));
  }
  TruncatedSeries base = rows.front();
  return TableFile{kTableFormatVersion, sax.series_id, static_cast<unsigned>(*sax.K), static_cast<std::size_t>(*sax.N),
                   PowerTable(std::move(base), std::move(rows))};
}

std::uint64_t row_checksum(const TruncatedSeries& row) {
  std::uint64_t h = fnv1a("");
  for (const Rational& q : row.coeffs()) {
    h = fnv1a(to_fraction_string(q), h);
    h = fnv1a(",", h);
  }
  return h;
}

std::string cache_file_name(const std::string& series_id, unsigned K, std::size_t N) {
  std::string safe;
  for (char c : series_id) safe += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
  // distinct ids can sanitize to the same name; the hash keeps them apart
  char tag[17];
  std::snprintf(tag, sizeof tag, "%016llx", static_cast<unsigned long long>(fnv1a(series_id)));
  return safe + "_" + std::string(tag, 8) + "_K" + std::to_string(K) + "_N" + std::to_string(N) + "_v" +
         std::to_string(kTableFormatVersion) + ".json";
}

void save_table(const std::filesystem::path& path, const PowerTable& table, const std::string& series_id) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write " + tmp.string());
    write_table_json(out, table, series_id);
    out.flush();
    if (!out) fail(ErrorKind::resource, "write failed for " + tmp.string() + " (disk full?)");
  }
  std::filesystem::rename(tmp, path);
}

TableFile load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot read " + path.string());
  return read_table_json(in);
}

}  // namespace logconc
