#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "logconc/series.hpp"

namespace logconc {

inline constexpr int kTableFormatVersion = 1;

/// {"format_version", "series_id", "K", "N", "rows": [["num/den", ...], ...]}
/// Rows are written streaming, so no JSON document is ever built in memory.
void write_table_json(std::ostream& out, const PowerTable& table, const std::string& series_id);

struct TableFile {
  int format_version = 0;
  std::string series_id;
  unsigned K = 0;
  std::size_t N = 0;
  PowerTable table;
};

/// Throws Error(format) on malformed input, including a header that
/// disagrees with the rows it carries.
TableFile read_table_json(std::istream& in);

/// 64-bit checksum of one row's canonical strings.
std::uint64_t row_checksum(const TruncatedSeries& row);

/// File name used in the cache directory for (series_id, K, N).
std::string cache_file_name(const std::string& series_id, unsigned K, std::size_t N);

void save_table(const std::filesystem::path& path, const PowerTable& table, const std::string& series_id);
TableFile load_table(const std::filesystem::path& path);

}  // namespace logconc
