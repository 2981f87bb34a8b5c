#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sphbif::io {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

/// Minimal RFC-4180 writer. Rows are buffered and flushed on save() so a
/// failed run never leaves a half-written file behind.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(std::initializer_list<double> row);
  void add_row(const std::vector<std::string>& row);
  void add_numeric_row(const std::vector<double>& row);

  std::string str() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t width_;
  std::string buffer_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  std::vector<double> numeric_column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
double parse_double(std::string_view s);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace sphbif::io
