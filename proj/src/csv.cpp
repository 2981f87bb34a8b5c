#include "sphbif/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sphbif/errors.hpp"

namespace sphbif::io {

namespace {

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error("parse_double: not a number: '" + std::string(s) + "'");
  return value;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  add_row(header);
}

void CsvWriter::add_row(std::initializer_list<double> row) {
  add_numeric_row(std::vector<double>(row));
}

void CsvWriter::add_numeric_row(const std::vector<double>& row) {
  std::vector<std::string> fields;
  fields.reserve(row.size());
  for (double x : row) fields.push_back(format_double(x));
  add_row(fields);
}

void CsvWriter::add_row(const std::vector<std::string>& row) {
  if (row.size() != width_) throw LengthMismatch("CsvWriter: row width differs from header");
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += quote_if_needed(row[i]);
  }
  buffer_ += "\r\n";
}

std::string CsvWriter::str() const { return buffer_; }

void CsvWriter::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << buffer_;
  if (!out) throw Error("write failed: " + path.string());
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error("CSV has no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::numeric_column(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (c >= row.size()) throw LengthMismatch("CSV row shorter than header");
    out.push_back(parse_double(row[c]));
  }
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_record(line);
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  if (first) throw Error("empty CSV: " + path.string());
  return table;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

}  // namespace sphbif::io
