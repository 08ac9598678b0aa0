#include "topk/csv.hpp"

#include <cstdio>
#include <fstream>

namespace topk {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

namespace {

void write_row(const std::vector<std::string>& row, std::ostream& out) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) {
      out << ',';
    }
    out << csv_escape(row[i]);
  }
  out << "\r\n";
}

}  // namespace

void write_csv(const CsvTable& table, std::ostream& out) {
  write_row(table.header, out);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw std::invalid_argument("CSV row width does not match the header");
    }
    write_row(row, out);
  }
}

void emit_csv(const CsvTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FileError("cannot open '" + path.string() + "' for writing");
  }
  write_csv(table, out);
  out.flush();
  if (!out) {
    throw FileError("failed while writing '" + path.string() + "'");
  }
}

}  // namespace topk
