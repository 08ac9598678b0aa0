#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace topk {

class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// 12 significant digits.
std::string format_double(double x);
// Quotes a field when it holds a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

// RFC 4180: CRLF line ends, header first.
void write_csv(const CsvTable& table, std::ostream& out);
// Throws FileError if the file cannot be opened or fully written.
void emit_csv(const CsvTable& table, const std::filesystem::path& path);

}  // namespace topk
