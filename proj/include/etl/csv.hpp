#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace etl {

// In-memory CSV table. The on-disk form is the canonical serialization used
// by every persisted table: UTF-8, one header row, RFC 4180 quoting (a field
// is quoted only when it contains a comma, quote, CR or LF), LF line endings,
// trailing newline. Empty fields mean "absent".
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based file line of each data row, for error reporting. Line 1 is the
  // header. Synthesized tables leave this empty.
  std::vector<std::size_t> line_numbers;

  int column_index(const std::string& name) const;  // -1 when missing
};

CsvTable read_csv_file(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text, const std::string& origin);

std::string to_csv(const CsvTable& table);

// Writes atomically (temp file + rename in the target directory).
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);

std::string csv_escape(const std::string& field);

}  // namespace etl
