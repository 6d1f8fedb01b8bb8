#include "etl/csv.hpp"

#include <fstream>
#include <sstream>

#include "etl/errors.hpp"

namespace etl {

namespace {

// One pass over the whole text; handles quoted fields spanning lines.
struct Parser {
  const std::string& text;
  const std::string& origin;
  std::size_t pos = 0;
  std::size_t line = 1;

  bool done() const { return pos >= text.size(); }

  std::vector<std::string> next_record() {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    while (pos < text.size()) {
      char c = text[pos];
      if (quoted) {
        if (c == '"') {
          if (pos + 1 < text.size() && text[pos + 1] == '"') {
            field += '"';
            pos += 2;
          } else {
            quoted = false;
            ++pos;
          }
        } else {
          if (c == '\n') ++line;
          field += c;
          ++pos;
        }
        continue;
      }
      switch (c) {
        case '"':
          if (!field.empty())
            throw Error(ErrorCode::ParseError,
                        origin + ":" + std::to_string(line) + ": stray quote");
          quoted = true;
          ++pos;
          break;
        case ',':
          fields.push_back(std::move(field));
          field.clear();
          ++pos;
          break;
        case '\r':
          ++pos;
          break;
        case '\n':
          ++pos;
          ++line;
          fields.push_back(std::move(field));
          return fields;
        default:
          field += c;
          ++pos;
      }
    }
    if (quoted)
      throw Error(ErrorCode::ParseError,
                  origin + ":" + std::to_string(line) + ": unterminated quote");
    fields.push_back(std::move(field));
    ++line;
    return fields;
  }
};

}  // namespace

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return int(i);
  return -1;
}

CsvTable parse_csv(const std::string& text, const std::string& origin) {
  CsvTable table;
  if (text.empty())
    throw Error(ErrorCode::ParseError, origin + ": empty file (missing header)");
  Parser p{text, origin};
  table.header = p.next_record();
  while (!p.done()) {
    std::size_t line = p.line;
    auto rec = p.next_record();
    if (rec.size() == 1 && rec[0].empty()) continue;  // blank line
    if (rec.size() != table.header.size())
      throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(line) + ": expected " +
                                             std::to_string(table.header.size()) +
                                             " fields, got " + std::to_string(rec.size()));
    table.rows.push_back(std::move(rec));
    table.line_numbers.push_back(line);
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::TableNotFound, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.filename().string());
}

std::string csv_escape(const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& rec) {
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(rec[i]);
    }
    out += '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  return out;
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::PersistenceError, "cannot write " + tmp.string());
    out << to_csv(table);
    if (!out) throw Error(ErrorCode::PersistenceError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw Error(ErrorCode::PersistenceError,
                "rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

}  // namespace etl
