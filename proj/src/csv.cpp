#include "hetridge/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hetridge {

std::string format_double(double v) {
  // Shortest decimal that parses back to the same bits.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double_field(const std::string& field, const std::string& where) {
  if (field.empty()) throw MissingValue("missing value at " + where);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size() || errno == ERANGE)
    throw ParseError("cannot parse '" + field + "' as a number at " + where);
  if (!std::isfinite(v)) throw MissingValue("non-finite value at " + where);
  return v;
}

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == name) return j;
  throw SchemaMismatch("column '" + name + "' not found in CSV header");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  const auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    fields.push_back(cur);
    return fields;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      t.header = split(line);
      if (t.header.empty() || (t.header.size() == 1 && t.header[0].empty()))
        throw ParseError("empty header row in " + path);
      continue;
    }
    if (line.empty() && in.eof()) break;
    std::vector<std::string> fields = split(line);
    if (fields.size() != t.header.size())
      throw ParseError("row " + std::to_string(lineno) + " of " + path + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(t.header.size()));
    t.rows.push_back(std::move(fields));
  }
  if (lineno == 0) throw ParseError("empty file: " + path);
  return t;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);  // binary: no platform newline games
  if (!out) throw Error("cannot open file for writing: " + path);
  const auto write_row = [&out](const std::vector<std::string>& fields) {
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j) out << ',';
      out << fields[j];
    }
    out << '\n';
  };
  write_row(header);
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw DimensionMismatch("write_csv: row arity differs from header");
    write_row(row);
  }
}

}  // namespace hetridge
