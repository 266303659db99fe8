#pragma once

#include <string>
#include <vector>

#include "hetridge/errors.hpp"

namespace hetridge {

/// Shortest decimal form that parses back to the same double (17 significant
/// digits suffice); used for every number the tool emits.
std::string format_double(double v);

/// Strict parse of a complete numeric field. `where` goes into the message.
double parse_double_field(const std::string& field, const std::string& where);

/// Comma-separated, '.' decimal, mandatory header row, no quoting. Pinned
/// dialect so emitted files are byte-stable.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const;  // SchemaMismatch if absent
};

CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace hetridge
