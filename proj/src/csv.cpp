#include "kglr/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace kglr {
namespace {

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string render(const CsvValue& value) {
  if (std::holds_alternative<std::monostate>(value)) return "";
  if (const auto* s = std::get_if<std::string>(&value)) return quote_if_needed(*s);
  if (const auto* i = std::get_if<long long>(&value)) return std::to_string(*i);
  return format_double17(std::get<double>(value));
}

}  // namespace

std::string format_double17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", value);
  return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<CsvValue>>& rows) {
  for (const auto& row : rows)
    if (row.size() != header.size())
      throw std::invalid_argument("write_csv: row width does not match header");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_csv: cannot open '" + path.string() + "'");
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << quote_if_needed(header[i]);
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << render(row[i]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_csv: write failed for '" + path.string() + "'");
}

}  // namespace kglr
