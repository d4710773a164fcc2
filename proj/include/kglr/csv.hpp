#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace kglr {

// CSV cell: monostate renders as an empty field, doubles always carry 17
// significant digits so files are byte-stable and round-trip losslessly.
using CsvValue = std::variant<std::monostate, std::string, long long, double>;

std::string format_double17(double value);

/// RFC-4180-style writer: header row, LF line endings, UTF-8, minimal
/// quoting. Every row must match the header width.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<CsvValue>>& rows);

}  // namespace kglr
