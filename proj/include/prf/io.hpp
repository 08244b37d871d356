#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace prf::io {

std::string read_text(const std::filesystem::path& path);

/// Writes via a sibling temporary file and rename, creating parent directories.
void write_text(const std::filesystem::path& path, std::string_view text);

/// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_field(std::string_view value);

/// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> parse_csv_record(std::string_view line);

}  // namespace prf::io
