#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace modefisher {

/// 12 significant digits, scientific ("%.11e"); the CSV number format.
std::string format_number(double value);

/// Writes `contents` to a temporary file next to `path`, then renames it over
/// `path`. Throws Io on failure.
void write_file_atomic(const std::string& path, std::string_view contents);

std::string read_file(const std::string& path);

/// Builds CSV text from a header and numeric rows.
std::string make_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

}  // namespace modefisher
