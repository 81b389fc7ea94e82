#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "core/matrix_core.hpp"

namespace roy {

/// Parses headerless comma-separated numeric rows. All rows must have the
/// same number of fields; blank lines are skipped.
Matrix parse_csv_matrix(std::string_view text);
Matrix read_csv_matrix(const std::filesystem::path& path);

/// Shortest round-trip-safe form with 17 significant digits ("%.17g").
std::string format_double(double value);

}  // namespace roy
