#pragma once

#include "pgauge/numerics.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace pgauge::csv {

// Headerless comma-separated numbers, one matrix row per line. Parsing and
// formatting never consult the global locale.

[[nodiscard]] Matrix read_matrix(std::istream& in);
[[nodiscard]] Matrix read_matrix(const std::filesystem::path& path);

/// Accepts a single row or a single column.
[[nodiscard]] Vector read_vector(std::istream& in);
[[nodiscard]] Vector read_vector(const std::filesystem::path& path);

void write_matrix(std::ostream& out, const Matrix& m);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

/// One entry per line.
void write_vector(std::ostream& out, const Vector& v);
void write_vector(const std::filesystem::path& path, const Vector& v);

/// Shortest round-trip representation of a double.
[[nodiscard]] std::string format_double(double x);

/// Parses a double with '.' as decimal point regardless of locale.
[[nodiscard]] double parse_double(std::string_view token);

}  // namespace pgauge::csv
