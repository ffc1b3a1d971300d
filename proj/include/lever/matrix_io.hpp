#pragma once

// Headerless CSV matrices: one row per line, 17 significant digits on output.

#include "lever/densemat.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace lever {

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double value);

DenseMatrix read_matrix_csv(std::istream& in);
DenseMatrix read_matrix_file(const std::filesystem::path& path);

void write_matrix_csv(std::ostream& out, const Matrix& m);
inline void write_matrix_csv(std::ostream& out, const DenseMatrix& m) { write_matrix_csv(out, m.values()); }
void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& m);

} // namespace lever
