#pragma once

#include <filesystem>
#include <iosfwd>

#include "balnet/linalg.hpp"

namespace balnet {

/// Plain comma-separated rows at 17 significant digits, no header.
void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// Inverse of write_matrix_csv. Blank lines are skipped; ragged rows and
/// non-numeric cells are InvalidInput, unreadable files are Io.
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::filesystem::path& path);

}  // namespace balnet
