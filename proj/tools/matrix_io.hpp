#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>

#include "svdpert/errors.hpp"
#include "svdpert/matrix.hpp"

namespace svdpert::cli {

/// Malformed matrix text. line and column are 1-based; column 0 means the whole line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column,
             const std::string& message);
  const char* kind() const noexcept override { return "parse"; }

  std::size_t line;
  std::size_t column;
};

/// Format: `#` comment lines, a header line `m n`, then m lines of n entries.
/// An entry is a real `a` or a complex pair `(a,b)`. Locale independent.
Matrix parse_matrix(std::string_view text, const std::string& source = "<input>");

Matrix read_matrix_file(const std::string& path);

/// Writes in the format read by parse_matrix, 17 significant digits.
void write_matrix(std::ostream& os, const Matrix& a, const std::string& comment = "");

void write_matrix_file(const std::string& path, const Matrix& a, const std::string& comment = "");

}  // namespace svdpert::cli
