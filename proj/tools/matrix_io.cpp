#include "matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

namespace svdpert::cli {

ParseError::ParseError(const std::string& source, std::size_t line, std::size_t column,
                       const std::string& message)
    : Error(source + ":" + std::to_string(line) +
            (column ? ":" + std::to_string(column) : std::string()) + ": " + message),
      line(line),
      column(column) {}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

struct Cursor {
  std::string_view s;
  std::size_t pos = 0;

  void skip() {
    while (pos < s.size() && is_space(s[pos])) ++pos;
  }
  bool done() {
    skip();
    return pos >= s.size();
  }
};

// std::from_chars for double is locale independent
std::optional<double> read_real(Cursor& c) {
  const char* first = c.s.data() + c.pos;
  const char* last = c.s.data() + c.s.size();
  if (first != last && *first == '+') ++first;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr == first) return std::nullopt;
  c.pos = static_cast<std::size_t>(ptr - c.s.data());
  return v;
}

}  // namespace

Matrix parse_matrix(std::string_view text, const std::string& source) {
  std::size_t rows = 0, cols = 0;
  bool have_header = false;
  std::vector<Complex> entries;
  std::size_t rows_read = 0;
  std::size_t line_no = 0;

  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;

    Cursor c{line};
    if (c.done() || line[c.pos] == '#') {
      if (end == text.size()) break;
      continue;
    }
    auto fail = [&](const std::string& msg) -> ParseError {
      return ParseError(source, line_no, c.pos + 1, msg);
    };

    if (!have_header) {
      std::size_t dims[2];
      for (std::size_t& d : dims) {
        c.skip();
        const char* first = line.data() + c.pos;
        auto [ptr, ec] = std::from_chars(first, line.data() + line.size(), d);
        if (ec != std::errc() || ptr == first) throw fail("expected a positive integer dimension");
        if (d == 0) throw fail("dimensions must be positive");
        c.pos = static_cast<std::size_t>(ptr - line.data());
      }
      if (!c.done()) throw fail("unexpected text after the header `m n`");
      rows = dims[0];
      cols = dims[1];
      entries.reserve(rows * cols);
      have_header = true;
    } else {
      if (rows_read == rows) throw fail("more than the declared " + std::to_string(rows) + " rows");
      std::size_t count = 0;
      while (!c.done()) {
        if (count == cols) {
          throw fail("row has more than " + std::to_string(cols) + " entries");
        }
        Complex z;
        if (line[c.pos] == '(') {
          ++c.pos;
          c.skip();
          const auto re = read_real(c);
          if (!re) throw fail("malformed real part");
          c.skip();
          if (c.pos >= line.size() || line[c.pos] != ',') throw fail("expected ','");
          ++c.pos;
          c.skip();
          const auto im = read_real(c);
          if (!im) throw fail("malformed imaginary part");
          c.skip();
          if (c.pos >= line.size() || line[c.pos] != ')') throw fail("expected ')'");
          ++c.pos;
          z = Complex(*re, *im);
        } else {
          const auto re = read_real(c);
          if (!re) throw fail("malformed entry");
          z = Complex(*re, 0.0);
        }
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw fail("non-finite entry");
        if (c.pos < line.size() && !is_space(line[c.pos])) throw fail("expected whitespace");
        entries.push_back(z);
        ++count;
      }
      if (count != cols) {
        throw ParseError(source, line_no, 0,
                         "expected " + std::to_string(cols) + " entries, found " +
                             std::to_string(count));
      }
      ++rows_read;
    }
    if (end == text.size()) break;
  }
  if (!have_header) throw ParseError(source, line_no, 0, "missing header `m n`");
  if (rows_read != rows) {
    throw ParseError(source, line_no, 0,
                     "expected " + std::to_string(rows) + " rows, found " +
                         std::to_string(rows_read));
  }
  return Matrix(rows, cols, std::move(entries));
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_matrix(ss.str(), path);
}

void write_matrix(std::ostream& os, const Matrix& a, const std::string& comment) {
  if (!comment.empty()) os << "# " << comment << "\n";
  os << a.rows() << " " << a.cols() << "\n";
  char buf[96];
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex z = a(i, j);
      if (z.imag() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", z.real());
      } else {
        std::snprintf(buf, sizeof buf, "(%.17g,%.17g)", z.real(), z.imag());
      }
      os << (j ? " " : "") << buf;
    }
    os << "\n";
  }
}

void write_matrix_file(const std::string& path, const Matrix& a, const std::string& comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write " + path);
  write_matrix(out, a, comment);
}

}  // namespace svdpert::cli
