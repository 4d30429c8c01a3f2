#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace svdpert {

using Complex = std::complex<double>;

/// Dense complex matrix, row-major.
///
/// A default-constructed Matrix is the empty 0x0 placeholder; every sized
/// constructor requires positive dimensions. Construction from explicit
/// entries rejects NaN and Inf components.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static Matrix identity(std::size_t n);
  /// rows x cols matrix with `d` on the leading diagonal (d.size() <= min(rows, cols)).
  static Matrix diagonal(std::span<const double> d, std::size_t rows, std::size_t cols);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  std::span<const Complex> entries() const noexcept { return data_; }

  Matrix adjoint() const;
  Matrix transpose() const;

  /// Copy of the nr x nc block whose top-left corner is (r0, c0).
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);
  Matrix col(std::size_t j) const { return block(0, j, rows_, 1); }
  Matrix cols_range(std::size_t c0, std::size_t nc) const { return block(0, c0, rows_, nc); }
  Matrix rows_range(std::size_t r0, std::size_t nr) const { return block(r0, 0, nr, cols_); }

  /// sqrt of the sum of squared moduli; computed entrywise.
  double frobenius_norm() const;
  double max_abs() const;

  Matrix& operator+=(const Matrix& b);
  Matrix& operator-=(const Matrix& b);
  Matrix& operator*=(Complex s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(Complex s, Matrix a);
Matrix operator*(Matrix a, Complex s);

/// [a b]
Matrix hcat(const Matrix& a, const Matrix& b);
/// [a; b]
Matrix vcat(const Matrix& a, const Matrix& b);
/// [[a 0]; [0 b]]
Matrix blkdiag(const Matrix& a, const Matrix& b);

}  // namespace svdpert
