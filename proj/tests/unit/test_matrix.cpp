#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "svdpert/errors.hpp"
#include "svdpert/matrix.hpp"

using namespace svdpert;
using svdpert::testing::mat;

TEST(Matrix, ZeroDimensionsRejected) {
  EXPECT_THROW(Matrix(0, 3), DimensionError);
  EXPECT_THROW(Matrix(2, 0), DimensionError);
}

TEST(Matrix, EntryCountChecked) {
  EXPECT_THROW(Matrix(2, 2, std::vector<Complex>(3)), DimensionError);
}

TEST(Matrix, NonFiniteRejected) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(mat(1, 2, {1.0, Complex(0.0, nan)}), DimensionError);
  EXPECT_THROW(mat(1, 1, {std::numeric_limits<double>::infinity()}), DimensionError);
}

TEST(Matrix, AdjointConjugates) {
  const Matrix a = mat(1, 2, {Complex(1, 2), Complex(3, -4)});
  const Matrix h = a.adjoint();
  ASSERT_EQ(h.rows(), 2u);
  EXPECT_EQ(h(0, 0), Complex(1, -2));
  EXPECT_EQ(h(1, 0), Complex(3, 4));
}

TEST(Matrix, ProductAndBlocks) {
  const Matrix a = mat(2, 2, {1, 2, 3, 4});
  const Matrix b = mat(2, 1, {1, 1});
  const Matrix c = a * b;
  EXPECT_EQ(c(0, 0), Complex(3));
  EXPECT_EQ(c(1, 0), Complex(7));
  EXPECT_THROW(b * b, DimensionError);

  const Matrix d = blkdiag(a, b);
  EXPECT_EQ(d.rows(), 4u);
  EXPECT_EQ(d.cols(), 3u);
  EXPECT_EQ(d(2, 2), Complex(1));
  EXPECT_EQ(d(0, 2), Complex(0));
  EXPECT_EQ(d.block(0, 0, 2, 2), a);
  EXPECT_THROW(d.block(3, 0, 2, 1), DimensionError);
}

TEST(Matrix, FrobeniusNoOverflow) {
  const Matrix a = mat(1, 2, {3e200, 4e200});
  EXPECT_DOUBLE_EQ(a.frobenius_norm(), 5e200);
  const Matrix b = mat(1, 2, {3e-200, 4e-200});
  EXPECT_DOUBLE_EQ(b.frobenius_norm(), 5e-200);
}

TEST(Matrix, DiagonalRectangular) {
  const std::vector<double> d{2.0, 1.0};
  const Matrix m = Matrix::diagonal(d, 3, 2);
  EXPECT_EQ(m(0, 0), Complex(2));
  EXPECT_EQ(m(1, 1), Complex(1));
  EXPECT_EQ(m(2, 1), Complex(0));
  EXPECT_THROW(Matrix::diagonal(d, 1, 3), DimensionError);
}
