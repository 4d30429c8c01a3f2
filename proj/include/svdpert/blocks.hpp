#pragma once

#include <cstddef>

#include "svdpert/matrix.hpp"

namespace svdpert {

/// G with unitaries U = [U1, U2], V = [V1, V2] such that U^H G V = blkdiag(G1, G2).
struct BlockContext {
  Matrix g;   // m x n
  Matrix u;   // m x m
  Matrix v;   // n x n
  std::size_t r = 0;
  Matrix g1;  // r x r
  Matrix g2;  // (m-r) x (n-r)

  std::size_t m() const { return g.rows(); }
  std::size_t n() const { return g.cols(); }
  Matrix u1() const { return u.cols_range(0, r); }
  Matrix u2() const { return u.cols_range(r, m() - r); }
  Matrix v1() const { return v.cols_range(0, r); }
  Matrix v2() const { return v.cols_range(r, n() - r); }
};

/// Blocks of U^H E V at the split of a BlockContext.
struct PerturbationBlocks {
  Matrix e11;  // r x r
  Matrix e12;  // r x (n-r)
  Matrix e21;  // (m-r) x r
  Matrix e22;  // (m-r) x (n-r)
};

}  // namespace svdpert
