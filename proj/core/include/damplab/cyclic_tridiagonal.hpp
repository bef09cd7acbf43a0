#pragma once

#include "damplab/types.hpp"

namespace damplab {

class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// LU factorization of a periodic tridiagonal matrix
///
///   A[j][j-1] = lower[j],  A[j][j] = diag[j],  A[j][j+1] = upper[j]
///
/// with indices taken mod n, so lower[0] and upper[n-1] are the corner entries.
///
/// The leading (n-1)x(n-1) tridiagonal block is factored with partial pivoting
/// (same elimination order as LAPACK's gttrf); the last row and column are
/// folded in through a scalar Schur complement. Solves with A and A^H cost O(n).
class CyclicTridiagonalLU {
 public:
  CyclicTridiagonalLU(std::span<const cplx> lower, std::span<const cplx> diag,
                      std::span<const cplx> upper);

  std::size_t size() const noexcept { return n_; }

  /// Overwrites b with A^{-1} b.
  void solve_in_place(std::span<cplx> b) const;
  /// Overwrites b with A^{-H} b.
  void solve_adjoint_in_place(std::span<cplx> b) const;

  /// Smallest |pivot| met during elimination (including the Schur complement).
  double min_pivot() const noexcept { return min_pivot_; }

 private:
  void block_solve(std::span<cplx> x) const;          // T^{-1}
  void block_solve_adjoint(std::span<cplx> x) const;  // T^{-H}

  std::size_t n_;
  std::size_t m_;  // n - 1, size of the tridiagonal block T
  cvec dl_, d_, du_, du2_;
  std::vector<unsigned char> swapped_;
  // Border of A: column b (last column, rows 0..m-1), row c (last row, cols 0..m-1).
  cplx b_first_, b_last_, c_first_, c_last_, corner_;
  cvec z_;        // T^{-1} b
  cvec z_adj_;    // T^{-H} conj(c)
  cplx schur_;    // corner - c^T z
  cplx schur_adj_;
  double min_pivot_ = 0.0;
};

}  // namespace damplab
