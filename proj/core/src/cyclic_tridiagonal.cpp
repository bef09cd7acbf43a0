#include "damplab/cyclic_tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace damplab {

namespace {

double cabs1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

}  // namespace

CyclicTridiagonalLU::CyclicTridiagonalLU(std::span<const cplx> lower, std::span<const cplx> diag,
                                         std::span<const cplx> upper)
    : n_(diag.size()), m_(diag.size() - 1) {
  if (n_ < 3) throw std::invalid_argument("CyclicTridiagonalLU: need n >= 3");
  require_length(lower.size(), n_, "CyclicTridiagonalLU lower");
  require_length(upper.size(), n_, "CyclicTridiagonalLU upper");

  const std::size_t m = m_;
  d_.assign(diag.begin(), diag.begin() + static_cast<std::ptrdiff_t>(m));
  dl_.resize(m - 1);
  du_.resize(m - 1);
  du2_.assign(m >= 2 ? m - 2 : 0, cplx{});
  swapped_.assign(m - 1, 0);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    dl_[i] = lower[i + 1];
    du_[i] = upper[i];
  }
  b_first_ = lower[0];       // A[0][n-1]
  b_last_ = upper[m - 1];    // A[n-2][n-1]
  c_first_ = upper[n_ - 1];  // A[n-1][0]
  c_last_ = lower[n_ - 1];   // A[n-1][n-2]
  corner_ = diag[n_ - 1];

  // Tridiagonal LU with row interchanges.
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (cabs1(d_[i]) >= cabs1(dl_[i])) {
      if (d_[i] != cplx{}) {
        const cplx fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      }
    } else {
      const cplx fact = d_[i] / dl_[i];
      d_[i] = dl_[i];
      dl_[i] = fact;
      const cplx temp = du_[i];
      du_[i] = d_[i + 1];
      d_[i + 1] = temp - fact * d_[i + 1];
      if (i + 2 < m) {
        du2_[i] = du_[i + 1];
        du_[i + 1] = -fact * du_[i + 1];
      }
      swapped_[i] = 1;
    }
  }
  min_pivot_ = std::numeric_limits<double>::infinity();
  for (const cplx& p : d_) min_pivot_ = std::min(min_pivot_, std::abs(p));
  if (!(min_pivot_ > 0.0)) throw SingularSystem("CyclicTridiagonalLU: zero pivot in block");

  z_.assign(m, cplx{});
  z_.front() += b_first_;
  z_.back() += b_last_;
  block_solve(z_);
  schur_ = corner_ - (c_first_ * z_.front() + c_last_ * z_.back());

  z_adj_.assign(m, cplx{});
  z_adj_.front() += std::conj(c_first_);
  z_adj_.back() += std::conj(c_last_);
  block_solve_adjoint(z_adj_);
  schur_adj_ = std::conj(corner_) -
               (std::conj(b_first_) * z_adj_.front() + std::conj(b_last_) * z_adj_.back());

  min_pivot_ = std::min(min_pivot_, std::abs(schur_));
  if (!(std::abs(schur_) > 0.0) || !(std::abs(schur_adj_) > 0.0)) {
    throw SingularSystem("CyclicTridiagonalLU: zero Schur complement");
  }
}

void CyclicTridiagonalLU::block_solve(std::span<cplx> b) const {
  const std::size_t m = m_;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (!swapped_[i]) {
      b[i + 1] -= dl_[i] * b[i];
    } else {
      const cplx temp = b[i];
      b[i] = b[i + 1];
      b[i + 1] = temp - dl_[i] * b[i];
    }
  }
  b[m - 1] /= d_[m - 1];
  if (m > 1) b[m - 2] = (b[m - 2] - du_[m - 2] * b[m - 1]) / d_[m - 2];
  for (std::size_t ii = m - 2; ii-- > 0;) {
    b[ii] = (b[ii] - du_[ii] * b[ii + 1] - du2_[ii] * b[ii + 2]) / d_[ii];
  }
}

void CyclicTridiagonalLU::block_solve_adjoint(std::span<cplx> b) const {
  const std::size_t m = m_;
  b[0] /= std::conj(d_[0]);
  if (m > 1) b[1] = (b[1] - std::conj(du_[0]) * b[0]) / std::conj(d_[1]);
  for (std::size_t i = 2; i < m; ++i) {
    b[i] = (b[i] - std::conj(du_[i - 1]) * b[i - 1] - std::conj(du2_[i - 2]) * b[i - 2]) /
           std::conj(d_[i]);
  }
  for (std::size_t i = m - 1; i-- > 0;) {
    if (!swapped_[i]) {
      b[i] -= std::conj(dl_[i]) * b[i + 1];
    } else {
      const cplx temp = b[i + 1];
      b[i + 1] = b[i] - std::conj(dl_[i]) * temp;
      b[i] = temp;
    }
  }
}

void CyclicTridiagonalLU::solve_in_place(std::span<cplx> b) const {
  require_length(b.size(), n_, "CyclicTridiagonalLU::solve");
  const std::size_t m = m_;
  auto x = b.first(m);
  block_solve(x);  // x <- T^{-1} f
  const cplx y = (b[m] - (c_first_ * x.front() + c_last_ * x.back())) / schur_;
  for (std::size_t i = 0; i < m; ++i) x[i] -= z_[i] * y;
  b[m] = y;
}

void CyclicTridiagonalLU::solve_adjoint_in_place(std::span<cplx> b) const {
  require_length(b.size(), n_, "CyclicTridiagonalLU::solve_adjoint");
  const std::size_t m = m_;
  auto x = b.first(m);
  block_solve_adjoint(x);
  const cplx y =
      (b[m] - (std::conj(b_first_) * x.front() + std::conj(b_last_) * x.back())) / schur_adj_;
  for (std::size_t i = 0; i < m; ++i) x[i] -= z_adj_[i] * y;
  b[m] = y;
}

}  // namespace damplab
