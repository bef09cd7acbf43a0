#pragma once

#include <memory>

#include "damplab/types.hpp"

namespace damplab {

/// Unnormalized complex DFT of fixed length, backed by FFTW.
///
/// forward: U_m = sum_j u_j exp(-2 pi i m j / n)
/// inverse: u_j = sum_m U_m exp(+2 pi i m j / n)   (no 1/n factor)
///
/// Plans are created once per length with FFTW_ESTIMATE, so results are
/// bitwise reproducible run to run. Instances are cheap to copy and safe to
/// use from several threads at once.
class FourierTransform {
 public:
  explicit FourierTransform(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  void forward(std::span<const cplx> in, std::span<cplx> out) const;
  void inverse(std::span<const cplx> in, std::span<cplx> out) const;

  cvec forward(std::span<const cplx> in) const;
  cvec inverse(std::span<const cplx> in) const;

  /// Signed integer frequency of DFT slot `index`; the Nyquist slot maps to +n/2.
  static long wavenumber(std::size_t index, std::size_t n) noexcept {
    const auto i = static_cast<long>(index);
    const auto nn = static_cast<long>(n);
    return 2 * i <= nn ? i : i - nn;
  }

 private:
  struct Plans;
  std::size_t n_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace damplab
