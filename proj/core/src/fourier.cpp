#include "damplab/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace damplab {

struct FourierTransform::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    // fftw_destroy_plan touches planner state, which is not thread safe.
    std::lock_guard lock(mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
  static std::mutex& mutex() {
    static std::mutex m;
    return m;
  }
};

FourierTransform::FourierTransform(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("FourierTransform: length must be positive");
  static std::mutex cache_mutex;
  static std::map<std::size_t, std::weak_ptr<const Plans>> cache;
  std::lock_guard lock(cache_mutex);
  if (auto hit = cache[n].lock()) {
    plans_ = std::move(hit);
    return;
  }
  auto plans = std::make_shared<Plans>();
  {
    std::lock_guard planner(Plans::mutex());
    cvec a(n), b(n);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans->forward = fftw_plan_dft_1d(len, in, out, FFTW_FORWARD, flags);
    plans->backward = fftw_plan_dft_1d(len, in, out, FFTW_BACKWARD, flags);
  }
  if (!plans->forward || !plans->backward) throw std::runtime_error("FFTW planning failed");
  cache[n] = plans;
  plans_ = std::move(plans);
}

void FourierTransform::forward(std::span<const cplx> in, std::span<cplx> out) const {
  require_length(in.size(), n_, "FourierTransform::forward input");
  require_length(out.size(), n_, "FourierTransform::forward output");
  if (in.data() == out.data()) {
    cvec tmp(in.begin(), in.end());
    forward(tmp, out);
    return;
  }
  // FFTW never writes to the input of an out-of-place complex transform.
  fftw_execute_dft(plans_->forward,
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void FourierTransform::inverse(std::span<const cplx> in, std::span<cplx> out) const {
  require_length(in.size(), n_, "FourierTransform::inverse input");
  require_length(out.size(), n_, "FourierTransform::inverse output");
  if (in.data() == out.data()) {
    cvec tmp(in.begin(), in.end());
    inverse(tmp, out);
    return;
  }
  fftw_execute_dft(plans_->backward,
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

cvec FourierTransform::forward(std::span<const cplx> in) const {
  cvec out(n_);
  forward(in, out);
  return out;
}

cvec FourierTransform::inverse(std::span<const cplx> in) const {
  cvec out(n_);
  inverse(in, out);
  return out;
}

}  // namespace damplab
