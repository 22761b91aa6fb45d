#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <vector>

namespace rtms::detail {

/// In-place complex 1D or 2D transform on an owned buffer. Unnormalized both ways.
class FftPlan {
 public:
  FftPlan(std::size_t n0, std::size_t n1, int sign) : n0_(n0), n1_(n1), buf_(n0 * n1) {
    auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
    if (n0 == 1)
      plan_ = fftw_plan_dft_1d(static_cast<int>(n1), p, p, sign, FFTW_ESTIMATE);
    else
      plan_ = fftw_plan_dft_2d(static_cast<int>(n0), static_cast<int>(n1), p, p, sign, FFTW_ESTIMATE);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() { fftw_destroy_plan(plan_); }

  std::vector<std::complex<double>>& data() noexcept { return buf_; }
  std::complex<double>& operator()(std::size_t a, std::size_t b) noexcept { return buf_[a * n1_ + b]; }
  void execute() noexcept { fftw_execute(plan_); }
  std::size_t n0() const noexcept { return n0_; }
  std::size_t n1() const noexcept { return n1_; }

 private:
  std::size_t n0_;
  std::size_t n1_;
  std::vector<std::complex<double>> buf_;
  fftw_plan plan_;
};

/// Signed frequency index of bin k on an n-point FFT.
inline long fft_index(std::size_t k, std::size_t n) noexcept {
  return k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

}  // namespace rtms::detail
