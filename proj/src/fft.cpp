#include "sta/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace sta {

namespace {
std::mutex planner_mutex;
}

// FFTW_ESTIMATE keeps the plan choice (and therefore the rounding pattern)
// deterministic across runs; measured planning would trade that for a few
// percent of speed.
Fft::Fft(int n) : n_(n) {
  std::lock_guard<std::mutex> lock(planner_mutex);
  std::vector<std::complex<double>> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  plan_forward_ = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_inverse_ = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(planner_mutex);
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
}

void Fft::forward(std::complex<double>* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_forward_), buf, buf);
}

void Fft::inverse(std::complex<double>* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_inverse_), buf, buf);
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) data[i] *= scale;
}

}  // namespace sta
