#pragma once

#include <complex>

namespace sta {

// Thin wrapper over FFTW complex transforms with reusable plans. Plan
// creation is serialized internally; execution is safe from multiple threads
// as long as each thread uses its own buffers.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  void forward(std::complex<double>* data) const;  // unnormalized
  void inverse(std::complex<double>* data) const;  // normalized by 1/n
  int size() const { return n_; }

 private:
  int n_;
  void* plan_forward_;
  void* plan_inverse_;
};

}  // namespace sta
