#pragma once

#include "pdmm/types.hpp"

namespace pdmm::detail {

/// Unnormalized forward/backward DFT of a fixed size, 1-D or 2-D (square).
/// Wraps FFTW plans; planning happens once in the constructor under a global
/// lock, execution is const and thread-safe. Buffers are transformed
/// in place and may have any alignment.
class FftEngine {
 public:
  FftEngine(Index n, bool two_dim);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  /// Σ_n x_n e^{-i2πnk/N} (per dimension), in place.
  void forward(Complex* data) const;
  /// Σ_n x_n e^{+i2πnk/N} (per dimension, no 1/N factor), in place.
  void backward(Complex* data) const;

  Index size() const { return n_; }
  Index point_count() const { return two_dim_ ? n_ * n_ : n_; }
  bool two_dim() const { return two_dim_; }

 private:
  Index n_;
  bool two_dim_;
  void* fwd_ = nullptr;  // fftw_plan
  void* bwd_ = nullptr;
};

}  // namespace pdmm::detail
