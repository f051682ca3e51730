#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <vector>

namespace pdmm::detail {

namespace {
// FFTW plan creation/destruction is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftEngine::FftEngine(Index n, bool two_dim) : n_(n), two_dim_(two_dim) {
  if (n < 1) throw std::invalid_argument("FftEngine: size must be >= 1");
  std::vector<Complex> scratch(static_cast<std::size_t>(point_count()));
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (two_dim_) {
    fwd_ = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buf, buf,
                            FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buf, buf,
                            FFTW_BACKWARD, flags);
  } else {
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, flags);
  }
  if (fwd_ == nullptr || bwd_ == nullptr)
    throw std::runtime_error("FftEngine: FFTW planning failed");
}

FftEngine::~FftEngine() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void FftEngine::forward(Complex* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), buf, buf);
}

void FftEngine::backward(Complex* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), buf, buf);
}

}  // namespace pdmm::detail
