#include "pdmm/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "fft.hpp"

namespace pdmm {

Complex alignment_phase(const CVec& x_opt, const CVec& x_true) {
  if (x_opt.size() != x_true.size())
    throw std::invalid_argument("alignment_phase: length mismatch");
  const Complex s = x_true.dot(x_opt);  // x_trueᴴ x_opt
  const double mag = std::abs(s);
  return mag > 0.0 ? s / mag : Complex(1.0, 0.0);
}

double nrmse(const CVec& x_opt, const CVec& x_true) {
  const double nt = x_true.norm();
  if (nt == 0.0) throw std::invalid_argument("nrmse: x_true is zero");
  const Complex phase = alignment_phase(x_opt, x_true);
  return (x_opt - phase * x_true).norm() / nt;
}

CVec linear_autocorrelation(const CVec& x) {
  const Index k = x.size();
  if (k < 1) throw std::invalid_argument("linear_autocorrelation: empty signal");
  const Index len = 2 * k - 1;
  detail::FftEngine fft(len, false);
  CVec buf = CVec::Zero(len);
  buf.head(k) = x;
  fft.forward(buf.data());
  buf = buf.cwiseAbs2().cast<Complex>();
  fft.backward(buf.data());
  buf /= static_cast<double>(len);
  // buf[m] is now the circular autocorrelation of the padded signal:
  // lag ℓ ≥ 0 at m = ℓ, lag −ℓ at m = len−ℓ.
  CVec r(len);
  for (Index lag = -(k - 1); lag <= k - 1; ++lag)
    r[lag + k - 1] = buf[lag >= 0 ? lag : len + lag];
  return r;
}

CVec circular_autocorrelation(const CVec& x) {
  const Index k = x.size();
  if (k < 1)
    throw std::invalid_argument("circular_autocorrelation: empty signal");
  detail::FftEngine fft(k, false);
  CVec buf = x;
  fft.forward(buf.data());
  buf = buf.cwiseAbs2().cast<Complex>();
  fft.backward(buf.data());
  return buf / static_cast<double>(k);
}

namespace {
double mean_sq_diff(const CVec& a, const CVec& b) {
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}
}  // namespace

double autocorr_mse_linear(const CVec& a, const CVec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("autocorr_mse_linear: length mismatch");
  return mean_sq_diff(linear_autocorrelation(a), linear_autocorrelation(b));
}

double autocorr_mse_circular(const CVec& a, const CVec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("autocorr_mse_circular: length mismatch");
  return mean_sq_diff(circular_autocorrelation(a), circular_autocorrelation(b));
}

}  // namespace pdmm
