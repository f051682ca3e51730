#pragma once

#include <optional>

#include "pdmm/types.hpp"

namespace pdmm {

struct MetricReport {
  double nrmse = 0;
  std::optional<double> autocorr_mse;
  Complex aligned_phase{1.0, 0.0};
};

/// Unit-modulus phase that best aligns x_opt with x_true:
/// s/|s| with s = x_trueᴴ x_opt, and 1 when s = 0.
Complex alignment_phase(const CVec& x_opt, const CVec& x_true);

/// ‖x_opt − x_true·e^{iφ}‖₂ / ‖x_true‖₂ with the optimal global phase φ.
double nrmse(const CVec& x_opt, const CVec& x_true);

/// Linear autocorrelation r_ℓ = Σ_n x_{n+ℓ} x_n* for ℓ = −(K−1)..K−1,
/// computed through a zero-padded transform of length 2K−1; lag ℓ lands at
/// index ℓ+K−1.
CVec linear_autocorrelation(const CVec& x);

/// Circular autocorrelation r_ℓ = Σ_n x_{(n+ℓ) mod K} x_n*, ℓ = 0..K−1.
CVec circular_autocorrelation(const CVec& x);

/// Mean squared modulus difference of the linear autocorrelations.
double autocorr_mse_linear(const CVec& a, const CVec& b);

/// Mean squared modulus difference of the circular autocorrelations;
/// invariant under circular shifts and global phase of either argument.
double autocorr_mse_circular(const CVec& a, const CVec& b);

}  // namespace pdmm
