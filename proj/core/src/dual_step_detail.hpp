#pragma once

#include <cmath>
#include <stdexcept>

#include "pdmm/types.hpp"

namespace pdmm {
struct SolverConfig;
namespace detail {
void check_config(const SolverConfig& config);
}
}  // namespace pdmm

namespace pdmm::detail {

/// Elementwise closed-form minimizer of
///   min_{z≥0} (c−g) z + h z² + b z − y log z − h z,
/// the separable dual surrogate; g == nullptr means no shift. The h > 0 root
/// is evaluated in whichever of its two algebraically equal forms avoids
/// cancellation. h = 0 divides by b+c−g, guarded by denom_guard; guarded
/// coordinates are counted through *fallbacks.
inline RVec dual_step_impl(const RVec& y, const RVec& b, const RVec& c,
                           const RVec* g, const RVec& h, double z_floor,
                           double denom_guard, long* fallbacks) {
  const Index n = y.size();
  if (b.size() != n || c.size() != n || h.size() != n ||
      (g != nullptr && g->size() != n))
    throw std::invalid_argument("dual_step: length mismatch");
  RVec z(n);
  for (Index i = 0; i < n; ++i) {
    const double yi = y[i];
    const double hi = h[i];
    const double gi = g != nullptr ? (*g)[i] : 0.0;
    double zi;
    if (hi > 0.0) {
      const double lin = b[i] + c[i] - gi - hi;
      const double disc = std::sqrt(lin * lin + 8.0 * hi * yi);
      zi = lin >= 0.0 ? (yi > 0.0 ? 2.0 * yi / (lin + disc) : 0.0)
                      : (disc - lin) / (4.0 * hi);
    } else {
      const double denom = b[i] + c[i] - gi;
      if (denom > denom_guard) {
        zi = yi / denom;
      } else {
        zi = yi / denom_guard;
        if (fallbacks) ++*fallbacks;
      }
    }
    z[i] = std::max(zi, yi > 0.0 ? z_floor : 0.0);
  }
  return z;
}

}  // namespace pdmm::detail
