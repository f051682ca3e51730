#pragma once

#include <cstdint>

#include "pdmm/model.hpp"
#include "pdmm/types.hpp"

namespace pdmm {

struct InitOptions {
  double tol = 1e-8;       // relative Rayleigh-quotient change
  int max_iters = 5000;
  std::uint64_t seed = 0;  // start-vector perturbation stream
  double z_floor = 1e-12;  // lower clamp for the dual initialization
};

struct SpectralResult {
  CVec direction;      // unit norm
  double eigenvalue;   // signed; the spectral matrix can be indefinite
  int iterations;
  bool converged;
};

/// Leading eigenvector (largest magnitude eigenvalue) of Aᴴ diag(y−b) A by
/// power iteration. y−b may have negative entries; they are kept as-is, so
/// the operator is Hermitian but possibly indefinite.
SpectralResult spectral_initialize(const PoissonProblem& problem,
                                   const InitOptions& opts = {});

/// Least-squares scale for the spectral direction:
/// α̂ = sqrt((y−b)ᵀ|Ax̃|² / Σ|Ax̃|⁴), the minimizer of ‖y−b−|αAx̃|²‖₂².
/// A negative numerator is clamped to zero (reported through *clamped).
double scale_factor(const PoissonProblem& problem, const CVec& x_tilde,
                    bool* clamped = nullptr);

/// Elementwise dual start z_i = y_i / (|a_iᴴx₀|² + b_i), clamped below at
/// z_floor so logarithms of z stay finite; zero-count entries land exactly
/// on the floor.
RVec dual_initialize(const PoissonProblem& problem, const CVec& x0,
                     double z_floor = 1e-12);

struct InitResult {
  CVec x0;
  double alpha = 0;
  RVec z0;
  int power_iters_used = 0;
  bool power_converged = false;
  bool negative_eigenvalue = false;  // dominant eigenvalue came out negative
  bool scale_clamped = false;
};

/// Spectral direction, scaling and dual start in one call.
InitResult initialize(const PoissonProblem& problem, const InitOptions& opts = {});

}  // namespace pdmm
