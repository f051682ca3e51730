#pragma once

#include <memory>

#include "pdmm/linops.hpp"
#include "pdmm/rng.hpp"
#include "pdmm/types.hpp"

namespace pdmm {

/// A Poisson phase-retrieval instance: counts y with means |Ax|² + b.
struct PoissonProblem {
  std::shared_ptr<const SensingOperator> op;
  RVec y;  // observed counts (non-negative, integer-valued reals)
  RVec b;  // known background means (non-negative)
};

/// Validates invariants (y, b ≥ 0 and sized like rows(op)).
PoissonProblem make_problem(std::shared_ptr<const SensingOperator> op, RVec y,
                            RVec b);

struct GroundTruth {
  CVec x_true;
  double photon_scale = 1.0;  // multiplies |Ax|² at generation time
};

/// |Ax|² + b, the elementwise measurement means.
RVec forward_intensity(const SensingOperator& op, const CVec& x, const RVec& b);

/// Draws y_i ~ Poisson(|a_iᴴ x_true|² + b_i) independently.
PoissonProblem sample_measurements(std::shared_ptr<const SensingOperator> op,
                                   const CVec& x_true, RVec b, Rng& rng);

/// Negative Poisson log-likelihood Σ_i [v_i − y_i log v_i] with
/// v = |Ax|² + b, using the 0·log 0 = 0 convention. Returns +infinity when
/// some y_i > 0 meets v_i = 0.
double neg_log_likelihood(const PoissonProblem& problem, const CVec& x);

/// Fenchel saddle function h(x, z); max over z ≥ 0 recovers
/// neg_log_likelihood(x), attained at z = y ⊘ (|Ax|² + b).
double saddle_objective(const PoissonProblem& problem, const CVec& x,
                        const RVec& z);

/// Conjugate-coordinate gradient 2·Aᴴ[(1 − y⊘v)∘(Ax)]; its real and
/// imaginary parts match partial derivatives of neg_log_likelihood in the
/// real and imaginary coordinates of x. Throws when some y_i > 0 has v_i = 0,
/// listing the offending indices.
CVec wirtinger_gradient(const PoissonProblem& problem, const CVec& x);

/// Dense N×K operator with i.i.d. Uniform(0,1) real and imaginary parts.
/// Requires N > K.
std::unique_ptr<SensingOperator> make_random_operator(Index n, Index k,
                                                      Rng& rng);

/// 1-D masked-DFT operator: first mask all-ones, remaining masks i.i.d.
/// Bernoulli(0.5) samples; per-mask DFT length 2K−1.
std::unique_ptr<SensingOperator> make_masked_dft_operator(Index k, int masks,
                                                          Rng& rng);

/// 2-D masked-DFT operator over side×side images, same mask model.
std::unique_ptr<SensingOperator> make_masked_dft_image_operator(Index side,
                                                                int masks,
                                                                Rng& rng);

/// Rescales op so that the mean of |a_iᴴ x_ref|² equals 1.
std::unique_ptr<SensingOperator> normalize_operator(const SensingOperator& op,
                                                    const CVec& x_ref);

}  // namespace pdmm
