#pragma once

#include <memory>

#include "pdmm/solver.hpp"
#include "pdmm/types.hpp"

namespace pdmm {

enum class RegularizerKind { identity, diff1d, tv2d };

/// Sparse real penalty matrix T for r(x) = λ‖Tx‖₁.
struct Regularizer {
  RegularizerKind kind = RegularizerKind::identity;
  SpMat t;
  double lambda = 0.0;
  Index rows() const { return t.rows(); }
  Index cols() const { return t.cols(); }
};

/// identity: T = I (L = K). diff1d: first differences of a length-K signal
/// (L = K−1, rows (−1, +1)). tv2d: anisotropic total variation of a
/// side×side column-major image, horizontal then vertical first differences
/// (L = 2·side·(side−1)).
Regularizer build_regularizer(RegularizerKind kind, Index k_or_side,
                              double lambda);

/// ‖Tx‖₁ over complex moduli.
double l1_norm(const SpMat& t, const CVec& x);

/// φ(x) = f(x) + λ‖Tx‖₁.
double regularized_objective(const PoissonProblem& problem,
                             const Regularizer& reg, const CVec& x);

enum class CurvatureMode { eigen, trace };

/// Precomputed pieces the regularized dual iteration needs: the curvature
/// bound e for the w-surrogate (largest eigenvalue of X = T(AᴴA)⁻¹Tᴴ, or its
/// trace in trace mode) and matrix-free maps through T and the Gram inverse.
class RegContext {
 public:
  RegContext(std::shared_ptr<const SensingOperator> op, Regularizer reg,
             CurvatureMode mode = CurvatureMode::eigen, double eig_tol = 1e-8,
             int eig_max_iters = 5000, std::uint64_t seed = 0);

  double curvature() const { return e_; }
  CurvatureMode mode() const { return mode_; }
  bool curvature_converged() const { return eig_converged_; }
  const Regularizer& reg() const { return reg_; }
  const SensingOperator& op() const { return *op_; }

  /// X w = T (AᴴA)⁻¹ Tᴴ w.
  CVec apply_x(const CVec& w) const;
  /// Shift of the dual z-step: g = λ Re(D*∘(A (AᴴA)⁻¹ Tᴴ w)).
  RVec shift_vector(const CVec& d, const CVec& w) const;
  /// Linear coefficient of the separable w-surrogate:
  /// u = (2/(λe))·T(AᴴA)⁻¹Aᴴ(d∘z) − (1/e)(X − eI)w.
  CVec u_vector(const CVec& d, const RVec& z, const CVec& w) const;

 private:
  std::shared_ptr<const SensingOperator> op_;
  Regularizer reg_;
  CurvatureMode mode_;
  double e_ = 0;
  bool eig_converged_ = true;
};

/// Shifted closed-form dual z-step: the h > 0 branch uses b+c−g−h in place
/// of b+c−h, the h = 0 branch divides by b+c−g, with the same guard and
/// flooring policy as dual_step. g = 0 reduces exactly to dual_step.
RVec reg_dual_step_z(const RVec& y, const RVec& b, const RVec& c, const RVec& g,
                     const RVec& h, double z_floor = 1e-12,
                     double denom_guard = 1e-12, long* fallbacks = nullptr);

/// Projection of u into the closed unit disk per entry.
CVec reg_dual_step_w(const CVec& u);

/// x = A†(d∘z) − (λ/2)(AᴴA)⁻¹(Tᴴw).
CVec reg_primal_step(const SensingOperator& op, const CVec& d, const RVec& z,
                     const Regularizer& reg, const CVec& w);

/// w with unit-magnitude entries and uniform random phases, the default
/// start for the box-constrained dual variable.
CVec make_random_w(Index rows, Rng& rng);

/// The ℓ1-regularized solver. The inner loop alternates the shifted z-step
/// with the projected w-step, stopping on relative z-change; the outer
/// primal update is reg_primal_step and the trace records φ(x_t). With
/// lambda = 0 the iterates coincide exactly with solve().
SolveResult solve_regularized(const PoissonProblem& problem,
                              const Regularizer& reg, const CVec& x0,
                              const RVec& z0, const CVec& w0,
                              const SolverConfig& config = {},
                              CurvatureMode mode = CurvatureMode::eigen,
                              const IterationCallback& callback = {});

}  // namespace pdmm
