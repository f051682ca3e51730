#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdmm/model.hpp"
#include "pdmm/types.hpp"

namespace pdmm {

struct SolverConfig {
  double eta_outer = 1e-6;    // relative x-change stopping threshold
  double eta_inner = 1e-6;    // relative z-change stopping threshold
  int max_outer = 1000;
  int max_inner = 100;
  bool adaptive_inner = true; // leave the inner loop once the candidate
                              // primal update already decreases the objective
  double z_floor = 1e-12;
  double denom_guard = 1e-12;
};

enum class SolveStatus { converged, max_outer_reached, stalled };
const char* to_string(SolveStatus status);

struct TracePoint {
  int outer = 0;
  double objective = 0;     // f(x_t), or φ(x_t) for regularized solves
  double rel_x_change = 0;
  int inner_iters = 0;
  double seconds = 0;       // cumulative wall-clock within the solve
};

struct SolveTrace {
  std::vector<TracePoint> points;
  SolveStatus status = SolveStatus::max_outer_reached;
  int outer_iters = 0;
  long total_inner_iters = 0;
  long dual_fallbacks = 0;  // dual-step coordinates that hit the denominator guard
  double seconds = 0;
  double initial_objective = 0;
  double final_objective() const {
    return points.empty() ? initial_objective : points.back().objective;
  }
};

struct SolveResult {
  CVec x;
  SolveTrace trace;
};

/// Invoked after every outer iteration with the fresh iterate.
using IterationCallback = std::function<void(const TracePoint&, const CVec& x)>;

/// Thrown when an outer iteration increases the objective beyond the
/// monotonicity slack; indicates an implementation or modelling bug.
class MonotonicityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// c = 2 Re(D*∘(P(d∘z) − d∘z)), the linearization of the concave part of the
/// dual objective at z; computed matrix-free through projection_apply.
RVec dual_linearization_vector(const SensingOperator& op, const CVec& d,
                               const RVec& z);

/// Closed-form minimizer of the separable inner surrogate
/// min_{z≥0} c z + h z² + b z − y log z − h z per coordinate. Coordinates
/// with h = 0 use z = y/(b+c); a non-positive denominator there falls back
/// to y/denom_guard and is counted in *fallbacks.
RVec dual_step(const RVec& y, const RVec& b, const RVec& c, const RVec& h,
               double z_floor = 1e-12, double denom_guard = 1e-12,
               long* fallbacks = nullptr);

/// x = A†(d∘z), the minimizer of the inner primal problem.
CVec primal_step(const SensingOperator& op, const CVec& d, const RVec& z);

/// Dual objective p(z) = (d∘z)ᴴP(d∘z) + Σ z_i b_i − Σ y_i log z_i − Σ z_i|d_i|²
/// whose minimizer determines the next primal iterate.
double dual_objective(const SensingOperator& op, const RVec& y, const RVec& b,
                      const CVec& d, const RVec& z);

/// Value of the primal surrogate anchored at x_t:
/// ‖Ax‖² + Σ_i [b_i − y_i log β_i(x)] with β_i = b_i − |d_i|² + 2Re(d_i* a_iᴴx),
/// d = A x_t. Majorizes the negative log-likelihood and touches it at x_t.
/// Returns +infinity outside the feasible region {β_i > 0 ∀i}.
double primal_surrogate_value(const PoissonProblem& problem, const CVec& x,
                              const CVec& x_t);

struct InnerResult {
  RVec z;
  int iterations = 0;
  bool z_converged = false;  // exited on relative z-change, not on the cap
  // Set when the adaptive check already produced an acceptable primal update.
  std::optional<CVec> x_candidate;
  double f_candidate = 0;
};

/// Runs the dual surrogate iteration from the given z until the relative
/// z-change drops below eta_inner or max_inner is hit; with adaptive_inner,
/// additionally exits as soon as the candidate primal update satisfies
/// f(x_candidate) ≤ f_current (at most one objective evaluation per
/// iteration).
InnerResult inner_solve_dual(const PoissonProblem& problem, const CVec& d,
                             const RVec& h, RVec z, double f_current,
                             const SolverConfig& config,
                             long* fallbacks = nullptr);

/// The unregularized solver: outer primal updates x = A†(d∘z) driven by the
/// inner dual iteration, stopping on relative x-change < eta_outer. The
/// objective trace is non-increasing up to a 1e-9 relative slack; a larger
/// increase raises MonotonicityError.
SolveResult solve(const PoissonProblem& problem, const CVec& x0, const RVec& z0,
                  const SolverConfig& config = {},
                  const IterationCallback& callback = {});

}  // namespace pdmm
