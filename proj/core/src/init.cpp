#include "pdmm/init.hpp"

#include <cmath>
#include <stdexcept>

namespace pdmm {

SpectralResult spectral_initialize(const PoissonProblem& problem,
                                   const InitOptions& opts) {
  const SensingOperator& op = *problem.op;
  const CVec weights = (problem.y - problem.b).cast<Complex>();
  auto spectral_apply = [&](const CVec& v) {
    return op.adjoint_apply(weights.cwiseProduct(op.apply(v)));
  };
  PowerIterationResult pr =
      power_iteration(spectral_apply, op.cols(), opts.tol, opts.max_iters, opts.seed);
  return SpectralResult{std::move(pr.vector), pr.value, pr.iterations,
                        pr.converged};
}

double scale_factor(const PoissonProblem& problem, const CVec& x_tilde,
                    bool* clamped) {
  if (clamped) *clamped = false;
  const CVec u = problem.op->apply(x_tilde);
  const RVec usq = u.cwiseAbs2();
  const double den = usq.squaredNorm();  // Σ|u_i|⁴
  if (den <= 0.0)
    throw std::invalid_argument("scale_factor: A·x_tilde is zero");
  double num = (problem.y - problem.b).dot(usq);
  if (num < 0.0) {
    num = 0.0;
    if (clamped) *clamped = true;
  }
  return std::sqrt(num / den);
}

RVec dual_initialize(const PoissonProblem& problem, const CVec& x0,
                     double z_floor) {
  const CVec ax = problem.op->apply(x0);
  RVec z(ax.size());
  for (Index i = 0; i < ax.size(); ++i) {
    const double y = problem.y[i];
    const double v = std::norm(ax[i]) + problem.b[i];
    if (y > 0.0) {
      if (v <= 0.0)
        throw std::domain_error(
            "dual_initialize: zero intensity at a positive count (index " +
            std::to_string(i) + ")");
      z[i] = std::max(y / v, z_floor);
    } else {
      z[i] = z_floor;
    }
  }
  return z;
}

InitResult initialize(const PoissonProblem& problem, const InitOptions& opts) {
  InitResult res;
  SpectralResult sp = spectral_initialize(problem, opts);
  res.power_iters_used = sp.iterations;
  res.power_converged = sp.converged;
  res.negative_eigenvalue = sp.eigenvalue < 0.0;
  res.alpha = scale_factor(problem, sp.direction, &res.scale_clamped);
  res.x0 = res.alpha * sp.direction;
  res.z0 = dual_initialize(problem, res.x0, opts.z_floor);
  return res;
}

}  // namespace pdmm
