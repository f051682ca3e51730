#include "pdmm/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "dual_step_detail.hpp"

namespace pdmm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMonotonicitySlack = 1e-9;

double relative_change(double delta, double base_norm) {
  if (base_norm > 0.0) return delta / base_norm;
  return delta > 0.0 ? kInf : 0.0;
}
}  // namespace

namespace detail {
void check_config(const SolverConfig& config) {
  if (config.eta_outer <= 0.0 || config.eta_inner <= 0.0 ||
      config.z_floor <= 0.0 || config.denom_guard <= 0.0)
    throw std::invalid_argument("SolverConfig: tolerances must be positive");
  if (config.max_outer < 1 || config.max_inner < 1)
    throw std::invalid_argument("SolverConfig: iteration caps must be >= 1");
}
}  // namespace detail

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_outer_reached: return "max_outer";
    case SolveStatus::stalled: return "stalled";
  }
  return "unknown";
}

RVec dual_linearization_vector(const SensingOperator& op, const CVec& d,
                               const RVec& z) {
  const CVec dz = d.cwiseProduct(z.cast<Complex>());
  const CVec residual = op.projection_apply(dz) - dz;
  return 2.0 * d.conjugate().cwiseProduct(residual).real();
}

RVec dual_step(const RVec& y, const RVec& b, const RVec& c, const RVec& h,
               double z_floor, double denom_guard, long* fallbacks) {
  return detail::dual_step_impl(y, b, c, nullptr, h, z_floor, denom_guard,
                                fallbacks);
}

CVec primal_step(const SensingOperator& op, const CVec& d, const RVec& z) {
  return op.pinv_apply(d.cwiseProduct(z.cast<Complex>()));
}

double dual_objective(const SensingOperator& op, const RVec& y, const RVec& b,
                      const CVec& d, const RVec& z) {
  const CVec dz = d.cwiseProduct(z.cast<Complex>());
  const double quad = std::real(dz.dot(op.projection_apply(dz)));
  double p = quad;
  for (Index i = 0; i < z.size(); ++i) {
    p += z[i] * (b[i] - std::norm(d[i]));
    if (y[i] > 0.0) {
      if (z[i] <= 0.0) return kInf;
      p -= y[i] * std::log(z[i]);
    }
  }
  return p;
}

double primal_surrogate_value(const PoissonProblem& problem, const CVec& x,
                              const CVec& x_t) {
  const SensingOperator& op = *problem.op;
  const CVec d = op.apply(x_t);
  const CVec ax = op.apply(x);
  double value = 0.0;
  for (Index i = 0; i < ax.size(); ++i) {
    const double beta =
        problem.b[i] - std::norm(d[i]) + 2.0 * std::real(std::conj(d[i]) * ax[i]);
    if (beta <= 0.0) return kInf;
    value += std::norm(ax[i]) + problem.b[i];
    if (problem.y[i] > 0.0) value -= problem.y[i] * std::log(beta);
  }
  return value;
}

InnerResult inner_solve_dual(const PoissonProblem& problem, const CVec& d,
                             const RVec& h, RVec z, double f_current,
                             const SolverConfig& config, long* fallbacks) {
  const SensingOperator& op = *problem.op;
  InnerResult res;
  for (int k = 0; k < config.max_inner; ++k) {
    const RVec c = dual_linearization_vector(op, d, z);
    RVec z_next = dual_step(problem.y, problem.b, c, h, config.z_floor,
                            config.denom_guard, fallbacks);
    const double dz_norm = (z_next - z).norm();
    const double rel = relative_change(dz_norm, z.norm());
    z = std::move(z_next);
    ++res.iterations;
    if (rel < config.eta_inner) {
      res.z_converged = true;
      break;
    }
    if (config.adaptive_inner) {
      CVec candidate = primal_step(op, d, z);
      const double f_candidate = neg_log_likelihood(problem, candidate);
      if (f_candidate <= f_current) {
        res.x_candidate = std::move(candidate);
        res.f_candidate = f_candidate;
        break;
      }
    }
  }
  res.z = std::move(z);
  return res;
}

SolveResult solve(const PoissonProblem& problem, const CVec& x0, const RVec& z0,
                  const SolverConfig& config, const IterationCallback& callback) {
  const SensingOperator& op = *problem.op;
  detail::check_config(config);
  if (x0.size() != op.cols())
    throw std::invalid_argument("solve: x0 length must equal cols(op)");
  if (z0.size() != op.rows())
    throw std::invalid_argument("solve: z0 length must equal rows(op)");

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };

  CVec x = x0;
  RVec z = z0;
  double f_x = neg_log_likelihood(problem, x);

  SolveResult result;
  result.trace.initial_objective = f_x;
  result.trace.points.reserve(static_cast<std::size_t>(config.max_outer));
  double min_rel = kInf;
  bool converged = false;

  for (int t = 0; t < config.max_outer; ++t) {
    const CVec d = op.apply(x);
    const RVec h = d.cwiseAbs2();

    InnerResult inner = inner_solve_dual(problem, d, h, std::move(z), f_x,
                                         config, &result.trace.dual_fallbacks);
    z = std::move(inner.z);

    CVec x_next;
    double f_next;
    if (inner.x_candidate) {
      x_next = std::move(*inner.x_candidate);
      f_next = inner.f_candidate;
    } else {
      x_next = primal_step(op, d, z);
      f_next = neg_log_likelihood(problem, x_next);
    }

    if (f_next > f_x + kMonotonicitySlack * (1.0 + std::abs(f_x))) {
      if (inner.z_converged) {
        throw MonotonicityError(
            "solve: objective increased at outer iteration " +
            std::to_string(t) + " (" + std::to_string(f_x) + " -> " +
            std::to_string(f_next) + ")");
      }
      // The iteration cap truncated the dual loop before it reached a point
      // that improves the primal. Keep the current iterate; the next round
      // resumes the same dual problem where this one stopped.
      TracePoint point{t + 1, f_x, 0.0, inner.iterations, elapsed()};
      result.trace.points.push_back(point);
      result.trace.total_inner_iters += inner.iterations;
      if (callback) callback(point, x);
      continue;
    }

    const double rel = relative_change((x_next - x).norm(), x.norm());
    min_rel = std::min(min_rel, rel);
    x = std::move(x_next);
    f_x = f_next;

    TracePoint point{t + 1, f_x, rel, inner.iterations, elapsed()};
    result.trace.points.push_back(point);
    result.trace.total_inner_iters += inner.iterations;
    if (callback) callback(point, x);

    if (rel < config.eta_outer) {
      converged = true;
      break;
    }
  }

  result.trace.outer_iters = static_cast<int>(result.trace.points.size());
  result.trace.seconds = elapsed();
  if (converged) {
    result.trace.status = SolveStatus::converged;
  } else {
    result.trace.status = min_rel < 10.0 * config.eta_outer
                              ? SolveStatus::max_outer_reached
                              : SolveStatus::stalled;
  }
  result.x = std::move(x);
  return result;
}

}  // namespace pdmm
