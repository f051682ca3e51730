#include "pdmm/regularized.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "dual_step_detail.hpp"

namespace pdmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMonotonicitySlack = 1e-9;

double relative_change(double delta, double base_norm) {
  if (base_norm > 0.0) return delta / base_norm;
  return delta > 0.0 ? kInf : 0.0;
}

// T x for real sparse T and complex x.
CVec sp_apply(const SpMat& t, const CVec& x) {
  CVec out(t.rows());
  out.real() = t * x.real();
  out.imag() = t * x.imag();
  return out;
}

// Tᵀ v (= Tᴴ v, T real).
CVec sp_adjoint_apply(const SpMat& t, const CVec& v) {
  CVec out(t.cols());
  out.real() = t.transpose() * v.real();
  out.imag() = t.transpose() * v.imag();
  return out;
}

}  // namespace

Regularizer build_regularizer(RegularizerKind kind, Index k_or_side,
                              double lambda) {
  if (lambda < 0.0)
    throw std::invalid_argument("build_regularizer: lambda must be >= 0");
  if (k_or_side < 1)
    throw std::invalid_argument("build_regularizer: size must be >= 1");
  Regularizer reg;
  reg.kind = kind;
  reg.lambda = lambda;
  std::vector<Eigen::Triplet<double>> triplets;
  switch (kind) {
    case RegularizerKind::identity: {
      const Index k = k_or_side;
      reg.t.resize(k, k);
      reg.t.setIdentity();
      return reg;
    }
    case RegularizerKind::diff1d: {
      const Index k = k_or_side;
      if (k < 2)
        throw std::invalid_argument("build_regularizer: diff1d needs K >= 2");
      reg.t.resize(k - 1, k);
      triplets.reserve(static_cast<std::size_t>(2 * (k - 1)));
      for (Index r = 0; r < k - 1; ++r) {
        triplets.emplace_back(r, r, -1.0);
        triplets.emplace_back(r, r + 1, 1.0);
      }
      break;
    }
    case RegularizerKind::tv2d: {
      const Index s = k_or_side;
      if (s < 2)
        throw std::invalid_argument("build_regularizer: tv2d needs side >= 2");
      const Index block = s * (s - 1);
      reg.t.resize(2 * block, s * s);
      triplets.reserve(static_cast<std::size_t>(4 * block));
      // Horizontal differences x(r, c+1) − x(r, c), column-major pixels.
      Index row = 0;
      for (Index c = 0; c + 1 < s; ++c)
        for (Index r = 0; r < s; ++r, ++row) {
          triplets.emplace_back(row, r + c * s, -1.0);
          triplets.emplace_back(row, r + (c + 1) * s, 1.0);
        }
      // Vertical differences x(r+1, c) − x(r, c).
      for (Index c = 0; c < s; ++c)
        for (Index r = 0; r + 1 < s; ++r, ++row) {
          triplets.emplace_back(row, r + c * s, -1.0);
          triplets.emplace_back(row, r + 1 + c * s, 1.0);
        }
      break;
    }
  }
  reg.t.setFromTriplets(triplets.begin(), triplets.end());
  reg.t.makeCompressed();
  return reg;
}

double l1_norm(const SpMat& t, const CVec& x) {
  return sp_apply(t, x).cwiseAbs().sum();
}

double regularized_objective(const PoissonProblem& problem,
                             const Regularizer& reg, const CVec& x) {
  const double f = neg_log_likelihood(problem, x);
  if (reg.lambda == 0.0) return f;
  return f + reg.lambda * l1_norm(reg.t, x);
}

// ---------------------------------------------------------------------------
// RegContext

RegContext::RegContext(std::shared_ptr<const SensingOperator> op,
                       Regularizer reg, CurvatureMode mode, double eig_tol,
                       int eig_max_iters, std::uint64_t seed)
    : op_(std::move(op)), reg_(std::move(reg)), mode_(mode) {
  if (!op_) throw std::invalid_argument("RegContext: null operator");
  if (reg_.cols() != op_->cols())
    throw std::invalid_argument("RegContext: T has the wrong column count");

  if (mode_ == CurvatureMode::eigen) {
    auto xfn = [this](const CVec& w) { return apply_x(w); };
    const EigEstimate est =
        max_eig_hermitian(xfn, reg_.rows(), eig_tol, eig_max_iters, seed);
    e_ = est.value;
    eig_converged_ = est.converged;
  } else {
    // trace(X) = trace((AᴴA)⁻¹ TᵀT), accumulated column by column.
    const SpMat tt = SpMat(reg_.t.transpose()) * reg_.t;
    Complex acc(0, 0);
    CVec col(op_->cols());
    for (Index j = 0; j < tt.cols(); ++j) {
      col.setZero();
      for (SpMat::InnerIterator it(tt, j); it; ++it)
        col[it.row()] = Complex(it.value(), 0.0);
      acc += op_->gram_solve(col)[j];
    }
    e_ = std::real(acc);
  }
  e_ = std::max(e_, 1e-300);
}

CVec RegContext::apply_x(const CVec& w) const {
  return sp_apply(reg_.t, op_->gram_solve(sp_adjoint_apply(reg_.t, w)));
}

RVec RegContext::shift_vector(const CVec& d, const CVec& w) const {
  const CVec t = op_->apply(op_->gram_solve(sp_adjoint_apply(reg_.t, w)));
  return reg_.lambda * d.conjugate().cwiseProduct(t).real();
}

CVec RegContext::u_vector(const CVec& d, const RVec& z, const CVec& w) const {
  if (reg_.lambda <= 0.0)
    throw std::logic_error("RegContext::u_vector: requires lambda > 0");
  const CVec dz = d.cwiseProduct(z.cast<Complex>());
  const CVec lin = sp_apply(reg_.t, op_->gram_solve(op_->adjoint_apply(dz)));
  return (2.0 / (reg_.lambda * e_)) * lin - (1.0 / e_) * apply_x(w) + w;
}

// ---------------------------------------------------------------------------
// Steps

RVec reg_dual_step_z(const RVec& y, const RVec& b, const RVec& c, const RVec& g,
                     const RVec& h, double z_floor, double denom_guard,
                     long* fallbacks) {
  return detail::dual_step_impl(y, b, c, &g, h, z_floor, denom_guard, fallbacks);
}

CVec reg_dual_step_w(const CVec& u) {
  CVec w(u.size());
  for (Index l = 0; l < u.size(); ++l) {
    const double mag = std::abs(u[l]);
    w[l] = mag <= 1.0 ? u[l] : u[l] / mag;
  }
  return w;
}

CVec reg_primal_step(const SensingOperator& op, const CVec& d, const RVec& z,
                     const Regularizer& reg, const CVec& w) {
  const CVec dz = d.cwiseProduct(z.cast<Complex>());
  CVec rhs = op.adjoint_apply(dz);
  if (reg.lambda > 0.0)
    rhs -= (reg.lambda / 2.0) * sp_adjoint_apply(reg.t, w);
  return op.gram_solve(rhs);
}

CVec make_random_w(Index rows, Rng& rng) {
  CVec w(rows);
  for (Index l = 0; l < rows; ++l)
    w[l] = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));
  return w;
}

// ---------------------------------------------------------------------------
// Solver

SolveResult solve_regularized(const PoissonProblem& problem,
                              const Regularizer& reg, const CVec& x0,
                              const RVec& z0, const CVec& w0,
                              const SolverConfig& config, CurvatureMode mode,
                              const IterationCallback& callback) {
  const SensingOperator& op = *problem.op;
  detail::check_config(config);
  if (x0.size() != op.cols())
    throw std::invalid_argument("solve_regularized: x0 length mismatch");
  if (z0.size() != op.rows())
    throw std::invalid_argument("solve_regularized: z0 length mismatch");
  if (w0.size() != reg.rows())
    throw std::invalid_argument("solve_regularized: w0 length must be rows(T)");
  if (w0.size() > 0 && w0.cwiseAbs().maxCoeff() > 1.0 + 1e-12)
    throw std::invalid_argument("solve_regularized: w0 outside the unit disk");

  const bool penalized = reg.lambda > 0.0;
  std::optional<RegContext> ctx;
  if (penalized) ctx.emplace(problem.op, reg, mode);

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };

  CVec x = x0;
  RVec z = z0;
  CVec w = w0;
  double phi_x = regularized_objective(problem, reg, x);

  SolveResult result;
  result.trace.initial_objective = phi_x;
  result.trace.points.reserve(static_cast<std::size_t>(config.max_outer));
  double min_rel = kInf;
  bool converged = false;

  for (int t = 0; t < config.max_outer; ++t) {
    const CVec d = op.apply(x);
    const RVec h = d.cwiseAbs2();

    int inner_iters = 0;
    bool z_converged = false;
    std::optional<CVec> candidate;
    double phi_candidate = 0;
    for (int k = 0; k < config.max_inner; ++k) {
      const RVec c = dual_linearization_vector(op, d, z);
      RVec z_next;
      if (penalized) {
        const RVec g = ctx->shift_vector(d, w);
        z_next = detail::dual_step_impl(problem.y, problem.b, c, &g, h,
                                        config.z_floor, config.denom_guard,
                                        &result.trace.dual_fallbacks);
      } else {
        z_next = detail::dual_step_impl(problem.y, problem.b, c, nullptr, h,
                                        config.z_floor, config.denom_guard,
                                        &result.trace.dual_fallbacks);
      }
      const double dz_norm = (z_next - z).norm();
      const double rel = relative_change(dz_norm, z.norm());
      z = std::move(z_next);
      if (penalized) w = reg_dual_step_w(ctx->u_vector(d, z, w));
      ++inner_iters;
      if (rel < config.eta_inner) {
        z_converged = true;
        break;
      }
      if (config.adaptive_inner) {
        CVec xc = reg_primal_step(op, d, z, reg, w);
        const double phi_c = regularized_objective(problem, reg, xc);
        if (phi_c <= phi_x) {
          candidate = std::move(xc);
          phi_candidate = phi_c;
          break;
        }
      }
    }

    CVec x_next;
    double phi_next;
    if (candidate) {
      x_next = std::move(*candidate);
      phi_next = phi_candidate;
    } else {
      x_next = reg_primal_step(op, d, z, reg, w);
      phi_next = regularized_objective(problem, reg, x_next);
    }

    if (phi_next > phi_x + kMonotonicitySlack * (1.0 + std::abs(phi_x))) {
      if (z_converged) {
        throw MonotonicityError(
            "solve_regularized: objective increased at outer iteration " +
            std::to_string(t) + " (" + std::to_string(phi_x) + " -> " +
            std::to_string(phi_next) + ")");
      }
      // Truncated dual loop: keep the iterate and resume the dual next round.
      TracePoint point{t + 1, phi_x, 0.0, inner_iters, elapsed()};
      result.trace.points.push_back(point);
      result.trace.total_inner_iters += inner_iters;
      if (callback) callback(point, x);
      continue;
    }

    const double rel = relative_change((x_next - x).norm(), x.norm());
    min_rel = std::min(min_rel, rel);
    x = std::move(x_next);
    phi_x = phi_next;

    TracePoint point{t + 1, phi_x, rel, inner_iters, elapsed()};
    result.trace.points.push_back(point);
    result.trace.total_inner_iters += inner_iters;
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
