#include "pdmm/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace pdmm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PoissonProblem make_problem(std::shared_ptr<const SensingOperator> op, RVec y,
                            RVec b) {
  if (!op) throw std::invalid_argument("make_problem: null operator");
  if (y.size() != op->rows() || b.size() != op->rows())
    throw std::invalid_argument("make_problem: y/b length must equal rows(op)");
  if (y.size() > 0 && y.minCoeff() < 0.0)
    throw std::invalid_argument("make_problem: counts must be non-negative");
  if (b.size() > 0 && b.minCoeff() < 0.0)
    throw std::invalid_argument("make_problem: background must be non-negative");
  return PoissonProblem{std::move(op), std::move(y), std::move(b)};
}

RVec forward_intensity(const SensingOperator& op, const CVec& x, const RVec& b) {
  if (b.size() != op.rows())
    throw std::invalid_argument("forward_intensity: background length mismatch");
  return op.apply(x).cwiseAbs2() + b;
}

PoissonProblem sample_measurements(std::shared_ptr<const SensingOperator> op,
                                   const CVec& x_true, RVec b, Rng& rng) {
  if (!op) throw std::invalid_argument("sample_measurements: null operator");
  const RVec mean = forward_intensity(*op, x_true, b);
  RVec y(mean.size());
  for (Index i = 0; i < mean.size(); ++i)
    y[i] = static_cast<double>(rng.poisson(mean[i]));
  return PoissonProblem{std::move(op), std::move(y), std::move(b)};
}

double neg_log_likelihood(const PoissonProblem& problem, const CVec& x) {
  const CVec ax = problem.op->apply(x);
  double f = 0.0;
  for (Index i = 0; i < ax.size(); ++i) {
    const double v = std::norm(ax[i]) + problem.b[i];
    f += v;
    if (problem.y[i] > 0.0) {
      if (v <= 0.0) return kInf;
      f -= problem.y[i] * std::log(v);
    }
  }
  return f;
}

double saddle_objective(const PoissonProblem& problem, const CVec& x,
                        const RVec& z) {
  if (z.size() != problem.op->rows())
    throw std::invalid_argument("saddle_objective: z length mismatch");
  const CVec ax = problem.op->apply(x);
  double h = 0.0;
  for (Index i = 0; i < ax.size(); ++i) {
    const double v = std::norm(ax[i]) + problem.b[i];
    const double y = problem.y[i];
    h += v - z[i] * v;
    if (y > 0.0) {
      if (z[i] <= 0.0) return -kInf;
      h += y * (std::log(z[i]) + 1.0 - std::log(y));
    }
  }
  return h;
}

CVec wirtinger_gradient(const PoissonProblem& problem, const CVec& x) {
  CVec ax = problem.op->apply(x);
  std::ostringstream bad;
  int bad_count = 0;
  for (Index i = 0; i < ax.size(); ++i) {
    const double y = problem.y[i];
    const double v = std::norm(ax[i]) + problem.b[i];
    if (y > 0.0 && v <= 0.0) {
      if (bad_count < 16) {
        if (bad_count > 0) bad << ", ";
        bad << i;
      }
      ++bad_count;
      continue;
    }
    const double w = 1.0 - (y > 0.0 ? y / v : 0.0);
    ax[i] *= w;
  }
  if (bad_count > 0) {
    throw std::domain_error(
        "wirtinger_gradient: zero intensity at measurements with positive "
        "counts (indices " + bad.str() + (bad_count > 16 ? ", ..." : "") + ")");
  }
  return 2.0 * problem.op->adjoint_apply(ax);
}

std::unique_ptr<SensingOperator> make_random_operator(Index n, Index k,
                                                      Rng& rng) {
  if (!(n > k) || k < 1)
    throw std::invalid_argument("make_random_operator: need N > K >= 1");
  CMat a(n, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < n; ++i)
      a(i, j) = Complex(rng.uniform(), rng.uniform());
  return std::make_unique<DenseOperator>(std::move(a));
}

namespace {

std::vector<CVec> draw_masks(Index len, int count, Rng& rng) {
  if (count < 1)
    throw std::invalid_argument("masked-DFT operator: need at least one mask");
  std::vector<CVec> masks;
  masks.reserve(static_cast<std::size_t>(count));
  masks.push_back(CVec::Ones(len));
  for (int m = 1; m < count; ++m) {
    CVec mask(len);
    for (Index i = 0; i < len; ++i)
      mask[i] = rng.bernoulli(0.5) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
    masks.push_back(std::move(mask));
  }
  return masks;
}

}  // namespace

std::unique_ptr<SensingOperator> make_masked_dft_operator(Index k, int masks,
                                                          Rng& rng) {
  if (k < 2) throw std::invalid_argument("make_masked_dft_operator: need K >= 2");
  return std::make_unique<MaskedDftOperator>(
      MaskedDftOperator::make_1d(draw_masks(k, masks, rng)));
}

std::unique_ptr<SensingOperator> make_masked_dft_image_operator(Index side,
                                                                int masks,
                                                                Rng& rng) {
  if (side < 2)
    throw std::invalid_argument("make_masked_dft_image_operator: need side >= 2");
  return std::make_unique<MaskedDftOperator>(
      MaskedDftOperator::make_2d(side, draw_masks(side * side, masks, rng)));
}

std::unique_ptr<SensingOperator> normalize_operator(const SensingOperator& op,
                                                    const CVec& x_ref) {
  const CVec u = op.apply(x_ref);
  const double mean_sq = u.squaredNorm() / static_cast<double>(u.size());
  if (mean_sq <= 0.0)
    throw std::invalid_argument("normalize_operator: A·x_ref is zero");
  return op.rescaled(1.0 / std::sqrt(mean_sq));
}

}  // namespace pdmm
