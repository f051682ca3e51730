#include "pdmm/linops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "fft.hpp"
#include "pdmm/rng.hpp"

namespace pdmm {

namespace {

void check_size(const CVec& v, Index expected, const char* what) {
  if (v.size() != expected) {
    throw std::invalid_argument(std::string(what) + ": vector has length " +
                                std::to_string(v.size()) + ", expected " +
                                std::to_string(expected));
  }
}

}  // namespace

SensingOperator::SensingOperator(Index rows, Index cols)
    : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("SensingOperator: dimensions must be >= 1");
}

CVec SensingOperator::apply(const CVec& x) const {
  check_size(x, cols_, "apply");
  return do_apply(x);
}

CVec SensingOperator::adjoint_apply(const CVec& v) const {
  check_size(v, rows_, "adjoint_apply");
  return do_adjoint(v);
}

CVec SensingOperator::gram_solve(const CVec& v) const {
  check_size(v, cols_, "gram_solve");
  return do_gram_solve(v);
}

CVec SensingOperator::pinv_apply(const CVec& v) const {
  check_size(v, rows_, "pinv_apply");
  return do_gram_solve(do_adjoint(v));
}

CVec SensingOperator::projection_apply(const CVec& v) const {
  check_size(v, rows_, "projection_apply");
  return do_projection(v);
}

CVec SensingOperator::do_projection(const CVec& v) const {
  return do_apply(do_gram_solve(do_adjoint(v)));
}

// ---------------------------------------------------------------------------
// DenseOperator

DenseOperator::DenseOperator(CMat entries, Index projection_cache_cap)
    : SensingOperator(entries.rows(), entries.cols()),
      projection_cache_cap_(projection_cache_cap),
      a_(std::move(entries)) {
  const Index n = a_.rows();
  const Index k = a_.cols();
  const CMat gram = a_.adjoint() * a_;
  gram_llt_.compute(gram);

  bool llt_ok = gram_llt_.info() == Eigen::Success;
  if (llt_ok) {
    // Probe the factorization against the solve contract.
    Rng probe_rng(0x5eedf00du);
    CVec probe(k);
    for (Index i = 0; i < k; ++i)
      probe[i] = Complex(probe_rng.uniform(-1.0, 1.0), probe_rng.uniform(-1.0, 1.0));
    const CVec solved = gram_llt_.solve(probe);
    llt_ok = (gram * solved - probe).norm() <= 1e-10 * probe.norm();
  }

  if (!llt_ok) {
    Eigen::ColPivHouseholderQR<CMat> qr(a_);
    if (qr.rank() < k) {
      throw std::invalid_argument(
          "DenseOperator: matrix does not have full column rank");
    }
    use_qr_ = true;
    qr_r_ = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    qr_perm_ = qr.colsPermutation();
  }

  if (n <= projection_cache_cap_) {
    CMat pinv(k, n);
    for (Index j = 0; j < n; ++j) pinv.col(j) = do_gram_solve(a_.row(j).adjoint());
    projection_ = a_ * pinv;
  }
}

CVec DenseOperator::do_apply(const CVec& x) const { return a_ * x; }

CVec DenseOperator::do_adjoint(const CVec& v) const { return a_.adjoint() * v; }

CVec DenseOperator::do_gram_solve(const CVec& v) const {
  if (!use_qr_) return gram_llt_.solve(v);
  // A·Π = Q·R  ⇒  AᴴA = Π RᴴR Πᵀ.
  CVec t = qr_perm_.transpose() * v;
  t = qr_r_.adjoint().triangularView<Eigen::Lower>().solve(t);
  t = qr_r_.triangularView<Eigen::Upper>().solve(t);
  return qr_perm_ * t;
}

CVec DenseOperator::do_projection(const CVec& v) const {
  if (projection_cached()) return projection_ * v;
  return SensingOperator::do_projection(v);
}

std::unique_ptr<SensingOperator> DenseOperator::rescaled(double factor) const {
  return std::make_unique<DenseOperator>(CMat(factor * a_),
                                         projection_cache_cap_);
}

std::unique_ptr<SensingOperator> DenseOperator::clone() const {
  return std::make_unique<DenseOperator>(*this);
}

// ---------------------------------------------------------------------------
// MaskedDftOperator

MaskedDftOperator::MaskedDftOperator(std::vector<CVec> masks, bool two_dim,
                                     Index side, double scale)
    : SensingOperator(
          static_cast<Index>(masks.size()) *
              (two_dim ? (2 * side - 1) * (2 * side - 1) : (2 * side - 1)),
          two_dim ? side * side : side),
      masks_(std::move(masks)),
      two_dim_(two_dim),
      side_(side),
      n_fft_(2 * side - 1),
      scale_(scale) {
  if (side_ < 1) throw std::invalid_argument("MaskedDftOperator: empty signal");
  if (scale_ <= 0.0)
    throw std::invalid_argument("MaskedDftOperator: scale must be positive");
  const Index k_total = cols();
  for (const CVec& m : masks_) {
    if (m.size() != k_total)
      throw std::invalid_argument("MaskedDftOperator: mask length mismatch");
  }

  const double points = static_cast<double>(points_per_mask());
  gram_diag_ = RVec::Zero(k_total);
  for (const CVec& m : masks_) gram_diag_ += m.cwiseAbs2();
  gram_diag_ *= scale_ * scale_ * points;
  if (gram_diag_.minCoeff() <= 0.0) {
    throw std::invalid_argument(
        "MaskedDftOperator: masks leave a signal entry unsampled (rank "
        "deficient)");
  }

  fft_ = std::make_shared<detail::FftEngine>(n_fft_, two_dim_);
}

MaskedDftOperator MaskedDftOperator::make_1d(std::vector<CVec> masks,
                                             double scale) {
  if (masks.empty())
    throw std::invalid_argument("MaskedDftOperator: need at least one mask");
  const Index k = masks.front().size();
  return MaskedDftOperator(std::move(masks), false, k, scale);
}

MaskedDftOperator MaskedDftOperator::make_2d(Index side, std::vector<CVec> masks,
                                             double scale) {
  if (masks.empty())
    throw std::invalid_argument("MaskedDftOperator: need at least one mask");
  return MaskedDftOperator(std::move(masks), true, side, scale);
}

Index MaskedDftOperator::points_per_mask() const {
  return two_dim_ ? n_fft_ * n_fft_ : n_fft_;
}

CVec MaskedDftOperator::do_apply(const CVec& x) const {
  const Index points = points_per_mask();
  CVec out(rows());
  CVec buf(points);
  for (int m = 0; m < mask_count(); ++m) {
    buf.setZero();
    if (two_dim_) {
      // Top-left side×side block of the padded column-major grid.
      for (Index c = 0; c < side_; ++c)
        for (Index r = 0; r < side_; ++r)
          buf[r + c * n_fft_] = masks_[m][r + c * side_] * x[r + c * side_];
    } else {
      buf.head(side_) = masks_[m].cwiseProduct(x);
    }
    fft_->forward(buf.data());
    out.segment(m * points, points) = scale_ * buf;
  }
  return out;
}

CVec MaskedDftOperator::do_adjoint(const CVec& v) const {
  const Index points = points_per_mask();
  CVec acc = CVec::Zero(cols());
  CVec buf(points);
  for (int m = 0; m < mask_count(); ++m) {
    buf = v.segment(m * points, points);
    fft_->backward(buf.data());
    if (two_dim_) {
      for (Index c = 0; c < side_; ++c)
        for (Index r = 0; r < side_; ++r)
          acc[r + c * side_] +=
              std::conj(masks_[m][r + c * side_]) * buf[r + c * n_fft_];
    } else {
      acc += masks_[m].conjugate().cwiseProduct(buf.head(side_));
    }
  }
  return scale_ * acc;
}

CVec MaskedDftOperator::do_gram_solve(const CVec& v) const {
  return v.cwiseQuotient(gram_diag_.cast<Complex>());
}

std::unique_ptr<SensingOperator> MaskedDftOperator::rescaled(
    double factor) const {
  auto copy = std::unique_ptr<MaskedDftOperator>(new MaskedDftOperator(*this));
  copy->scale_ *= factor;
  copy->gram_diag_ *= factor * factor;
  return copy;
}

std::unique_ptr<SensingOperator> MaskedDftOperator::clone() const {
  return std::unique_ptr<MaskedDftOperator>(new MaskedDftOperator(*this));
}

// ---------------------------------------------------------------------------
// Power iteration

PowerIterationResult power_iteration(
    const std::function<CVec(const CVec&)>& apply_fn, Index dim, double tol,
    int max_iters, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("power_iteration: empty operator");
  Rng rng(Rng::derive_seed(seed, 0x70776974ULL));  // start-vector stream
  CVec v(dim);
  for (Index i = 0; i < dim; ++i) {
    v[i] = Complex(1.0 + 0.01 * (rng.uniform() - 0.5),
                   0.01 * (rng.uniform() - 0.5));
  }
  v.normalize();

  PowerIterationResult res;
  double rho_prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= max_iters; ++it) {
    CVec w = apply_fn(v);
    if (w.size() != dim)
      throw std::invalid_argument("power_iteration: operator changed dimension");
    const double rho = std::real(v.dot(w));
    const double wn = w.norm();
    res.iterations = it;
    if (wn == 0.0) {  // operator annihilates the iterate
      res.vector = std::move(v);
      res.value = 0.0;
      res.converged = true;
      return res;
    }
    v = w / wn;
    if (it > 1 &&
        std::abs(rho - rho_prev) <= tol * std::max(std::abs(rho), 1e-300)) {
      res.vector = std::move(v);
      res.value = rho;
      res.converged = true;
      return res;
    }
    rho_prev = rho;
  }
  res.vector = std::move(v);
  res.value = rho_prev;
  res.converged = false;
  return res;
}

EigEstimate max_eig_hermitian(const std::function<CVec(const CVec&)>& apply_fn,
                              Index dim, double tol, int max_iters,
                              std::uint64_t seed) {
  const PowerIterationResult r = power_iteration(apply_fn, dim, tol, max_iters, seed);
  return EigEstimate{r.value, r.iterations, r.converged};
}

}  // namespace pdmm
