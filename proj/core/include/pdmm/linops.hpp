#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "pdmm/types.hpp"

namespace pdmm {

namespace detail {
class FftEngine;
}

/// Abstraction over the measurement matrix A. Backends share the operations
/// the solvers need: forward/adjoint products, Gram solves with the cached
/// factorization of AᴴA, pseudo-inverse application A†v = (AᴴA)⁻¹Aᴴv and
/// the column-space projection A A† v.
///
/// Operators are immutable after construction and safe to share across
/// threads; every operation is a pure function of its inputs.
class SensingOperator {
 public:
  virtual ~SensingOperator() = default;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  /// A x.
  CVec apply(const CVec& x) const;
  /// Aᴴ v.
  CVec adjoint_apply(const CVec& v) const;
  /// (AᴴA)⁻¹ v.
  CVec gram_solve(const CVec& v) const;
  /// A† v, the least-squares solution of A x ≈ v.
  CVec pinv_apply(const CVec& v) const;
  /// P v with P = A (AᴴA)⁻¹ Aᴴ, the projection onto the column space.
  CVec projection_apply(const CVec& v) const;

  /// A copy of this operator scaled by `factor`.
  virtual std::unique_ptr<SensingOperator> rescaled(double factor) const = 0;
  virtual std::unique_ptr<SensingOperator> clone() const = 0;

 protected:
  SensingOperator(Index rows, Index cols);
  virtual CVec do_apply(const CVec& x) const = 0;
  virtual CVec do_adjoint(const CVec& v) const = 0;
  virtual CVec do_gram_solve(const CVec& v) const = 0;
  virtual CVec do_projection(const CVec& v) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
};

/// Explicit complex N×K matrix with an eagerly cached Gram factorization.
/// Construction fails with std::invalid_argument when A is rank deficient.
/// The Gram matrix is factorized by Cholesky, falling back to a
/// column-pivoted QR of A when the Cholesky factor does not reproduce
/// AᴴA·solve(v) = v to 1e-10. The N×N projection matrix is cached only when
/// N does not exceed `projection_cache_cap`; above the cap projections are
/// composed as apply(pinv_apply(v)).
class DenseOperator final : public SensingOperator {
 public:
  static constexpr Index kDefaultProjectionCacheCap = 4096;

  explicit DenseOperator(CMat entries,
                         Index projection_cache_cap = kDefaultProjectionCacheCap);

  const CMat& entries() const { return a_; }
  bool projection_cached() const { return projection_.size() > 0; }

  std::unique_ptr<SensingOperator> rescaled(double factor) const override;
  std::unique_ptr<SensingOperator> clone() const override;

 protected:
  CVec do_apply(const CVec& x) const override;
  CVec do_adjoint(const CVec& v) const override;
  CVec do_gram_solve(const CVec& v) const override;
  CVec do_projection(const CVec& v) const override;

 private:
  Index projection_cache_cap_;
  CMat a_;
  Eigen::LLT<CMat> gram_llt_;
  bool use_qr_ = false;
  CMat qr_r_;                           // K×K upper factor of A·Π = Q·R
  Eigen::PermutationMatrix<Eigen::Dynamic> qr_perm_;
  CMat projection_;                     // N×N, empty above the cache cap
};

/// Matrix-free masked-DFT operator: per mask m the measurement block is the
/// padded DFT of Dᵐ∘x, scaled by a global factor s. For a length-K signal
/// the padded length is 2K−1; for a side×side image each dimension is padded
/// to 2·side−1 and signals are flattened column-major. Because the DFT
/// columns restricted to the first K indices are orthogonal, AᴴA is diagonal
/// with diag = s²·N·Σₘ|Dᵐ|² (N the per-mask point count), which keeps Gram
/// solves and pseudo-inverse applications O(M·N log N).
class MaskedDftOperator final : public SensingOperator {
 public:
  /// 1-D operator over signals of length K = masks[m].size().
  static MaskedDftOperator make_1d(std::vector<CVec> masks, double scale = 1.0);
  /// 2-D operator over side×side images; masks are flattened column-major.
  static MaskedDftOperator make_2d(Index side, std::vector<CVec> masks,
                                   double scale = 1.0);

  int mask_count() const { return static_cast<int>(masks_.size()); }
  const std::vector<CVec>& masks() const { return masks_; }
  double scale() const { return scale_; }
  bool two_dim() const { return two_dim_; }
  Index side() const { return side_; }
  /// Padded DFT length per dimension (2·side−1).
  Index fft_size() const { return n_fft_; }
  /// Measurement count per mask.
  Index points_per_mask() const;
  /// diag(AᴴA), strictly positive for a full-rank operator.
  const RVec& gram_diagonal() const { return gram_diag_; }

  std::unique_ptr<SensingOperator> rescaled(double factor) const override;
  std::unique_ptr<SensingOperator> clone() const override;

 protected:
  CVec do_apply(const CVec& x) const override;
  CVec do_adjoint(const CVec& v) const override;
  CVec do_gram_solve(const CVec& v) const override;

 private:
  MaskedDftOperator(std::vector<CVec> masks, bool two_dim, Index side,
                    double scale);

  std::vector<CVec> masks_;
  bool two_dim_ = false;
  Index side_ = 0;
  Index n_fft_ = 0;
  double scale_ = 1.0;
  RVec gram_diag_;
  std::shared_ptr<const detail::FftEngine> fft_;
};

struct PowerIterationResult {
  CVec vector;       // unit norm
  double value = 0;  // Rayleigh quotient at the returned vector
  int iterations = 0;
  bool converged = false;
};

/// Power iteration for a Hermitian operator given as a callable v ↦ M v.
/// Converges to the eigenvalue of largest magnitude (signed value reported
/// through the Rayleigh quotient). The start vector is the normalized
/// all-ones vector with a deterministic seed-derived perturbation.
PowerIterationResult power_iteration(
    const std::function<CVec(const CVec&)>& apply_fn, Index dim,
    double tol = 1e-8, int max_iters = 5000, std::uint64_t seed = 0);

struct EigEstimate {
  double value = 0;
  int iterations = 0;
  bool converged = false;  // false: max_iters hit, value is the best estimate
};

/// Largest eigenvalue of a Hermitian PSD operator by power iteration,
/// stopping when the relative Rayleigh-quotient change drops below tol.
EigEstimate max_eig_hermitian(const std::function<CVec(const CVec&)>& apply_fn,
                              Index dim, double tol = 1e-8, int max_iters = 5000,
                              std::uint64_t seed = 0);

}  // namespace pdmm
