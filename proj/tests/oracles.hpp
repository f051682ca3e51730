// Test-only reference implementations, deliberately independent of the
// library's computation paths: dense matrices built from definitions,
// quadratic-time transforms, bisection root finders and compensated sums.
#pragma once

#include <cmath>
#include <functional>
#include <memory>

#include <Eigen/Dense>

#include "pdmm/linops.hpp"
#include "pdmm/model.hpp"
#include "pdmm/rng.hpp"

namespace oracle {

using pdmm::Complex;
using pdmm::CMat;
using pdmm::CVec;
using pdmm::Index;
using pdmm::RMat;
using pdmm::RVec;

/// Dense matrix of a masked-DFT operator straight from the transform
/// definition (entrywise complex exponentials, no FFT).
inline CMat masked_dft_dense(const pdmm::MaskedDftOperator& op) {
  const Index points = op.points_per_mask();
  const Index nf = op.fft_size();
  CMat a(op.rows(), op.cols());
  const double tau = 2.0 * M_PI / static_cast<double>(nf);
  for (int m = 0; m < op.mask_count(); ++m) {
    const CVec& mask = op.masks()[m];
    if (op.two_dim()) {
      const Index s = op.side();
      for (Index nc = 0; nc < nf; ++nc)
        for (Index nr = 0; nr < nf; ++nr) {
          const Index row = m * points + nr + nc * nf;
          for (Index kc = 0; kc < s; ++kc)
            for (Index kr = 0; kr < s; ++kr) {
              const double angle =
                  tau * static_cast<double>(nr * kr + nc * kc);
              a(row, kr + kc * s) =
                  op.scale() * mask[kr + kc * s] * std::polar(1.0, -angle);
            }
        }
    } else {
      for (Index n = 0; n < nf; ++n)
        for (Index k = 0; k < op.cols(); ++k)
          a(m * points + n, k) =
              op.scale() * mask[k] *
              std::polar(1.0, -tau * static_cast<double>(n * k));
    }
  }
  return a;
}

/// Materializes any operator by applying it to basis vectors.
inline CMat dense_of(const pdmm::SensingOperator& op) {
  CMat a(op.rows(), op.cols());
  CVec e = CVec::Zero(op.cols());
  for (Index j = 0; j < op.cols(); ++j) {
    e[j] = Complex(1.0, 0.0);
    a.col(j) = op.apply(e);
    e[j] = Complex(0.0, 0.0);
  }
  return a;
}

/// Negative log-likelihood with Kahan-compensated long double summation.
inline double kahan_nll(const pdmm::PoissonProblem& problem, const CVec& x) {
  const CVec ax = problem.op->apply(x);
  long double sum = 0.0L;
  long double comp = 0.0L;
  for (Index i = 0; i < ax.size(); ++i) {
    const long double v =
        static_cast<long double>(std::norm(ax[i])) + problem.b[i];
    long double term = v;
    if (problem.y[i] > 0.0)
      term -= static_cast<long double>(problem.y[i]) * std::log(v);
    const long double t = sum + (term - comp);
    comp = (t - sum) - (term - comp);
    sum = t;
  }
  return static_cast<double>(sum);
}

/// Central finite differences of the likelihood in the real and imaginary
/// coordinates, packed as a complex vector matching wirtinger_gradient.
inline CVec fd_gradient(const pdmm::PoissonProblem& problem, const CVec& x,
                        double step = 1e-6) {
  CVec g(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    CVec xp = x, xm = x;
    xp[j] += step;
    xm[j] -= step;
    const double dre = (pdmm::neg_log_likelihood(problem, xp) -
                        pdmm::neg_log_likelihood(problem, xm)) /
                       (2.0 * step);
    xp = x;
    xm = x;
    xp[j] += Complex(0.0, step);
    xm[j] -= Complex(0.0, step);
    const double dim = (pdmm::neg_log_likelihood(problem, xp) -
                        pdmm::neg_log_likelihood(problem, xm)) /
                       (2.0 * step);
    g[j] = Complex(dre, dim);
  }
  return g;
}

/// Root of the stationarity equation c + 2hz + b − g − y/z − h = 0 over
/// z > 0 by bisection; requires y > 0 (the left side is then increasing
/// from −∞).
inline double bisect_dual_root(double y, double b, double c, double h,
                               double g = 0.0) {
  auto f = [&](double z) { return c + 2.0 * h * z + b - g - y / z - h; };
  double lo = 1e-300, hi = 1.0;
  int guard = 0;
  while (f(hi) < 0.0 && guard++ < 4200) hi *= 2.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Golden-section minimizer on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo,
                         double hi, int iters = 200) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < iters; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Global minimizer of the dual problem
///   min_{z≥0} zᵀM z + Σ(b_i−h_i)z_i − Σ y_i log z_i,  M = Re(Dᴴ P D),
/// by cyclic coordinate descent on a densely materialized projection matrix,
/// with per-coordinate bisection. Independent of the solver's linearized
/// iteration.
inline RVec dual_coordinate_descent(const CMat& a, const RVec& y, const RVec& b,
                                    const CVec& d, RVec z, int max_sweeps = 20000,
                                    double tol = 1e-13) {
  const CMat gram = a.adjoint() * a;
  const CMat p = a * gram.inverse() * a.adjoint();
  const RMat m =
      (d.conjugate().asDiagonal() * p * CMat(d.asDiagonal())).real();
  const Index n = y.size();
  const RVec lin0 = b - d.cwiseAbs2();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double r = 2.0 * (m.row(i).dot(z) - m(i, i) * z[i]);
      const double beta = r + lin0[i];
      double zi;
      if (y[i] > 0.0) {
        // 2 m_ii z + beta − y/z = 0, increasing in z: bisect.
        auto f = [&](double zz) { return 2.0 * m(i, i) * zz + beta - y[i] / zz; };
        double lo = 1e-300, hi = 1.0;
        int guard = 0;
        while (f(hi) < 0.0 && guard++ < 4200) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          (f(mid) < 0.0 ? lo : hi) = mid;
        }
        zi = 0.5 * (lo + hi);
      } else {
        zi = m(i, i) > 0.0 ? std::max(0.0, -beta / (2.0 * m(i, i)))
                           : (beta >= 0.0 ? 0.0 : z[i]);
      }
      max_change = std::max(max_change, std::abs(zi - z[i]));
      z[i] = zi;
    }
    if (max_change <= tol * std::max(1.0, z.norm())) break;
  }
  return z;
}

/// O(K²) linear autocorrelation, lag ℓ at index ℓ+K−1.
inline CVec direct_autocorr_linear(const CVec& x) {
  const Index k = x.size();
  CVec r = CVec::Zero(2 * k - 1);
  for (Index lag = -(k - 1); lag <= k - 1; ++lag) {
    Complex acc(0.0, 0.0);
    for (Index n = 0; n < k; ++n) {
      const Index j = n + lag;
      if (j >= 0 && j < k) acc += x[j] * std::conj(x[n]);
    }
    r[lag + k - 1] = acc;
  }
  return r;
}

/// O(K²) circular autocorrelation, lag ℓ at index ℓ.
inline CVec direct_autocorr_circular(const CVec& x) {
  const Index k = x.size();
  CVec r = CVec::Zero(k);
  for (Index lag = 0; lag < k; ++lag) {
    Complex acc(0.0, 0.0);
    for (Index n = 0; n < k; ++n) acc += x[(n + lag) % k] * std::conj(x[n]);
    r[lag] = acc;
  }
  return r;
}

// --- instance helpers -------------------------------------------------------

inline CVec random_cvec(Index n, pdmm::Rng& rng) {
  CVec x(n);
  for (Index i = 0; i < n; ++i) x[i] = Complex(rng.normal(), rng.normal());
  return x;
}

inline CVec random_unit(Index n, pdmm::Rng& rng) {
  CVec x = random_cvec(n, rng);
  x.normalize();
  return x;
}

struct Instance {
  pdmm::PoissonProblem problem;
  CVec x_true;
};

/// Random dense instance with Poisson counts; photon_scale rescales x_true.
inline Instance random_dense_instance(Index n, Index k, double b_value,
                                      double photon_scale, std::uint64_t seed) {
  pdmm::Rng rng(seed);
  std::shared_ptr<const pdmm::SensingOperator> op =
      pdmm::make_random_operator(n, k, rng);
  CVec x = std::sqrt(photon_scale) * random_unit(k, rng);
  RVec b = RVec::Constant(n, b_value);
  pdmm::PoissonProblem problem =
      pdmm::sample_measurements(op, x, std::move(b), rng);
  return Instance{std::move(problem), std::move(x)};
}

}  // namespace oracle
