#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "pdmm/model.hpp"

using namespace pdmm;

namespace {
std::shared_ptr<const SensingOperator> shared_identity(Index n) {
  return std::make_shared<DenseOperator>(CMat::Identity(n, n));
}
}  // namespace

TEST_CASE("forward_intensity") {
  SUBCASE("identity operator") {
    auto op = shared_identity(2);
    CVec x(2);
    x << Complex(3, 0), Complex(0, 4);
    RVec b = RVec::Ones(2);
    const RVec v = forward_intensity(*op, x, b);
    CHECK(v[0] == doctest::Approx(10.0));
    CHECK(v[1] == doctest::Approx(17.0));
  }
  SUBCASE("zero signal returns the background") {
    Rng rng(1);
    auto op = make_random_operator(6, 2, rng);
    RVec b(6);
    for (Index i = 0; i < 6; ++i) b[i] = rng.uniform();
    CHECK((forward_intensity(*op, CVec::Zero(2), b) - b).norm() == 0.0);
  }
  SUBCASE("matches elementwise recomputation from the dense entries") {
    Rng rng(2);
    auto op = make_random_operator(7, 3, rng);
    const auto& dop = dynamic_cast<const DenseOperator&>(*op);
    const CVec x = oracle::random_cvec(3, rng);
    RVec b(7);
    for (Index i = 0; i < 7; ++i) b[i] = rng.uniform();
    const RVec v = forward_intensity(*op, x, b);
    for (Index i = 0; i < 7; ++i) {
      Complex row_dot(0, 0);
      for (Index j = 0; j < 3; ++j) row_dot += dop.entries()(i, j) * x[j];
      CHECK(v[i] == doctest::Approx(std::norm(row_dot) + b[i]).epsilon(1e-12));
    }
    CHECK(v.minCoeff() >= b.minCoeff());
  }
}

TEST_CASE("sample_measurements") {
  SUBCASE("zero mean gives zero counts") {
    auto op = shared_identity(3);
    Rng rng(5);
    const PoissonProblem p =
        sample_measurements(op, CVec::Zero(3), RVec::Zero(3), rng);
    CHECK(p.y.norm() == 0.0);
  }
  SUBCASE("Poisson mean and variance bands at mean 100") {
    Rng rng(6);
    const int trials = 10000;
    double sum = 0, sumsq = 0;
    for (int t = 0; t < trials; ++t) {
      const double v = static_cast<double>(rng.poisson(100.0));
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / trials;
    const double var = sumsq / trials - mean * mean;
    CHECK(mean > 96.0);
    CHECK(mean < 104.0);
    CHECK(var > 80.0);
    CHECK(var < 120.0);
  }
  SUBCASE("inversion region: mean/variance at mean 5") {
    Rng rng(7);
    const int trials = 20000;
    double sum = 0, sumsq = 0;
    for (int t = 0; t < trials; ++t) {
      const double v = static_cast<double>(rng.poisson(5.0));
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / trials;
    CHECK(mean > 4.84);  // ±10 σ of the sample mean
    CHECK(mean < 5.16);
    CHECK(sumsq / trials - mean * mean > 4.0);
    CHECK(sumsq / trials - mean * mean < 6.0);
  }
  SUBCASE("fixed seed reproduces counts bit for bit") {
    auto op = shared_identity(4);
    CVec x(4);
    x << Complex(5, 0), Complex(0, 3), Complex(2, 2), Complex(9, 0);
    Rng r1(77), r2(77);
    const PoissonProblem p1 = sample_measurements(op, x, RVec::Ones(4), r1);
    const PoissonProblem p2 = sample_measurements(op, x, RVec::Ones(4), r2);
    CHECK((p1.y - p2.y).norm() == 0.0);
    CHECK(p1.y.minCoeff() >= 0.0);
  }
}

TEST_CASE("neg_log_likelihood") {
  SUBCASE("single measurement") {
    auto op = shared_identity(1);
    PoissonProblem p{op, RVec::Ones(1), RVec::Zero(1)};
    CHECK(neg_log_likelihood(p, CVec::Ones(1)) == doctest::Approx(1.0));
  }
  SUBCASE("zero counts sum the intensities (0 log 0 = 0)") {
    Rng rng(8);
    auto op = std::shared_ptr<const SensingOperator>(make_random_operator(6, 2, rng));
    const CVec x = oracle::random_cvec(2, rng);
    RVec b = RVec::Constant(6, 0.25);
    PoissonProblem p{op, RVec::Zero(6), b};
    CHECK(neg_log_likelihood(p, x) ==
          doctest::Approx(forward_intensity(*op, x, b).sum()).epsilon(1e-12));
  }
  SUBCASE("positive count at zero intensity returns the +infinity sentinel") {
    auto op = shared_identity(2);
    RVec y(2);
    y << 3, 1;
    PoissonProblem p{op, y, RVec::Zero(2)};
    CVec x(2);
    x << Complex(0, 0), Complex(1, 0);
    CHECK(std::isinf(neg_log_likelihood(p, x)));
  }
  SUBCASE("matches the compensated-summation oracle") {
    for (std::uint64_t seed : {21u, 22u, 23u}) {
      const auto inst = oracle::random_dense_instance(60, 8, 0.1, 40.0, seed);
      Rng rng(seed + 100);
      const CVec x = oracle::random_cvec(8, rng);
      const double f = neg_log_likelihood(inst.problem, x);
      const double ref = oracle::kahan_nll(inst.problem, x);
      CHECK(std::abs(f - ref) <= 1e-12 * (1.0 + std::abs(ref)));
    }
  }
  SUBCASE("global phase invariance") {
    const auto inst = oracle::random_dense_instance(40, 5, 0.1, 30.0, 31);
    Rng rng(32);
    const CVec x = oracle::random_cvec(5, rng);
    const double f = neg_log_likelihood(inst.problem, x);
    // Multiplication by i permutes/negates components exactly, so these are
    // bitwise identities.
    CHECK(neg_log_likelihood(inst.problem, Complex(0, 1) * x) == f);
    CHECK(neg_log_likelihood(inst.problem, Complex(-1, 0) * x) == f);
    for (double theta : {0.3, 1.7, 4.4}) {
      const double ft =
          neg_log_likelihood(inst.problem, std::polar(1.0, theta) * x);
      CHECK(std::abs(ft - f) <= 1e-12 * (1.0 + std::abs(f)));
    }
  }
}

TEST_CASE("saddle_objective reproduces the likelihood at the maximizing dual") {
  for (std::uint64_t seed : {41u, 42u, 43u}) {
    const auto inst = oracle::random_dense_instance(50, 6, 0.1, 60.0, seed);
    Rng rng(seed + 5);
    const CVec x = oracle::random_cvec(6, rng);
    const RVec v = forward_intensity(*inst.problem.op, x, inst.problem.b);
    const RVec z_opt = inst.problem.y.cwiseQuotient(v);
    const double h = saddle_objective(inst.problem, x, z_opt);
    const double f = neg_log_likelihood(inst.problem, x);
    CHECK(std::abs(h - f) <= 1e-10 * (1.0 + std::abs(f)));
    // Any other dual point lies below.
    RVec z_other = z_opt * 0.7;
    CHECK(saddle_objective(inst.problem, x, z_other) <= f + 1e-9);
  }
}

TEST_CASE("wirtinger_gradient") {
  SUBCASE("noiseless data gives a zero gradient") {
    Rng rng(51);
    auto op = std::shared_ptr<const SensingOperator>(make_random_operator(30, 4, rng));
    const CVec x = oracle::random_cvec(4, rng);
    RVec b = RVec::Constant(30, 0.1);
    const RVec y = forward_intensity(*op, x, b);
    PoissonProblem p{op, y, b};
    CHECK(wirtinger_gradient(p, x).norm() <=
          1e-10 * op->adjoint_apply(y.cast<Complex>()).norm());
  }
  SUBCASE("zero signal with positive background gives a zero gradient") {
    const auto inst = oracle::random_dense_instance(20, 3, 0.5, 10.0, 53);
    CHECK(wirtinger_gradient(inst.problem, CVec::Zero(3)).norm() == 0.0);
  }
  SUBCASE("matches central finite differences") {
    for (std::uint64_t seed : {61u, 62u}) {
      const auto inst = oracle::random_dense_instance(50, 8, 0.1, 50.0, seed);
      Rng rng(seed + 9);
      const CVec x = oracle::random_cvec(8, rng);
      const CVec g = wirtinger_gradient(inst.problem, x);
      const CVec fd = oracle::fd_gradient(inst.problem, x);
      CHECK((g - fd).norm() <= 1e-5 * (1.0 + g.norm()));
    }
  }
  SUBCASE("reports offending indices on division by zero") {
    auto op = shared_identity(2);
    RVec y(2);
    y << 3, 1;
    PoissonProblem p{op, y, RVec::Zero(2)};
    CVec x(2);
    x << Complex(0, 0), Complex(1, 0);
    CHECK_THROWS_WITH_AS(wirtinger_gradient(p, x),
                         doctest::Contains("indices 0"), std::domain_error);
  }
}

TEST_CASE("make_random_operator") {
  SUBCASE("deterministic entries inside the unit box") {
    Rng r1(71), r2(71);
    auto op1 = make_random_operator(8, 3, r1);
    auto op2 = make_random_operator(8, 3, r2);
    const auto& d1 = dynamic_cast<const DenseOperator&>(*op1);
    const auto& d2 = dynamic_cast<const DenseOperator&>(*op2);
    CHECK((d1.entries() - d2.entries()).norm() == 0.0);
    CHECK(d1.entries().real().minCoeff() >= 0.0);
    CHECK(d1.entries().real().maxCoeff() <= 1.0);
    CHECK(d1.entries().imag().minCoeff() >= 0.0);
    CHECK(d1.entries().imag().maxCoeff() <= 1.0);
  }
  SUBCASE("construction succeeds across seeds (full column rank)") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(seed);
      CHECK_NOTHROW(make_random_operator(8, 3, rng));
    }
  }
  SUBCASE("entry mean near 0.5") {
    Rng rng(73);
    auto op = make_random_operator(200, 50, rng);
    const auto& d = dynamic_cast<const DenseOperator&>(*op);
    CHECK(std::abs(d.entries().real().mean() - 0.5) < 0.05);
    CHECK(std::abs(d.entries().imag().mean() - 0.5) < 0.05);
  }
  SUBCASE("N <= K is rejected") {
    Rng rng(74);
    CHECK_THROWS_AS(make_random_operator(3, 3, rng), std::invalid_argument);
  }
}

TEST_CASE("make_masked_dft_operator") {
  SUBCASE("single mask is the plain zero-padded DFT") {
    Rng rng(81);
    auto op = make_masked_dft_operator(5, 1, rng);
    const auto& mop = dynamic_cast<const MaskedDftOperator&>(*op);
    CHECK(mop.mask_count() == 1);
    CHECK((mop.masks()[0] - CVec::Ones(5)).norm() == 0.0);
    CHECK(op->rows() == 9);
  }
  SUBCASE("mask density near one half") {
    Rng rng(82);
    auto op = make_masked_dft_operator(512, 21, rng);
    const auto& mop = dynamic_cast<const MaskedDftOperator&>(*op);
    double ones = 0, total = 0;
    for (int m = 1; m < mop.mask_count(); ++m) {
      ones += mop.masks()[m].real().sum();
      total += static_cast<double>(mop.masks()[m].size());
    }
    CHECK(std::abs(ones / total - 0.5) < 0.05);
  }
  SUBCASE("dense equality for small instances") {
    Rng rng(83);
    for (Index k : {4, 8}) {
      auto op = make_masked_dft_operator(k, 3, rng);
      const auto& mop = dynamic_cast<const MaskedDftOperator&>(*op);
      const CMat def = oracle::masked_dft_dense(mop);
      const CMat app = oracle::dense_of(mop);
      CHECK((def - app).norm() <= 1e-10 * def.norm());
    }
  }
}

TEST_CASE("normalize_operator") {
  SUBCASE("already normalized operator keeps its entries") {
    // A = I with x_ref = (1,1): |Ax|² = (1,1), mean exactly 1.
    const DenseOperator op(CMat::Identity(2, 2));
    auto normalized = normalize_operator(op, CVec::Ones(2));
    const auto& d = dynamic_cast<const DenseOperator&>(*normalized);
    CHECK((d.entries() - CMat::Identity(2, 2)).norm() == 0.0);
  }
  SUBCASE("scale invariance: doubling then normalizing is a no-op") {
    Rng rng(91);
    auto op = make_masked_dft_operator(6, 3, rng);
    const CVec x_ref = oracle::random_unit(6, rng);
    auto n1 = normalize_operator(*op, x_ref);
    auto doubled = op->rescaled(2.0);
    auto n2 = normalize_operator(*doubled, x_ref);
    const auto& m1 = dynamic_cast<const MaskedDftOperator&>(*n1);
    const auto& m2 = dynamic_cast<const MaskedDftOperator&>(*n2);
    CHECK(m1.scale() == doctest::Approx(m2.scale()).epsilon(1e-14));
  }
  SUBCASE("post-condition: mean intensity is one") {
    Rng rng(92);
    for (int rep = 0; rep < 3; ++rep) {
      auto op = make_random_operator(20, 4, rng);
      const CVec x_ref = oracle::random_cvec(4, rng);
      auto normalized = normalize_operator(*op, x_ref);
      const double mean =
          normalized->apply(x_ref).squaredNorm() / double(normalized->rows());
      CHECK(std::abs(mean - 1.0) <= 1e-12);
    }
  }
  SUBCASE("zero reference signal is rejected") {
    const DenseOperator op(CMat::Identity(2, 2));
    CHECK_THROWS_AS(normalize_operator(op, CVec::Zero(2)),
                    std::invalid_argument);
  }
}

TEST_CASE("make_problem validates counts and background") {
  auto op = shared_identity(2);
  RVec y(2);
  y << 1, -1;
  CHECK_THROWS_AS(make_problem(op, y, RVec::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(make_problem(op, RVec::Zero(2), RVec::Constant(2, -0.1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_problem(op, RVec::Zero(3), RVec::Zero(2)),
                  std::invalid_argument);
  CHECK_NOTHROW(make_problem(op, RVec::Zero(2), RVec::Zero(2)));
}
