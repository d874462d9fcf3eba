#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Cholesky>
#include <cmath>

#include "ndis/ndis_core.hpp"
#include "ndis/numerics.hpp"
#include "ndis/ols.hpp"
#include "ndis/rng.hpp"
#include "oracles.hpp"

using namespace ndis;

namespace {

Matrix random_matrix(RngStream& s, int n, int d) {
  Matrix m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = s.normal();
  return m;
}

RegressionData synthetic(RngStream& s, int n, int d, double noise) {
  RegressionData r;
  r.B = random_matrix(s, n, d);
  const Vector truth = s.normal_vector(d);
  r.b = r.B * truth + noise * s.normal_vector(n);
  return r;
}

// Closed form of E[max{0, 1 - exp(b.Z + c)}] for a pure linear exponent.
double linear_expectation(double bnorm, double c) {
  if (bnorm == 0.0) return c < 0.0 ? -std::expm1(c) : 0.0;
  const double phi1 = 0.5 * std::erfc(c / (bnorm * std::sqrt(2.0)));
  const double phi2 =
      0.5 * std::erfc(c / (bnorm * std::sqrt(2.0)) + bnorm / std::sqrt(2.0));
  return phi1 - std::exp(c + 0.5 * bnorm * bnorm) * phi2;
}

}  // namespace

TEST_CASE("als exact fit returns the solution") {
  RngStream s(1);
  RegressionData r = synthetic(s, 12, 3, 0.0);
  const Vector x = als(r, 6, 99);
  const Vector x_opt = residuals(r).x_opt;
  CHECK((x - x_opt).norm() < 1e-8);
}

TEST_CASE("als consistency at large r") {
  RngStream s(2);
  RegressionData r = synthetic(s, 50, 2, 0.5);
  const Vector x_opt = residuals(r).x_opt;
  const Vector x = als(r, 10'000, 5);
  CHECK((x - x_opt).norm() / x_opt.norm() < 0.05);

  CHECK(als(r, 100, 5) == als(r, 100, 5));  // reproducible per seed
}

TEST_CASE("als_asymptotic") {
  RngStream s(3);
  RegressionData r = synthetic(s, 30, 2, 1.0);
  const AlsAsymptotic a1 = als_asymptotic(r, 500);
  const AlsAsymptotic a2 = als_asymptotic(r, 1000);
  CHECK(a1.cov.isApprox(2.0 * a2.cov, 1e-12));

  RegressionData exact = synthetic(s, 10, 2, 0.0);
  CHECK_THROWS_AS(als_asymptotic(exact, 100), Error);
}

TEST_CASE("als empirical covariance matches the limit") {
  RngStream s(4);
  RegressionData r = synthetic(s, 30, 2, 1.0);
  const AlsAsymptotic limit = als_asymptotic(r, 1000);
  const int reps = 4000;
  Matrix acc = Matrix::Zero(2, 2);
  Vector mean = Vector::Zero(2);
  std::vector<Vector> draws;
  draws.reserve(reps);
  RngStream root(606);
  for (int i = 0; i < reps; ++i) {
    RngStream gs = root.child("als", i);
    draws.push_back(als(r, 1000, gs));
    mean += draws.back();
  }
  mean /= reps;
  for (const Vector& x : draws)
    acc += (x - mean) * (x - mean).transpose();
  acc /= (reps - 1);
  CHECK((acc - limit.cov).norm() / limit.cov.norm() < 0.15);
}

TEST_CASE("quad_gauss_expectation pure linear reduction") {
  RngStream s(5);
  for (int trial = 0; trial < 10; ++trial) {
    Vector b = s.normal_vector(3);
    const double c = -1.0 + 2.0 * s.uniform01();
    const Vector a = Vector::Zero(3);
    CHECK(quad_gauss_expectation(a, b, c) ==
          doctest::Approx(linear_expectation(b.norm(), c)).epsilon(1e-8));
  }
  // Constant exponent.
  const Vector z3 = Vector::Zero(3);
  CHECK(quad_gauss_expectation(z3, z3, 0.5) == 0.0);
  CHECK(quad_gauss_expectation(z3, z3, -0.5) ==
        doctest::Approx(-std::expm1(-0.5)).epsilon(1e-12));

  Vector bad(2);
  bad << 0.5, 1.5;
  CHECK_THROWS_AS(quad_gauss_expectation(bad, Vector::Zero(2), 0.0),
                  InvalidWeights);
}

TEST_CASE("quad_gauss_expectation against direct Monte Carlo") {
  RngStream s(6);
  for (int trial = 0; trial < 3; ++trial) {
    Vector a(3), b(3);
    for (int i = 0; i < 3; ++i) {
      a[i] = -1.5 + 2.2 * s.uniform01();  // below 1
      b[i] = -1.0 + 2.0 * s.uniform01();
    }
    const double c = -0.5 + s.uniform01();
    const double expect = quad_gauss_expectation(a, b, c);

    RngStream mc(700 + trial);
    const int n = 2'000'000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double expo = c;
      for (int j = 0; j < 3; ++j) {
        const double z = mc.normal();
        expo += 0.5 * a[j] * z * z + b[j] * z;
      }
      if (expo < 700.0) acc += std::max(0.0, 1.0 - std::exp(expo));
    }
    CHECK(std::abs(expect - acc / n) < 0.005);
  }
}

TEST_CASE("delta_als basics") {
  CHECK(delta_als(0.0, 0.0, 100, 3, 1.0) == 0.0);
  CHECK_THROWS_AS(delta_als(0.5, 0.6, 100, 3, 1.0), InvalidLeverage);
  CHECK_THROWS_AS(delta_als(1.0, 0.5, 100, 3, 1.0), InvalidLeverage);

  // In [0, 1] across a parameter spread, including the singular line
  // (1-p)^2 = 1-q where the t-parameterization degenerates.
  for (double p : {0.0, 0.05, 0.2, 0.4}) {
    for (double dq : {0.0, 1e-9, 0.01, 0.2}) {
      const double q_sing = 1.0 - (1.0 - p) * (1.0 - p);
      for (double q : {p, p + dq, q_sing, q_sing + dq}) {
        if (q < p || q >= 0.999) continue;
        const double v = delta_als(q, p, 500, 4, 1.0);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }

  // Continuity across the singular line.
  const double p = 0.1;
  const double q_sing = 1.0 - 0.9 * 0.9;
  const double at = delta_als(q_sing, p, 1000, 10, 1.0);
  const double below = delta_als(q_sing - 1e-7, p, 1000, 10, 1.0);
  const double above = delta_als(q_sing + 1e-7, p, 1000, 10, 1.0);
  CHECK(std::abs(at - below) < 1e-4);
  CHECK(std::abs(at - above) < 1e-4);
}

TEST_CASE("delta_als matches the asymptotic-pair estimator") {
  RngStream s(7);
  RegressionData r = synthetic(s, 30, 2, 1.0);
  const Vector q_all = leverage_scores(r.joined());
  Eigen::Index row;
  const double q = q_all.maxCoeff(&row);
  const double p = leverage_scores(r.B)[row];

  RegressionData neighbor;
  neighbor.B = Matrix(r.B.rows() - 1, r.B.cols());
  neighbor.b = Vector(r.b.size() - 1);
  Eigen::Index at = 0;
  for (Eigen::Index i = 0; i < r.B.rows(); ++i) {
    if (i == row) continue;
    neighbor.B.row(at) = r.B.row(i);
    neighbor.b[at] = r.b[i];
    ++at;
  }

  const int rr = 1000;
  const AlsAsymptotic full = als_asymptotic(r, rr);
  const AlsAsymptotic less = als_asymptotic(neighbor, rr);
  const MvGaussian n1{full.mean, full.cov};
  const MvGaussian n2{less.mean, less.cov};
  for (double eps : {0.5, 1.0, 2.0}) {
    const double analytic = delta_als(q, p, rr, 2, eps);
    const double est = estimate_is(n1, n2, eps, 0.005, 0.01, 4040);
    CHECK(std::abs(analytic - est) < 0.01);
  }
}

TEST_CASE("residual_for_set") {
  // All members exact fits: residual zero.
  RngStream s(8);
  LsDomainSet exact;
  {
    RegressionData r = synthetic(s, 8, 2, 0.0);
    RegressionData smaller;
    smaller.B = r.B.topRows(7);
    smaller.b = r.b.head(7);
    exact.members = {r, smaller};
  }
  CHECK(residual_for_set(exact) == doctest::Approx(0.0));

  // Hand computation: B = (1;1), b = (0,2) against dropping either row.
  LsDomainSet hand;
  {
    RegressionData r;
    r.B = Matrix::Ones(2, 1);
    r.b = Vector(2);
    r.b << 0, 2;
    RegressionData first;
    first.B = Matrix::Ones(1, 1);
    first.b = Vector::Constant(1, 0.0);
    hand.members = {r, first};
  }
  CHECK(residual_for_set(hand) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(residual_for_set(hand) <= 1.0);
}

TEST_CASE("calibrate_ls_sigma") {
  const double l = 1.0;
  const int r = 1000, d = 2;
  const double eps = 1.0, delta = 1e-4;
  const double sigma = calibrate_ls_sigma(l, r, d, eps, delta);
  const double p = l * l / (sigma * sigma);
  CHECK(delta_als(2.0 * p, p, r, d, eps) <= delta + 1e-6);
  // Just below the calibrated sigma the bound is violated.
  const double p_low = l * l / (0.99 * 0.99 * sigma * sigma);
  CHECK(delta_als(std::min(2.0 * p_low, 0.999), p_low, r, d, eps) >
        delta - 1e-6);

  // sigma scales linearly with l, and tightening delta costs noise.
  CHECK(calibrate_ls_sigma(2.0 * l, r, d, eps, delta) ==
        doctest::Approx(2.0 * sigma).epsilon(1e-9));
  CHECK(calibrate_ls_sigma(l, r, d, eps, delta / 100.0) > sigma);
}

TEST_CASE("mech_ls") {
  RngStream s(9);
  RegressionData r = synthetic(s, 25, 2, 1.0);
  const double l = [&] {
    const Matrix j = r.joined();
    double m = 0.0;
    for (Eigen::Index i = 0; i < j.rows(); ++i) m = std::max(m, j.row(i).norm());
    return m;
  }();

  const MechLsResult one = mech_ls(r, 200, 1.0, 1e-3, l, 31);
  CHECK(one.output == mech_ls(r, 200, 1.0, 1e-3, l, 31).output);

  // Sample mean over repeated runs approaches the regularized solution.
  const RegressionData reg = regularize(r, one.spec.sigma);
  const AlsAsymptotic dist = als_asymptotic(reg, 200);
  Vector mean = Vector::Zero(2);
  const int reps = 10'000;
  for (int i = 0; i < reps; ++i)
    mean += mech_ls(r, 200, 1.0, 1e-3, l, 5000 + i).output;
  mean /= reps;
  const Vector sd =
      dist.cov.diagonal().cwiseSqrt() / std::sqrt(static_cast<double>(reps));
  for (int j = 0; j < 2; ++j)
    CHECK(std::abs(mean[j] - dist.mean[j]) < 3.0 * sd[j]);

  // Regularized leverage of any bounded universe row stays under l^2/sigma^2.
  const Matrix gram = reg.joined().transpose() * reg.joined();
  RngStream vs(10);
  for (int trial = 0; trial < 100; ++trial) {
    Vector v = vs.normal_vector(3);
    v *= l * vs.uniform01() / v.norm();
    CHECK(v.dot(gram.llt().solve(v)) <=
          l * l / (one.spec.sigma * one.spec.sigma) + 1e-12);
  }

  CHECK_THROWS_AS(mech_ls(r, 200, 1.0, 1e-3, l * 0.1, 1), NormViolation);
}

TEST_CASE("mech_als agrees with mech_ls in distribution") {
  RngStream s(11);
  RegressionData r = synthetic(s, 30, 2, 1.0);
  const double l = [&] {
    const Matrix j = r.joined();
    double m = 0.0;
    for (Eigen::Index i = 0; i < j.rows(); ++i) m = std::max(m, j.row(i).norm());
    return m;
  }();

  const int reps = 3000, rr = 1000;
  std::vector<double> ls_first, als_first;
  for (int i = 0; i < reps; ++i) {
    ls_first.push_back(mech_ls(r, rr, 1.0, 1e-2, l, 7000 + i).output[0]);
    als_first.push_back(mech_als(r, rr, 1.0, 1e-2, l, 9000 + i).output[0]);
  }
  // Coarse histogram distance between the 1-D projections.
  std::sort(ls_first.begin(), ls_first.end());
  std::sort(als_first.begin(), als_first.end());
  const double lo = std::min(ls_first.front(), als_first.front());
  const double hi = std::max(ls_first.back(), als_first.back());
  const int bins = 20;
  std::vector<double> h1(bins, 0.0), h2(bins, 0.0);
  for (double v : ls_first)
    h1[std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins))] +=
        1.0 / reps;
  for (double v : als_first)
    h2[std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins))] +=
        1.0 / reps;
  double dist = 0.0;
  for (int b = 0; b < bins; ++b) dist += 0.5 * std::abs(h1[b] - h2[b]);
  CHECK(dist < 0.05);

  CHECK(mech_als(r, rr, 1.0, 1e-2, l, 42).output ==
        mech_als(r, rr, 1.0, 1e-2, l, 42).output);
}

TEST_CASE("mech_ls_rel branches") {
  RngStream s(12);
  RegressionData r = synthetic(s, 60, 2, 1.0);
  LsDomainSet x;
  x.members.push_back(r);
  for (Eigen::Index drop = 0; drop < r.rows(); ++drop) {
    RegressionData member;
    member.B = Matrix(r.rows() - 1, 2);
    member.b = Vector(r.rows() - 1);
    Eigen::Index at = 0;
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      if (i == drop) continue;
      member.B.row(at) = r.B.row(i);
      member.b[at] = r.b[i];
      ++at;
    }
    x.members.push_back(member);
  }

  const double lev = leverage_for_ls_set(x);
  const double res = residual_for_set(x);
  const double l = 100.0;

  const double loose = delta_als(std::min(0.99, (lev + res) * 1.5),
                                 std::min(0.99, (lev + res) * 1.5) / 2.0,
                                 500, 2, 1.0);
  const MechLsResult free_run = mech_ls_rel(r, x, 500, 1.0, loose, l, 8);
  CHECK_FALSE(free_run.regularized);
  CHECK(free_run.spec.sigma == 0.0);

  const double tight = delta_als(lev + res, lev, 500, 2, 1.0) / 10.0;
  if (tight > 0.0) {
    const MechLsResult noisy = mech_ls_rel(r, x, 500, 1.0, tight, l, 8);
    CHECK(noisy.regularized);
    CHECK(noisy.spec.sigma > 0.0);
  }

  RegressionData outsider = synthetic(s, 10, 2, 1.0);
  CHECK_THROWS_AS(mech_ls_rel(outsider, x, 500, 1.0, 0.5, l, 8), NotInDomain);
}
