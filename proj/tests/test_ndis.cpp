#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ndis/ndis_core.hpp"
#include "ndis/numerics.hpp"
#include "oracles.hpp"

using namespace ndis;

namespace {

MvGaussian standard(int d) {
  return {Vector::Zero(d), Matrix::Identity(d, d)};
}

}  // namespace

TEST_CASE("ndis_abc closed cases") {
  const MvGaussian n = standard(3);
  const QuadForm same = ndis_abc(n, n, 0.7);
  CHECK(same.a.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(same.b.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(same.c == doctest::Approx(0.7).epsilon(1e-12));

  // Equal covariance, shifted mean: a = 0, b = -v, c = eps - |v|^2/2.
  MvGaussian shifted = standard(3);
  shifted.mu << 0.5, -1.0, 2.0;
  const QuadForm qs = ndis_abc(shifted, standard(3), 1.3);
  CHECK(qs.a.cwiseAbs().maxCoeff() < 1e-10);
  std::vector<double> got{qs.b[0], qs.b[1], qs.b[2]};
  std::sort(got.begin(), got.end());
  // b is reported in the eigenbasis of a degenerate (zero) matrix, so only
  // its norm and the constant are pinned.
  CHECK(qs.b.norm() ==
        doctest::Approx(shifted.mu.norm()).epsilon(1e-10));
  CHECK(qs.c ==
        doctest::Approx(1.3 - 0.5 * shifted.mu.squaredNorm()).epsilon(1e-10));

  MvGaussian wide{Vector::Zero(1), Matrix::Constant(1, 1, 4.0)};
  const QuadForm q1 = ndis_abc(standard(1), wide, 0.9);
  CHECK(q1.a[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(q1.b[0] == doctest::Approx(0.0));
  CHECK(q1.c == doctest::Approx(0.9 - std::log(2.0)).epsilon(1e-12));

  MvGaussian bad{Vector::Zero(2), Matrix::Zero(2, 2)};
  CHECK_THROWS_AS(ndis_abc(bad, standard(2), 0.0), NotSpd);
  CHECK_THROWS_AS(ndis_abc(standard(2), standard(3), 0.0), DimMismatch);
}

TEST_CASE("g_eps") {
  QuadForm q;
  q.a = Vector::Zero(2);
  q.b = Vector::Zero(2);
  q.c = 0.0;
  Vector z(2);
  z << 0.3, -0.8;
  CHECK(g_eps(q, z) == 0.0);

  q.c = -1000.0;
  CHECK(g_eps(q, z) == doctest::Approx(1.0));

  QuadForm q1;
  q1.a = Vector::Constant(1, 0.75);
  q1.b = Vector::Zero(1);
  q1.c = -std::log(2.0);
  Vector zero1 = Vector::Zero(1);
  CHECK(g_eps(q1, zero1) == doctest::Approx(0.5).epsilon(1e-12));

  // Overflow guard: a huge positive exponent is a zero contribution.
  QuadForm hot;
  hot.a = Vector::Zero(1);
  hot.b = Vector::Zero(1);
  hot.c = 1e6;
  CHECK(g_eps(hot, zero1) == 0.0);
}

TEST_CASE("estimate_is identical pair is exactly zero") {
  const MvGaussian n = standard(2);
  CHECK(estimate_is(n, n, 0.0, 0.05, 0.05, 7) == 0.0);
  CHECK(estimate_is(n, n, 1.0, 0.05, 0.05, 7) == 0.0);
}

TEST_CASE("estimate_is matches closed forms at eps = 0") {
  MvGaussian n1 = standard(1);
  MvGaussian n2 = standard(1);
  n2.mu[0] = 1.0;
  // erf(1/sqrt(8)) from the Gaussian-mechanism closed form.
  const double expect = ndis::erf(1.0 / std::sqrt(8.0));
  CHECK(expect == doctest::Approx(0.38292).epsilon(1e-4));
  const double est = estimate_is(n1, n2, 0.0, 0.01, 0.01, 1234);
  CHECK(std::abs(est - expect) < 0.01);

  MvGaussian wide = standard(1);
  wide.sigma(0, 0) = 4.0;
  const double oracle = oracles::gaussian_pair_delta_1d(0.0, 1.0, 0.0, 2.0, 0.0);
  const double est2 = estimate_is(standard(1), wide, 0.0, 0.01, 0.01, 99);
  CHECK(std::abs(est2 - oracle) < 0.01);
}

TEST_CASE("estimate_is determinism and sample count") {
  MvGaussian n1 = standard(2);
  MvGaussian n2 = standard(2);
  n2.mu << 0.4, -0.2;
  const double a = estimate_is(n1, n2, 0.3, 0.02, 0.05, 31);
  const double b = estimate_is(n1, n2, 0.3, 0.02, 0.05, 31);
  CHECK(a == b);
  CHECK(hoeffding_samples(0.01, 0.01) ==
        static_cast<std::int64_t>(
            std::ceil(std::log(200.0) / (2.0 * 0.01 * 0.01))));
}

TEST_CASE("halving alpha roughly halves the deviation") {
  MvGaussian n1 = standard(1);
  MvGaussian n2 = standard(1);
  n2.mu[0] = 0.8;
  const double truth = oracles::gaussian_pair_delta_1d(0.0, 1.0, 0.8, 1.0, 0.5);
  std::vector<double> coarse, fine;
  for (int seed = 0; seed < 30; ++seed) {
    coarse.push_back(
        std::abs(estimate_is(n1, n2, 0.5, 0.02, 0.05, 1000 + seed) - truth));
    fine.push_back(
        std::abs(estimate_is(n1, n2, 0.5, 0.01, 0.05, 2000 + seed) - truth));
  }
  std::sort(coarse.begin(), coarse.end());
  std::sort(fine.begin(), fine.end());
  // Quadrupling the sample count should halve the typical deviation; allow
  // sampling slack around the ideal factor 0.5.
  CHECK(fine[15] < 0.8 * coarse[15]);
}

TEST_CASE("is_curve") {
  const MvGaussian n = standard(1);
  const auto single = is_curve(n, n, {0.0}, 0.05, 0.05, 5);
  REQUIRE(single.size() == 1);
  CHECK(single[0].eps == 0.0);
  CHECK(single[0].delta == 0.0);

  CHECK(is_curve(n, n, {}, 0.05, 0.05, 5).empty());

  MvGaussian n2 = standard(1);
  n2.mu[0] = 1.2;
  const std::vector<double> grid{0.0, 0.25, 0.5, 1.0, 2.0};
  const auto pts = is_curve(n, n2, grid, 0.01, 0.05, 77);
  REQUIRE(pts.size() == grid.size());
  for (std::size_t i = 1; i < pts.size(); ++i)
    CHECK(pts[i].delta <= pts[i - 1].delta + 0.02);  // 2 alpha noise band
  for (const auto& pt : pts) {
    CHECK(pt.delta >= 0.0);
    CHECK(pt.delta <= 1.0);
  }

  std::vector<double> unsorted{1.0, 0.0};
  CHECK_THROWS_AS(is_curve(n, n2, unsorted, 0.05, 0.05, 1), Error);
}
