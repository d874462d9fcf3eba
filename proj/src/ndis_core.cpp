#include "ndis/ndis_core.hpp"

#include <cmath>
#include <thread>

#include "ndis/numerics.hpp"

namespace ndis {
namespace {

constexpr std::int64_t kBatchSize = 1 << 16;

void check_pair(const MvGaussian& n1, const MvGaussian& n2) {
  if (n1.mu.size() != n2.mu.size() || n1.sigma.rows() != n2.sigma.rows())
    throw DimMismatch("ndis_abc: Gaussian dimensions differ");
  if (n1.sigma.rows() != n1.mu.size() || n1.sigma.cols() != n1.mu.size() ||
      n2.sigma.cols() != n2.mu.size())
    throw DimMismatch("ndis_abc: covariance shape does not match mean");
}

}  // namespace

QuadForm ndis_abc(const MvGaussian& n1, const MvGaussian& n2, double eps) {
  check_pair(n1, n2);
  const Eigen::Index d = n1.dim();

  auto [vals1, vecs1] = sym_evd(n1.sigma);
  auto [vals2, vecs2] = sym_evd(n2.sigma);
  const double floor1 = kSpdFloor * vals1[0];
  const double floor2 = kSpdFloor * vals2[0];
  if (!(vals1[0] > 0.0) || vals1[d - 1] <= floor1)
    throw NotSpd("ndis_abc: Sigma1 is not positive definite");
  if (!(vals2[0] > 0.0) || vals2[d - 1] <= floor2)
    throw NotSpd("ndis_abc: Sigma2 is not positive definite");

  const Matrix s1_half =
      vecs1 * vals1.cwiseSqrt().asDiagonal() * vecs1.transpose();
  const Matrix sigma2_inv =
      vecs2 * vals2.cwiseInverse().asDiagonal() * vecs2.transpose();

  Matrix core = Matrix::Identity(d, d) - s1_half * sigma2_inv * s1_half;
  auto [a, u] = sym_evd(core);

  const Vector dmu = n1.mu - n2.mu;
  QuadForm q;
  q.a = a;
  q.b = -u.transpose() * (s1_half * (sigma2_inv * dmu));
  q.c = eps +
        0.5 * (vals1.array().log().sum() - vals2.array().log().sum()) -
        0.5 * dmu.dot(sigma2_inv * dmu);
  return q;
}

double g_eps(const QuadForm& q, const Eigen::Ref<const Vector>& z) {
  if (z.size() != q.dim()) throw DimMismatch("g_eps: dimension mismatch");
  const double expo =
      0.5 * q.a.dot(z.cwiseProduct(z)) + q.b.dot(z) + q.c;
  if (expo > 700.0) return 0.0;
  return std::max(0.0, 1.0 - std::exp(expo));
}

std::int64_t hoeffding_samples(double alpha, double gamma) {
  if (!(alpha > 0.0 && alpha < 1.0 && gamma > 0.0 && gamma < 1.0))
    throw Error("hoeffding_samples: alpha, gamma must be in (0, 1)");
  return static_cast<std::int64_t>(
      std::ceil(std::log(2.0 / gamma) / (2.0 * alpha * alpha)));
}

double estimate_is_quadform(const QuadForm& base, double eps, double alpha,
                            double gamma, std::uint64_t seed) {
  QuadForm q = base;
  q.c += eps;
  const std::int64_t m = hoeffding_samples(alpha, gamma);
  const Eigen::Index d = q.dim();

  // Fixed-size batches, each on its own labeled stream, summed in batch
  // order: the result does not depend on how many workers execute them.
  const std::int64_t n_batches = (m + kBatchSize - 1) / kBatchSize;
  std::vector<double> sums(static_cast<std::size_t>(n_batches), 0.0);
  const RngStream root(seed);

  const auto run_batch = [&](std::int64_t bi) {
    RngStream s = root.child("is-batch", static_cast<std::uint64_t>(bi));
    const std::int64_t lo = bi * kBatchSize;
    const std::int64_t hi = std::min(m, lo + kBatchSize);
    double acc = 0.0;
    Vector z(d);
    for (std::int64_t i = lo; i < hi; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) z[j] = s.normal();
      acc += g_eps(q, z);
    }
    sums[static_cast<std::size_t>(bi)] = acc;
  };

  const int workers = std::min<std::int64_t>(worker_count(), n_batches);
  if (workers <= 1) {
    for (std::int64_t bi = 0; bi < n_batches; ++bi) run_batch(bi);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::int64_t bi = t; bi < n_batches; bi += workers)
          run_batch(bi);
      });
    }
    for (auto& th : pool) th.join();
  }

  double total = 0.0;
  for (double sv : sums) total += sv;
  return total / static_cast<double>(m);
}

double estimate_is(const MvGaussian& n1, const MvGaussian& n2, double eps,
                   double alpha, double gamma, std::uint64_t seed) {
  const QuadForm base = ndis_abc(n1, n2, 0.0);
  return estimate_is_quadform(base, eps, alpha, gamma, seed);
}

std::vector<ISPoint> is_curve(const MvGaussian& n1, const MvGaussian& n2,
                              const std::vector<double>& eps_grid,
                              double alpha, double gamma,
                              std::uint64_t seed) {
  for (std::size_t i = 1; i < eps_grid.size(); ++i)
    if (eps_grid[i] < eps_grid[i - 1])
      throw Error("is_curve: eps grid must be sorted ascending");
  std::vector<ISPoint> out;
  if (eps_grid.empty()) return out;
  // Only c depends on eps, so factorize once and shift c per grid point.
  const QuadForm base = ndis_abc(n1, n2, 0.0);
  out.reserve(eps_grid.size());
  for (double eps : eps_grid)
    out.push_back({eps, estimate_is_quadform(base, eps, alpha, gamma, seed)});
  return out;
}

}  // namespace ndis
