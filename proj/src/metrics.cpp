#include "ndis/metrics.hpp"

#include <cmath>

namespace ndis {
namespace {

void check_shapes(const Eigen::Ref<const Matrix>& original,
                  const Eigen::Ref<const Matrix>& projected) {
  // Projected images of the original's columns are the rows of D^T G.
  if (projected.rows() != original.cols())
    throw ShapeMismatch("metrics: projected rows must match original columns");
}

}  // namespace

double pdr(const Eigen::Ref<const Matrix>& original,
           const Eigen::Ref<const Matrix>& projected) {
  check_shapes(original, projected);
  const Eigen::Index d = original.cols();
  double sum = 0.0;
  long count = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double dist = (original.col(i) - original.col(j)).norm();
      if (dist == 0.0) continue;
      sum += (projected.row(i) - projected.row(j)).norm() / dist;
      ++count;
    }
  }
  if (count == 0) throw DegeneratePairs("pdr: no column pair with distance");
  return sum / static_cast<double>(count);
}

double dpr(const Eigen::Ref<const Matrix>& original,
           const Eigen::Ref<const Matrix>& projected) {
  check_shapes(original, projected);
  const Eigen::Index d = original.cols();
  std::vector<double> xs, ys;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      xs.push_back(original.col(i).dot(original.col(j)));
      ys.push_back(projected.row(i).dot(projected.row(j)));
    }
  }
  if (xs.size() < 2)
    throw DegeneratePairs("dpr: fewer than 2 column pairs");
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DegeneratePairs("dpr: zero variance in dot products");
  return sxy / std::sqrt(sxx * syy);
}

double relative_l2_error(const Eigen::Ref<const Vector>& solution,
                         const Eigen::Ref<const Vector>& reference) {
  if (solution.size() != reference.size())
    throw ShapeMismatch("relative_l2_error: size mismatch");
  const double denom = reference.norm();
  if (denom == 0.0) throw Degenerate("relative_l2_error: zero reference");
  return (solution - reference).norm() / denom;
}

MetricSummary summarize(const std::vector<double>& trials) {
  MetricSummary s;
  if (trials.empty()) return s;
  const auto n = static_cast<double>(trials.size());
  for (double t : trials) s.mean += t;
  s.mean /= n;
  if (trials.size() < 2) return s;
  double var = 0.0;
  for (double t : trials) var += (t - s.mean) * (t - s.mean);
  var /= (n - 1.0);
  s.halfwidth = 1.959963984540054 * std::sqrt(var / n);
  return s;
}

}  // namespace ndis
