#ifndef NDIS_METRICS_HPP
#define NDIS_METRICS_HPP

#include <vector>

#include "ndis/linalg.hpp"

namespace ndis {

// Pairwise distance ratio: mean over column pairs (u, v) of the original of
// |proj_u - proj_v| / |u - v|, where proj_u is the projected image of
// column u (a row of D^T G); zero-distance pairs are skipped.
double pdr(const Eigen::Ref<const Matrix>& original,
           const Eigen::Ref<const Matrix>& projected);

// Dot product ratio: Pearson correlation between original and projected
// pairwise column dot products. Needs at least two pairs with variance.
double dpr(const Eigen::Ref<const Matrix>& original,
           const Eigen::Ref<const Matrix>& projected);

// |solution - reference| / |reference|.
double relative_l2_error(const Eigen::Ref<const Vector>& solution,
                         const Eigen::Ref<const Vector>& reference);

struct MetricSummary {
  double mean = 0.0;
  double halfwidth = 0.0;  // 95% normal interval over trials
};

MetricSummary summarize(const std::vector<double>& trials);

}  // namespace ndis

#endif  // NDIS_METRICS_HPP
