#ifndef NDIS_OLS_HPP
#define NDIS_OLS_HPP

#include <cstdint>
#include <vector>

#include "ndis/linalg.hpp"
#include "ndis/rng.hpp"

namespace ndis {

// Limiting Gaussian of the sketched least-squares output: mean x_opt and
// covariance ||e||^2 (B^T B)^{-1} / r.
struct AlsAsymptotic {
  Vector mean;
  Matrix cov;
  int r = 1;
};

// Calibration output of the least-squares mechanisms.
struct LsMechSpec {
  double eps = 0.0;
  double delta = 0.0;
  int r = 1;
  int d = 1;
  double l = 0.0;      // max row norm of the [B, b] universe
  double sigma = 0.0;  // regularizer
};

// Sketch-and-solve least squares: x solving (G B) x ~ G b in the
// least-squares sense, with G an r x n standard Gaussian matrix.
// Resamples G up to 3 times if the sketch loses rank.
Vector als(const RegressionData& data, int r, RngStream& stream);
Vector als(const RegressionData& data, int r, std::uint64_t seed);

// Limiting distribution parameters; Degenerate when the fit is exact.
AlsAsymptotic als_asymptotic(const RegressionData& data, int r);

// E[max{0, 1 - exp(z^T A z / 2 + b^T z + c)}] over a standard Gaussian z,
// for diagonal A with every a_i < 1. Evaluated through two generalized
// chi-square CDFs; coordinates with a_i ~ 0 contribute pure Gaussian terms.
double quad_gauss_expectation(const Eigen::Ref<const Vector>& a,
                              const Eigen::Ref<const Vector>& b, double c);

// Spectrum of the asymptotic least-squares pair under one-row removal,
// as a function of the removed row's [B, b]-leverage q and B-leverage p:
// the max of the forward and reverse generalized chi-square expressions.
double delta_als(double q, double p, int r, int d, double eps);

// Domain of regression systems over a shared universe of [B, b] rows.
struct LsDomainSet {
  std::vector<RegressionData> members;
};

// Max normalized residual of the differing row over neighbor pairs in X.
double residual_for_set(const LsDomainSet& x);

// Max B-leverage of the differing row over neighbor pairs in X.
double leverage_for_ls_set(const LsDomainSet& x);

// Smallest sigma with delta_als(2 l^2/sigma^2, l^2/sigma^2) <= delta,
// assuming monotonicity of the spectrum in the leverage arguments; a probe
// along the search path raises MonotonicityViolation if that assumption is
// contradicted numerically.
double calibrate_ls_sigma(double l, int r, int d, double eps, double delta);

struct MechLsResult {
  Vector output;
  LsMechSpec spec;
  bool regularized = true;
  double set_leverage = -1.0;  // filled by the relative variant
  double set_residual = -1.0;
};

// Append sigma * I_{d+1} to [B, b], then sample once from the limiting
// Gaussian of the regularized system.
MechLsResult mech_ls(const RegressionData& data, int r, double eps,
                     double delta, double l, std::uint64_t seed);

// Same regularized system, but runs the sketch-and-solve algorithm instead
// of sampling from its limit; asymptotically the same output distribution.
MechLsResult mech_als(const RegressionData& data, int r, double eps,
                      double delta, double l, std::uint64_t seed);

// Relative variant: unregularized asymptotic sample when the set-level
// spectrum bound already meets delta, otherwise the mech_ls path.
MechLsResult mech_ls_rel(const RegressionData& data, const LsDomainSet& x,
                         int r, double eps, double delta, double l,
                         std::uint64_t seed);

// The regularized system [B, b; sigma I_{d+1}].
RegressionData regularize(const RegressionData& data, double sigma);

}  // namespace ndis

#endif  // NDIS_OLS_HPP
