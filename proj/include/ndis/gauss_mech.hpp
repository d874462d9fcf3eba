#ifndef NDIS_GAUSS_MECH_HPP
#define NDIS_GAUSS_MECH_HPP

namespace ndis {

// Sensitivity/noise description of a Gaussian mechanism run.
struct SensitivitySpec {
  double s;      // global l2-sensitivity, >= 0
  double sigma;  // noise standard deviation, > 0
};

// Exact (epsilon, delta) spectrum of the Gaussian mechanism at
// t = ||f(D) - f(D')|| / sigma:
//   delta = (1 - e^eps)/2
//         + [erf(-eps/(sqrt2 t) + t/sqrt8) - e^eps erf(-eps/(sqrt2 t) - t/sqrt8)]/2,
// clamped to [0, 1]; t = 0 gives 0.
double gauss_delta(double t, double eps);

// Smallest sigma with gauss_delta(s/sigma, eps) <= delta, by bisection on t
// (delta is increasing in t). Throws Degenerate for delta outside (0, 1).
double calibrate_sigma(double s, double eps, double delta);

struct DworkComparison {
  double sigma_dwork;      // sqrt(2 ln(1.25/delta)) / eps at s = 1
  double sigma_tight;      // calibrate_sigma(1, eps, delta)
  double reduction_ratio;  // sigma_tight / sigma_dwork
  double delta_tight;      // delta actually achieved by sigma_dwork at eps
};

// Classical calibration vs. the exact spectrum, at unit sensitivity.
DworkComparison dwork_compare(double eps, double delta);

}  // namespace ndis

#endif  // NDIS_GAUSS_MECH_HPP
