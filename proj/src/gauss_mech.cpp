#include "ndis/gauss_mech.hpp"

#include <cmath>

#include "ndis/errors.hpp"
#include "ndis/numerics.hpp"

namespace ndis {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt8 = 2.8284271247461903;

// Calibration bracket on t = s/sigma; delta(50, eps) is 1 for any
// practical eps and delta(1e-8, eps) is 0 to double precision.
constexpr double kTLo = 1e-8;
constexpr double kTHi = 50.0;

}  // namespace

double gauss_delta(double t, double eps) {
  if (t < 0.0) throw Error("gauss_delta: t must be >= 0");
  if (eps < 0.0) throw Error("gauss_delta: eps must be >= 0");
  if (t == 0.0) return 0.0;
  const double a = -eps / (kSqrt2 * t);
  const double b = t / kSqrt8;
  const double value = 0.5 * (1.0 - std::exp(eps)) +
                       0.5 * (erf(a + b) - std::exp(eps) * erf(a - b));
  return clamp_probability(value);
}

double calibrate_sigma(double s, double eps, double delta) {
  if (!(s > 0.0)) throw Error("calibrate_sigma: s must be > 0");
  if (eps < 0.0) throw Error("calibrate_sigma: eps must be >= 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw Degenerate("calibrate_sigma: delta must be in (0, 1)");
  // delta depends on s and sigma only through t = s/sigma, so calibrate t
  // at unit sensitivity and scale.
  const double t = bisect([eps](double tt) { return gauss_delta(tt, eps); },
                          kTLo, kTHi, delta);
  return s / t;
}

DworkComparison dwork_compare(double eps, double delta) {
  if (!(eps > 0.0)) throw Error("dwork_compare: eps must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw Degenerate("dwork_compare: delta must be in (0, 1)");
  DworkComparison out;
  out.sigma_dwork = std::sqrt(2.0 * std::log(1.25 / delta)) / eps;
  out.sigma_tight = calibrate_sigma(1.0, eps, delta);
  out.reduction_ratio = out.sigma_tight / out.sigma_dwork;
  out.delta_tight = gauss_delta(1.0 / out.sigma_dwork, eps);
  return out;
}

}  // namespace ndis
