#ifndef NDIS_NUMERICS_HPP
#define NDIS_NUMERICS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "ndis/errors.hpp"

namespace ndis {

// Target absolute error for generalized chi-square CDF evaluation. The
// characteristic-function quadrature stops once its truncation bound is
// below this value.
inline constexpr double kGenChi2Tolerance = 1e-6;

// Sample count for the seeded Monte Carlo fallback of genchi2_cdf.
inline constexpr std::int64_t kGenChi2McSamples = 1'000'000;

// Error function, odd, range (-1, 1), |err| <= 1e-12.
double erf(double x);
double erfc(double x);

// Regularized lower incomplete gamma P(a, x); series for x < a+1,
// continued fraction otherwise.
double gamma_p(double a, double x);

// P(Y <= x) for Y ~ chi^2(r), r >= 1.
double chi2_cdf(int r, double x);

// P(Y <= x) for Y ~ chi'^2(r, lam); Poisson-mixture series, abs err <= 1e-10.
double noncentral_chi2_cdf(int r, double lam, double x);

// Weighted sum of independent noncentral chi-squares:
//   Q = sum_i w[i] * chi'^2(k[i], lam[i]).
struct GenChi2 {
  Eigen::VectorXd w;    // real weights, at least one nonzero
  Eigen::VectorXi k;    // degrees of freedom, each >= 1
  Eigen::VectorXd lam;  // noncentralities, each >= 0

  void validate() const;
};

// P(Q <= x) by characteristic-function inversion (Imhof-type oscillatory
// quadrature), abs err <= kGenChi2Tolerance; supports negative weights.
// Falls back to seeded Monte Carlo (kGenChi2McSamples draws) if the
// quadrature exceeds its evaluation budget.
double genchi2_cdf(const GenChi2& q, double x);

// One component of the inversion integrand, kept in a cancellation-free
// parameterization: weight w, dof k, and lam * w^2 (finite as w -> 0).
struct ImhofComponent {
  double w;
  double k;
  double lamw2;
};

// P(sum_i w_i chi'^2(k_i, lam_i) + N(0, gauss_var) <= x), where the caller
// passes x_centered = x - sum_i lam_i * w_i. Passing the centered threshold
// (instead of x) is what keeps the phase finite when some |w_i| is tiny but
// lam_i * w_i^2 is not.
double imhof_cdf_centered(const std::vector<ImhofComponent>& comps,
                          double gauss_var, double x_centered);

// Root finding on a monotone function: returns x in [lo, hi] with
// |f(x) - target| <= 1e-10 or bracket width <= 1e-12; at most 200 iterations.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double target);

inline double clamp_probability(double p) {
  if (p < 0.0) return 0.0;
  if (p > 1.0) return 1.0;
  return p;
}

}  // namespace ndis

#endif  // NDIS_NUMERICS_HPP
