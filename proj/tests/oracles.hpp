// Test-only oracles: plain quadrature and Monte Carlo references that stay
// independent of the library code paths they are used to check.
#ifndef NDIS_TESTS_ORACLES_HPP
#define NDIS_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
  return s * h / 3.0;
}

// Recursive adaptive Simpson.
inline double adaptive_simpson_step(const std::function<double(double)>& f,
                                    double a, double b, double fa, double fm,
                                    double fb, double whole, double tol,
                                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol = 1e-12,
                               int depth = 40) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

inline double normal_pdf(double x, double mu, double sd) {
  const double z = (x - mu) / sd;
  return std::exp(-0.5 * z * z) / (sd * 2.5066282746310002);
}

// delta(eps) of a 1-D Gaussian pair by direct quadrature of
// int max(0, p1(x) - e^eps p2(x)) dx.
inline double gaussian_pair_delta_1d(double mu1, double sd1, double mu2,
                                     double sd2, double eps) {
  const double lo = std::min(mu1 - 14.0 * sd1, mu2 - 14.0 * sd2);
  const double hi = std::max(mu1 + 14.0 * sd1, mu2 + 14.0 * sd2);
  const double ee = std::exp(eps);
  const auto f = [&](double x) {
    return std::max(0.0, normal_pdf(x, mu1, sd1) - ee * normal_pdf(x, mu2, sd2));
  };
  return adaptive_simpson(f, lo, hi, 1e-13, 48);
}

// P(|N(0,1)| <= x) by quadrature; equals erf(x / sqrt(2)).
inline double abs_normal_cdf(double x) {
  return adaptive_simpson([](double t) { return normal_pdf(t, 0.0, 1.0); },
                          -x, x, 1e-14, 48);
}

}  // namespace oracles

#endif  // NDIS_TESTS_ORACLES_HPP
