#ifndef NDIS_NDIS_CORE_HPP
#define NDIS_NDIS_CORE_HPP

#include <cstdint>
#include <vector>

#include "ndis/linalg.hpp"
#include "ndis/rng.hpp"

namespace ndis {

// Quadratic-form parameters (diagonal A, linear b, constant c) of the
// exponent whose clipped exponential expectation equals the
// indistinguishability spectrum of a Gaussian pair.
struct QuadForm {
  Vector a;  // diagonal of A
  Vector b;
  double c = 0.0;

  Eigen::Index dim() const { return a.size(); }
};

// One sampled point of an indistinguishability spectrum.
struct ISPoint {
  double eps;
  double delta;
};

// Quadratic-form extraction for a Gaussian pair at privacy parameter eps:
//   a = eigenvalues of I - S1 Sigma2^{-1} S1   (S1 = Sigma1^{1/2}),
//   b = -U^T S1 Sigma2^{-1} (mu1 - mu2),
//   c = eps + (logdet Sigma1 - logdet Sigma2)/2
//         - (mu1 - mu2)^T Sigma2^{-1} (mu1 - mu2) / 2.
QuadForm ndis_abc(const MvGaussian& n1, const MvGaussian& n2, double eps);

// max{0, 1 - exp(a.z^2/2 + b.z + c)}; exponents above 700 map to 0.
double g_eps(const QuadForm& q, const Eigen::Ref<const Vector>& z);

// Hoeffding sample count for accuracy alpha at failure probability gamma.
std::int64_t hoeffding_samples(double alpha, double gamma);

// Monte Carlo estimate of delta_{N1,N2}(eps): the mean of g_eps over
// ceil(ln(2/gamma) / (2 alpha^2)) standard-normal vectors. Within alpha of
// the true value with probability >= 1 - gamma; deterministic per seed.
double estimate_is(const MvGaussian& n1, const MvGaussian& n2, double eps,
                   double alpha, double gamma, std::uint64_t seed);

// Same estimator on a precomputed quadratic form whose c was produced at
// eps = 0; reused by is_curve so the factorization is done once per pair.
double estimate_is_quadform(const QuadForm& base, double eps, double alpha,
                            double gamma, std::uint64_t seed);

// One estimate per grid point (grid sorted ascending); the
// eps-independent parts of the factorization are computed once.
std::vector<ISPoint> is_curve(const MvGaussian& n1, const MvGaussian& n2,
                              const std::vector<double>& eps_grid,
                              double alpha, double gamma, std::uint64_t seed);

}  // namespace ndis

#endif  // NDIS_NDIS_CORE_HPP
