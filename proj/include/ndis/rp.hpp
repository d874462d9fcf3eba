#ifndef NDIS_RP_HPP
#define NDIS_RP_HPP

#include <cstdint>
#include <vector>

#include "ndis/linalg.hpp"
#include "ndis/rng.hpp"

namespace ndis {

// Calibration output of the projection mechanisms.
struct RpSpec {
  int r = 1;             // reduced dimensionality
  double l = 0.0;        // max record l2-norm over the universe
  double eps = 0.0;
  double delta = 0.0;
  double s_bar = 0.0;    // calibrated leverage bar in (0, 1)
  double sigma = 0.0;    // l * sqrt(1 / s_bar)
};

// A finite set of databases over a shared universe; neighbors differ by one
// row (as multisets).
struct DomainSet {
  std::vector<Matrix> members;
};

// D^T G with G an n x r matrix of iid standard normals.
Matrix rp_sample(const Eigen::Ref<const Matrix>& d, int r, RngStream& stream);

// Spectrum of the projection under one-row removal, as a function of the
// removed row's leverage p:
//   delta = P[Y >= (1-p)(2 eps - r ln(1-p))/p] - e^eps P[Y >= (2 eps - r ln(1-p))/p],
// Y ~ chi^2(r); 0 at p = 0, 1 at p = 1.
double delta_rp(double p, int r, double eps);

// Reverse-direction spectrum; 0 whenever eps >= -(r/2) ln(1-p) and never
// above delta_rp.
double delta_rp_reverse(double p, int r, double eps);

// Single-column (r = 1) spectrum in closed erf form.
double delta_rlc(double s, double eps);

// s_bar with delta_rp(s_bar, r, eps) = delta, by bisection on (0, 1).
double calibrate_leverage_bar(int r, double eps, double delta);
double calibrate_leverage_bar_rlc(double eps, double delta);

struct MechRpResult {
  Matrix output;   // d x r
  RpSpec spec;
  bool noised = true;
  double set_leverage = -1.0;  // filled by the relative variant
};

// Projection mechanism: D^T G + N with N d x r iid N(0, sigma^2),
// sigma = l sqrt(1/s_bar). Throws NormViolation if a row of D exceeds l.
MechRpResult mech_rp(const Eigen::Ref<const Matrix>& d, int r, double eps,
                     double delta, double l, std::uint64_t seed);

// r = 1 case calibrated against the closed-form single-column spectrum.
MechRpResult mech_rlc(const Eigen::Ref<const Matrix>& d, double eps,
                      double delta, double l, std::uint64_t seed);

// Max leverage of the differing row over all neighbor pairs inside X;
// 0 when X contains no neighbor pair.
double leverage_for_set(const DomainSet& x);

// Relative variant: unnoised D^T G when s_bar covers the set leverage,
// otherwise identical to mech_rp. Throws NotInDomain when D is not in X.
MechRpResult mech_rp_rel(const Eigen::Ref<const Matrix>& d, const DomainSet& x,
                         int r, double eps, double delta, double l,
                         std::uint64_t seed);

// X = {D} plus all one-row removals and all one-row additions from the
// universe rows, filtered to full-rank members.
DomainSet neighbor_domain(const Eigen::Ref<const Matrix>& d,
                          const Eigen::Ref<const Matrix>& universe);

// True when a and b are equal as row multisets up to exact comparison.
bool same_rows(const Eigen::Ref<const Matrix>& a,
               const Eigen::Ref<const Matrix>& b);

// If big equals small plus exactly one extra row (as multisets), the index
// of that row in big; otherwise -1.
Eigen::Index extra_row_index(const Eigen::Ref<const Matrix>& big,
                             const Eigen::Ref<const Matrix>& small);

}  // namespace ndis

#endif  // NDIS_RP_HPP
