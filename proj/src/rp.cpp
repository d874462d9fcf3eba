#include "ndis/rp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <string>

#include "ndis/numerics.hpp"

namespace ndis {
namespace {

double chi2_surv(int r, double x) {
  if (x <= 0.0) return 1.0;
  return 1.0 - chi2_cdf(r, x);
}

RpSpec make_spec(int r, double eps, double delta, double l, double s_bar) {
  RpSpec spec;
  spec.r = r;
  spec.l = l;
  spec.eps = eps;
  spec.delta = delta;
  spec.s_bar = s_bar;
  spec.sigma = l * std::sqrt(1.0 / s_bar);
  return spec;
}

void check_row_norms(const Eigen::Ref<const Matrix>& d, double l) {
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    if (d.row(i).norm() > l * (1.0 + 1e-12))
      throw NormViolation("row " + std::to_string(i) +
                          " exceeds the universe norm bound");
}

}  // namespace

Eigen::Index extra_row_index(const Eigen::Ref<const Matrix>& big,
                             const Eigen::Ref<const Matrix>& small) {
  if (big.rows() != small.rows() + 1 || big.cols() != small.cols()) return -1;
  std::vector<bool> used(static_cast<std::size_t>(big.rows()), false);
  for (Eigen::Index i = 0; i < small.rows(); ++i) {
    bool matched = false;
    for (Eigen::Index j = 0; j < big.rows(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      if (small.row(i) == big.row(j)) {
        used[static_cast<std::size_t>(j)] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return -1;
  }
  for (Eigen::Index j = 0; j < big.rows(); ++j)
    if (!used[static_cast<std::size_t>(j)]) return j;
  return -1;
}

bool same_rows(const Eigen::Ref<const Matrix>& a,
               const Eigen::Ref<const Matrix>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  std::vector<bool> used(static_cast<std::size_t>(b.rows()), false);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    bool matched = false;
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      if (a.row(i) == b.row(j)) {
        used[static_cast<std::size_t>(j)] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

Matrix rp_sample(const Eigen::Ref<const Matrix>& d, int r, RngStream& stream) {
  if (r < 1) throw Error("rp_sample: r must be >= 1");
  const Matrix g = stream.normal_matrix(d.rows(), r);
  return d.transpose() * g;
}

double delta_rp(double p, int r, double eps) {
  if (p < 0.0 || p > 1.0) throw InvalidLeverage("delta_rp: p must be in [0,1]");
  if (eps < 0.0) throw Error("delta_rp: eps must be >= 0");
  if (r < 1) throw Error("delta_rp: r must be >= 1");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const double log1mp = std::log1p(-p);
  const double base = 2.0 * eps - r * log1mp;  // > 0 for p in (0,1)
  const double value = chi2_surv(r, (1.0 - p) * base / p) -
                       std::exp(eps) * chi2_surv(r, base / p);
  return clamp_probability(value);
}

double delta_rp_reverse(double p, int r, double eps) {
  if (p < 0.0 || p > 1.0)
    throw InvalidLeverage("delta_rp_reverse: p must be in [0,1]");
  if (eps < 0.0) throw Error("delta_rp_reverse: eps must be >= 0");
  if (r < 1) throw Error("delta_rp_reverse: r must be >= 1");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const double log1mp = std::log1p(-p);
  if (eps >= -0.5 * r * log1mp) return 0.0;
  const double base = -2.0 * eps - r * log1mp;  // > 0 on this branch
  const double value = chi2_cdf(r, base / p) -
                       std::exp(eps) * chi2_cdf(r, (1.0 - p) * base / p);
  return clamp_probability(value);
}

double delta_rlc(double s, double eps) {
  if (s < 0.0 || s > 1.0) throw InvalidLeverage("delta_rlc: s must be in [0,1]");
  if (eps < 0.0) throw Error("delta_rlc: eps must be >= 0");
  if (s == 0.0) return 0.0;
  if (s == 1.0) return 1.0;
  const double a = eps - 0.5 * std::log1p(-s);  // > 0 for s in (0,1)
  const double value = 1.0 - std::exp(eps) +
                       std::exp(eps) * erf(std::sqrt(a / s)) -
                       erf(std::sqrt(a * (1.0 - s) / s));
  return clamp_probability(value);
}

double calibrate_leverage_bar(int r, double eps, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw Error("calibrate_leverage_bar: delta must be in (0, 1)");
  return bisect([r, eps](double p) { return delta_rp(p, r, eps); }, 0.0, 1.0,
                delta);
}

double calibrate_leverage_bar_rlc(double eps, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw Error("calibrate_leverage_bar_rlc: delta must be in (0, 1)");
  return bisect([eps](double s) { return delta_rlc(s, eps); }, 0.0, 1.0,
                delta);
}

MechRpResult mech_rp(const Eigen::Ref<const Matrix>& d, int r, double eps,
                     double delta, double l, std::uint64_t seed) {
  check_row_norms(d, l);
  MechRpResult res;
  res.spec = make_spec(r, eps, delta, l, calibrate_leverage_bar(r, eps, delta));
  RngStream root(seed);
  RngStream gs = root.child("G");
  RngStream ns = root.child("N");
  // The noise matrix lives in the projected space: d x r entries of
  // N(0, sigma^2) added to D^T G.
  res.output = rp_sample(d, r, gs) +
               res.spec.sigma * ns.normal_matrix(d.cols(), r);
  res.noised = true;
  return res;
}

MechRpResult mech_rlc(const Eigen::Ref<const Matrix>& d, double eps,
                      double delta, double l, std::uint64_t seed) {
  check_row_norms(d, l);
  MechRpResult res;
  res.spec = make_spec(1, eps, delta, l, calibrate_leverage_bar_rlc(eps, delta));
  RngStream root(seed);
  RngStream gs = root.child("G");
  RngStream ns = root.child("N");
  res.output = rp_sample(d, 1, gs) +
               res.spec.sigma * ns.normal_matrix(d.cols(), 1);
  res.noised = true;
  return res;
}

double leverage_for_set(const DomainSet& x) {
  double best = 0.0;  // empty-max convention
  for (const Matrix& big : x.members) {
    for (const Matrix& small : x.members) {
      const Eigen::Index idx = extra_row_index(big, small);
      if (idx < 0) continue;
      if (!has_full_column_rank(big))
        throw RankDeficient("leverage_for_set: member is rank deficient");
      const Vector v = big.row(idx).transpose();
      Eigen::LLT<Matrix> llt(Matrix(big.transpose() * big));
      best = std::max(best, v.dot(llt.solve(v)));
    }
  }
  return best;
}

MechRpResult mech_rp_rel(const Eigen::Ref<const Matrix>& d, const DomainSet& x,
                         int r, double eps, double delta, double l,
                         std::uint64_t seed) {
  bool in_domain = false;
  for (const Matrix& m : x.members)
    if (same_rows(d, m)) {
      in_domain = true;
      break;
    }
  if (!in_domain) throw NotInDomain("mech_rp_rel: D is not a member of X");

  const double set_lev = leverage_for_set(x);
  const double s_bar = calibrate_leverage_bar(r, eps, delta);
  if (s_bar >= set_lev) {
    // The projection's inherent privacy already covers (eps, delta) on X.
    MechRpResult res;
    res.spec = make_spec(r, eps, delta, l, s_bar);
    RngStream root(seed);
    RngStream gs = root.child("G");
    res.output = rp_sample(d, r, gs);
    res.noised = false;
    res.set_leverage = set_lev;
    return res;
  }
  MechRpResult res = mech_rp(d, r, eps, delta, l, seed);
  res.set_leverage = set_lev;
  return res;
}

DomainSet neighbor_domain(const Eigen::Ref<const Matrix>& d,
                          const Eigen::Ref<const Matrix>& universe) {
  DomainSet x;
  if (has_full_column_rank(d)) x.members.push_back(d);
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    Matrix removed(d.rows() - 1, d.cols());
    Eigen::Index at = 0;
    for (Eigen::Index j = 0; j < d.rows(); ++j)
      if (j != i) removed.row(at++) = d.row(j);
    if (has_full_column_rank(removed)) x.members.push_back(std::move(removed));
  }
  for (Eigen::Index u = 0; u < universe.rows(); ++u) {
    Matrix added(d.rows() + 1, d.cols());
    added.topRows(d.rows()) = d;
    added.row(d.rows()) = universe.row(u);
    if (has_full_column_rank(added)) x.members.push_back(std::move(added));
  }
  return x;
}

}  // namespace ndis
