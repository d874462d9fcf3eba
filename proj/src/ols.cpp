#include "ndis/ols.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <utility>

#include "ndis/numerics.hpp"
#include "ndis/rp.hpp"

namespace ndis {
namespace {

// Coordinates whose quadratic coefficient is below this threshold are
// treated as exact linear (Gaussian) terms.
constexpr double kQuadZero = 1e-14;

Vector solve_ls(const Matrix& m, const Vector& rhs, int d) {
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  qr.setThreshold(1e-10);
  if (qr.rank() < d) throw RankDeficient("least-squares system lost rank");
  return qr.solve(rhs);
}

// Exponent parameters (a, b, c) of the forward or reverse spectrum of the
// asymptotic least-squares pair, in terms of the removed row's leverages.
// The a-vector has one distinguished entry; the remaining d-1 entries share
// a value and carry no linear term.
struct SpectrumExponent {
  double a1;
  double a_rest;
  double b1;
  double c;
};

SpectrumExponent forward_exponent(double q, double p, int r, int d,
                                  double eps) {
  SpectrumExponent e;
  const double omp = 1.0 - p;
  const double omq = 1.0 - q;
  e.a1 = 1.0 - omp * omp / omq;
  e.a_rest = 1.0 - omp / omq;
  e.b1 = std::sqrt(r * p * (q - p)) * omp / omq;
  e.c = eps - 0.5 * (d * std::log(omq) - (d + 1) * std::log(omp)) -
        0.5 * r * p * (q - p) / omq;
  return e;
}

SpectrumExponent reverse_exponent(double q, double p, int r, int d,
                                  double eps) {
  SpectrumExponent e;
  const double omp = 1.0 - p;
  const double omq = 1.0 - q;
  e.a1 = 1.0 - omq / (omp * omp);
  e.a_rest = 1.0 - omq / omp;
  e.b1 = std::sqrt(r * p * (q - p) * omq) / (omp * omp);
  e.c = eps + 0.5 * (d * std::log(omq) - (d + 1) * std::log(omp)) -
        0.5 * r * p * (q - p) / (omp * omp);
  return e;
}

// Shared core of quad_gauss_expectation. Builds the two generalized
// chi-square evaluations of the clipped-exponential expectation with the
// thresholds expanded symbolically, so coordinates crossing a_i -> 0 stay
// finite (this is also what resolves the spectrum's t-singularity at
// (1-p)^2 = (1-q) by continuity).
double clipped_exp_expectation(const std::vector<double>& a,
                               const std::vector<double>& b, double c) {
  const std::size_t d = a.size();
  for (double ai : a)
    if (!(ai < 1.0))
      throw InvalidWeights("quad_gauss_expectation: every a_i must be < 1");

  bool all_trivial = true;
  for (std::size_t i = 0; i < d; ++i)
    if (std::abs(a[i]) > kQuadZero || b[i] != 0.0) all_trivial = false;
  if (all_trivial) return c < 0.0 ? -std::expm1(c) : 0.0;

  std::vector<ImhofComponent> w1, w2;
  double gauss1 = 0.0, gauss2 = 0.0;
  double x1 = -2.0 * c;
  double x2 = -2.0 * c;
  double log_pref = c;
  for (std::size_t i = 0; i < d; ++i) {
    const double ai = a[i];
    const double bi = b[i];
    const double oma = 1.0 - ai;
    x2 -= bi * bi * (2.0 - ai) / (oma * oma);
    log_pref += -0.5 * std::log1p(-ai) + 0.5 * bi * bi / oma;
    if (std::abs(ai) <= kQuadZero) {
      gauss1 += 4.0 * bi * bi;
      gauss2 += 4.0 * bi * bi / (oma * oma * oma);
    } else {
      w1.push_back({ai, 1.0, bi * bi});
      w2.push_back({ai / oma, 1.0, bi * bi / (oma * oma * oma)});
    }
  }

  const double p1 = imhof_cdf_centered(w1, gauss1, x1);
  const double p2 = imhof_cdf_centered(w2, gauss2, x2);
  const double value = p1 - std::exp(std::min(log_pref, 700.0)) * p2;
  return clamp_probability(value);
}

double spectrum_expectation(const SpectrumExponent& e, int d) {
  std::vector<double> a(static_cast<std::size_t>(d), e.a_rest);
  std::vector<double> b(static_cast<std::size_t>(d), 0.0);
  a[0] = e.a1;
  b[0] = e.b1;
  return clipped_exp_expectation(a, b, e.c);
}

}  // namespace

RegressionData regularize(const RegressionData& data, double sigma) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  RegressionData out;
  out.B = Matrix::Zero(n + d + 1, d);
  out.B.topRows(n) = data.B;
  out.B.block(n, 0, d, d) = sigma * Matrix::Identity(d, d);
  out.b = Vector::Zero(n + d + 1);
  out.b.head(n) = data.b;
  out.b[n + d] = sigma;
  return out;
}

Vector als(const RegressionData& data, int r, RngStream& stream) {
  const Eigen::Index d = data.cols();
  if (r < d) throw Error("als: r must be at least the number of columns");
  if (!has_full_column_rank(data.B))
    throw RankDeficient("als: B is rank deficient");
  for (int attempt = 0; attempt < 3; ++attempt) {
    const Matrix g = stream.normal_matrix(r, data.rows());
    const Matrix gb = g * data.B;
    Eigen::ColPivHouseholderQR<Matrix> qr(gb);
    qr.setThreshold(1e-10);
    if (qr.rank() < d) continue;  // probability-zero event; resample
    return qr.solve(g * data.b);
  }
  throw SketchRankDeficient("als: sketch lost rank after 3 attempts");
}

Vector als(const RegressionData& data, int r, std::uint64_t seed) {
  RngStream root(seed);
  RngStream gs = root.child("G");
  return als(data, r, gs);
}

AlsAsymptotic als_asymptotic(const RegressionData& data, int r) {
  if (r < 1) throw Error("als_asymptotic: r must be >= 1");
  if (!has_full_column_rank(data.joined()))
    throw RankDeficient("als_asymptotic: [B, b] is rank deficient");
  const Residuals res = residuals(data);
  const double ss = res.e.squaredNorm();
  if (ss <= 0.0) throw Degenerate("als_asymptotic: exact fit, zero residual");
  AlsAsymptotic out;
  out.mean = res.x_opt;
  Eigen::LLT<Matrix> llt(Matrix(data.B.transpose() * data.B));
  out.cov = ss / r *
            llt.solve(Matrix::Identity(data.cols(), data.cols()));
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  out.r = r;
  return out;
}

double quad_gauss_expectation(const Eigen::Ref<const Vector>& a,
                              const Eigen::Ref<const Vector>& b, double c) {
  if (a.size() != b.size())
    throw DimMismatch("quad_gauss_expectation: a and b lengths differ");
  std::vector<double> av(a.data(), a.data() + a.size());
  std::vector<double> bv(b.data(), b.data() + b.size());
  return clipped_exp_expectation(av, bv, c);
}

double delta_als(double q, double p, int r, int d, double eps) {
  if (p < 0.0 || q < p || q >= 1.0)
    throw InvalidLeverage("delta_als: need 0 <= p <= q < 1");
  if (eps < 0.0) throw Error("delta_als: eps must be >= 0");
  if (r < 1 || d < 1) throw Error("delta_als: r, d must be >= 1");
  if (q == 0.0) return 0.0;
  const double fwd = spectrum_expectation(forward_exponent(q, p, r, d, eps), d);
  const double rev = spectrum_expectation(reverse_exponent(q, p, r, d, eps), d);
  return clamp_probability(std::max(fwd, rev));
}

double residual_for_set(const LsDomainSet& x) {
  double best = 0.0;
  for (const RegressionData& big : x.members) {
    const Matrix bigj = big.joined();
    for (const RegressionData& small : x.members) {
      const Eigen::Index idx = extra_row_index(bigj, small.joined());
      if (idx < 0) continue;
      if (!has_full_column_rank(big.B))
        throw RankDeficient("residual_for_set: member is rank deficient");
      best = std::max(best, residuals(big).per_row[idx]);
    }
  }
  return best;
}

double leverage_for_ls_set(const LsDomainSet& x) {
  DomainSet b_parts;
  for (const RegressionData& m : x.members) b_parts.members.push_back(m.B);
  return leverage_for_set(b_parts);
}

double calibrate_ls_sigma(double l, int r, int d, double eps, double delta) {
  if (!(l > 0.0)) throw Error("calibrate_ls_sigma: l must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw Error("calibrate_ls_sigma: delta must be in (0, 1)");
  // With p = l^2 / sigma^2 the target is delta_als(2p, p) = delta; q < 1
  // restricts p to (0, 1/2). Record the probes to check the monotonicity
  // assumption the calibration relies on.
  std::vector<std::pair<double, double>> probes;
  const auto f = [&](double p) {
    if (p <= 0.0) return 0.0;
    const double v = delta_als(2.0 * p, p, r, d, eps);
    probes.emplace_back(p, v);
    return v;
  };
  const double p_hi = 0.5 - 1e-9;
  if (f(p_hi) < delta)
    throw Error("calibrate_ls_sigma: delta unreachable within q < 1");
  const double p_star = bisect(f, 0.0, p_hi, delta);
  std::sort(probes.begin(), probes.end());
  for (std::size_t i = 1; i < probes.size(); ++i)
    if (probes[i].second < probes[i - 1].second - 1e-6)
      throw MonotonicityViolation(
          "calibrate_ls_sigma: spectrum decreased along the search path");
  return l / std::sqrt(p_star);
}

namespace {

Vector sample_gaussian(const AlsAsymptotic& dist, RngStream& stream) {
  Eigen::LLT<Matrix> llt(dist.cov);
  if (llt.info() != Eigen::Success)
    throw NotSpd("asymptotic covariance is not positive definite");
  return dist.mean + llt.matrixL() * stream.normal_vector(dist.mean.size());
}

void check_ls_row_norms(const RegressionData& data, double l) {
  const Matrix joined = data.joined();
  for (Eigen::Index i = 0; i < joined.rows(); ++i)
    if (joined.row(i).norm() > l * (1.0 + 1e-12))
      throw NormViolation("row " + std::to_string(i) +
                          " of [B, b] exceeds the universe norm bound");
}

LsMechSpec make_ls_spec(const RegressionData& data, int r, double eps,
                        double delta, double l, double sigma) {
  LsMechSpec spec;
  spec.eps = eps;
  spec.delta = delta;
  spec.r = r;
  spec.d = static_cast<int>(data.cols());
  spec.l = l;
  spec.sigma = sigma;
  return spec;
}

}  // namespace

MechLsResult mech_ls(const RegressionData& data, int r, double eps,
                     double delta, double l, std::uint64_t seed) {
  check_ls_row_norms(data, l);
  const int d = static_cast<int>(data.cols());
  const double sigma = calibrate_ls_sigma(l, r, d, eps, delta);
  MechLsResult res;
  res.spec = make_ls_spec(data, r, eps, delta, l, sigma);
  const RegressionData reg = regularize(data, sigma);
  const AlsAsymptotic dist = als_asymptotic(reg, r);
  RngStream root(seed);
  RngStream zs = root.child("Z");
  res.output = sample_gaussian(dist, zs);
  res.regularized = true;
  return res;
}

MechLsResult mech_als(const RegressionData& data, int r, double eps,
                      double delta, double l, std::uint64_t seed) {
  check_ls_row_norms(data, l);
  const int d = static_cast<int>(data.cols());
  const double sigma = calibrate_ls_sigma(l, r, d, eps, delta);
  MechLsResult res;
  res.spec = make_ls_spec(data, r, eps, delta, l, sigma);
  RngStream root(seed);
  RngStream gs = root.child("G");
  res.output = als(regularize(data, sigma), r, gs);
  res.regularized = true;
  return res;
}

MechLsResult mech_ls_rel(const RegressionData& data, const LsDomainSet& x,
                         int r, double eps, double delta, double l,
                         std::uint64_t seed) {
  bool in_domain = false;
  const Matrix joined = data.joined();
  for (const RegressionData& m : x.members)
    if (same_rows(joined, m.joined())) {
      in_domain = true;
      break;
    }
  if (!in_domain) throw NotInDomain("mech_ls_rel: data is not a member of X");

  const double lev = leverage_for_ls_set(x);
  const double res_set = residual_for_set(x);
  const int d = static_cast<int>(data.cols());

  MechLsResult res;
  res.set_leverage = lev;
  res.set_residual = res_set;
  if (lev + res_set < 1.0 &&
      delta_als(lev + res_set, lev, r, d, eps) <= delta) {
    res.spec = make_ls_spec(data, r, eps, delta, l, 0.0);
    const AlsAsymptotic dist = als_asymptotic(data, r);
    RngStream root(seed);
    RngStream zs = root.child("Z");
    res.output = sample_gaussian(dist, zs);
    res.regularized = false;
    return res;
  }
  MechLsResult noisy = mech_ls(data, r, eps, delta, l, seed);
  noisy.set_leverage = lev;
  noisy.set_residual = res_set;
  return noisy;
}

}  // namespace ndis
