#include "ndis/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace ndis {
namespace {

void check_symmetric(const Eigen::Ref<const Matrix>& m) {
  if (m.rows() != m.cols())
    throw NotSymmetric("sym_evd: matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw NotSymmetric("sym_evd: asymmetry exceeds tolerance");
}

// EVD with the SPD floor applied; shared by inv_sqrt/logdet.
std::pair<Vector, Matrix> spd_evd(const Eigen::Ref<const Matrix>& m,
                                  const char* who) {
  auto [vals, vecs] = sym_evd(m);
  const double top = vals[0];
  if (!(top > 0.0) || vals[vals.size() - 1] <= kSpdFloor * top)
    throw NotSpd(std::string(who) + ": eigenvalue floor violated");
  return {std::move(vals), std::move(vecs)};
}

}  // namespace

std::pair<Vector, Matrix> sym_evd(const Eigen::Ref<const Matrix>& m) {
  check_symmetric(m);
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw Error("sym_evd: eigensolver failed");
  // Eigen sorts ascending; the spectra here are consumed largest-first.
  const Eigen::Index d = sym.rows();
  Vector vals(d);
  Matrix vecs(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    vals[i] = solver.eigenvalues()[d - 1 - i];
    vecs.col(i) = solver.eigenvectors().col(d - 1 - i);
  }
  return {std::move(vals), std::move(vecs)};
}

Matrix inv_sqrt(const Eigen::Ref<const Matrix>& m) {
  auto [vals, vecs] = spd_evd(m, "inv_sqrt");
  return vecs * vals.cwiseSqrt().cwiseInverse().asDiagonal() *
         vecs.transpose();
}

double logdet(const Eigen::Ref<const Matrix>& m) {
  auto [vals, vecs] = spd_evd(m, "logdet");
  return vals.array().log().sum();
}

bool has_full_column_rank(const Eigen::Ref<const Matrix>& m) {
  if (m.rows() < m.cols()) return false;
  const Matrix gram = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success) return false;
  const double top = solver.eigenvalues().maxCoeff();
  return top > 0.0 && solver.eigenvalues().minCoeff() > kSpdFloor * top;
}

Vector leverage_scores(const Eigen::Ref<const Matrix>& d) {
  const Matrix gram = d.transpose() * d;
  auto [vals, vecs] = sym_evd(gram);
  const double top = vals[0];
  if (!(top > 0.0) || vals[vals.size() - 1] <= kSpdFloor * top)
    throw RankDeficient("leverage_scores: D is rank deficient");
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success)
    throw RankDeficient("leverage_scores: Cholesky failed");
  Vector p(d.rows());
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    const Vector v = d.row(i).transpose();
    p[i] = v.dot(llt.solve(v));
  }
  return p;
}

Residuals residuals(const RegressionData& r) {
  if (r.b.size() != r.B.rows())
    throw DimMismatch("residuals: B and b row counts differ");
  if (!has_full_column_rank(r.B))
    throw RankDeficient("residuals: B is rank deficient");
  Residuals out;
  const Matrix gram = r.B.transpose() * r.B;
  Eigen::LLT<Matrix> llt(gram);
  out.x_opt = llt.solve(r.B.transpose() * r.b);
  out.e = r.b - r.B * out.x_opt;
  const double ss = out.e.squaredNorm();
  // An exact fit leaves rounding dust in e; normalizing that would turn
  // noise into spurious residual shares.
  const double floor = 1e-24 * std::max(1.0, r.b.squaredNorm());
  out.per_row = Vector::Zero(r.B.rows());
  if (ss > floor) out.per_row = out.e.array().square() / ss;
  return out;
}

}  // namespace ndis
