#ifndef NDIS_LINALG_HPP
#define NDIS_LINALG_HPP

#include <Eigen/Core>
#include <utility>

#include "ndis/errors.hpp"

namespace ndis {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative floor below which a symmetric matrix is rejected as not positive
// definite: smallest eigenvalue must exceed kSpdFloor * largest.
inline constexpr double kSpdFloor = 1e-12;

// Multivariate Gaussian: mean plus symmetric positive definite covariance.
struct MvGaussian {
  Vector mu;
  Matrix sigma;

  Eigen::Index dim() const { return mu.size(); }
};

// Regression system: n x d feature matrix B and n-vector response b; the
// concatenation [B, b] is the data matrix the leverage/residual facts
// operate on.
struct RegressionData {
  Matrix B;
  Vector b;

  Eigen::Index rows() const { return B.rows(); }
  Eigen::Index cols() const { return B.cols(); }
  Matrix joined() const {
    Matrix d(B.rows(), B.cols() + 1);
    d << B, b;
    return d;
  }
};

// Symmetric eigendecomposition M = U diag(vals) U^T with eigenvalues sorted
// descending. Throws NotSymmetric when the asymmetry exceeds tolerance.
std::pair<Vector, Matrix> sym_evd(const Eigen::Ref<const Matrix>& m);

// M^{-1/2} for SPD M; throws NotSpd when the eigenvalue floor is violated.
Matrix inv_sqrt(const Eigen::Ref<const Matrix>& m);

// log det(M) for SPD M as the sum of log eigenvalues.
double logdet(const Eigen::Ref<const Matrix>& m);

// Leverage scores p_i = v_i^T (D^T D)^{-1} v_i for the rows v_i of D,
// computed by solving rather than inverting. Throws RankDeficient.
Vector leverage_scores(const Eigen::Ref<const Matrix>& d);

// OLS solution, residual vector, and normalized per-row residuals
// e_i^2 / ||e||^2 (all zero when the fit is exact).
struct Residuals {
  Vector x_opt;
  Vector e;
  Vector per_row;
};
Residuals residuals(const RegressionData& r);

// True when the d x d Gram matrix of m passes the SPD floor, i.e. m has
// full column rank for our purposes.
bool has_full_column_rank(const Eigen::Ref<const Matrix>& m);

}  // namespace ndis

#endif  // NDIS_LINALG_HPP
