#include "ndis/gl.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "ndis/rp.hpp"

namespace ndis {
namespace {

Matrix gather_rows(const Matrix& records,
                   const std::vector<Eigen::Index>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), records.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = records.row(idx[i]);
  return out;
}

// Candidate value for record v_local inside database D, or nothing when the
// pair is not admissible (D singular, or D minus the record singular while
// large enough to be full rank).
std::optional<double> candidate_value(const Matrix& d, Eigen::Index v_local) {
  if (!has_full_column_rank(d)) return std::nullopt;
  if (d.rows() - 1 >= d.cols()) {
    Matrix rest(d.rows() - 1, d.cols());
    Eigen::Index at = 0;
    for (Eigen::Index j = 0; j < d.rows(); ++j)
      if (j != v_local) rest.row(at++) = d.row(j);
    if (!has_full_column_rank(rest)) return std::nullopt;
  }
  const Vector v = d.row(v_local).transpose();
  Eigen::LLT<Matrix> llt(Matrix(d.transpose() * d));
  return v.dot(llt.solve(v));
}

double binomial_guard(Eigen::Index m, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c *= static_cast<double>(m - k + i) / static_cast<double>(i);
    if (c > 1e15) return c;
  }
  return c;
}

}  // namespace

double pair_leverage(const Eigen::Ref<const Matrix>& d_small,
                     const Eigen::Ref<const Vector>& v) {
  if (v.size() != d_small.cols())
    throw DimMismatch("pair_leverage: record dimension mismatch");
  Matrix d(d_small.rows() + 1, d_small.cols());
  d.topRows(d_small.rows()) = d_small;
  d.row(d_small.rows()) = v.transpose();
  if (!has_full_column_rank(d))
    throw RankDeficient("pair_leverage: augmented database is rank deficient");
  Eigen::LLT<Matrix> llt(Matrix(d.transpose() * d));
  return v.dot(llt.solve(v));
}

Universe gl_witness(int d, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw Error("gl_witness: eps must be in (0, 1)");
  Universe u;
  u.records = Matrix::Zero(d + 1, d);
  u.records.topRows(d) = Matrix::Identity(d, d);
  u.records(d, 0) = std::sqrt(1.0 / eps - 1.0);
  return u;
}

ExactGlResult exact_gl(const Universe& u, int k) {
  const Eigen::Index m = u.size();
  if (k < 1 || k > m) throw Error("exact_gl: need 1 <= k <= m");
  if (binomial_guard(m - 1, k - 1) > 1e6)
    throw TooLarge("exact_gl: C(m-1, k-1) exceeds the enumeration guard");

  ExactGlResult best;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    const Matrix d = gather_rows(u.records, idx);
    for (Eigen::Index local = 0; local < d.rows(); ++local) {
      const auto value = candidate_value(d, local);
      if (value && *value > best.value) {
        best.value = *value;
        best.record = idx[static_cast<std::size_t>(local)];
        best.subset = idx;
      }
    }
    // next k-combination of {0, ..., m-1}
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

GreedyGlResult greedy_gl(const Universe& u, int k) {
  const Eigen::Index m = u.size();
  if (k < 2 || k > m) throw Error("greedy_gl: need 2 <= k <= m");
  GreedyGlResult out;

  std::vector<double> norm2(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) norm2[static_cast<std::size_t>(i)] =
      u.records.row(i).squaredNorm();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  for (Eigen::Index iu = 0; iu < m; ++iu) {
    // K[u][v] = (|u|^2 / |v|^2) cos^2(theta) = (u.v)^2 / |v|^4
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> key(static_cast<std::size_t>(m));
    for (Eigen::Index iv = 0; iv < m; ++iv) {
      const double dot = u.records.row(iu).dot(u.records.row(iv));
      const double n4 = norm2[static_cast<std::size_t>(iv)] *
                        norm2[static_cast<std::size_t>(iv)];
      key[static_cast<std::size_t>(iv)] =
          n4 > 0.0 ? dot * dot / n4 : std::numeric_limits<double>::infinity();
    }
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      const double ka = key[static_cast<std::size_t>(a)];
      const double kb = key[static_cast<std::size_t>(b)];
      if (ka != kb) return ka < kb;
      return a < b;  // ties by ascending record index
    });

    std::vector<Eigen::Index> subset;
    subset.push_back(iu);
    for (Eigen::Index pos = 0; pos < m && static_cast<int>(subset.size()) < k;
         ++pos)
      if (order[static_cast<std::size_t>(pos)] != iu)
        subset.push_back(order[static_cast<std::size_t>(pos)]);

    const Matrix d = gather_rows(u.records, subset);
    const auto value = candidate_value(d, 0);
    if (!value) {
      ++out.skipped;
      continue;
    }
    out.value = std::max(out.value, *value);
  }
  return out;
}

double bcd_gl(const Universe& u, int k, std::uint64_t seed, int max_iters) {
  const Eigen::Index m = u.size();
  if (k < 1 || k > m) throw Error("bcd_gl: need 1 <= k <= m");
  RngStream stream(seed);

  // Random full-rank starting database.
  std::vector<Eigen::Index> subset;
  for (int attempt = 0; attempt < 256; ++attempt) {
    std::vector<Eigen::Index> pool(static_cast<std::size_t>(m));
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = pool.size(); i > 1; --i)
      std::swap(pool[i - 1],
                pool[static_cast<std::size_t>(stream.uniform01() * i)]);
    pool.resize(static_cast<std::size_t>(k));
    if (has_full_column_rank(gather_rows(u.records, pool))) {
      subset = std::move(pool);
      break;
    }
  }
  if (subset.empty()) return 0.0;

  double best = 0.0;
  const auto record_best = [&](const Matrix& d) {
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      const auto value = candidate_value(d, i);
      if (value) best = std::max(best, *value);
    }
  };

  Matrix d = gather_rows(u.records, subset);
  record_best(d);
  Eigen::Index v_idx = subset[0];
  double objective = -1.0;

  for (int it = 0; it < max_iters; ++it) {
    // Record step: exact argmax of the quadratic form over the universe.
    Eigen::LLT<Matrix> llt(Matrix(d.transpose() * d));
    double best_form = -1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const Vector v = u.records.row(i).transpose();
      const double form = v.dot(llt.solve(v));
      if (form > best_form) {
        best_form = form;
        v_idx = i;
      }
    }

    // Database step: best single-record swap improving the form for v_idx.
    bool improved = true;
    while (improved) {
      improved = false;
      const Vector v = u.records.row(v_idx).transpose();
      Eigen::LLT<Matrix> cur(Matrix(d.transpose() * d));
      double cur_form = v.dot(cur.solve(v));
      for (std::size_t si = 0; si < subset.size(); ++si) {
        for (Eigen::Index t = 0; t < m; ++t) {
          if (std::find(subset.begin(), subset.end(), t) != subset.end())
            continue;
          std::vector<Eigen::Index> cand = subset;
          cand[si] = t;
          const Matrix dc = gather_rows(u.records, cand);
          if (!has_full_column_rank(dc)) continue;
          Eigen::LLT<Matrix> lc(Matrix(dc.transpose() * dc));
          const double form = v.dot(lc.solve(v));
          if (form > cur_form * (1.0 + 1e-12)) {
            subset = std::move(cand);
            d = dc;
            cur_form = form;
            improved = true;
          }
        }
      }
      record_best(d);
    }

    const Vector v = u.records.row(v_idx).transpose();
    Eigen::LLT<Matrix> fin(Matrix(d.transpose() * d));
    const double now = v.dot(fin.solve(v));
    if (now <= objective * (1.0 + 1e-12)) break;  // fixed point
    objective = now;
  }
  return best;
}

bool check_row_monotonicity(const Eigen::Ref<const Matrix>& d0,
                            const Eigen::Ref<const Matrix>& d1,
                            const Eigen::Ref<const Vector>& v) {
  if (!has_full_column_rank(d0) || !has_full_column_rank(d1))
    throw RankDeficient("check_row_monotonicity: pair must be full rank");
  const Eigen::Index idx = extra_row_index(d1, d0);
  if (idx < 0)
    throw Error("check_row_monotonicity: d1 must be d0 plus one row");
  const Vector diff = d1.row(idx).transpose();

  Eigen::LLT<Matrix> plain(Matrix(d1.transpose() * d1));
  const double lev = diff.dot(plain.solve(diff));

  Matrix aug(d1.rows() + 1, d1.cols());
  aug.row(0) = v.transpose();
  aug.bottomRows(d1.rows()) = d1;
  Eigen::LLT<Matrix> with_v(Matrix(aug.transpose() * aug));
  const double lev_aug = diff.dot(with_v.solve(diff));

  return lev >= lev_aug - 1e-12;
}

}  // namespace ndis
