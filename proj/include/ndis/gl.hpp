#ifndef NDIS_GL_HPP
#define NDIS_GL_HPP

#include <cstdint>
#include <vector>

#include "ndis/linalg.hpp"
#include "ndis/rng.hpp"

namespace ndis {

// Record universe: one row per record. Records are treated as labeled, so
// subset enumeration is over row indices.
struct Universe {
  Matrix records;

  Eigen::Index size() const { return records.rows(); }
  Eigen::Index dim() const { return records.cols(); }
};

// Leverage of the record differing a neighbor pair, with respect to the
// larger database D = D_small plus v. Throws RankDeficient when D is
// singular.
double pair_leverage(const Eigen::Ref<const Matrix>& d_small,
                     const Eigen::Ref<const Vector>& v);

// The d standard basis vectors plus (sqrt(1/eps - 1), 0, ..., 0): a
// universe whose basis-vs-augmented pair has leverage exactly 1 - eps.
Universe gl_witness(int d, double eps);

struct ExactGlResult {
  double value = 0.0;
  Eigen::Index record = -1;                // index into the universe
  std::vector<Eigen::Index> subset;        // indices of the argmax database
};

// Brute-force max of v^T (D^T D)^{-1} v over size-k databases D containing
// v. A candidate pair counts only if D is full rank and, whenever D minus v
// still has at least d rows, D minus v is full rank as well (pairs whose
// smaller member cannot be full rank by size alone are kept, which is what
// makes a removed basis row of I_d score 1). Throws TooLarge when
// C(m-1, k-1) exceeds 1e6.
ExactGlResult exact_gl(const Universe& u, int k);

struct GreedyGlResult {
  double value = 0.0;
  int skipped = 0;  // candidate subsets dropped for rank deficiency
};

// Greedy heuristic: for each record u, form D from u and the k-1 records v
// minimizing K[u][v] = (|u|^2/|v|^2) cos^2(u, v), ties broken by ascending
// index, and score u against D.
GreedyGlResult greedy_gl(const Universe& u, int k);

// Alternating local search: exact argmax over records with the database
// fixed, then single-record swaps of the database with the record fixed.
// The objective never decreases; returns the best admissible value seen.
double bcd_gl(const Universe& u, int k, std::uint64_t seed, int max_iters);

// Property backing the row-monotonicity fact: prepending a record v to both
// members of a neighbor pair cannot increase the pair leverage.
bool check_row_monotonicity(const Eigen::Ref<const Matrix>& d0,
                            const Eigen::Ref<const Matrix>& d1,
                            const Eigen::Ref<const Vector>& v);

}  // namespace ndis

#endif  // NDIS_GL_HPP
