#ifndef NDIS_RNG_HPP
#define NDIS_RNG_HPP

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <string_view>

namespace ndis {

// Value-like seeded random stream. Streams are independent when derived from
// the same root seed with different labels, so concurrent consumers can each
// own one without sharing state. Normal variates use Box--Muller on top of
// mt19937_64 uniforms, which keeps the byte-for-byte output identical across
// standard library implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Independent stream derived from this stream's root seed and a label.
  RngStream child(std::string_view label) const;
  RngStream child(std::string_view label, std::uint64_t index) const;

  std::uint64_t root_seed() const { return root_; }

  double uniform01();               // in [0, 1)
  double normal();                  // standard normal
  Eigen::VectorXd normal_vector(Eigen::Index n);
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  std::uint64_t root_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// n iid standard normal draws; deterministic given the stream state.
Eigen::VectorXd std_normal_sample(RngStream& stream, Eigen::Index n);

// Worker cap from NDIS_THREADS; absent or unparsable means single-threaded.
int worker_count();

}  // namespace ndis

#endif  // NDIS_RNG_HPP
