#include "ndis/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

namespace ndis {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed)
    : root_(seed), engine_(splitmix64(seed)) {}

RngStream RngStream::child(std::string_view label) const {
  return RngStream(splitmix64(root_ ^ fnv1a(label)));
}

RngStream RngStream::child(std::string_view label, std::uint64_t index) const {
  return RngStream(splitmix64(splitmix64(root_ ^ fnv1a(label)) + index));
}

double RngStream::uniform01() {
  // 53-bit mantissa from the top bits of one 64-bit draw.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box--Muller; u1 is kept away from 0 so the log is finite.
  double u1 = uniform01();
  double u2 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Eigen::VectorXd RngStream::normal_vector(Eigen::Index n) {
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = normal();
  return out;
}

Eigen::MatrixXd RngStream::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd out(rows, cols);
  // Row-major fill order so the draw sequence is part of the contract.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = normal();
  return out;
}

Eigen::VectorXd std_normal_sample(RngStream& stream, Eigen::Index n) {
  return stream.normal_vector(n);
}

int worker_count() {
  const char* env = std::getenv("NDIS_THREADS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || v < 1) return 1;
  return static_cast<int>(v);
}

}  // namespace ndis
