#ifndef NDIS_ERRORS_HPP
#define NDIS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ndis {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimMismatch : Error {
  explicit DimMismatch(const std::string& msg) : Error(msg) {}
};

struct NotSymmetric : Error {
  explicit NotSymmetric(const std::string& msg) : Error(msg) {}
};

struct NotSpd : Error {
  explicit NotSpd(const std::string& msg) : Error(msg) {}
};

struct RankDeficient : Error {
  explicit RankDeficient(const std::string& msg) : Error(msg) {}
};

struct BracketError : Error {
  explicit BracketError(const std::string& msg) : Error(msg) {}
};

struct NonConvergence : Error {
  explicit NonConvergence(const std::string& msg) : Error(msg) {}
};

struct Degenerate : Error {
  explicit Degenerate(const std::string& msg) : Error(msg) {}
};

struct InvalidWeights : Error {
  explicit InvalidWeights(const std::string& msg) : Error(msg) {}
};

struct InvalidLeverage : Error {
  explicit InvalidLeverage(const std::string& msg) : Error(msg) {}
};

struct MonotonicityViolation : Error {
  explicit MonotonicityViolation(const std::string& msg) : Error(msg) {}
};

struct NormViolation : Error {
  explicit NormViolation(const std::string& msg) : Error(msg) {}
};

struct NotInDomain : Error {
  explicit NotInDomain(const std::string& msg) : Error(msg) {}
};

struct SketchRankDeficient : Error {
  explicit SketchRankDeficient(const std::string& msg) : Error(msg) {}
};

struct TooLarge : Error {
  explicit TooLarge(const std::string& msg) : Error(msg) {}
};

struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

struct DegeneratePairs : Error {
  explicit DegeneratePairs(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
  ParseError(const std::string& msg, long row, long col)
      : Error(msg + " (row " + std::to_string(row) + ", col " +
              std::to_string(col) + ")"),
        row(row),
        col(col) {}
  long row;  // 1-based
  long col;  // 1-based
};

struct EmptyInput : Error {
  explicit EmptyInput(const std::string& msg) : Error(msg) {}
};

}  // namespace ndis

#endif  // NDIS_ERRORS_HPP
