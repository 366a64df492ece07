#pragma once

#include <stdexcept>
#include <string>

namespace scan2map {

/// Rotation angle too close to pi for a unique logarithm branch.
class BranchAmbiguityError : public std::runtime_error {
 public:
  explicit BranchAmbiguityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Geometry does not constrain the requested solve: collinear pairs,
/// rank-deficient normal equations, or too few correspondences.
class DegenerateGeometryError : public std::runtime_error {
 public:
  explicit DegenerateGeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

class EmptyInputError : public std::runtime_error {
 public:
  explicit EmptyInputError(const std::string& msg) : std::runtime_error(msg) {}
};

class InsufficientPointsError : public std::runtime_error {
 public:
  explicit InsufficientPointsError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Ratio with a zero denominator (no reference points in the window).
class UndefinedRatioError : public std::runtime_error {
 public:
  explicit UndefinedRatioError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace scan2map
