#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace lphom {

inline constexpr int kMaxDim = 2;

// Small matrices and points: dimension 1 or 2, stored without heap allocation.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration or parameters (maps to CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A structural check on data failed (maps to CLI exit code 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A linear solve or iteration failed (maps to CLI exit code 3).
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace lphom
