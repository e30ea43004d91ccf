#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mfr {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Target co-located with a radar: range is zero and h(x) has no Jacobian.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// Covariance failed its SPD (or PSD) check.
class CovarianceError : public Error {
 public:
  using Error::Error;
};

/// Innovation covariance could not be inverted, or a value went non-finite.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an operation precondition (mismatched ids, scan index, sizes).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Scenario file failed to parse or violated an invariant. `path()` names the
/// offending field, e.g. "selector.alpha".
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Joint strategy space exceeds the enumeration cap.
class InstanceTooLargeError : public Error {
 public:
  InstanceTooLargeError(std::uint64_t joint_size, std::uint64_t cap)
      : Error("joint strategy space of size " + std::to_string(joint_size) +
              " exceeds enumeration cap " + std::to_string(cap)),
        joint_size_(joint_size) {}

  std::uint64_t joint_size() const noexcept { return joint_size_; }

 private:
  std::uint64_t joint_size_;
};

/// Regret-matching constant too small: the stay probability would be <= 0.
class MuViolationError : public Error {
 public:
  MuViolationError(double regret_sum, double mu)
      : Error("regret-matching mu=" + std::to_string(mu) +
              " does not exceed positive regret sum " + std::to_string(regret_sum)),
        regret_sum_(regret_sum) {}

  double regret_sum() const noexcept { return regret_sum_; }

 private:
  double regret_sum_;
};

}  // namespace mfr
