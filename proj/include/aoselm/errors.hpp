#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace aoselm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit together.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// Precondition on a scalar argument violated (negative count, c <= 0, ...).
class ArgumentError : public Error {
public:
  using Error::Error;
};

/// Rank figures attached to a failed factorization.
struct RankDiagnostics {
  std::size_t rank_before = 0;
  std::size_t rank_after = 0;
};

/// A factorization failed: the normal matrix is not (numerically) positive definite.
class SolverError : public Error {
public:
  explicit SolverError(const std::string& what,
                       std::optional<RankDiagnostics> ranks = std::nullopt)
      : Error(what), ranks_(ranks) {}

  const std::optional<RankDiagnostics>& ranks() const noexcept { return ranks_; }

private:
  std::optional<RankDiagnostics> ranks_;
};

/// A concept id was not found in the model's block registry.
class UnknownConceptError : public Error {
public:
  using Error::Error;
};

/// Malformed input file (IDX, CSV, model file, config).
class FormatError : public Error {
public:
  using Error::Error;
};

class VersionError : public FormatError {
public:
  using FormatError::FormatError;
};

class ChecksumError : public FormatError {
public:
  using FormatError::FormatError;
};

/// Experiment configuration failed validation.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace aoselm
