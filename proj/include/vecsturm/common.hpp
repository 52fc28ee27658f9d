#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace vecsturm {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr cplx I{0.0, 1.0};

/// Failure categories. The names double as the machine-readable reasons
/// printed by the command line tool and stored in per-pair status fields.
enum class ErrorKind {
  InvalidArgument,
  DegenerateCondition,
  CoincidentRoots,
  RankDeficiency,
  OutOfDomain,
  NewtonDivergence,
  NormalizationBreakdown,
  ContourThroughZero,
  StepUnderflow,
  NonSimpleC,
  NoZeroInDisk,
  MultipleZeros,
  NullSpaceAmbiguity,
  BiorthogonalBreakdown,
  EliminationSingular,
  InsufficientRange,
  GridMismatch,
  ConfigParse,
  NotRegular,
  MissingArtifact,
};

std::string_view to_string(ErrorKind kind);
/// Inverse of to_string; nullopt for unknown names.
std::optional<ErrorKind> error_kind_from_string(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Each index runs exactly once; callers write results by index.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace vecsturm
