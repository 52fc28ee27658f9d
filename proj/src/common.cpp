#include "vecsturm/common.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vecsturm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateCondition: return "DegenerateCondition";
    case ErrorKind::CoincidentRoots: return "CoincidentRoots";
    case ErrorKind::RankDeficiency: return "RankDeficiency";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::NormalizationBreakdown: return "NormalizationBreakdown";
    case ErrorKind::ContourThroughZero: return "ContourThroughZero";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::NonSimpleC: return "NonSimpleC";
    case ErrorKind::NoZeroInDisk: return "NoZeroInDisk";
    case ErrorKind::MultipleZeros: return "MultipleZeros";
    case ErrorKind::NullSpaceAmbiguity: return "NullSpaceAmbiguity";
    case ErrorKind::BiorthogonalBreakdown: return "BiorthogonalBreakdown";
    case ErrorKind::EliminationSingular: return "EliminationSingular";
    case ErrorKind::InsufficientRange: return "InsufficientRange";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::NotRegular: return "NotRegular";
    case ErrorKind::MissingArtifact: return "MissingArtifact";
  }
  return "Unknown";
}

std::optional<ErrorKind> error_kind_from_string(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ErrorKind::MissingArtifact); ++i) {
    const auto kind = static_cast<ErrorKind>(i);
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace vecsturm
