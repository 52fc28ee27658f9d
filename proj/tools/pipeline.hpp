#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace vecsturm::app {

struct Overrides {
  std::optional<std::string> out;
  std::optional<double> tol;
  std::optional<int> k_min;
  std::optional<int> k_max;
};

/// Throws ConfigParse when an override leaves the config invalid.
void apply_overrides(RunConfig& config, const Overrides& o);

/// 0 ok, 2 config or missing input, 3 regularity, 4 NonSimpleC, 5 numeric.
int exit_code(ErrorKind kind);

// Each stage reads the config plus the artifacts of earlier stages in the
// output directory and throws vecsturm::Error on fatal problems.
void stage_classify(const RunConfig& config, std::ostream& log);
void stage_base(const RunConfig& config, std::ostream& log);
void stage_predict(const RunConfig& config, std::ostream& log);
void stage_solve(const RunConfig& config, std::ostream& log);
void stage_oracle(const RunConfig& config, std::ostream& log);
void stage_verify(const RunConfig& config, std::ostream& log);
void stage_report(const RunConfig& config, std::ostream& log);

/// classify -> base -> predict -> solve -> oracle -> verify -> report.
void run_pipeline(const RunConfig& config, std::ostream& log);

/// Runs `stage` ("run" for the whole pipeline); errors become an exit status and
/// a single "error: <Kind>: <reason>" line on `err`.
int run_stage(const std::string& stage, const RunConfig& config, std::ostream& log, std::ostream& err);

}  // namespace vecsturm::app
