#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vecsturm/boundary.hpp"
#include "vecsturm/potential.hpp"

namespace vecsturm::app {

inline constexpr const char* kSchema = "vecsturm/1";

struct ProblemConfig {
  int m = 1;
  std::array<BoundaryRow, 2> rows{};
  nlohmann::json potential_spec;

  BoundaryConditionPair boundary() const { return {rows[0], rows[1]}; }
  MatrixPotential potential() const;
};

struct SolverConfig {
  double tol = 1e-10;          // propagator tolerance for refinement and traces
  double contour_tol = 1e-6;
  double residual_tol = 1e-14;
  double step_tol = 1e-13;
  double gap_tol = 1e-8;
  double regularity_tol = 1e-10;
  double m_cap = 50.0;
  int k_min = 5;
  int k_max = 40;
  int n_start = 5;
  int grid = 2048;
  int oracle_p = 2000;
  int oracle_count = 10;
  unsigned seed = 20240601;
  unsigned threads = 0;
  double ratio_cap_factor = 10.0;
  double min_slope = 0.8;
  std::vector<int> truncations{32, 64, 128};
  double growth_cap = 0.05;
};

struct OutputConfig {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
  bool svg = false;
  bool traces = true;
};

struct RunConfig {
  std::string schema = kSchema;
  ProblemConfig problem;
  SolverConfig solver;
  OutputConfig outputs;
};

/// Throws Error(ConfigParse) with a one-line reason.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

MatrixPotential parse_potential(const nlohmann::json& spec);
BoundaryRow parse_boundary_row(const nlohmann::json& record);
cplx parse_complex(const nlohmann::json& value);
CMatrix parse_matrix(const nlohmann::json& value, int m);

}  // namespace vecsturm::app
