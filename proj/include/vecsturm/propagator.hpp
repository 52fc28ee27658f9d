#pragma once

#include <span>
#include <vector>

#include "vecsturm/potential.hpp"

namespace vecsturm {

/// Maps (Y(0), Y'(0)) to (Y(1), Y'(1)) for -Y'' + Q Y = lambda Y.
/// The stored matrix is exp(-sigma) times the true transfer matrix.
struct TransferMatrix {
  cplx lambda{0.0, 0.0};
  CMatrix t;
  double sigma = 0.0;
  int steps = 0;
  int rejected = 0;
  std::vector<double> mesh;  // accepted step endpoints, 0 to 1

  int dim() const { return static_cast<int>(t.rows()) / 2; }
};

/// Fourth-order Magnus steps with step-doubling error control; the step never
/// crosses a breakpoint of Q. Throws StepUnderflow below a step of 1e-12.
TransferMatrix transfer_matrix(const MatrixPotential& q, cplx lambda, double tol = 1e-10);

/// Same product of half steps over a fixed mesh from an earlier adaptive run,
/// without error control. Nearby lambda on a search circle share one mesh.
TransferMatrix transfer_matrix_on_mesh(const MatrixPotential& q, cplx lambda, std::span<const double> mesh);

/// Y and Y' on a grid. Column i of `y` / `dy` is the value at x[i], stored as
/// exp(-sigma[i]) times the true value.
struct SolutionTrace {
  std::vector<double> x;
  CMatrix y;
  CMatrix dy;
  std::vector<double> sigma;
};

/// Integrates the fundamental matrix with every grid point as a stop and
/// applies it to `initial` = (Y(0), Y'(0)); the result is exactly linear in it.
SolutionTrace propagate(const MatrixPotential& q, cplx lambda, const CVector& initial, std::span<const double> grid,
                        double tol = 1e-10);

/// Fundamental matrices Z(x_i) (2m x 2m) on the grid; `propagate` applies these.
struct FundamentalTrace {
  std::vector<double> x;
  std::vector<CMatrix> z;
  std::vector<double> sigma;
};

FundamentalTrace fundamental_trace(const MatrixPotential& q, cplx lambda, std::span<const double> grid,
                                   double tol = 1e-10);

}  // namespace vecsturm
