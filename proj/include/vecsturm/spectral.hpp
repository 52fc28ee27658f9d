#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vecsturm/boundary.hpp"
#include "vecsturm/numerics.hpp"
#include "vecsturm/potential.hpp"
#include "vecsturm/scalar_base.hpp"

namespace vecsturm {

/// Eigen-data of the mean matrix C. Eigenvalues are ordered by (Re, Im)
/// descending; each v_j has unit norm with its largest entry real positive, and
/// the duals satisfy (v_i*, v_j) = delta_ij.
struct CPrediction {
  std::vector<cplx> mu;
  CMatrix v;       // columns v_j
  CMatrix v_dual;  // columns v_j*
  std::vector<double> gap;

  int dim() const { return static_cast<int>(mu.size()); }
  double min_gap() const;
  cplx lattice(const ScalarEigenpair& base, int j) const { return base.rho + mu[static_cast<std::size_t>(j)]; }
};

/// Throws NonSimpleC if two eigenvalues of C are closer than gap_tol.
CPrediction c_spectrum(const CMatrix& c, double gap_tol = 1e-8);

/// v_j phi_k and v_j* phi_k* sampled on the grid (m x N).
CMatrix prediction_trace(const CPrediction& pred, const ScalarEigenpair& base, int j, const QuadratureGrid& grid);
CMatrix prediction_adjoint_trace(const CPrediction& pred, const ScalarEigenpair& base, int j,
                                 const QuadratureGrid& grid);

/// det of the 2m x 2m matrix G [I; T(lambda)], divided by exp(m |Im sqrt(lambda)|)
/// so that m = 1, Q = 0 reproduces base_determinant. `scale` is the Hadamard
/// bound of the same matrix with the Y'(0) columns measured in units of sqrt|lambda|.
struct CharacteristicValue {
  cplx value{0.0, 0.0};
  double scale = 1.0;
};

/// A non-empty `mesh` replaces the adaptive integration (see transfer_matrix_on_mesh).
CharacteristicValue characteristic_value(const MatrixPotential& q, const GeneralBoundaryMatrix& g, cplx lambda,
                                         double tol, std::span<const double> mesh = {});
cplx characteristic_det(const MatrixPotential& q, const BoundaryConditionPair& bc, cplx lambda, double tol = 1e-10);

struct LocateOptions {
  double contour_tol = 1e-6;   // propagator tolerance on the search circle
  double newton_tol = 1e-10;   // propagator tolerance during refinement
  double residual_tol = 1e-14; // |Delta| <= residual_tol * scale
  double step_tol = 1e-13;     // or a Newton step below step_tol * (1 + |lambda|)
  int max_iterations = 40;
  int min_samples = 256;
  int max_samples = 8192;
};

struct LocateResult {
  cplx lambda{0.0, 0.0};
  int zero_count = 0;
  int iterations = 0;
  double residual = 0.0;
  int contour_samples = 0;
  std::optional<ErrorKind> status;  // NoZeroInDisk, MultipleZeros, NewtonDivergence
};

/// Argument-principle count on |lambda - seed| = radius, then Newton from the
/// contour centroid when the count is one. A multiple count is refined from
/// the centroid as well and flagged.
LocateResult locate_eigenvalue(const MatrixPotential& q, const GeneralBoundaryMatrix& g, cplx seed, double radius,
                               const LocateOptions& options = {});

struct ExtractedFunction {
  CMatrix values;       // m x N on the grid, unit norm
  CMatrix derivatives;  // m x N
  double boundary_residual = 0.0;
  double singular_gap = 0.0;  // (s_{2} - s_{1}) / s_max of the boundary matrix
};

/// Null vector of the boundary matrix at lambda, propagated on the grid and
/// normalized. With `reference` the phase makes (Psi, reference) real positive,
/// otherwise the largest grid sample. Throws NullSpaceAmbiguity.
ExtractedFunction extract_eigenfunction(const MatrixPotential& q, const GeneralBoundaryMatrix& g, cplx lambda,
                                        const QuadratureGrid& grid, double tol,
                                        const CMatrix* reference = nullptr);

/// Adjoint problem at conj(lambda), phased so the pairing is real positive and
/// scaled so (psi, psi*) = 1.
/// Throws BiorthogonalBreakdown when the unscaled pairing is below 1e-8.
struct AdjointFunction {
  ExtractedFunction function;
  cplx pairing{0.0, 0.0};  // (psi, psi*) with both of unit norm, before scaling
};

AdjointFunction adjoint_eigenfunction(const MatrixPotential& q, const BoundaryConditionPair& bc, cplx lambda,
                                      const CMatrix& psi, const QuadratureGrid& grid, double tol);

struct MatrixEigenpair {
  int k = 0;  // scalar label
  int j = 0;  // 0-based index into the C spectrum
  cplx prediction{0.0, 0.0};
  cplx lambda{0.0, 0.0};
  double radius = 0.0;
  int zero_count = 0;
  int iterations = 0;
  double det_residual = 0.0;
  double boundary_residual = 0.0;
  double adjoint_boundary_residual = 0.0;
  cplx pairing{0.0, 0.0};
  CMatrix psi;
  CMatrix psi_adj;
  std::optional<ErrorKind> status;
  std::string message;

  bool accepted() const { return !status.has_value(); }
};

struct SolveOptions {
  LocateOptions locate;
  double trace_tol = 1e-10;
  double gap_fraction = 0.5;
  int max_halvings = 3;
  unsigned threads = 0;
};

/// Labels +-k for k in [k_min, k_max] (label 0 once when k_min == 0), skipping
/// |k| < n_start.
std::vector<int> labels_for_range(int k_min, int k_max, int n_start);

/// One task per (label, j); each label needs an entry in `base`. Output is ordered
/// by (label, j); failures are kept with their status.
std::vector<MatrixEigenpair> solve_range(const MatrixPotential& q, const BoundaryConditionPair& bc,
                                         const GammaPair& gamma, const BaseSpectrum& base, const CPrediction& pred,
                                         std::span<const int> labels, const QuadratureGrid& grid,
                                         const SolveOptions& options = {});

}  // namespace vecsturm
