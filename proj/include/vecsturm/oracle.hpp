#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vecsturm/boundary.hpp"
#include "vecsturm/numerics.hpp"
#include "vecsturm/potential.hpp"

namespace vecsturm {

/// Second-order central differences for -y'' + Q y on the nodes x_p = p / P.
/// Unknowns are the interior values y_1 .. y_{P-1}, index (p - 1) m + a. The
/// endpoint values are eliminated through the boundary rows, with y'(0) and
/// y'(1) replaced by one-sided second-order differences.
struct DiscretizedOperator {
  int intervals = 0;
  int m = 1;
  CMatrix matrix;        // (P-1)m x (P-1)m
  CMatrix endpoint_map;  // 2m x (P-1)m: (y_0, y_P) = endpoint_map * u
  double elimination_rcond = 1.0;
  bool hermitian = false;
  bool real = false;

  int size() const { return static_cast<int>(matrix.rows()); }
  /// m x (P+1) nodal values including the eliminated endpoints.
  CMatrix nodal(const CVector& u) const;
};

/// Throws EliminationSingular when the endpoint system is numerically singular.
DiscretizedOperator discretize(const MatrixPotential& q, const BoundaryConditionPair& bc, int intervals);

struct OracleMode {
  cplx lambda{0.0, 0.0};
  CMatrix trace;  // m x N on the output grid, unit norm; empty without a grid
};

struct OracleSpectrum {
  int intervals = 0;
  std::string solver;  // dsyevr, zheevr or zgeev
  std::vector<OracleMode> modes;
};

/// Dense eigensolve; the `count` eigenvalues of smallest modulus, ascending.
/// Without a grid only eigenvalues are computed.
OracleSpectrum oracle_spectrum(const MatrixPotential& q, const BoundaryConditionPair& bc, int intervals, int count,
                               const QuadratureGrid* grid = nullptr);

struct SpectrumPair {
  std::size_t a = 0;
  std::size_t b = 0;
  double gap = 0.0;
  double rel_gap = 0.0;  // gap / max(1, |a|, |b|)
};

struct PairingReport {
  std::vector<SpectrumPair> pairs;  // ascending in a
  std::vector<std::size_t> unmatched_a;
  std::vector<std::size_t> unmatched_b;

  double max_rel_gap() const;
};

/// Repeated rounds of mutual nearest neighbours among the unmatched members,
/// accepted when rel_gap <= tol. Ties go to the lower index.
PairingReport match_spectra(std::span<const cplx> a, std::span<const cplx> b, double tol);

struct RichardsonMode {
  cplx fine{0.0, 0.0};
  cplx coarse{0.0, 0.0};
  cplx corrected{0.0, 0.0};  // (4 fine - coarse) / 3
  double estimate = std::numeric_limits<double>::infinity();  // |corrected - fine|
  bool matched = false;
};

/// Oracle at P and P/2 paired mode by mode; P must be even.
std::vector<RichardsonMode> richardson_spectrum(const MatrixPotential& q, const BoundaryConditionPair& bc,
                                                int intervals, int count);

}  // namespace vecsturm
