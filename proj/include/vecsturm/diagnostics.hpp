#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vecsturm/numerics.hpp"
#include "vecsturm/potential.hpp"
#include "vecsturm/spectral.hpp"

namespace vecsturm {

/// Unperturbed data Phi_{k,j} = v_j phi_k and Phi*_{k,j} = v_j* phi_k* on the grid.
struct PredictionRecord {
  int label = 0;
  int j = 0;
  cplx mu{0.0, 0.0};
  CMatrix phi;
  CMatrix phi_adj;
};

/// One computed eigenpair; traces share the grid of the input set.
struct PairRecord {
  int label = 0;
  int j = 0;
  cplx lambda{0.0, 0.0};
  cplx mu{0.0, 0.0};
  int zero_count = 0;
  cplx pairing{0.0, 0.0};
  CMatrix psi;
  CMatrix psi_adj;
};

/// Everything the verifier looks at. Built once after solving or read back
/// from artifacts; no spectra are recomputed from it.
struct DiagnosticInput {
  int m = 1;
  QuadratureGrid grid;
  std::vector<PredictionRecord> predictions;
  std::vector<PairRecord> pairs;  // accepted pairs only

  const PredictionRecord* prediction(int label, int j) const;
};

/// Accepted pairs of `solved` with the predictions of every label they touch.
DiagnosticInput collect_diagnostic_input(std::span<const MatrixEigenpair> solved, const BaseSpectrum& base,
                                         const CPrediction& pred, const QuadratureGrid& grid);

int abs_index(int label);

/// b_k = alpha_k + ln k / k (natural log); 0 for k < 2.
double asymptotic_bound(const AlphaSequence& alpha, int k);

struct AsymptoticsOptions {
  double ratio_cap_factor = 10.0;
  double min_slope = 0.8;
  int min_k_count = 8;
  double eigenvalue_floor = 1e-12;   // e <= floor * max(1, |lambda|) counts as exact
  double eigenfunction_floor = 1e-9;
};

struct AsymptoticsRow {
  int label = 0;
  int k = 0;
  int j = 0;
  cplx lambda{0.0, 0.0};
  cplx mu{0.0, 0.0};
  double e = 0.0;
  double d = 0.0;
  double b = 0.0;
  double e_ratio = 0.0;
  double d_ratio = 0.0;
  bool e_exact = false;
  bool d_exact = false;
};

/// Ratio and log-log slope summary for one column j.
struct FitSummary {
  int j = 0;
  int points = 0;       // rows entering the fit (k >= 2, above the floor)
  int exact_rows = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double median_ratio = 0.0;
  double max_upper_ratio = 0.0;
  bool ratio_passed = false;
  bool slope_passed = false;

  bool passed() const { return ratio_passed && slope_passed; }
};

struct AsymptoticsReport {
  int k_min = 0;
  int k_max = 0;
  std::vector<AsymptoticsRow> rows;  // ordered by (k, label, j)
  std::vector<FitSummary> eigenvalue_fits;
  std::vector<FitSummary> eigenfunction_fits;

  bool eigenvalues_passed() const;
  bool eigenfunctions_passed() const;
  bool eigenfunction_ratios_passed() const;
};

/// Throws InsufficientRange with fewer than min_k_count distinct k >= 2.
AsymptoticsReport verify_eigenvalue_asymptotics(const DiagnosticInput& input, const AlphaSequence& alpha,
                                                const AsymptoticsOptions& options = {});
/// Fills d and the eigenfunction fits. Throws GridMismatch.
void verify_eigenfunction_asymptotics(const DiagnosticInput& input, AsymptoticsReport& report,
                                      const AsymptoticsOptions& options = {});

/// min over unimodular c of ||psi - c phi||.
double phase_distance(const QuadratureGrid& grid, const CMatrix& psi, const CMatrix& phi);

/// (lambda - mu_i)(Psi, Phi*_i) - ((Q - C) Psi, Phi*_i) for every accepted pair and every i,
/// and max_i |(Psi, Phi*_i)|.
struct IdentityRow {
  int label = 0;
  int j = 0;
  int i = 0;
  double residual = 0.0;
  double overlap = 0.0;  // |(Psi, Phi*_i)|
};

struct IdentityReport {
  std::vector<IdentityRow> rows;
  double max_residual = 0.0;
  double min_max_overlap = 0.0;  // min over pairs of max_i |(Psi, Phi*_i)|
};

IdentityReport perturbation_identity(const DiagnosticInput& input, const MatrixPotential& q);

/// Members ordered by (|k|, sign, j), positive labels first.
std::vector<std::size_t> riesz_order(std::span<const PairRecord> pairs);

struct BiorthogonalityReport {
  int size = 0;
  double max_off_diagonal = 0.0;
  double max_diagonal_deviation = 0.0;
  double max_pairing_drift = 0.0;  // |(psi, psi*) - 1| before scaling
  double max_drift_ratio = 0.0;    // drift / b_k over k >= 2
};

BiorthogonalityReport biorthogonality_report(const DiagnosticInput& input, const AlphaSequence* alpha = nullptr);

struct Probe {
  std::string name;
  CMatrix values;  // m x N
};

/// The three probe classes: coordinate indicator times e^{2 pi i x}, a band-limited
/// random function drawn from `seed`, and the first pair's Phi.
std::vector<Probe> standard_probes(const DiagnosticInput& input, unsigned seed);

struct TruncationRecord {
  int size = 0;
  double condition = 0.0;       // Gram of the unit-normalized computed system
  double dual_condition = 0.0;  // and of its biorthogonal system
};

struct ProbeSums {
  std::string name;
  std::vector<double> partial_sums;  // per truncation
  std::vector<double> increments;
  bool non_decreasing = false;
  bool increments_decay = false;
  double leading_share = 0.0;  // largest single |(f, Psi)|^2 / ||f||^2
};

struct RieszReport {
  std::vector<TruncationRecord> truncations;
  std::vector<double> condition_growth;  // relative, between consecutive truncations
  std::vector<ProbeSums> probes;
  BiorthogonalityReport biorthogonality;
  double growth_cap = 0.05;
  bool condition_passed = false;
  bool bessel_passed = false;

  /// "indicated" or "not indicated"; completeness is never tested.
  std::string conclusion() const;
};

RieszReport bessel_riesz_report(const DiagnosticInput& input, std::span<const Probe> probes,
                                std::span<const int> truncations = {}, double growth_cap = 0.05,
                                const AlphaSequence* alpha = nullptr);

nlohmann::json to_json(const AsymptoticsReport& r);
nlohmann::json to_json(const IdentityReport& r);
nlohmann::json to_json(const BiorthogonalityReport& r);
nlohmann::json to_json(const RieszReport& r);

/// Log-log plot of e (or d) against k with the b_k reference curve.
std::string asymptotics_svg(const AsymptoticsReport& r, bool eigenfunctions);

}  // namespace vecsturm
