#pragma once

#include <span>
#include <vector>

#include "vecsturm/boundary.hpp"
#include "vecsturm/numerics.hpp"

namespace vecsturm {

/// Characteristic determinant of -y'' = lambda y under `bc`, built on the
/// basis cos(wx), sin(wx)/w (w = sqrt(lambda)) so it is entire in lambda, and
/// divided by exp|Im w|. `scale` is the size of the terms that cancel at a root.
struct BaseDeterminant {
  cplx value{0.0, 0.0};
  double scale = 1.0;
};

BaseDeterminant base_determinant_scaled(const BoundaryConditionPair& bc, cplx lambda);
cplx base_determinant(const BoundaryConditionPair& bc, cplx lambda);

/// Eigenpair of the unperturbed scalar problem.
///
/// Labels n >= 1 belong to branch 1 with k = n, labels n <= 0 to branch 2
/// with k = |n|; the seed is (2 k pi + gamma_r)^2. phi and phi_adj are two-term
/// exponential sums A e^{iwx} + B e^{-iwx} with w = omega (resp. conj(omega)).
struct ScalarEigenpair {
  int label = 0;
  int branch = 1;
  int k = 0;
  cplx seed{0.0, 0.0};
  cplx rho{0.0, 0.0};
  cplx omega{0.0, 0.0};
  ExpSum phi;
  ExpSum phi_adj;
  int iterations = 0;
  double residual = 0.0;        // |Delta(rho)| / scale
  double sup_norm = 0.0;
  double adjoint_sup_norm = 0.0;
  bool within_cap = true;       // both sup norms <= m_cap
  bool multiple = false;

  cplx amplitude_plus() const { return phi.terms[0].coef; }
  cplx amplitude_minus() const { return phi.terms[1].coef; }
};

struct BaseOptions {
  double newton_tol = 1e-12;
  int max_iterations = 40;
  double m_cap = 50.0;
  double normalization_floor = 1e-8;
};

int branch_of_label(int label);
int index_of_label(int label);

/// Distance from the label's seed to the nearest distinct seed (2 k pi + gamma_r)^2,
/// k >= 0, r = 1, 2. Newton trust radii and chain contours are half of it.
double seed_separation(const GammaPair& gamma, int label);

/// Single label; throws NewtonDivergence or NormalizationBreakdown.
ScalarEigenpair base_eigenpair(const BoundaryConditionPair& bc, const GammaPair& gamma, int label,
                               const BaseOptions& options = {});

struct LabelFailure {
  int label = 0;
  ErrorKind kind = ErrorKind::NewtonDivergence;
  std::string message;
};

struct BaseSpectrum {
  std::vector<ScalarEigenpair> pairs;  // ascending label order
  std::vector<LabelFailure> failures;
  bool label_zero_vacant = false;
  std::vector<std::pair<int, int>> collisions;  // label pairs that converged to one root
  double max_seed_offset = 0.0;                 // empirical K in |rho - seed| <= K
  double max_sup_norm = 0.0;

  /// nullptr when the label is absent.
  const ScalarEigenpair* find(int label) const;
};

/// Labels are processed independently; label 0 is reported vacant instead of
/// failed when its seed does not localize a root.
BaseSpectrum unperturbed_spectrum(const BoundaryConditionPair& bc, const GammaPair& gamma,
                                  std::span<const int> labels, const BaseOptions& options = {},
                                  unsigned threads = 1);
BaseSpectrum unperturbed_spectrum(const BoundaryConditionPair& bc, const GammaPair& gamma, int label_min,
                                  int label_max, const BaseOptions& options = {}, unsigned threads = 1);

/// conj(phi_adj) phi ~ c + A e^{i nu x} + B e^{-i nu x}, nu = 4 pi k + 2 gamma_r.
/// Projection and remainder are exact exponential-sum integrals.
struct ProductExpansion {
  int label = 0;
  cplx constant{0.0, 0.0};
  cplx a{0.0, 0.0};
  cplx b{0.0, 0.0};
  double residual = 0.0;  // L2 norm of the remainder
};

ProductExpansion product_expansion(const ScalarEigenpair& pair, const GammaPair& gamma);

struct RootChainRecord {
  int label = 0;
  cplx center{0.0, 0.0};
  double radius = 0.0;
  int zero_count = 0;
  int chain_length = 0;  // zero_count - 1
  bool has_associated = false;
};

/// Argument-principle multiplicity of the root near each seed with |label| <= bound.
/// Accepts coincident exponents (non strongly regular conditions, diagnostic use).
std::vector<RootChainRecord> detect_chains(const BoundaryConditionPair& bc, int low_label_bound);

}  // namespace vecsturm
