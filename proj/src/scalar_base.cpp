#include "vecsturm/scalar_base.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace vecsturm {

namespace {

// sin(w)/w, entire
cplx sinc(cplx w) {
  if (std::abs(w) < 1e-3) {
    const cplx w2 = w * w;
    return 1.0 - w2 / 6.0 * (1.0 - w2 / 20.0 * (1.0 - w2 / 42.0));
  }
  return std::sin(w) / w;
}

Eigen::Vector4cd exp_data(cplx kappa) {
  const cplx e = std::exp(I * kappa);
  return {1.0, I * kappa, e, I * kappa * e};
}

// (A, B) with A*M(:,0) + B*M(:,1) = 0, taken from the heavier row.
Eigen::Vector2cd null_vector(const Eigen::Matrix2cd& m) {
  const int r = m.row(0).norm() >= m.row(1).norm() ? 0 : 1;
  return {-m(r, 1), m(r, 0)};
}

ExpSum two_term(cplx omega, cplx a, cplx b) {
  ExpSum f;
  f.terms = {{a, omega}, {b, -omega}};
  return f;
}

cplx seed_of(const GammaPair& gamma, int branch, int k) { return gamma.seed(branch, k); }

}  // namespace

BaseDeterminant base_determinant_scaled(const BoundaryConditionPair& bc, cplx lambda) {
  const cplx w = principal_sqrt(lambda);
  const Eigen::Vector4cd c(1.0, 0.0, std::cos(w), -w * std::sin(w));
  const Eigen::Vector4cd s(0.0, 1.0, sinc(w), std::cos(w));
  const Eigen::Matrix<cplx, 2, 4> u = bc.matrix();
  const Eigen::Vector2cd gc = u * c;
  const Eigen::Vector2cd gs = u * s;
  const double damp = std::exp(-std::abs(w.imag()));
  const double wn = std::max(1.0, std::abs(w));
  BaseDeterminant d;
  d.value = (gc(0) * gs(1) - gc(1) * gs(0)) * damp;
  d.scale = (std::abs(gc(0)) + wn * std::abs(gs(0))) * (std::abs(gc(1)) + wn * std::abs(gs(1))) / wn * damp;
  return d;
}

cplx base_determinant(const BoundaryConditionPair& bc, cplx lambda) {
  return base_determinant_scaled(bc, lambda).value;
}

int branch_of_label(int label) { return label >= 1 ? 1 : 2; }
int index_of_label(int label) { return label >= 1 ? label : -label; }

double seed_separation(const GammaPair& gamma, int label) {
  const int r = branch_of_label(label);
  const int k = index_of_label(label);
  const cplx own = seed_of(gamma, r, k);
  double best = std::numeric_limits<double>::infinity();
  for (int rr = 1; rr <= 2; ++rr) {
    for (int kk = std::max(0, k - 2); kk <= k + 2; ++kk) {
      if (rr == r && kk == k) continue;
      const double d = std::abs(seed_of(gamma, rr, kk) - own);
      if (d > 1e-9 * (1.0 + std::abs(own))) best = std::min(best, d);
    }
  }
  return best;
}

ScalarEigenpair base_eigenpair(const BoundaryConditionPair& bc, const GammaPair& gamma, int label,
                               const BaseOptions& options) {
  ScalarEigenpair p;
  p.label = label;
  p.branch = branch_of_label(label);
  p.k = index_of_label(label);
  p.seed = seed_of(gamma, p.branch, p.k);
  const double trust = 0.5 * seed_separation(gamma, label);

  cplx lambda = p.seed;
  BaseDeterminant d = base_determinant_scaled(bc, lambda);
  bool converged = std::abs(d.value) <= options.newton_tol * d.scale;
  int it = 0;
  while (!converged && it < options.max_iterations) {
    const double h = 1e-4 * std::max(1.0, std::abs(principal_sqrt(lambda)));
    const cplx deriv = (base_determinant(bc, lambda + h) - base_determinant(bc, lambda - h)) / (2.0 * h);
    if (deriv == 0.0) break;
    const cplx step = d.value / deriv;
    lambda -= step;
    ++it;
    if (!(std::abs(lambda - p.seed) <= trust)) {
      throw Error(ErrorKind::NewtonDivergence, "label " + std::to_string(label) + " left its trust radius");
    }
    d = base_determinant_scaled(bc, lambda);
    converged = std::abs(d.value) <= options.newton_tol * d.scale;
    if (!converged && std::abs(step) <= 4e-16 * std::abs(lambda)) break;
  }
  p.iterations = it;
  p.residual = std::abs(d.value) / d.scale;
  if (!converged && p.residual > 1e3 * options.newton_tol) {
    throw Error(ErrorKind::NewtonDivergence, "label " + std::to_string(label) + " did not converge");
  }
  p.rho = lambda;
  p.omega = principal_sqrt(lambda);

  const Eigen::Matrix<cplx, 2, 4> u = bc.matrix();
  Eigen::Matrix2cd m;
  m.col(0) = u * exp_data(p.omega);
  m.col(1) = u * exp_data(-p.omega);
  Eigen::Vector2cd ab = null_vector(m);

  const cplx wbar = std::conj(p.omega);
  const CMatrix v = adjoint_boundary(bc).rows();
  Eigen::Matrix2cd ma;
  ma.col(0) = v * exp_data(wbar);
  ma.col(1) = v * exp_data(-wbar);
  Eigen::Vector2cd ab_adj = null_vector(ma);

  const cplx phase_ref = std::abs(ab(0)) > 1e-12 * ab.norm() ? ab(0) : ab(1);
  ab *= std::conj(phase_ref) / std::abs(phase_ref);
  p.phi = two_term(p.omega, ab(0), ab(1));
  p.phi = p.phi.scaled(1.0 / std::sqrt(inner(p.phi, p.phi).real()));
  p.phi_adj = two_term(wbar, ab_adj(0), ab_adj(1));
  p.phi_adj = p.phi_adj.scaled(1.0 / std::sqrt(inner(p.phi_adj, p.phi_adj).real()));

  const cplx pairing = inner(p.phi, p.phi_adj);
  if (std::abs(pairing) < options.normalization_floor) {
    throw Error(ErrorKind::NormalizationBreakdown, "label " + std::to_string(label) + " pairs to zero with its adjoint");
  }
  p.phi_adj = p.phi_adj.scaled(1.0 / std::conj(pairing));
  p.sup_norm = p.phi.sup_norm();
  p.adjoint_sup_norm = p.phi_adj.sup_norm();
  p.within_cap = p.sup_norm <= options.m_cap && p.adjoint_sup_norm <= options.m_cap;
  return p;
}

const ScalarEigenpair* BaseSpectrum::find(int label) const {
  for (const auto& p : pairs)
    if (p.label == label) return &p;
  return nullptr;
}

BaseSpectrum unperturbed_spectrum(const BoundaryConditionPair& bc, const GammaPair& gamma,
                                  std::span<const int> labels, const BaseOptions& options, unsigned threads) {
  std::vector<int> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<std::optional<ScalarEigenpair>> found(sorted.size());
  std::vector<std::optional<LabelFailure>> failed(sorted.size());
  parallel_for(sorted.size(), threads, [&](std::size_t i) {
    try {
      found[i] = base_eigenpair(bc, gamma, sorted[i], options);
    } catch (const Error& e) {
      failed[i] = LabelFailure{sorted[i], e.kind(), e.what()};
    }
  });

  BaseSpectrum out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (found[i]) {
      out.pairs.push_back(*found[i]);
    } else if (sorted[i] == 0 && failed[i]->kind == ErrorKind::NewtonDivergence) {
      out.label_zero_vacant = true;
    } else {
      out.failures.push_back(*failed[i]);
    }
  }
  for (std::size_t i = 0; i < out.pairs.size(); ++i) {
    const auto& p = out.pairs[i];
    out.max_seed_offset = std::max(out.max_seed_offset, std::abs(p.rho - p.seed));
    out.max_sup_norm = std::max({out.max_sup_norm, p.sup_norm, p.adjoint_sup_norm});
    for (std::size_t j = i + 1; j < out.pairs.size(); ++j) {
      const auto& q = out.pairs[j];
      if (std::abs(p.rho - q.rho) <= 1e-8 * (1.0 + std::abs(p.rho))) out.collisions.emplace_back(p.label, q.label);
    }
  }
  return out;
}

BaseSpectrum unperturbed_spectrum(const BoundaryConditionPair& bc, const GammaPair& gamma, int label_min,
                                  int label_max, const BaseOptions& options, unsigned threads) {
  std::vector<int> labels;
  for (int n = label_min; n <= label_max; ++n) labels.push_back(n);
  return unperturbed_spectrum(bc, gamma, labels, options, threads);
}

ProductExpansion product_expansion(const ScalarEigenpair& pair, const GammaPair& gamma) {
  const cplx nu = 4.0 * pi * pair.k + 2.0 * gamma.gamma[static_cast<std::size_t>(pair.branch - 1)];

  // conj(phi_adj) phi as an exponential sum, equal exponents merged
  auto add = [](ExpSum& f, cplx coef, cplx kappa) {
    for (auto& t : f.terms) {
      if (std::abs(t.kappa - kappa) <= 1e-13 * (1.0 + std::abs(kappa))) {
        t.coef += coef;
        return;
      }
    }
    f.terms.push_back({coef, kappa});
  };
  ExpSum product;
  for (const auto& a : pair.phi.terms)
    for (const auto& b : pair.phi_adj.terms) add(product, a.coef * std::conj(b.coef), a.kappa - std::conj(b.kappa));

  const std::array<cplx, 3> exponents{0.0, nu, -nu};
  std::array<ExpSum, 3> basis;
  for (int a = 0; a < 3; ++a) basis[static_cast<std::size_t>(a)].terms.push_back({1.0, exponents[static_cast<std::size_t>(a)]});
  Eigen::Matrix3cd gram;
  Eigen::Vector3cd rhs;
  for (int a = 0; a < 3; ++a) {
    rhs(a) = inner(product, basis[static_cast<std::size_t>(a)]);
    for (int b = 0; b < 3; ++b) gram(a, b) = inner(basis[static_cast<std::size_t>(b)], basis[static_cast<std::size_t>(a)]);
  }
  const Eigen::Vector3cd coef = gram.fullPivLu().solve(rhs);

  ExpSum remainder = product;
  for (int a = 0; a < 3; ++a) add(remainder, -coef(a), exponents[static_cast<std::size_t>(a)]);
  ProductExpansion out;
  out.label = pair.label;
  out.constant = coef(0);
  out.a = coef(1);
  out.b = coef(2);
  out.residual = std::sqrt(std::max(0.0, inner(remainder, remainder).real()));
  return out;
}

std::vector<RootChainRecord> detect_chains(const BoundaryConditionPair& bc, int low_label_bound) {
  const GammaPair gamma = characteristic_roots(theta_coefficients(bc), 1e-10, true);
  std::vector<RootChainRecord> out;
  for (int label = -low_label_bound; label <= low_label_bound; ++label) {
    RootChainRecord rec;
    rec.label = label;
    rec.center = gamma.seed(branch_of_label(label), index_of_label(label));
    rec.radius = 0.5 * seed_separation(gamma, label);
    auto f = [&](cplx z) { return base_determinant(bc, z); };
    for (int attempt = 0;; ++attempt) {
      try {
        rec.zero_count = winding_number(f, rec.center, rec.radius).count;
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ContourThroughZero || attempt == 4) throw;
        rec.radius *= 0.9;
      }
    }
    rec.chain_length = std::max(0, rec.zero_count - 1);
    rec.has_associated = rec.chain_length > 0;
    out.push_back(rec);
  }
  return out;
}

}  // namespace vecsturm
