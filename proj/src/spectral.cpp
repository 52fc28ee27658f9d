#include "vecsturm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "vecsturm/propagator.hpp"

namespace vecsturm {

namespace {

double spectral_scale(cplx lambda) { return std::max(1.0, std::sqrt(std::abs(lambda))); }

struct BoundarySystem {
  CMatrix m;       // G [I; T], exp(-sigma) applied to the left block
  double sigma = 0.0;
  double s = 1.0;  // Y'(0) columns of m * diag(I, sI) are in units of s
};

BoundarySystem boundary_system(const MatrixPotential& q, const GeneralBoundaryMatrix& g, cplx lambda, double tol,
                               std::span<const double> mesh = {}) {
  const int m = q.dim();
  if (g.dimension() != m) throw Error(ErrorKind::InvalidArgument, "boundary matrix and potential differ in size");
  const TransferMatrix t = mesh.empty() ? transfer_matrix(q, lambda, tol) : transfer_matrix_on_mesh(q, lambda, mesh);
  BoundarySystem b;
  b.sigma = t.sigma;
  b.s = spectral_scale(lambda);
  const CMatrix& rows = g.rows();
  b.m = std::exp(-t.sigma) * rows.leftCols(2 * m) + rows.rightCols(2 * m) * t.t;
  return b;
}

CMatrix column_scaled(const BoundarySystem& b, int m) {
  CMatrix md = b.m;
  md.middleCols(m, m) *= b.s;
  return md;
}

}  // namespace

double CPrediction::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (double x : gap) g = std::min(g, x);
  return g;
}

CPrediction c_spectrum(const CMatrix& c, double gap_tol) {
  const int m = static_cast<int>(c.rows());
  if (m < 1 || c.cols() != m) throw Error(ErrorKind::InvalidArgument, "mean matrix must be square");
  if (m > 16) throw Error(ErrorKind::InvalidArgument, "mean matrix larger than 16 x 16");
  Eigen::ComplexEigenSolver<CMatrix> es(c);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NonSimpleC, "eigendecomposition of C failed");

  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (ev(a).real() != ev(b).real()) return ev(a).real() > ev(b).real();
    return ev(a).imag() > ev(b).imag();
  });

  CPrediction p;
  p.v.resize(m, m);
  for (int j = 0; j < m; ++j) {
    const int src = order[static_cast<std::size_t>(j)];
    p.mu.push_back(ev(src));
    CVector v = es.eigenvectors().col(src);
    v /= v.norm();
    const double vmax = v.cwiseAbs().maxCoeff();
    int lead = 0;
    while (std::abs(v(lead)) < (1.0 - 1e-12) * vmax) ++lead;
    v *= std::conj(v(lead)) / std::abs(v(lead));
    p.v.col(j) = v;
  }
  p.v_dual = p.v.adjoint().fullPivLu().inverse();
  p.gap.assign(static_cast<std::size_t>(m), std::numeric_limits<double>::infinity());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) p.gap[static_cast<std::size_t>(i)] = std::min(p.gap[static_cast<std::size_t>(i)], std::abs(p.mu[i] - p.mu[j]));
  if (m > 1 && p.min_gap() <= gap_tol) {
    throw Error(ErrorKind::NonSimpleC, "mean matrix has a repeated eigenvalue (min gap " + std::to_string(p.min_gap()) + ")");
  }
  return p;
}

CMatrix prediction_trace(const CPrediction& pred, const ScalarEigenpair& base, int j, const QuadratureGrid& grid) {
  CMatrix out(pred.dim(), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = pred.v.col(j) * base.phi(grid.x[i]);
  return out;
}

CMatrix prediction_adjoint_trace(const CPrediction& pred, const ScalarEigenpair& base, int j,
                                 const QuadratureGrid& grid) {
  CMatrix out(pred.dim(), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.col(static_cast<Eigen::Index>(i)) = pred.v_dual.col(j) * base.phi_adj(grid.x[i]);
  return out;
}

CharacteristicValue characteristic_value(const MatrixPotential& q, const GeneralBoundaryMatrix& g, cplx lambda,
                                         double tol, std::span<const double> mesh) {
  const int m = q.dim();
  const BoundarySystem b = boundary_system(q, g, lambda, tol, mesh);
  const CMatrix md = column_scaled(b, m);
  double hadamard = 1.0;
  for (Eigen::Index i = 0; i < md.rows(); ++i) hadamard *= md.row(i).norm();
  const double factor = std::exp(2.0 * m * b.sigma - m * std::abs(principal_sqrt(lambda).imag()));
  CharacteristicValue out;
  out.value = b.m.partialPivLu().determinant() * factor;
  out.scale = hadamard / std::pow(b.s, m) * factor;
  return out;
}

cplx characteristic_det(const MatrixPotential& q, const BoundaryConditionPair& bc, cplx lambda, double tol) {
  return characteristic_value(q, GeneralBoundaryMatrix::from_pair(bc, q.dim()), lambda, tol).value;
}

LocateResult locate_eigenvalue(const MatrixPotential& q, const GeneralBoundaryMatrix& g, cplx seed, double radius,
                               const LocateOptions& options) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "search radius must be positive");
  const std::vector<double> mesh = transfer_matrix(q, seed, options.contour_tol).mesh;
  auto loose = [&](cplx z) { return characteristic_value(q, g, z, options.contour_tol, mesh).value; };
  const WindingResult w = winding_number(loose, seed, radius, options.min_samples, options.max_samples);

  LocateResult r;
  r.zero_count = w.count;
  r.contour_samples = w.samples;
  if (w.count <= 0) {
    r.lambda = seed;
    r.status = ErrorKind::NoZeroInDisk;
    return r;
  }
  cplx lambda = std::abs(w.centroid - seed) < radius ? w.centroid : seed;
  auto tight = [&](cplx z) { return characteristic_value(q, g, z, options.newton_tol); };
  CharacteristicValue d = tight(lambda);
  bool converged = std::abs(d.value) <= options.residual_tol * d.scale;
  int it = 0;
  while (!converged && it < options.max_iterations) {
    const double h = 1e-7 * (1.0 + std::abs(lambda));
    const cplx deriv = (tight(lambda + h).value - tight(lambda - h).value) / (2.0 * h);
    if (deriv == 0.0) break;
    const cplx step = d.value / deriv;
    lambda -= step;
    ++it;
    d = tight(lambda);
    converged = std::abs(d.value) <= options.residual_tol * d.scale ||
                std::abs(step) <= options.step_tol * (1.0 + std::abs(lambda));
  }
  r.lambda = lambda;
  r.iterations = it;
  r.residual = std::abs(d.value) / d.scale;
  if (w.count >= 2) {
    r.status = ErrorKind::MultipleZeros;
  } else if (std::abs(lambda - seed) > radius || !converged) {
    r.status = ErrorKind::NewtonDivergence;
  }
  return r;
}

ExtractedFunction extract_eigenfunction(const MatrixPotential& q, const GeneralBoundaryMatrix& g, cplx lambda,
                                        const QuadratureGrid& grid, double tol, const CMatrix* reference) {
  const int m = q.dim();
  const BoundarySystem b = boundary_system(q, g, lambda, tol);
  const CMatrix md = column_scaled(b, m);
  Eigen::JacobiSVD<CMatrix> svd(md, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Eigen::Index n = sv.size();
  ExtractedFunction out;
  out.singular_gap = n >= 2 ? (sv(n - 2) - sv(n - 1)) / sv(0) : 1.0;
  if (out.singular_gap < 1e-6) {
    throw Error(ErrorKind::NullSpaceAmbiguity, "two smallest singular values of the boundary matrix coincide");
  }
  CVector init = svd.matrixV().col(n - 1);
  init.tail(m) *= b.s;

  const FundamentalTrace f = fundamental_trace(q, lambda, grid.x, tol);
  const double sigma_max = *std::max_element(f.sigma.begin(), f.sigma.end());
  out.values.resize(m, static_cast<Eigen::Index>(grid.size()));
  out.derivatives.resize(m, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const CVector v = f.z[i] * init * std::exp(f.sigma[i] - sigma_max);
    out.values.col(static_cast<Eigen::Index>(i)) = v.head(m);
    out.derivatives.col(static_cast<Eigen::Index>(i)) = v.tail(m);
  }
  const double norm = trace_norm(grid, out.values);
  cplx phase = 1.0 / norm;
  if (reference) {
    const cplx p = trace_inner(grid, out.values, *reference);
    if (std::abs(p) > 0.0) phase *= std::conj(p) / std::abs(p);
  } else {
    Eigen::Index r = 0, c = 0;
    out.values.cwiseAbs().maxCoeff(&r, &c);
    const cplx v = out.values(r, c);
    phase *= std::conj(v) / std::abs(v);
  }
  out.values *= phase;
  out.derivatives *= phase;

  const double s = spectral_scale(lambda);
  const Eigen::Index last = out.values.cols() - 1;
  CVector data(4 * m);
  data << out.values.col(0), out.derivatives.col(0) / s, out.values.col(last), out.derivatives.col(last) / s;
  CMatrix gs = g.rows();
  gs.middleCols(m, m) *= s;
  gs.middleCols(3 * m, m) *= s;
  out.boundary_residual = (gs * data).norm() / std::max(1.0, gs.norm());
  return out;
}

AdjointFunction adjoint_eigenfunction(const MatrixPotential& q, const BoundaryConditionPair& bc, cplx lambda,
                                      const CMatrix& psi, const QuadratureGrid& grid, double tol) {
  const MatrixPotential qa = q.adjoint();
  const GeneralBoundaryMatrix v = adjoint_boundary(bc, q.dim());
  AdjointFunction out;
  out.function = extract_eigenfunction(qa, v, std::conj(lambda), grid, tol, &psi);
  out.pairing = trace_inner(grid, psi, out.function.values);
  if (std::abs(out.pairing) < 1e-8) {
    throw Error(ErrorKind::BiorthogonalBreakdown, "eigenfunction is orthogonal to its adjoint");
  }
  const cplx c = 1.0 / std::conj(out.pairing);
  out.function.values *= c;
  out.function.derivatives *= c;
  return out;
}

std::vector<int> labels_for_range(int k_min, int k_max, int n_start) {
  std::vector<int> labels;
  for (int k = std::max(0, k_min); k <= k_max; ++k) {
    if (k < n_start) continue;
    if (k == 0) {
      labels.push_back(0);
    } else {
      labels.push_back(-k);
      labels.push_back(k);
    }
  }
  std::sort(labels.begin(), labels.end());
  return labels;
}

std::vector<MatrixEigenpair> solve_range(const MatrixPotential& q, const BoundaryConditionPair& bc,
                                         const GammaPair& gamma, const BaseSpectrum& base, const CPrediction& pred,
                                         std::span<const int> labels, const QuadratureGrid& grid,
                                         const SolveOptions& options) {
  const int m = q.dim();
  if (pred.dim() != m) throw Error(ErrorKind::InvalidArgument, "prediction and potential differ in size");
  std::vector<int> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  const GeneralBoundaryMatrix g = GeneralBoundaryMatrix::from_pair(bc, m);
  std::vector<MatrixEigenpair> out(sorted.size() * static_cast<std::size_t>(m));
  parallel_for(out.size(), options.threads, [&](std::size_t task) {
    MatrixEigenpair& e = out[task];
    e.k = sorted[task / static_cast<std::size_t>(m)];
    e.j = static_cast<int>(task % static_cast<std::size_t>(m));
    const ScalarEigenpair* sp = base.find(e.k);
    if (!sp) {
      e.status = ErrorKind::InsufficientRange;
      e.message = "label missing from the base spectrum";
      return;
    }
    e.prediction = pred.lattice(*sp, e.j);
    e.radius = std::min(options.gap_fraction * pred.gap[static_cast<std::size_t>(e.j)],
                        0.5 * seed_separation(gamma, e.k));
    try {
      LocateResult loc;
      for (int halving = 0;; ++halving) {
        loc = locate_eigenvalue(q, g, e.prediction, e.radius, options.locate);
        if (loc.status != ErrorKind::MultipleZeros || halving == options.max_halvings) break;
        e.radius *= 0.5;
      }
      e.lambda = loc.lambda;
      e.zero_count = loc.zero_count;
      e.iterations = loc.iterations;
      e.det_residual = loc.residual;
      if (loc.status) {
        e.status = loc.status;
        e.message = "zero count " + std::to_string(loc.zero_count) + " on radius " + std::to_string(e.radius);
        return;
      }
      const CMatrix phi = prediction_trace(pred, *sp, e.j, grid);
      const ExtractedFunction psi = extract_eigenfunction(q, g, e.lambda, grid, options.trace_tol, &phi);
      e.psi = psi.values;
      e.boundary_residual = psi.boundary_residual;
      const AdjointFunction adj = adjoint_eigenfunction(q, bc, e.lambda, e.psi, grid, options.trace_tol);
      e.psi_adj = adj.function.values;
      e.adjoint_boundary_residual = adj.function.boundary_residual;
      e.pairing = adj.pairing;
    } catch (const Error& err) {
      e.status = err.kind();
      e.message = err.what();
    }
  });
  return out;
}

}  // namespace vecsturm
