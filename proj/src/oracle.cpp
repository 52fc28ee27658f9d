#include "vecsturm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <lapacke.h>

namespace vecsturm {

namespace {

struct DenseEigen {
  std::vector<cplx> values;
  CMatrix vectors;  // columns, may be empty
  std::string solver;
};

lapack_complex_double* lapack_ptr(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

int lapack_check(int info, const char* routine) {
  if (info != 0) throw Error(ErrorKind::InvalidArgument, std::string(routine) + " failed with info " + std::to_string(info));
  return info;
}

DenseEigen solve_dense(const DiscretizedOperator& op, int wanted, bool vectors) {
  const int n = op.size();
  const char jobz = vectors ? 'V' : 'N';
  DenseEigen out;
  if (op.hermitian) {
    const int upper = std::min(n, wanted);
    int found = 0;
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    if (op.real) {
      Eigen::MatrixXd a = op.matrix.real();
      Eigen::MatrixXd z(n, vectors ? upper : 1);
      lapack_check(LAPACKE_dsyevr(LAPACK_COL_MAJOR, jobz, 'I', 'U', n, a.data(), n, 0.0, 0.0, 1, upper, 0.0, &found,
                                  w.data(), z.data(), n, support.data()),
                   "dsyevr");
      if (vectors) out.vectors = z.leftCols(found).cast<cplx>();
      out.solver = "dsyevr";
    } else {
      CMatrix a = op.matrix;
      CMatrix z(n, vectors ? upper : 1);
      lapack_check(LAPACKE_zheevr(LAPACK_COL_MAJOR, jobz, 'I', 'U', n, lapack_ptr(a.data()), n, 0.0, 0.0, 1, upper, 0.0, &found,
                                  w.data(), lapack_ptr(z.data()), n, support.data()),
                   "zheevr");
      if (vectors) out.vectors = z.leftCols(found);
      out.solver = "zheevr";
    }
    out.values.assign(w.begin(), w.begin() + found);
    return out;
  }
  CMatrix a = op.matrix;
  std::vector<cplx> w(static_cast<std::size_t>(n));
  CMatrix vr(n, vectors ? n : 1);
  cplx dummy;
  lapack_check(LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', jobz, n, lapack_ptr(a.data()), n, lapack_ptr(w.data()), lapack_ptr(&dummy), 1,
                             lapack_ptr(vr.data()), n), "zgeev");
  out.values = std::move(w);
  if (vectors) out.vectors = std::move(vr);
  out.solver = "zgeev";
  return out;
}

bool modulus_less(cplx a, cplx b) {
  if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Four-point Lagrange interpolation of nodal values (m x (P+1)) at x.
CMatrix interpolate_nodal(const CMatrix& nodal, const std::vector<double>& xs) {
  const int p = static_cast<int>(nodal.cols()) - 1;
  CMatrix out(nodal.rows(), static_cast<Eigen::Index>(xs.size()));
  for (std::size_t c = 0; c < xs.size(); ++c) {
    const double t = xs[c] * p;
    const int cell = std::clamp(static_cast<int>(std::floor(t)), 0, p - 1);
    const int first = std::clamp(cell - 1, 0, p - 3);
    CVector v = CVector::Zero(nodal.rows());
    for (int i = first; i < first + 4; ++i) {
      double l = 1.0;
      for (int j = first; j < first + 4; ++j)
        if (j != i) l *= (t - j) / static_cast<double>(i - j);
      v += l * nodal.col(i);
    }
    out.col(static_cast<Eigen::Index>(c)) = v;
  }
  return out;
}

CMatrix normalized_trace(const CMatrix& nodal, const QuadratureGrid& grid) {
  CMatrix f = interpolate_nodal(nodal, grid.x);
  f /= trace_norm(grid, f);
  Eigen::Index r = 0, c = 0;
  f.cwiseAbs().maxCoeff(&r, &c);
  const cplx peak = f(r, c);
  f *= std::abs(peak) / peak;
  return f;
}

}  // namespace

CMatrix DiscretizedOperator::nodal(const CVector& u) const {
  CMatrix y(m, intervals + 1);
  const CVector ends = endpoint_map * u;
  y.col(0) = ends.head(m);
  y.col(intervals) = ends.tail(m);
  for (int p = 1; p < intervals; ++p) y.col(p) = u.segment((p - 1) * m, m);
  return y;
}

DiscretizedOperator discretize(const MatrixPotential& q, const BoundaryConditionPair& bc, int intervals) {
  if (intervals < 64) throw Error(ErrorKind::InvalidArgument, "oracle needs P >= 64");
  const int m = q.dim();
  const int p = intervals;
  const int n = (p - 1) * m;
  const double h = 1.0 / p;
  const auto g = GeneralBoundaryMatrix::from_pair(bc, m);

  DiscretizedOperator op;
  op.intervals = p;
  op.m = m;

  // E (y_0, y_P) + F u = 0
  CMatrix e(2 * m, 2 * m);
  e.leftCols(m) = g.block(0) - (1.5 / h) * g.block(1);
  e.rightCols(m) = g.block(2) + (1.5 / h) * g.block(3);
  CMatrix f = CMatrix::Zero(2 * m, n);
  auto column = [&](int node) { return (node - 1) * m; };
  f.middleCols(column(1), m) += (2.0 / h) * g.block(1);
  f.middleCols(column(2), m) -= (0.5 / h) * g.block(1);
  f.middleCols(column(p - 1), m) -= (2.0 / h) * g.block(3);
  f.middleCols(column(p - 2), m) += (0.5 / h) * g.block(3);

  Eigen::JacobiSVD<CMatrix> svd(e);
  const auto& sv = svd.singularValues();
  op.elimination_rcond = sv(sv.size() - 1) / sv(0);
  if (!(op.elimination_rcond > 1e-12)) {
    throw Error(ErrorKind::EliminationSingular, "endpoint elimination is singular at P = " + std::to_string(p));
  }
  op.endpoint_map = -e.fullPivLu().solve(f);

  const double inv_h2 = 1.0 / (h * h);
  op.matrix = CMatrix::Zero(n, n);
  const CMatrix identity = CMatrix::Identity(m, m);
  for (int node = 1; node < p; ++node) {
    const int r = column(node);
    op.matrix.block(r, r, m, m) = 2.0 * inv_h2 * identity + q.evaluate(node * h);
    if (node > 1) op.matrix.block(r, column(node - 1), m, m) = -inv_h2 * identity;
    if (node < p - 1) op.matrix.block(r, column(node + 1), m, m) = -inv_h2 * identity;
  }
  op.matrix.topRows(m) -= inv_h2 * op.endpoint_map.topRows(m);
  op.matrix.bottomRows(m) -= inv_h2 * op.endpoint_map.bottomRows(m);

  const double size = op.matrix.cwiseAbs().maxCoeff();
  op.hermitian = (op.matrix - op.matrix.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * size;
  op.real = op.matrix.imag().cwiseAbs().maxCoeff() <= 1e-14 * size;
  if (op.hermitian) op.matrix = 0.5 * (op.matrix + op.matrix.adjoint());
  return op;
}

OracleSpectrum oracle_spectrum(const MatrixPotential& q, const BoundaryConditionPair& bc, int intervals, int count,
                               const QuadratureGrid* grid) {
  const auto op = discretize(q, bc, intervals);
  if (count < 1 || count > op.size()) throw Error(ErrorKind::InvalidArgument, "oracle count out of range");
  // Hermitian solvers return the lowest eigenvalues; extra ones guard against negative modes
  const auto dense = solve_dense(op, 2 * count + 8, grid != nullptr);

  std::vector<std::size_t> order(dense.values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return modulus_less(dense.values[a], dense.values[b]); });

  OracleSpectrum out;
  out.intervals = intervals;
  out.solver = dense.solver;
  const std::size_t keep = std::min(order.size(), static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < keep; ++i) {
    OracleMode mode;
    mode.lambda = dense.values[order[i]];
    if (grid) mode.trace = normalized_trace(op.nodal(dense.vectors.col(static_cast<Eigen::Index>(order[i]))), *grid);
    out.modes.push_back(std::move(mode));
  }
  return out;
}

double PairingReport::max_rel_gap() const {
  double r = 0.0;
  for (const auto& p : pairs) r = std::max(r, p.rel_gap);
  return r;
}

PairingReport match_spectra(std::span<const cplx> a, std::span<const cplx> b, double tol) {
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> partner_a(a.size(), none), partner_b(b.size(), none);
  auto nearest = [](cplx z, std::span<const cplx> pool, const std::vector<std::size_t>& taken) {
    std::size_t best = none;
    double dist = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[i] != none) continue;
      const double d = std::abs(pool[i] - z);
      if (best == none || d < dist) {
        best = i;
        dist = d;
      }
    }
    return best;
  };
  auto rel_gap = [](cplx x, cplx y) { return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)}); };

  for (bool progress = true; progress;) {
    progress = false;
    std::vector<std::pair<std::size_t, std::size_t>> round;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (partner_a[i] != none) continue;
      const std::size_t j = nearest(a[i], b, partner_b);
      if (j == none || nearest(b[j], a, partner_a) != i) continue;
      if (rel_gap(a[i], b[j]) <= tol) round.emplace_back(i, j);
    }
    for (auto [i, j] : round) {
      partner_a[i] = j;
      partner_b[j] = i;
      progress = true;
    }
  }

  PairingReport report;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (partner_a[i] == none) {
      report.unmatched_a.push_back(i);
      continue;
    }
    const std::size_t j = partner_a[i];
    report.pairs.push_back({i, j, std::abs(a[i] - b[j]), rel_gap(a[i], b[j])});
  }
  for (std::size_t j = 0; j < b.size(); ++j)
    if (partner_b[j] == none) report.unmatched_b.push_back(j);
  return report;
}

std::vector<RichardsonMode> richardson_spectrum(const MatrixPotential& q, const BoundaryConditionPair& bc,
                                                int intervals, int count) {
  if (intervals % 2 != 0) throw Error(ErrorKind::InvalidArgument, "Richardson needs an even P");
  const auto fine = oracle_spectrum(q, bc, intervals, count);
  const int coarse_count = std::min(count + count / 2 + 4, (intervals / 2 - 1) * q.dim());
  const auto coarse = oracle_spectrum(q, bc, intervals / 2, coarse_count);

  std::vector<cplx> a, b;
  for (const auto& mode : fine.modes) a.push_back(mode.lambda);
  for (const auto& mode : coarse.modes) b.push_back(mode.lambda);
  const auto pairing = match_spectra(a, b, 0.25);

  std::vector<RichardsonMode> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i].fine = a[i];
    out[i].corrected = a[i];
  }
  for (const auto& p : pairing.pairs) {
    auto& r = out[p.a];
    r.coarse = b[p.b];
    r.corrected = (4.0 * r.fine - r.coarse) / 3.0;
    r.estimate = std::abs(r.corrected - r.fine);
    r.matched = true;
  }
  return out;
}

}  // namespace vecsturm
