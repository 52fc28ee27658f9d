#include "vecsturm/propagator.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace vecsturm {

namespace {

constexpr double kRescaleAbove = 1e100;
constexpr double kMinStep = 1e-12;
constexpr double kRoundoffFloor = 2e-15;

// Z' = A Z in the coordinates (Y, Y'/s).
class MagnusStepper {
 public:
  MagnusStepper(const MatrixPotential& q, cplx lambda) : q_(q), lambda_(lambda), m_(q.dim()) {
    s_ = std::max(1.0, std::sqrt(std::abs(lambda)));
  }

  double scale() const { return s_; }

  CMatrix step(double x, double h) const {
    static const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
    static const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
    const CMatrix a1 = coefficient(x + c1 * h);
    const CMatrix a2 = coefficient(x + c2 * h);
    const CMatrix omega = 0.5 * h * (a1 + a2) + (std::sqrt(3.0) / 12.0) * h * h * (a2 * a1 - a1 * a2);
    return omega.exp();
  }

 private:
  CMatrix coefficient(double x) const {
    CMatrix a = CMatrix::Zero(2 * m_, 2 * m_);
    a.block(0, m_, m_, m_) = s_ * CMatrix::Identity(m_, m_);
    CMatrix lower = q_.evaluate(std::clamp(x, 0.0, 1.0));
    lower.diagonal().array() -= lambda_;
    a.block(m_, 0, m_, m_) = lower / s_;
    return a;
  }

  const MatrixPotential& q_;
  cplx lambda_;
  int m_;
  double s_ = 1.0;
};

// Integrates over [0,1] stopping exactly at every point of `stops` (sorted, inside [0,1]).
// `visit(i, z, sigma)` is called at each stop with the scaled fundamental matrix.
template <class Visit>
void integrate_fundamental(const MatrixPotential& q, cplx lambda, double tol, const std::vector<double>& stops,
                           Visit&& visit, int* steps_out, int* rejected_out, double* sigma_out, CMatrix* z_out,
                           std::vector<double>* mesh_out = nullptr) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "propagator tolerance must be positive");
  const MagnusStepper stepper(q, lambda);
  const int n = 2 * q.dim();
  CMatrix z = CMatrix::Identity(n, n);
  double sigma = 0.0;
  int steps = 0, rejected = 0;

  std::vector<double> nodes{0.0};
  for (double b : q.breakpoints())
    if (b > 0.0 && b < 1.0) nodes.push_back(b);
  for (double s : stops) nodes.push_back(s);
  nodes.push_back(1.0);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }),
              nodes.end());

  std::size_t next_stop = 0;
  auto report = [&](double x) {
    while (next_stop < stops.size() && std::abs(stops[next_stop] - x) < 1e-15) {
      visit(next_stop, z, sigma);
      ++next_stop;
    }
  };
  report(0.0);
  if (mesh_out) mesh_out->assign(1, 0.0);

  double h = 1.0 / 16.0;
  for (std::size_t seg = 0; seg + 1 < nodes.size(); ++seg) {
    double x = nodes[seg];
    const double end = nodes[seg + 1];
    while (end - x > 1e-15) {
      const bool last = x + h >= end;
      const double hh = last ? end - x : h;
      const CMatrix big = stepper.step(x, hh);
      const CMatrix fine = stepper.step(x + 0.5 * hh, 0.5 * hh) * stepper.step(x, 0.5 * hh);
      const double err = (big - fine).cwiseAbs().maxCoeff() / 15.0;
      const double allowed = std::max(tol * std::max(hh, 1e-3), kRoundoffFloor);
      if (err <= allowed) {
        z = fine * z;
        x = last ? end : x + hh;
        ++steps;
        if (mesh_out) mesh_out->push_back(x);
        const double big_entry = z.cwiseAbs().maxCoeff();
        if (big_entry > kRescaleAbove) {
          const double shift = std::log(big_entry);
          z *= std::exp(-shift);
          sigma += shift;
        }
      } else {
        ++rejected;
      }
      const double factor = err > 0.0 ? 0.9 * std::pow(allowed / err, 0.2) : 4.0;
      const double proposed = hh * std::clamp(factor, 0.2, 4.0);
      if (err <= allowed && last) {
        h = std::max(h, proposed);
      } else {
        h = proposed;
      }
      if (h < kMinStep) throw Error(ErrorKind::StepUnderflow, "propagator step fell below 1e-12");
    }
    report(end);
  }
  *steps_out = steps;
  *rejected_out = rejected;
  *sigma_out = sigma;
  *z_out = z;
}

// Back from (Y, Y'/s) to (Y, Y').
CMatrix unscale(const CMatrix& z, double s, int m) {
  CMatrix t = z;
  t.block(0, m, m, m) /= s;
  t.block(m, 0, m, m) *= s;
  return t;
}

std::vector<double> checked_grid(std::span<const double> grid) {
  std::vector<double> g(grid.begin(), grid.end());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] < 0.0 || g[i] > 1.0) throw Error(ErrorKind::OutOfDomain, "grid point outside [0,1]");
    if (i > 0 && !(g[i] > g[i - 1])) throw Error(ErrorKind::InvalidArgument, "grid must be increasing");
  }
  return g;
}

}  // namespace

TransferMatrix transfer_matrix(const MatrixPotential& q, cplx lambda, double tol) {
  TransferMatrix out;
  out.lambda = lambda;
  CMatrix z;
  integrate_fundamental(
      q, lambda, tol, {}, [](std::size_t, const CMatrix&, double) {}, &out.steps, &out.rejected, &out.sigma, &z,
      &out.mesh);
  const int m = q.dim();
  out.t = unscale(z, std::max(1.0, std::sqrt(std::abs(lambda))), m);
  return out;
}

TransferMatrix transfer_matrix_on_mesh(const MatrixPotential& q, cplx lambda, std::span<const double> mesh) {
  if (mesh.size() < 2 || mesh.front() != 0.0 || mesh.back() != 1.0) {
    throw Error(ErrorKind::InvalidArgument, "mesh must run from 0 to 1");
  }
  const MagnusStepper stepper(q, lambda);
  const int n = 2 * q.dim();
  TransferMatrix out;
  out.lambda = lambda;
  out.mesh.assign(mesh.begin(), mesh.end());
  CMatrix z = CMatrix::Identity(n, n);
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    const double x = mesh[i];
    const double hh = mesh[i + 1] - x;
    z = stepper.step(x + 0.5 * hh, 0.5 * hh) * (stepper.step(x, 0.5 * hh) * z);
    const double big_entry = z.cwiseAbs().maxCoeff();
    if (big_entry > kRescaleAbove) {
      const double shift = std::log(big_entry);
      z *= std::exp(-shift);
      out.sigma += shift;
    }
  }
  out.steps = static_cast<int>(mesh.size()) - 1;
  out.t = unscale(z, std::max(1.0, std::sqrt(std::abs(lambda))), q.dim());
  return out;
}

FundamentalTrace fundamental_trace(const MatrixPotential& q, cplx lambda, std::span<const double> grid, double tol) {
  const std::vector<double> g = checked_grid(grid);
  FundamentalTrace out;
  out.x = g;
  out.z.resize(g.size());
  out.sigma.resize(g.size());
  const int m = q.dim();
  const double s = std::max(1.0, std::sqrt(std::abs(lambda)));
  int steps = 0, rejected = 0;
  double sigma = 0.0;
  CMatrix z;
  integrate_fundamental(
      q, lambda, tol, g,
      [&](std::size_t i, const CMatrix& zi, double si) {
        out.z[i] = unscale(zi, s, m);
        out.sigma[i] = si;
      },
      &steps, &rejected, &sigma, &z);
  return out;
}

SolutionTrace propagate(const MatrixPotential& q, cplx lambda, const CVector& initial, std::span<const double> grid,
                        double tol) {
  const int m = q.dim();
  if (initial.size() != 2 * m) throw Error(ErrorKind::InvalidArgument, "initial data must have 2m entries");
  const FundamentalTrace f = fundamental_trace(q, lambda, grid, tol);
  SolutionTrace out;
  out.x = f.x;
  out.sigma = f.sigma;
  out.y.resize(m, static_cast<Eigen::Index>(f.x.size()));
  out.dy.resize(m, static_cast<Eigen::Index>(f.x.size()));
  for (std::size_t i = 0; i < f.x.size(); ++i) {
    const CVector v = f.z[i] * initial;
    out.y.col(static_cast<Eigen::Index>(i)) = v.head(m);
    out.dy.col(static_cast<Eigen::Index>(i)) = v.tail(m);
  }
  return out;
}

}  // namespace vecsturm
