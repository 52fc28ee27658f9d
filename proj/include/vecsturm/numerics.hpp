#pragma once

#include <functional>
#include <span>
#include <vector>

#include "vecsturm/common.hpp"

namespace vecsturm {

/// Uniform grid on [0,1] carrying composite Simpson weights. All eigenfunction
/// traces and inner products in the toolkit live on one of these.
struct QuadratureGrid {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
  double spacing() const { return x.size() > 1 ? x[1] - x[0] : 1.0; }
};

/// (f, g) for vector traces stored as m x N matrices (column i at x[i]).
cplx trace_inner(const QuadratureGrid& grid, const CMatrix& f, const CMatrix& g);
double trace_norm(const QuadratureGrid& grid, const CMatrix& f);

/// `intervals` >= 2. Odd interval counts close with a 3/8 panel.
QuadratureGrid uniform_grid(int intervals);

/// Rebuilds a grid from stored abscissae; throws GridMismatch if not uniform on [0,1].
QuadratureGrid grid_from_points(std::span<const double> x);

/// Integral over [0,1] of exp(i c x), stable as c -> 0.
cplx exp_integral(cplx c);

/// Integral over [a,b] by composite Gauss-Legendre panels, doubled until two
/// successive estimates differ by less than max(abs_tol, rel_tol*|I|).
cplx integrate(const std::function<cplx(double)>& f, double a, double b,
               double rel_tol = 1e-12, double abs_tol = 1e-14, int max_panels = 1 << 14);

/// f(x) = sum_j c_j exp(i kappa_j x) on [0,1].
struct ExpSum {
  struct Term {
    cplx coef;
    cplx kappa;
  };
  std::vector<Term> terms;

  cplx operator()(double x) const;
  cplx derivative(double x) const;
  ExpSum scaled(cplx factor) const;
  /// Largest |f| over `samples` + 1 equispaced points.
  double sup_norm(int samples = 512) const;
};

/// (f, g) = integral_0^1 f conj(g), exact.
cplx inner(const ExpSum& f, const ExpSum& g);

/// Principal square root with the cut on the negative real axis, imag part >= 0 on it.
cplx principal_sqrt(cplx z);

struct WindingResult {
  int count = 0;
  double raw = 0.0;          // unrounded winding number
  int samples = 0;
  double min_abs = 0.0;
  double max_abs = 0.0;
  cplx centroid{0.0, 0.0};   // contour estimate of the root mean, meaningful when count >= 1
};

/// Counts zeros of an analytic f inside |z - center| < radius by the argument
/// principle. Samples start at `min_samples` and double until the winding
/// settles within 0.25 of an integer with every phase increment resolved.
/// Throws ContourThroughZero when |f| collapses on the contour.
WindingResult winding_number(const std::function<cplx(cplx)>& f, cplx center, double radius,
                             int min_samples = 256, int max_samples = 8192);

}  // namespace vecsturm
