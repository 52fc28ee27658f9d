#include "vecsturm/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace vecsturm {

namespace {

struct GaussRule {
  std::array<double, 16> node{};
  std::array<double, 16> weight{};
};

GaussRule make_gauss_rule() {
  GaussRule rule;
  constexpr int n = 16;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        rule.node[i] = x;
        rule.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        break;
      }
    }
  }
  return rule;
}

const GaussRule& gauss_rule() {
  static const GaussRule rule = make_gauss_rule();
  return rule;
}

cplx panel_sum(const std::function<cplx(double)>& f, double a, double b, int panels) {
  const auto& rule = gauss_rule();
  const double h = (b - a) / panels;
  cplx total{0.0, 0.0};
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    cplx s{0.0, 0.0};
    for (std::size_t q = 0; q < rule.node.size(); ++q) s += rule.weight[q] * f(mid + 0.5 * h * rule.node[q]);
    total += 0.5 * h * s;
  }
  return total;
}

}  // namespace

QuadratureGrid uniform_grid(int intervals) {
  if (intervals < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least 2 intervals");
  QuadratureGrid g;
  const int n = intervals;
  const double h = 1.0 / n;
  g.x.resize(n + 1);
  for (int i = 0; i <= n; ++i) g.x[i] = static_cast<double>(i) / n;
  g.w.assign(n + 1, 0.0);
  int simpson_end = n;
  if (n % 2 == 1) simpson_end = n - 3;
  for (int i = 0; i + 2 <= simpson_end; i += 2) {
    g.w[i] += h / 3.0;
    g.w[i + 1] += 4.0 * h / 3.0;
    g.w[i + 2] += h / 3.0;
  }
  if (simpson_end != n) {
    const double c = 3.0 * h / 8.0;
    g.w[simpson_end] += c;
    g.w[simpson_end + 1] += 3.0 * c;
    g.w[simpson_end + 2] += 3.0 * c;
    g.w[simpson_end + 3] += c;
  }
  return g;
}

cplx trace_inner(const QuadratureGrid& grid, const CMatrix& f, const CMatrix& g) {
  if (f.cols() != static_cast<Eigen::Index>(grid.size()) || g.cols() != f.cols() || g.rows() != f.rows()) {
    throw Error(ErrorKind::GridMismatch, "trace shapes do not match the grid");
  }
  cplx s{0.0, 0.0};
  for (Eigen::Index i = 0; i < f.cols(); ++i) s += grid.w[static_cast<std::size_t>(i)] * g.col(i).dot(f.col(i));
  return s;
}

double trace_norm(const QuadratureGrid& grid, const CMatrix& f) { return std::sqrt(trace_inner(grid, f, f).real()); }

QuadratureGrid grid_from_points(std::span<const double> x) {
  if (x.size() < 3) throw Error(ErrorKind::GridMismatch, "grid has fewer than 3 points");
  QuadratureGrid g = uniform_grid(static_cast<int>(x.size()) - 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i] - g.x[i]) > 1e-12) throw Error(ErrorKind::GridMismatch, "grid is not uniform on [0,1]");
  }
  return g;
}

cplx exp_integral(cplx c) {
  if (std::abs(c) < 1e-4) {
    // 1 + (ic)/2 + (ic)^2/6 + (ic)^3/24 + (ic)^4/120
    const cplx z = I * c;
    return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
  }
  return (std::exp(I * c) - 1.0) / (I * c);
}

cplx integrate(const std::function<cplx(double)>& f, double a, double b, double rel_tol, double abs_tol,
               int max_panels) {
  if (b <= a) return {0.0, 0.0};
  int panels = 1;
  cplx prev = panel_sum(f, a, b, panels);
  while (panels < max_panels) {
    panels *= 2;
    cplx next = panel_sum(f, a, b, panels);
    if (std::abs(next - prev) <= std::max(abs_tol, rel_tol * std::abs(next))) return next;
    prev = next;
  }
  return prev;
}

cplx ExpSum::operator()(double x) const {
  cplx v{0.0, 0.0};
  for (const auto& t : terms) v += t.coef * std::exp(I * t.kappa * x);
  return v;
}

cplx ExpSum::derivative(double x) const {
  cplx v{0.0, 0.0};
  for (const auto& t : terms) v += I * t.kappa * t.coef * std::exp(I * t.kappa * x);
  return v;
}

ExpSum ExpSum::scaled(cplx factor) const {
  ExpSum r = *this;
  for (auto& t : r.terms) t.coef *= factor;
  return r;
}

double ExpSum::sup_norm(int samples) const {
  double m = 0.0;
  for (int j = 0; j <= samples; ++j) m = std::max(m, std::abs((*this)(static_cast<double>(j) / samples)));
  return m;
}

cplx inner(const ExpSum& f, const ExpSum& g) {
  cplx s{0.0, 0.0};
  for (const auto& a : f.terms)
    for (const auto& b : g.terms) s += a.coef * std::conj(b.coef) * exp_integral(a.kappa - std::conj(b.kappa));
  return s;
}

cplx principal_sqrt(cplx z) {
  if (z.imag() == 0.0 && z.real() < 0.0) return {0.0, std::sqrt(-z.real())};
  return std::sqrt(z);
}

WindingResult winding_number(const std::function<cplx(cplx)>& f, cplx center, double radius, int min_samples,
                             int max_samples) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "contour radius must be positive");
  int n = std::max(8, min_samples);
  std::vector<cplx> values(n);
  auto point = [&](int j, int total) { return center + radius * std::exp(I * (2.0 * pi * j / total)); };
  for (int j = 0; j < n; ++j) values[j] = f(point(j, n));

  for (;;) {
    double max_abs = 0.0, min_abs = std::numeric_limits<double>::infinity();
    for (const auto& v : values) {
      max_abs = std::max(max_abs, std::abs(v));
      min_abs = std::min(min_abs, std::abs(v));
    }
    if (!(max_abs > 0.0) || !std::isfinite(max_abs) || min_abs <= 1e-13 * max_abs) {
      throw Error(ErrorKind::ContourThroughZero, "characteristic function vanishes on the contour");
    }
    double total = 0.0, max_step = 0.0;
    std::vector<double> phase(n);
    for (int j = 0; j < n; ++j) {
      phase[j] = total;
      const double step = std::arg(values[(j + 1) % n] / values[j]);
      total += step;
      max_step = std::max(max_step, std::abs(step));
    }
    const double raw = total / (2.0 * pi);
    const double rounded = std::round(raw);
    const bool settled = std::abs(raw - rounded) < 0.25 && max_step < pi / 3.0;
    if (settled || 2 * n > max_samples) {
      WindingResult r;
      r.raw = raw;
      r.count = static_cast<int>(rounded);
      r.samples = n;
      r.min_abs = min_abs;
      r.max_abs = max_abs;
      r.centroid = center;
      if (r.count >= 1) {
        // log f - count*log(z - center) is periodic on the circle; integrate it by parts
        cplx acc{0.0, 0.0};
        for (int j = 0; j < n; ++j) {
          const double theta = 2.0 * pi * j / n;
          const cplx g{std::log(std::abs(values[j])), phase[j] - r.count * theta};
          acc += g * std::exp(I * theta);
        }
        r.centroid = center - radius * acc / static_cast<double>(n * r.count);
      }
      return r;
    }
    std::vector<cplx> refined(2 * n);
    for (int j = 0; j < n; ++j) {
      refined[2 * j] = values[j];
      refined[2 * j + 1] = f(point(2 * j + 1, 2 * n));
    }
    values.swap(refined);
    n *= 2;
  }
}

}  // namespace vecsturm
