#include "vecsturm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace vecsturm {

namespace {

nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

void require_grid(const QuadratureGrid& grid, const CMatrix& f, int m) {
  if (f.cols() != static_cast<Eigen::Index>(grid.size()) || f.rows() != m) {
    throw Error(ErrorKind::GridMismatch, "trace does not live on the shared grid");
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  return f;
}

// Rows of one column j; `value`, `ratio` and `exact` pick e or d.
template <class Value, class Ratio, class Exact>
FitSummary fit_column(const std::vector<AsymptoticsRow>& rows, int j, const AsymptoticsOptions& options, Value value,
                      Ratio ratio, Exact exact) {
  FitSummary s;
  s.j = j;
  std::vector<const AsymptoticsRow*> column;
  for (const auto& r : rows)
    if (r.j == j && r.k >= 2) column.push_back(&r);
  if (column.empty()) return s;
  int k_lo = column.front()->k, k_hi = column.front()->k;
  for (const auto* r : column) {
    k_lo = std::min(k_lo, r->k);
    k_hi = std::max(k_hi, r->k);
  }
  const double k_mid = 0.5 * (k_lo + k_hi);

  std::vector<double> lx, ly, ratios;
  double upper = 0.0;
  for (const auto* r : column) {
    if (exact(*r)) {
      ++s.exact_rows;
      continue;
    }
    lx.push_back(std::log(r->b));
    ly.push_back(std::log(value(*r)));
    ratios.push_back(ratio(*r));
    if (r->k > k_mid) upper = std::max(upper, ratio(*r));
  }
  s.points = static_cast<int>(lx.size());
  if (s.points == 0) {
    s.ratio_passed = s.slope_passed = true;
    return s;
  }
  s.median_ratio = median(ratios);
  s.max_upper_ratio = upper;
  s.ratio_passed = std::isfinite(upper) && upper <= options.ratio_cap_factor * s.median_ratio;
  if (s.points >= 3) {
    const auto f = least_squares(lx, ly);
    s.slope = f.slope;
    s.intercept = f.intercept;
    s.slope_passed = s.slope >= options.min_slope;
  }
  return s;
}

std::vector<int> columns_of(const std::vector<AsymptoticsRow>& rows) {
  std::set<int> js;
  for (const auto& r : rows) js.insert(r.j);
  return {js.begin(), js.end()};
}

// Columns stacked as (m N) x n with the quadrature weights applied on request.
CMatrix stack(const QuadratureGrid& grid, const std::vector<const CMatrix*>& traces, bool weighted) {
  const Eigen::Index rows = traces.empty() ? 0 : traces.front()->size();
  CMatrix out(rows, static_cast<Eigen::Index>(traces.size()));
  for (std::size_t c = 0; c < traces.size(); ++c) {
    CMatrix f = *traces[c];
    if (weighted)
      for (Eigen::Index i = 0; i < f.cols(); ++i) f.col(i) *= grid.w[static_cast<std::size_t>(i)];
    out.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const CVector>(f.data(), rows);
  }
  return out;
}

double condition_number(const CMatrix& gram) {
  Eigen::JacobiSVD<CMatrix> svd(gram);
  const auto& sv = svd.singularValues();
  return sv(0) / sv(sv.size() - 1);
}

std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

const PredictionRecord* DiagnosticInput::prediction(int label, int j) const {
  for (const auto& p : predictions)
    if (p.label == label && p.j == j) return &p;
  return nullptr;
}

DiagnosticInput collect_diagnostic_input(std::span<const MatrixEigenpair> solved, const BaseSpectrum& base,
                                         const CPrediction& pred, const QuadratureGrid& grid) {
  DiagnosticInput in;
  in.m = pred.dim();
  in.grid = grid;
  std::set<int> labels;
  for (const auto& e : solved) {
    if (!e.accepted()) continue;
    labels.insert(e.k);
    PairRecord r;
    r.label = e.k;
    r.j = e.j;
    r.lambda = e.lambda;
    r.mu = e.prediction;
    r.zero_count = e.zero_count;
    r.pairing = e.pairing;
    r.psi = e.psi;
    r.psi_adj = e.psi_adj;
    in.pairs.push_back(std::move(r));
  }
  for (int label : labels) {
    const ScalarEigenpair* sp = base.find(label);
    if (!sp) throw Error(ErrorKind::InvalidArgument, "no base eigenpair for label " + std::to_string(label));
    for (int j = 0; j < pred.dim(); ++j) {
      PredictionRecord p;
      p.label = label;
      p.j = j;
      p.mu = pred.lattice(*sp, j);
      p.phi = prediction_trace(pred, *sp, j, grid);
      p.phi_adj = prediction_adjoint_trace(pred, *sp, j, grid);
      in.predictions.push_back(std::move(p));
    }
  }
  return in;
}

int abs_index(int label) { return label < 0 ? -label : label; }

double asymptotic_bound(const AlphaSequence& alpha, int k) {
  if (k < 2) return 0.0;
  return alpha.at(k) + std::log(static_cast<double>(k)) / k;
}

bool AsymptoticsReport::eigenvalues_passed() const {
  return !eigenvalue_fits.empty() &&
         std::all_of(eigenvalue_fits.begin(), eigenvalue_fits.end(), [](const FitSummary& f) { return f.passed(); });
}

bool AsymptoticsReport::eigenfunctions_passed() const {
  return !eigenfunction_fits.empty() && std::all_of(eigenfunction_fits.begin(), eigenfunction_fits.end(),
                                                    [](const FitSummary& f) { return f.passed(); });
}

bool AsymptoticsReport::eigenfunction_ratios_passed() const {
  return !eigenfunction_fits.empty() && std::all_of(eigenfunction_fits.begin(), eigenfunction_fits.end(),
                                                    [](const FitSummary& f) { return f.ratio_passed; });
}

AsymptoticsReport verify_eigenvalue_asymptotics(const DiagnosticInput& input, const AlphaSequence& alpha,
                                                const AsymptoticsOptions& options) {
  AsymptoticsReport rep;
  std::set<int> ks;
  for (const auto& p : input.pairs) {
    AsymptoticsRow r;
    r.label = p.label;
    r.k = abs_index(p.label);
    r.j = p.j;
    r.lambda = p.lambda;
    r.mu = p.mu;
    r.e = std::abs(p.lambda - p.mu);
    r.b = asymptotic_bound(alpha, r.k);
    r.e_ratio = r.b > 0.0 ? r.e / r.b : 0.0;
    r.e_exact = r.e <= options.eigenvalue_floor * std::max(1.0, std::abs(p.lambda));
    if (r.k >= 2) ks.insert(r.k);
    rep.rows.push_back(r);
  }
  if (static_cast<int>(ks.size()) < options.min_k_count) {
    throw Error(ErrorKind::InsufficientRange, "asymptotic fits need " + std::to_string(options.min_k_count) +
                                                  " values of k >= 2, got " + std::to_string(ks.size()));
  }
  rep.k_min = *ks.begin();
  rep.k_max = *ks.rbegin();
  std::stable_sort(rep.rows.begin(), rep.rows.end(), [](const AsymptoticsRow& a, const AsymptoticsRow& b) {
    if (a.k != b.k) return a.k < b.k;
    if (a.label != b.label) return a.label > b.label;
    return a.j < b.j;
  });
  for (int j : columns_of(rep.rows)) {
    rep.eigenvalue_fits.push_back(fit_column(
        rep.rows, j, options, [](const AsymptoticsRow& r) { return r.e; },
        [](const AsymptoticsRow& r) { return r.e_ratio; }, [](const AsymptoticsRow& r) { return r.e_exact; }));
  }
  return rep;
}

double phase_distance(const QuadratureGrid& grid, const CMatrix& psi, const CMatrix& phi) {
  const cplx p = trace_inner(grid, psi, phi);
  const cplx c = std::abs(p) > 0.0 ? p / std::abs(p) : cplx{1.0, 0.0};
  return trace_norm(grid, psi - c * phi);
}

void verify_eigenfunction_asymptotics(const DiagnosticInput& input, AsymptoticsReport& report,
                                      const AsymptoticsOptions& options) {
  for (auto& r : report.rows) {
    const PairRecord* pair = nullptr;
    for (const auto& p : input.pairs)
      if (p.label == r.label && p.j == r.j) pair = &p;
    const PredictionRecord* pred = input.prediction(r.label, r.j);
    if (!pair || !pred) throw Error(ErrorKind::InvalidArgument, "asymptotics row without its traces");
    require_grid(input.grid, pair->psi, input.m);
    require_grid(input.grid, pred->phi, input.m);
    r.d = phase_distance(input.grid, pair->psi, pred->phi);
    r.d_ratio = r.b > 0.0 ? r.d / r.b : 0.0;
    r.d_exact = r.d <= options.eigenfunction_floor;
  }
  report.eigenfunction_fits.clear();
  for (int j : columns_of(report.rows)) {
    report.eigenfunction_fits.push_back(fit_column(
        report.rows, j, options, [](const AsymptoticsRow& r) { return r.d; },
        [](const AsymptoticsRow& r) { return r.d_ratio; }, [](const AsymptoticsRow& r) { return r.d_exact; }));
  }
}

IdentityReport perturbation_identity(const DiagnosticInput& input, const MatrixPotential& q) {
  const CMatrix c = mean_matrix(q);
  std::vector<CMatrix> shifted(input.grid.size());
  for (std::size_t i = 0; i < input.grid.size(); ++i) shifted[i] = q.evaluate(input.grid.x[i]) - c;

  IdentityReport rep;
  rep.min_max_overlap = std::numeric_limits<double>::infinity();
  for (const auto& p : input.pairs) {
    require_grid(input.grid, p.psi, input.m);
    CMatrix qpsi(p.psi.rows(), p.psi.cols());
    for (Eigen::Index x = 0; x < p.psi.cols(); ++x) qpsi.col(x) = shifted[static_cast<std::size_t>(x)] * p.psi.col(x);
    double best = 0.0;
    for (int i = 0; i < input.m; ++i) {
      const PredictionRecord* pred = input.prediction(p.label, i);
      if (!pred) throw Error(ErrorKind::InvalidArgument, "missing prediction for label " + std::to_string(p.label));
      const cplx overlap = trace_inner(input.grid, p.psi, pred->phi_adj);
      const cplx rhs = trace_inner(input.grid, qpsi, pred->phi_adj);
      IdentityRow row{p.label, p.j, i, std::abs((p.lambda - pred->mu) * overlap - rhs), std::abs(overlap)};
      rep.max_residual = std::max(rep.max_residual, row.residual);
      best = std::max(best, row.overlap);
      rep.rows.push_back(row);
    }
    rep.min_max_overlap = std::min(rep.min_max_overlap, best);
  }
  if (input.pairs.empty()) rep.min_max_overlap = 0.0;
  return rep;
}

std::vector<std::size_t> riesz_order(std::span<const PairRecord> pairs) {
  std::vector<std::size_t> idx(pairs.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = pairs[a];
    const auto& y = pairs[b];
    if (abs_index(x.label) != abs_index(y.label)) return abs_index(x.label) < abs_index(y.label);
    if ((x.label < 0) != (y.label < 0)) return x.label >= 0;
    return x.j < y.j;
  });
  return idx;
}

BiorthogonalityReport biorthogonality_report(const DiagnosticInput& input, const AlphaSequence* alpha) {
  BiorthogonalityReport rep;
  const auto order = riesz_order(input.pairs);
  rep.size = static_cast<int>(order.size());
  if (order.empty()) return rep;
  std::vector<const CMatrix*> psi, adj;
  for (std::size_t i : order) {
    require_grid(input.grid, input.pairs[i].psi, input.m);
    require_grid(input.grid, input.pairs[i].psi_adj, input.m);
    psi.push_back(&input.pairs[i].psi);
    adj.push_back(&input.pairs[i].psi_adj);
  }
  // gram(b, a) = (Psi_a, Psi*_b)
  const CMatrix gram = stack(input.grid, adj, false).adjoint() * stack(input.grid, psi, true);
  for (Eigen::Index a = 0; a < gram.rows(); ++a) {
    for (Eigen::Index b = 0; b < gram.cols(); ++b) {
      if (a == b)
        rep.max_diagonal_deviation = std::max(rep.max_diagonal_deviation, std::abs(gram(a, b) - 1.0));
      else
        rep.max_off_diagonal = std::max(rep.max_off_diagonal, std::abs(gram(a, b)));
    }
  }
  for (std::size_t i : order) {
    const auto& p = input.pairs[i];
    const double drift = std::abs(p.pairing - 1.0);
    rep.max_pairing_drift = std::max(rep.max_pairing_drift, drift);
    const int k = abs_index(p.label);
    if (alpha && k >= 2 && k >= alpha->k_min && k <= alpha->k_max()) {
      rep.max_drift_ratio = std::max(rep.max_drift_ratio, drift / asymptotic_bound(*alpha, k));
    }
  }
  return rep;
}

std::vector<Probe> standard_probes(const DiagnosticInput& input, unsigned seed) {
  std::vector<Probe> probes;
  const auto n = static_cast<Eigen::Index>(input.grid.size());

  Probe indicator{"coordinate_harmonic", CMatrix::Zero(input.m, n)};
  for (Eigen::Index i = 0; i < n; ++i) indicator.values(0, i) = std::exp(2.0 * pi * I * input.grid.x[static_cast<std::size_t>(i)]);
  probes.push_back(std::move(indicator));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr int band = 6;
  CMatrix coef(input.m, 2 * band + 1);
  for (Eigen::Index c = 0; c < coef.cols(); ++c)
    for (Eigen::Index a = 0; a < coef.rows(); ++a) {
      const double re = normal(rng);
      coef(a, c) = {re, normal(rng)};
    }
  Probe random{"band_limited", CMatrix::Zero(input.m, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = input.grid.x[static_cast<std::size_t>(i)];
    for (int h = -band; h <= band; ++h) random.values.col(i) += coef.col(h + band) * std::exp(2.0 * pi * I * (h * x));
  }
  random.values /= trace_norm(input.grid, random.values);
  probes.push_back(std::move(random));

  const auto order = riesz_order(input.pairs);
  if (!order.empty()) {
    const auto& first = input.pairs[order.front()];
    const PredictionRecord* pred = input.prediction(first.label, first.j);
    if (pred) {
      probes.push_back({"phi_" + std::to_string(first.label) + "_" + std::to_string(first.j), pred->phi});
    }
  }
  return probes;
}

std::string RieszReport::conclusion() const {
  return condition_passed && bessel_passed ? "indicated" : "not indicated";
}

RieszReport bessel_riesz_report(const DiagnosticInput& input, std::span<const Probe> probes,
                                std::span<const int> truncations, double growth_cap, const AlphaSequence* alpha) {
  RieszReport rep;
  rep.growth_cap = growth_cap;
  rep.biorthogonality = biorthogonality_report(input, alpha);
  const auto order = riesz_order(input.pairs);
  const int total = static_cast<int>(order.size());

  std::vector<int> sizes;
  const std::vector<int> defaults{32, 64, 128};
  for (int t : truncations.empty() ? std::span<const int>(defaults) : truncations)
    if (t >= 1 && t <= total) sizes.push_back(t);
  if (sizes.empty() && total > 0) sizes.push_back(total);

  std::vector<const CMatrix*> psi, adj;
  std::vector<CMatrix> adj_unit;
  adj_unit.reserve(order.size());
  for (std::size_t i : order) {
    psi.push_back(&input.pairs[i].psi);
    const CMatrix& a = input.pairs[i].psi_adj;
    adj_unit.push_back(a / trace_norm(input.grid, a));
  }
  for (const auto& a : adj_unit) adj.push_back(&a);
  const CMatrix psi_plain = stack(input.grid, psi, false);
  const CMatrix psi_weighted = stack(input.grid, psi, true);
  const CMatrix gram = psi_plain.adjoint() * psi_weighted;
  const CMatrix adj_gram = stack(input.grid, adj, false).adjoint() * stack(input.grid, adj, true);

  for (int n : sizes) {
    TruncationRecord t;
    t.size = n;
    t.condition = condition_number(gram.topLeftCorner(n, n));
    t.dual_condition = condition_number(adj_gram.topLeftCorner(n, n));
    rep.truncations.push_back(t);
  }
  rep.condition_passed = rep.truncations.size() >= 2;
  for (std::size_t t = 1; t < rep.truncations.size(); ++t) {
    const double growth = std::max(rep.truncations[t].condition / rep.truncations[t - 1].condition,
                                   rep.truncations[t].dual_condition / rep.truncations[t - 1].dual_condition) -
                          1.0;
    rep.condition_growth.push_back(growth);
    if (!(growth <= growth_cap)) rep.condition_passed = false;
  }

  rep.bessel_passed = !probes.empty() && sizes.size() >= 2;
  for (const auto& probe : probes) {
    require_grid(input.grid, probe.values, input.m);
    ProbeSums s;
    s.name = probe.name;
    // coefficients (f, Psi_a) = Psi_a^H W f
    const CVector f = Eigen::Map<const CVector>(probe.values.data(), probe.values.size());
    const CVector coef = psi_weighted.adjoint() * f;
    const double norm2 = std::pow(trace_norm(input.grid, probe.values), 2);
    int done = 0;
    double sum = 0.0;
    for (int n : sizes) {
      for (; done < n; ++done) sum += std::norm(coef(done));
      s.increments.push_back(s.partial_sums.empty() ? sum : sum - s.partial_sums.back());
      s.partial_sums.push_back(sum);
    }
    for (Eigen::Index a = 0; a < coef.size(); ++a) s.leading_share = std::max(s.leading_share, std::norm(coef(a)) / norm2);
    s.non_decreasing = true;
    s.increments_decay = true;
    const double slack = 1e-12 * std::max(1.0, sum);
    for (std::size_t t = 1; t < s.partial_sums.size(); ++t) {
      if (s.partial_sums[t] < s.partial_sums[t - 1]) s.non_decreasing = false;
      if (s.increments[t] > s.increments[t - 1] + slack) s.increments_decay = false;
    }
    if (!s.non_decreasing || !s.increments_decay) rep.bessel_passed = false;
    rep.probes.push_back(std::move(s));
  }
  return rep;
}

nlohmann::json to_json(const AsymptoticsReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& x : r.rows) {
    rows.push_back({{"label", x.label},     {"k", x.k},         {"j", x.j},         {"lambda", complex_json(x.lambda)},
                    {"mu", complex_json(x.mu)}, {"e", x.e},     {"d", x.d},         {"b", x.b},
                    {"e_ratio", x.e_ratio}, {"d_ratio", x.d_ratio}, {"e_exact", x.e_exact}, {"d_exact", x.d_exact}});
  }
  auto fits = [](const std::vector<FitSummary>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& f : v) {
      out.push_back({{"j", f.j},
                     {"points", f.points},
                     {"exact_rows", f.exact_rows},
                     {"slope", f.slope},
                     {"intercept", f.intercept},
                     {"median_ratio", f.median_ratio},
                     {"max_upper_ratio", f.max_upper_ratio},
                     {"ratio_passed", f.ratio_passed},
                     {"slope_passed", f.slope_passed}});
    }
    return out;
  };
  return {{"k_min", r.k_min},
          {"k_max", r.k_max},
          {"rows", rows},
          {"eigenvalue_fits", fits(r.eigenvalue_fits)},
          {"eigenfunction_fits", fits(r.eigenfunction_fits)},
          {"eigenvalues_passed", r.eigenvalues_passed()},
          {"eigenfunctions_passed", r.eigenfunctions_passed()},
          {"eigenfunction_ratios_passed", r.eigenfunction_ratios_passed()}};
}

nlohmann::json to_json(const IdentityReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"label", x.label}, {"j", x.j}, {"i", x.i}, {"residual", x.residual}, {"overlap", x.overlap}});
  return {{"max_residual", r.max_residual}, {"min_max_overlap", r.min_max_overlap}, {"rows", rows}};
}

nlohmann::json to_json(const BiorthogonalityReport& r) {
  return {{"size", r.size},
          {"max_off_diagonal", r.max_off_diagonal},
          {"max_diagonal_deviation", r.max_diagonal_deviation},
          {"max_pairing_drift", r.max_pairing_drift},
          {"max_drift_ratio", r.max_drift_ratio}};
}

nlohmann::json to_json(const RieszReport& r) {
  nlohmann::json truncs = nlohmann::json::array();
  for (const auto& t : r.truncations)
    truncs.push_back({{"size", t.size}, {"condition", t.condition}, {"dual_condition", t.dual_condition}});
  nlohmann::json probes = nlohmann::json::array();
  for (const auto& p : r.probes) {
    probes.push_back({{"name", p.name},
                      {"partial_sums", p.partial_sums},
                      {"increments", p.increments},
                      {"non_decreasing", p.non_decreasing},
                      {"increments_decay", p.increments_decay},
                      {"leading_share", p.leading_share}});
  }
  return {{"truncations", truncs},
          {"condition_growth", r.condition_growth},
          {"growth_cap", r.growth_cap},
          {"probes", probes},
          {"biorthogonality", to_json(r.biorthogonality)},
          {"condition_passed", r.condition_passed},
          {"bessel_passed", r.bessel_passed},
          {"riesz_basis", r.conclusion()}};
}

std::string asymptotics_svg(const AsymptoticsReport& r, bool eigenfunctions) {
  constexpr double width = 640, height = 420, left = 70, right = 20, top = 30, bottom = 50;
  std::vector<std::pair<double, double>> pts;  // (k, value) for the reference curve
  std::map<int, std::vector<std::pair<double, double>>> series;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& row : r.rows) {
    if (row.k < 2) continue;
    const double v = eigenfunctions ? row.d : row.e;
    if (v > 0.0) {
      series[row.j].emplace_back(row.k, v);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    pts.emplace_back(row.k, row.b);
    lo = std::min(lo, row.b);
    hi = std::max(hi, row.b);
  }
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\">\n";
  if (pts.empty() || !(hi > 0.0)) return svg + "</svg>\n";
  const double x0 = std::log(std::max(2, r.k_min)), x1 = std::log(std::max(r.k_max, r.k_min + 1));
  const double y0 = std::log10(lo) - 0.2, y1 = std::log10(hi) + 0.2;
  auto sx = [&](double k) { return left + (std::log(k) - x0) / (x1 - x0) * (width - left - right); };
  auto sy = [&](double v) { return top + (y1 - std::log10(v)) / (y1 - y0) * (height - top - bottom); };

  svg += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"420\" fill=\"white\"/>\n";
  svg += "<text x=\"" + svg_number(left) + "\" y=\"20\" font-size=\"14\">" +
         std::string(eigenfunctions ? "d" : "e") + " vs k (log-log), dashed: b_k</text>\n";
  svg += "<line x1=\"" + svg_number(left) + "\" y1=\"" + svg_number(height - bottom) + "\" x2=\"" +
         svg_number(width - right) + "\" y2=\"" + svg_number(height - bottom) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + svg_number(left) + "\" y1=\"" + svg_number(top) + "\" x2=\"" + svg_number(left) +
         "\" y2=\"" + svg_number(height - bottom) + "\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(std::ceil(y0)); e <= static_cast<int>(std::floor(y1)); ++e) {
    svg += "<text x=\"5\" y=\"" + svg_number(sy(std::pow(10.0, e)) + 4) + "\" font-size=\"11\">1e" +
           std::to_string(e) + "</text>\n";
  }
  svg += "<text x=\"" + svg_number(left) + "\" y=\"" + svg_number(height - 20) + "\" font-size=\"11\">k = " +
         std::to_string(r.k_min) + " .. " + std::to_string(r.k_max) + "</text>\n";

  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::string line;
  for (const auto& [k, b] : pts) line += svg_number(sx(k)) + "," + svg_number(sy(b)) + " ";
  svg += "<polyline fill=\"none\" stroke=\"gray\" stroke-dasharray=\"5,3\" points=\"" + line + "\"/>\n";
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  for (const auto& [j, v] : series) {
    for (const auto& [k, val] : v) {
      svg += "<circle cx=\"" + svg_number(sx(k)) + "\" cy=\"" + svg_number(sy(val)) + "\" r=\"2.5\" fill=\"" +
             colors[j % 5] + "\"/>\n";
    }
  }
  return svg + "</svg>\n";
}

}  // namespace vecsturm
