#include "artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace vecsturm::app {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::size_t CsvData::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error(ErrorKind::MissingArtifact, "column '" + name + "' not found");
}

const std::string& CsvData::text(std::size_t row, const std::string& name) const {
  const std::size_t c = column(name);
  if (c >= rows.at(row).size()) throw Error(ErrorKind::MissingArtifact, "short CSV row");
  return rows[row][c];
}

double CsvData::number(std::size_t row, const std::string& name) const {
  const std::string& s = text(row, name);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw Error(ErrorKind::MissingArtifact, "column '" + name + "' holds '" + s + "'");
  return v;
}

int CsvData::integer(std::size_t row, const std::string& name) const {
  return static_cast<int>(std::lround(number(row, name)));
}

cplx CsvData::complex(std::size_t row, const std::string& prefix) const {
  return {number(row, prefix + "_re"), number(row, prefix + "_im")};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

CsvData read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingArtifact, path.string() + " is missing");
  CsvData d;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (!std::getline(in, line)) throw Error(ErrorKind::MissingArtifact, path.string() + " is empty");
  d.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) d.rows.push_back(split(line));
  return d;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingArtifact, path.string() + " is missing");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MissingArtifact, path.string() + " is not valid JSON");
  }
}

nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

cplx complex_from_json(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

nlohmann::json matrix_json(const CMatrix& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(complex_json(a(r, c)));
    rows.push_back(row);
  }
  return rows;
}

CMatrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  CMatrix a(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      a(r, c) = complex_from_json(j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)));
  return a;
}

void add_complex(std::vector<std::string>& header, const std::string& prefix) {
  header.push_back(prefix + "_re");
  header.push_back(prefix + "_im");
}

void push_complex(std::vector<std::string>& row, cplx z) {
  row.push_back(format_double(z.real()));
  row.push_back(format_double(z.imag()));
}

std::string base_csv(const BaseSpectrum& base) {
  std::vector<std::string> header{"label", "branch", "k"};
  for (const char* p : {"seed", "rho", "omega", "phi0_coef", "phi0_kappa", "phi1_coef", "phi1_kappa", "adj0_coef",
                        "adj0_kappa", "adj1_coef", "adj1_kappa"})
    add_complex(header, p);
  for (const char* p : {"iterations", "residual", "sup_norm", "adjoint_sup_norm", "within_cap", "multiple"})
    header.push_back(p);
  CsvTable t(header);
  for (const auto& p : base.pairs) {
    std::vector<std::string> row{std::to_string(p.label), std::to_string(p.branch), std::to_string(p.k)};
    push_complex(row, p.seed);
    push_complex(row, p.rho);
    push_complex(row, p.omega);
    for (const auto* f : {&p.phi, &p.phi_adj}) {
      for (const auto& term : f->terms) {
        push_complex(row, term.coef);
        push_complex(row, term.kappa);
      }
    }
    row.push_back(std::to_string(p.iterations));
    row.push_back(format_double(p.residual));
    row.push_back(format_double(p.sup_norm));
    row.push_back(format_double(p.adjoint_sup_norm));
    row.push_back(p.within_cap ? "1" : "0");
    row.push_back(p.multiple ? "1" : "0");
    t.add(std::move(row));
  }
  return t.str();
}

BaseSpectrum read_base(const fs::path& dir) {
  const auto d = read_csv(dir / "base.csv");
  BaseSpectrum base;
  for (std::size_t r = 0; r < d.rows.size(); ++r) {
    ScalarEigenpair p;
    p.label = d.integer(r, "label");
    p.branch = d.integer(r, "branch");
    p.k = d.integer(r, "k");
    p.seed = d.complex(r, "seed");
    p.rho = d.complex(r, "rho");
    p.omega = d.complex(r, "omega");
    p.phi.terms = {{d.complex(r, "phi0_coef"), d.complex(r, "phi0_kappa")},
                   {d.complex(r, "phi1_coef"), d.complex(r, "phi1_kappa")}};
    p.phi_adj.terms = {{d.complex(r, "adj0_coef"), d.complex(r, "adj0_kappa")},
                       {d.complex(r, "adj1_coef"), d.complex(r, "adj1_kappa")}};
    p.iterations = d.integer(r, "iterations");
    p.residual = d.number(r, "residual");
    p.sup_norm = d.number(r, "sup_norm");
    p.adjoint_sup_norm = d.number(r, "adjoint_sup_norm");
    p.within_cap = d.integer(r, "within_cap") != 0;
    p.multiple = d.integer(r, "multiple") != 0;
    base.pairs.push_back(std::move(p));
  }
  std::sort(base.pairs.begin(), base.pairs.end(),
            [](const ScalarEigenpair& a, const ScalarEigenpair& b) { return a.label < b.label; });
  return base;
}

// JSON has no infinity; an isolated eigenvalue (m = 1) stores its gap as null.
static nlohmann::json gap_json(double g) { return std::isfinite(g) ? nlohmann::json(g) : nlohmann::json(nullptr); }

nlohmann::json prediction_json(const CPrediction& pred, const CMatrix& c) {
  nlohmann::json mu = nlohmann::json::array();
  for (const auto& z : pred.mu) mu.push_back(complex_json(z));
  nlohmann::json gap = nlohmann::json::array();
  for (double g : pred.gap) gap.push_back(gap_json(g));
  return {{"C", matrix_json(c)},    {"mu", mu},  {"v", matrix_json(pred.v)},
          {"v_dual", matrix_json(pred.v_dual)}, {"gap", gap}, {"min_gap", gap_json(pred.min_gap())}};
}

CPrediction read_prediction(const fs::path& dir) {
  const auto j = read_json(dir / "predict.json");
  CPrediction p;
  try {
    for (const auto& z : j.at("mu")) p.mu.push_back(complex_from_json(z));
    p.v = matrix_from_json(j.at("v"));
    p.v_dual = matrix_from_json(j.at("v_dual"));
    for (const auto& g : j.at("gap"))
      p.gap.push_back(g.is_null() ? std::numeric_limits<double>::infinity() : g.get<double>());
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::MissingArtifact, "predict.json is incomplete");
  }
  return p;
}

std::string predictions_csv(const BaseSpectrum& base, const CPrediction& pred) {
  std::vector<std::string> header{"label", "k", "branch", "j"};
  add_complex(header, "mu");
  add_complex(header, "rho");
  add_complex(header, "c_eigenvalue");
  CsvTable t(header);
  for (const auto& p : base.pairs) {
    for (int j = 0; j < pred.dim(); ++j) {
      std::vector<std::string> row{std::to_string(p.label), std::to_string(p.k), std::to_string(p.branch),
                                   std::to_string(j)};
      push_complex(row, pred.lattice(p, j));
      push_complex(row, p.rho);
      push_complex(row, pred.mu[static_cast<std::size_t>(j)]);
      t.add(std::move(row));
    }
  }
  return t.str();
}

std::string eigenvalues_csv(std::span<const MatrixEigenpair> pairs) {
  std::vector<std::string> header{"label", "k", "j", "status"};
  add_complex(header, "lambda");
  add_complex(header, "mu");
  for (const char* p : {"distance", "residual", "zero_count", "radius", "iterations", "boundary_residual",
                        "adjoint_boundary_residual"})
    header.push_back(p);
  add_complex(header, "pairing");
  CsvTable t(header);
  for (const auto& e : pairs) {
    std::vector<std::string> row{std::to_string(e.k), std::to_string(e.k < 0 ? -e.k : e.k), std::to_string(e.j),
                                 e.status ? std::string(to_string(*e.status)) : "ok"};
    push_complex(row, e.lambda);
    push_complex(row, e.prediction);
    row.push_back(format_double(std::abs(e.lambda - e.prediction)));
    row.push_back(format_double(e.det_residual));
    row.push_back(std::to_string(e.zero_count));
    row.push_back(format_double(e.radius));
    row.push_back(std::to_string(e.iterations));
    row.push_back(format_double(e.boundary_residual));
    row.push_back(format_double(e.adjoint_boundary_residual));
    push_complex(row, e.pairing);
    t.add(std::move(row));
  }
  return t.str();
}

std::string trace_name(int label, int j) { return "trace_" + std::to_string(label) + "_" + std::to_string(j) + ".csv"; }

std::string trace_csv(const QuadratureGrid& grid, const MatrixEigenpair& pair) {
  std::vector<std::string> header{"x"};
  const auto m = pair.psi.rows();
  for (Eigen::Index a = 0; a < m; ++a) add_complex(header, "psi" + std::to_string(a));
  for (Eigen::Index a = 0; a < m; ++a) add_complex(header, "adj" + std::to_string(a));
  CsvTable t(header);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    std::vector<std::string> row{format_double(grid.x[i])};
    for (Eigen::Index a = 0; a < m; ++a) push_complex(row, pair.psi(a, c));
    for (Eigen::Index a = 0; a < m; ++a) push_complex(row, pair.psi_adj(a, c));
    t.add(std::move(row));
  }
  return t.str();
}

SolvedArtifacts read_solved(const fs::path& dir, int m, bool traces) {
  const auto d = read_csv(dir / "eigenvalues.csv");
  SolvedArtifacts out;
  for (std::size_t r = 0; r < d.rows.size(); ++r) {
    MatrixEigenpair e;
    e.k = d.integer(r, "label");
    e.j = d.integer(r, "j");
    const std::string& status = d.text(r, "status");
    if (status != "ok") {
      e.status = error_kind_from_string(status).value_or(ErrorKind::InvalidArgument);
    }
    e.lambda = d.complex(r, "lambda");
    e.prediction = d.complex(r, "mu");
    e.det_residual = d.number(r, "residual");
    e.zero_count = d.integer(r, "zero_count");
    e.radius = d.number(r, "radius");
    e.iterations = d.integer(r, "iterations");
    e.boundary_residual = d.number(r, "boundary_residual");
    e.adjoint_boundary_residual = d.number(r, "adjoint_boundary_residual");
    e.pairing = d.complex(r, "pairing");
    out.pairs.push_back(std::move(e));
  }
  if (!traces) return out;
  bool have_grid = false;
  for (auto& e : out.pairs) {
    if (!e.accepted()) continue;
    const auto t = read_csv(dir / "traces" / trace_name(e.k, e.j));
    const auto n = static_cast<Eigen::Index>(t.rows.size());
    if (!have_grid) {
      std::vector<double> x;
      for (std::size_t i = 0; i < t.rows.size(); ++i) x.push_back(t.number(i, "x"));
      out.grid = grid_from_points(x);
      have_grid = true;
    }
    if (n != static_cast<Eigen::Index>(out.grid.size())) throw Error(ErrorKind::GridMismatch, "trace grids differ");
    e.psi.resize(m, n);
    e.psi_adj.resize(m, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto row = static_cast<std::size_t>(i);
      for (int a = 0; a < m; ++a) {
        e.psi(a, i) = t.complex(row, "psi" + std::to_string(a));
        e.psi_adj(a, i) = t.complex(row, "adj" + std::to_string(a));
      }
    }
  }
  return out;
}

}  // namespace vecsturm::app
