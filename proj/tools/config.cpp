#include "config.hpp"

#include <fstream>
#include <set>

namespace vecsturm::app {

namespace {

[[noreturn]] void fail(const std::string& why) { throw Error(ErrorKind::ConfigParse, why); }

void only_keys(const nlohmann::json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const nlohmann::json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(where + "." + key + " has the wrong type");
  }
}

void positive(double v, const char* name) {
  if (!(v > 0.0)) fail(std::string("solver.") + name + " must be positive");
}

}  // namespace

cplx parse_complex(const nlohmann::json& value) {
  if (value.is_number()) return {value.get<double>(), 0.0};
  if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
    return {value[0].get<double>(), value[1].get<double>()};
  }
  fail("complex numbers are [re, im] pairs, got " + value.dump());
}

CMatrix parse_matrix(const nlohmann::json& value, int m) {
  if (!value.is_array() || static_cast<int>(value.size()) != m) fail("matrix must have " + std::to_string(m) + " rows");
  CMatrix out(m, m);
  for (int r = 0; r < m; ++r) {
    const auto& row = value[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != m) fail("matrix row must have " + std::to_string(m) + " entries");
    for (int c = 0; c < m; ++c) out(r, c) = parse_complex(row[static_cast<std::size_t>(c)]);
  }
  return out;
}

MatrixPotential parse_potential(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("type") || !spec.contains("m")) fail("potential needs 'type' and 'm'");
  const std::string type = spec.at("type").is_string() ? spec.at("type").get<std::string>() : "";
  const int m = spec.at("m").is_number_integer() ? spec.at("m").get<int>() : 0;
  if (m < 1) fail("potential.m must be a positive integer");
  try {
    if (type == "trig") {
      only_keys(spec, "potential", {"type", "m", "harmonics"});
      std::map<int, CMatrix> h;
      for (const auto& entry : spec.value("harmonics", nlohmann::json::array())) {
        if (!entry.contains("n") || !entry.at("n").is_number_integer() || !entry.contains("matrix"))
          fail("trig harmonic needs integer 'n' and 'matrix'");
        const int n = entry.at("n").get<int>();
        if (h.count(n)) fail("harmonic " + std::to_string(n) + " given twice");
        h[n] = parse_matrix(entry.at("matrix"), m);
      }
      return MatrixPotential::trig(m, h);
    }
    if (type == "piecewise") {
      only_keys(spec, "potential", {"type", "m", "breaks", "values"});
      std::vector<double> breaks;
      read(spec, "breaks", breaks, "potential");
      std::vector<CMatrix> values;
      for (const auto& v : spec.value("values", nlohmann::json::array())) values.push_back(parse_matrix(v, m));
      return MatrixPotential::piecewise(m, breaks, values);
    }
    if (type == "sampled") {
      only_keys(spec, "potential", {"type", "m", "samples", "interpolation"});
      std::vector<CMatrix> samples;
      for (const auto& v : spec.value("samples", nlohmann::json::array())) samples.push_back(parse_matrix(v, m));
      const std::string interp = spec.value("interpolation", std::string("linear"));
      if (interp != "linear" && interp != "cubic") fail("interpolation must be 'linear' or 'cubic'");
      return MatrixPotential::sampled(m, samples, interp == "cubic");
    }
    if (type == "constant") {
      only_keys(spec, "potential", {"type", "m", "matrix"});
      if (!spec.contains("matrix")) fail("constant potential needs 'matrix'");
      return MatrixPotential::constant(parse_matrix(spec.at("matrix"), m));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigParse) throw;
    fail(std::string("potential: ") + e.what());
  }
  fail("unknown potential type '" + type + "'");
}

BoundaryRow parse_boundary_row(const nlohmann::json& record) {
  only_keys(record, "boundary record", {"k", "alpha", "alpha0", "beta", "beta0"});
  if (!record.contains("k") || !record.at("k").is_number_integer()) fail("boundary record needs integer 'k'");
  BoundaryRow row;
  row.order = record.at("k").get<int>();
  if (row.order != 0 && row.order != 1) fail("boundary order k must be 0 or 1");
  if (record.contains("alpha")) row.alpha = parse_complex(record.at("alpha"));
  if (record.contains("alpha0")) row.alpha0 = parse_complex(record.at("alpha0"));
  if (record.contains("beta")) row.beta = parse_complex(record.at("beta"));
  if (record.contains("beta0")) row.beta0 = parse_complex(record.at("beta0"));
  return row;
}

MatrixPotential ProblemConfig::potential() const { return parse_potential(potential_spec); }

RunConfig parse_config(const nlohmann::json& j) {
  only_keys(j, "config", {"schema", "problem", "solver", "outputs"});
  RunConfig c;
  if (!j.contains("schema") || !j.at("schema").is_string()) fail("missing schema version string");
  c.schema = j.at("schema").get<std::string>();
  if (c.schema != kSchema) fail("unsupported schema '" + c.schema + "', expected " + kSchema);

  if (!j.contains("problem")) fail("missing 'problem'");
  const auto& p = j.at("problem");
  only_keys(p, "problem", {"m", "boundary", "potential"});
  if (!p.contains("m") || !p.at("m").is_number_integer() || p.at("m").get<int>() < 1) fail("problem.m must be >= 1");
  c.problem.m = p.at("m").get<int>();
  if (!p.contains("boundary") || !p.at("boundary").is_array() || p.at("boundary").size() != 2)
    fail("problem.boundary must hold exactly two records");
  for (std::size_t i = 0; i < 2; ++i) c.problem.rows[i] = parse_boundary_row(p.at("boundary")[i]);
  if (!p.contains("potential")) fail("missing problem.potential");
  c.problem.potential_spec = p.at("potential");
  const auto q = c.problem.potential();
  if (q.dim() != c.problem.m) fail("potential.m does not match problem.m");
  try {
    (void)c.problem.boundary();
  } catch (const Error& e) {
    fail(std::string("boundary: ") + e.what());
  }

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    only_keys(s, "solver",
              {"tol", "contour_tol", "residual_tol", "step_tol", "gap_tol", "regularity_tol", "m_cap", "k_range",
               "n_start", "grid", "oracle_p", "oracle_count", "seed", "threads", "ratio_cap_factor", "min_slope",
               "truncations", "growth_cap"});
    auto& o = c.solver;
    read(s, "tol", o.tol, "solver");
    read(s, "contour_tol", o.contour_tol, "solver");
    read(s, "residual_tol", o.residual_tol, "solver");
    read(s, "step_tol", o.step_tol, "solver");
    read(s, "gap_tol", o.gap_tol, "solver");
    read(s, "regularity_tol", o.regularity_tol, "solver");
    read(s, "m_cap", o.m_cap, "solver");
    if (s.contains("k_range")) {
      std::vector<int> range;
      read(s, "k_range", range, "solver");
      if (range.size() != 2) fail("solver.k_range must be [k_min, k_max]");
      o.k_min = range[0];
      o.k_max = range[1];
    }
    read(s, "n_start", o.n_start, "solver");
    read(s, "grid", o.grid, "solver");
    read(s, "oracle_p", o.oracle_p, "solver");
    read(s, "oracle_count", o.oracle_count, "solver");
    read(s, "seed", o.seed, "solver");
    read(s, "threads", o.threads, "solver");
    read(s, "ratio_cap_factor", o.ratio_cap_factor, "solver");
    read(s, "min_slope", o.min_slope, "solver");
    read(s, "truncations", o.truncations, "solver");
    read(s, "growth_cap", o.growth_cap, "solver");
  }
  const auto& o = c.solver;
  for (auto [v, name] : {std::pair{o.tol, "tol"}, {o.contour_tol, "contour_tol"}, {o.residual_tol, "residual_tol"},
                         {o.step_tol, "step_tol"}, {o.gap_tol, "gap_tol"}, {o.regularity_tol, "regularity_tol"},
                         {o.m_cap, "m_cap"}, {o.ratio_cap_factor, "ratio_cap_factor"}, {o.growth_cap, "growth_cap"}})
    positive(v, name);
  if (o.k_min < 0 || o.k_max < o.k_min) fail("solver.k_range must be nonempty with k_min >= 0");
  if (o.n_start < 0) fail("solver.n_start must be >= 0");
  if (o.grid < 16) fail("solver.grid must be >= 16");
  if (o.oracle_p < 128 || o.oracle_p % 2 != 0) fail("solver.oracle_p must be even and >= 128");
  if (o.oracle_count < 1) fail("solver.oracle_count must be >= 1");

  if (j.contains("outputs")) {
    const auto& out = j.at("outputs");
    only_keys(out, "outputs", {"directory", "csv", "json", "svg", "traces"});
    read(out, "directory", c.outputs.directory, "outputs");
    read(out, "csv", c.outputs.csv, "outputs");
    read(out, "json", c.outputs.json, "outputs");
    read(out, "svg", c.outputs.svg, "outputs");
    read(out, "traces", c.outputs.traces, "outputs");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace vecsturm::app
