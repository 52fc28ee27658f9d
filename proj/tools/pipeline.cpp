#include "pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "artifacts.hpp"
#include "vecsturm/diagnostics.hpp"
#include "vecsturm/oracle.hpp"

namespace vecsturm::app {

namespace {

constexpr double kOracleRelTol = 1e-4;

fs::path out_dir(const RunConfig& c) { return fs::path(c.outputs.directory); }

std::string regularity_name(Regularity r) {
  switch (r) {
    case Regularity::NotRegular: return "NotRegular";
    case Regularity::RegularNotStronglyRegular: return "RegularNotStronglyRegular";
    case Regularity::StronglyRegular: return "StronglyRegular";
  }
  return "NotRegular";
}

std::string case_name(CaseTag t) {
  switch (t) {
    case CaseTag::Case6: return "Case6";
    case CaseTag::Case7: return "Case7";
    case CaseTag::None: return "None";
  }
  return "None";
}

std::string show(cplx z) {
  z += cplx(0.0, 0.0);  // drop signed zeros
  std::ostringstream s;
  s << std::setprecision(12);
  if (z.imag() == 0.0) {
    s << z.real();
  } else {
    s << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  }
  return s.str();
}

struct Classification {
  ThetaTriple theta;
  RegularityClass regularity;
  std::optional<GammaPair> gamma;
};

Classification classify_problem(const RunConfig& c) {
  Classification out;
  const auto bc = c.problem.boundary();
  ThetaOptions opts;
  opts.case_tolerance = c.solver.regularity_tol;
  out.theta = theta_coefficients(bc, opts);
  out.regularity = classify(out.theta, c.solver.regularity_tol, c.solver.regularity_tol);
  if (out.regularity.kind == Regularity::StronglyRegular) {
    out.gamma = characteristic_roots(out.theta, c.solver.regularity_tol);
  }
  return out;
}

GammaPair require_strongly_regular(const RunConfig& c) {
  const auto cl = classify_problem(c);
  if (!cl.gamma) throw Error(ErrorKind::NotRegular, regularity_name(cl.regularity.kind));
  return *cl.gamma;
}

std::vector<int> labels_of(const BaseSpectrum& base) {
  std::vector<int> labels;
  for (const auto& p : base.pairs) labels.push_back(p.label);
  return labels;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Same asymptotics with mu_{k,0} moved by 0.5; the verifier has to reject it.
nlohmann::json negative_control(const DiagnosticInput& input, const AlphaSequence& alpha,
                                const AsymptoticsOptions& options) {
  DiagnosticInput corrupted = input;
  for (auto& p : corrupted.pairs)
    if (p.j == 0) p.mu += 0.5;
  try {
    const auto r = verify_eigenvalue_asymptotics(corrupted, alpha, options);
    return {{"shift", 0.5}, {"j", 0}, {"passed", r.eigenvalues_passed()}, {"rejected", !r.eigenvalues_passed()}};
  } catch (const Error& e) {
    return {{"shift", 0.5}, {"j", 0}, {"skipped", std::string(e.what())}};
  }
}

AsymptoticsReport asymptotics_from_json(const nlohmann::json& j) {
  AsymptoticsReport r;
  r.k_min = j.at("k_min").get<int>();
  r.k_max = j.at("k_max").get<int>();
  for (const auto& x : j.at("rows")) {
    AsymptoticsRow row;
    row.label = x.at("label").get<int>();
    row.k = x.at("k").get<int>();
    row.j = x.at("j").get<int>();
    row.lambda = complex_from_json(x.at("lambda"));
    row.mu = complex_from_json(x.at("mu"));
    row.e = x.at("e").get<double>();
    row.d = x.at("d").get<double>();
    row.b = x.at("b").get<double>();
    row.e_ratio = x.at("e_ratio").get<double>();
    row.d_ratio = x.at("d_ratio").get<double>();
    row.e_exact = x.at("e_exact").get<bool>();
    row.d_exact = x.at("d_exact").get<bool>();
    r.rows.push_back(row);
  }
  return r;
}

}  // namespace

void apply_overrides(RunConfig& c, const Overrides& o) {
  if (o.out) c.outputs.directory = *o.out;
  if (o.tol) {
    if (!(*o.tol > 0.0)) throw Error(ErrorKind::ConfigParse, "--tol must be positive");
    c.solver.tol = *o.tol;
  }
  if (o.k_min) c.solver.k_min = *o.k_min;
  if (o.k_max) c.solver.k_max = *o.k_max;
  if (c.solver.k_min < 0 || c.solver.k_max < c.solver.k_min) {
    throw Error(ErrorKind::ConfigParse, "k range must be nonempty with k_min >= 0");
  }
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigParse:
    case ErrorKind::MissingArtifact: return 2;
    case ErrorKind::NotRegular:
    case ErrorKind::CoincidentRoots: return 3;
    case ErrorKind::NonSimpleC: return 4;
    default: return 5;
  }
}

void stage_classify(const RunConfig& c, std::ostream& log) {
  const auto cl = classify_problem(c);
  const auto& t = cl.theta;
  nlohmann::json j{{"theta", {complex_json(t.minus), complex_json(t.zero), complex_json(t.plus)}},
                   {"case", case_name(t.tag)},
                   {"class", regularity_name(cl.regularity.kind)},
                   {"discriminant", complex_json(cl.regularity.discriminant)}};
  if (t.tag == CaseTag::Case7) {
    j["a"] = complex_json(t.a);
    j["b"] = complex_json(t.b);
  }
  log << "theta = (" << show(t.minus) << ", " << show(t.zero) << ", " << show(t.plus) << ")\n";
  log << "class " << regularity_name(cl.regularity.kind) << ", " << case_name(t.tag) << "\n";
  if (cl.gamma) {
    j["gamma"] = {complex_json(cl.gamma->gamma[0]), complex_json(cl.gamma->gamma[1])};
    j["zeta"] = {complex_json(cl.gamma->zeta[0]), complex_json(cl.gamma->zeta[1])};
    log << "gamma = (" << show(cl.gamma->gamma[0]) << ", " << show(cl.gamma->gamma[1]) << ")\n";

    std::mt19937_64 rng(c.solver.seed);
    std::uniform_real_distribution<double> radius(0.5, 2.0), phase(0.0, 2.0 * pi);
    std::vector<cplx> s;
    for (int i = 0; i < 10; ++i) {
      const double r = radius(rng);
      s.push_back(std::polar(r, phase(rng)));
    }
    const auto v = vector_regularity_check(c.problem.boundary(), c.problem.m, s);
    j["vector_regularity"] = {{"m", v.m},
                              {"max_deviation", v.max_deviation},
                              {"theta_plus_m", complex_json(v.theta_plus_m)},
                              {"theta_minus_m", complex_json(v.theta_minus_m)}};
  }
  if (c.outputs.json) write_json(out_dir(c) / "classify.json", j);
  if (!cl.gamma) throw Error(ErrorKind::NotRegular, regularity_name(cl.regularity.kind));
}

void stage_base(const RunConfig& c, std::ostream& log) {
  const auto gamma = require_strongly_regular(c);
  const auto bc = c.problem.boundary();
  const auto labels = labels_for_range(c.solver.k_min, c.solver.k_max, c.solver.n_start);
  BaseOptions opts;
  opts.m_cap = c.solver.m_cap;
  const auto base = unperturbed_spectrum(bc, gamma, labels, opts, c.solver.threads);

  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : base.failures)
    failures.push_back({{"label", f.label}, {"kind", std::string(to_string(f.kind))}, {"message", f.message}});
  nlohmann::json collisions = nlohmann::json::array();
  for (const auto& [a, b] : base.collisions) collisions.push_back({a, b});
  nlohmann::json chains = nlohmann::json::array();
  if (c.solver.n_start > 0) {
    for (const auto& r : detect_chains(bc, c.solver.n_start - 1)) {
      chains.push_back({{"label", r.label},
                        {"center", complex_json(r.center)},
                        {"radius", r.radius},
                        {"zero_count", r.zero_count},
                        {"chain_length", r.chain_length}});
    }
  }
  const nlohmann::json j{{"gamma", {complex_json(gamma.gamma[0]), complex_json(gamma.gamma[1])}},
                         {"labels", labels},
                         {"label_zero_vacant", base.label_zero_vacant},
                         {"collisions", collisions},
                         {"failures", failures},
                         {"max_seed_offset", base.max_seed_offset},
                         {"max_sup_norm", base.max_sup_norm},
                         {"low_band_chains", chains}};
  write_text(out_dir(c) / "base.csv", base_csv(base));
  if (c.outputs.json) write_json(out_dir(c) / "base.json", j);
  log << "base: " << base.pairs.size() << " labels, " << base.failures.size() << " failures, max |rho - seed| "
      << base.max_seed_offset << "\n";
}

void stage_predict(const RunConfig& c, std::ostream& log) {
  const auto base = read_base(out_dir(c));
  const auto q = c.problem.potential();
  const CMatrix cm = mean_matrix(q);
  const auto pred = c_spectrum(cm, c.solver.gap_tol);
  write_json(out_dir(c) / "predict.json", prediction_json(pred, cm));
  write_text(out_dir(c) / "predictions.csv", predictions_csv(base, pred));
  log << "predict: C spectrum";
  for (const auto& mu : pred.mu) log << " " << show(mu);
  log << ", min gap " << pred.min_gap() << "\n";
}

void stage_solve(const RunConfig& c, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto gamma = require_strongly_regular(c);
  const auto base = read_base(out_dir(c));
  const auto pred = read_prediction(out_dir(c));
  const auto q = c.problem.potential();
  const auto grid = uniform_grid(c.solver.grid);
  const auto labels = labels_of(base);

  SolveOptions opts;
  opts.locate.contour_tol = c.solver.contour_tol;
  opts.locate.newton_tol = c.solver.tol;
  opts.locate.residual_tol = c.solver.residual_tol;
  opts.locate.step_tol = c.solver.step_tol;
  opts.trace_tol = c.solver.tol;
  opts.threads = c.solver.threads;
  const auto solved = solve_range(q, c.problem.boundary(), gamma, base, pred, labels, grid, opts);

  write_text(out_dir(c) / "eigenvalues.csv", eigenvalues_csv(solved));
  const fs::path traces = out_dir(c) / "traces";
  if (fs::exists(traces)) {
    for (const auto& entry : fs::directory_iterator(traces)) {
      const auto name = entry.path().filename().string();
      if (name.rfind("trace_", 0) == 0 && entry.path().extension() == ".csv") fs::remove(entry.path());
    }
  }
  std::map<std::string, int> statuses;
  int accepted = 0;
  for (const auto& e : solved) {
    if (e.accepted()) {
      ++accepted;
      if (c.outputs.traces) write_text(traces / trace_name(e.k, e.j), trace_csv(grid, e));
    } else {
      ++statuses[std::string(to_string(*e.status))];
    }
  }
  log << "solve: " << accepted << " of " << solved.size() << " pairs accepted";
  for (const auto& [kind, n] : statuses) log << ", " << n << " " << kind;
  log << " (" << std::fixed << std::setprecision(1) << elapsed(t0) << " s)\n" << std::defaultfloat;
}

void stage_oracle(const RunConfig& c, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto q = c.problem.potential();
  const auto bc = c.problem.boundary();
  const auto modes = richardson_spectrum(q, bc, c.solver.oracle_p, c.solver.oracle_count);

  std::vector<std::string> header{"index"};
  add_complex(header, "fine");
  add_complex(header, "coarse");
  add_complex(header, "corrected");
  header.push_back("estimate");
  header.push_back("matched");
  CsvTable table(header);
  double limit = 0.0;
  std::vector<cplx> corrected;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    push_complex(row, modes[i].fine);
    push_complex(row, modes[i].coarse);
    push_complex(row, modes[i].corrected);
    row.push_back(format_double(modes[i].estimate));
    row.push_back(modes[i].matched ? "1" : "0");
    table.add(std::move(row));
    corrected.push_back(modes[i].corrected);
    limit = std::max(limit, std::abs(modes[i].corrected));
  }
  write_text(out_dir(c) / "oracle.csv", table.str());

  nlohmann::json summary{{"P", c.solver.oracle_p}, {"count", modes.size()}, {"resolution_limit", limit}};
  const fs::path eig = out_dir(c) / "eigenvalues.csv";
  if (fs::exists(eig)) {
    const auto solved = read_solved(out_dir(c), c.problem.m, false);
    std::vector<cplx> pipeline;
    std::vector<const MatrixEigenpair*> source;
    for (const auto& e : solved.pairs) {
      if (e.accepted() && std::abs(e.lambda) <= limit * (1.0 + 1e-3)) {
        pipeline.push_back(e.lambda);
        source.push_back(&e);
      }
    }
    const auto report = match_spectra(pipeline, corrected, 1e-2);
    std::vector<std::string> ph{"label", "j"};
    add_complex(ph, "lambda");
    ph.push_back("oracle_index");
    add_complex(ph, "oracle");
    for (const char* p : {"rel_gap", "allowed", "richardson_estimate", "agree"}) ph.push_back(p);
    CsvTable pairing(ph);
    int agreed = 0;
    for (const auto& p : report.pairs) {
      const auto& e = *source[p.a];
      const double allowed = kOracleRelTol * std::max(1.0, std::abs(e.lambda));
      const bool agree = p.gap <= allowed;
      agreed += agree;
      std::vector<std::string> row{std::to_string(e.k), std::to_string(e.j)};
      push_complex(row, e.lambda);
      row.push_back(std::to_string(p.b));
      push_complex(row, corrected[p.b]);
      row.push_back(format_double(p.rel_gap));
      row.push_back(format_double(allowed));
      row.push_back(format_double(modes[p.b].estimate));
      row.push_back(agree ? "1" : "0");
      pairing.add(std::move(row));
    }
    write_text(out_dir(c) / "oracle_pairing.csv", pairing.str());
    summary["compared"] = pipeline.size();
    summary["matched"] = report.pairs.size();
    summary["agreed"] = agreed;
    summary["rel_tol"] = kOracleRelTol;
    summary["unmatched_pipeline"] = report.unmatched_a.size();
    log << "oracle: " << agreed << " of " << pipeline.size() << " pipeline eigenvalues below " << limit
        << " agree with the dense reference\n";
  }
  if (c.outputs.json) write_json(out_dir(c) / "oracle.json", summary);
  log << "oracle: " << modes.size() << " modes at P = " << c.solver.oracle_p << " (" << std::fixed
      << std::setprecision(1) << elapsed(t0) << " s)\n" << std::defaultfloat;
}

void stage_verify(const RunConfig& c, std::ostream& log) {
  const auto gamma = require_strongly_regular(c);
  const auto base = read_base(out_dir(c));
  const auto pred = read_prediction(out_dir(c));
  const auto solved = read_solved(out_dir(c), c.problem.m, true);
  const auto q = c.problem.potential();
  const auto input = collect_diagnostic_input(solved.pairs, base, pred, solved.grid);

  int k_top = c.solver.k_max;
  for (const auto& p : input.pairs) k_top = std::max(k_top, abs_index(p.label));
  const auto alpha = alpha_sequence(q, gamma, 0, std::max(k_top, 2));

  AsymptoticsOptions aopts;
  aopts.ratio_cap_factor = c.solver.ratio_cap_factor;
  aopts.min_slope = c.solver.min_slope;

  nlohmann::json summary;
  nlohmann::json j{{"schema", kSchema}};
  try {
    auto rep = verify_eigenvalue_asymptotics(input, alpha, aopts);
    verify_eigenfunction_asymptotics(input, rep, aopts);
    j["asymptotics"] = to_json(rep);
    summary["eigenvalue_asymptotics"] = rep.eigenvalues_passed();
    summary["eigenfunction_asymptotics"] = rep.eigenfunction_ratios_passed();
    j["negative_control"] = negative_control(input, alpha, aopts);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientRange) throw;
    j["asymptotics"] = {{"skipped", std::string(e.what())}};
    summary["eigenvalue_asymptotics"] = nullptr;
    summary["eigenfunction_asymptotics"] = nullptr;
  }

  const auto identity = perturbation_identity(input, q);
  j["identity"] = to_json(identity);
  summary["identity_max_residual"] = identity.max_residual;
  summary["identity"] = identity.max_residual <= 1e-7;
  summary["min_max_overlap"] = identity.min_max_overlap;
  summary["overlap"] = identity.min_max_overlap > 0.1;

  const auto probes = standard_probes(input, c.solver.seed);
  const auto riesz = bessel_riesz_report(input, probes, c.solver.truncations, c.solver.growth_cap, &alpha);
  j["riesz"] = to_json(riesz);
  summary["biorthogonality_max_off_diagonal"] = riesz.biorthogonality.max_off_diagonal;
  summary["biorthogonality"] = riesz.biorthogonality.max_off_diagonal <= 1e-6;
  summary["condition_growth"] = riesz.condition_passed;
  summary["bessel"] = riesz.bessel_passed;
  summary["riesz_basis"] = riesz.conclusion();

  bool simple = true;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& e : solved.pairs) {
    if (e.accepted()) {
      simple = simple && e.zero_count == 1;
    } else {
      failures.push_back({{"label", e.k}, {"j", e.j}, {"status", std::string(to_string(*e.status))}});
    }
  }
  summary["simple"] = simple;
  summary["accepted"] = input.pairs.size();
  summary["failed"] = failures.size();
  j["failures"] = failures;
  j["summary"] = summary;
  write_json(out_dir(c) / "diagnostics.json", j);

  log << "verify:";
  for (const auto& [key, value] : summary.items()) log << " " << key << "=" << value.dump();
  log << "\n";
}

void stage_report(const RunConfig& c, std::ostream& log) {
  const auto j = read_json(out_dir(c) / "diagnostics.json");
  if (!j.contains("summary")) throw Error(ErrorKind::MissingArtifact, "diagnostics.json has no summary");

  CsvTable summary({"key", "value"});
  for (const auto& [key, value] : j.at("summary").items()) summary.add({key, value.dump()});
  write_text(out_dir(c) / "summary.csv", summary.str());

  if (j.contains("asymptotics") && j.at("asymptotics").contains("rows")) {
    const auto rep = asymptotics_from_json(j.at("asymptotics"));
    CsvTable rows({"label", "k", "j", "lambda_re", "lambda_im", "mu_re", "mu_im", "e", "d", "b", "e_ratio", "d_ratio"});
    for (const auto& r : rep.rows) {
      rows.add({std::to_string(r.label), std::to_string(r.k), std::to_string(r.j), format_double(r.lambda.real()),
                format_double(r.lambda.imag()), format_double(r.mu.real()), format_double(r.mu.imag()),
                format_double(r.e), format_double(r.d), format_double(r.b), format_double(r.e_ratio),
                format_double(r.d_ratio)});
    }
    write_text(out_dir(c) / "asymptotics.csv", rows.str());
    if (c.outputs.svg) {
      write_text(out_dir(c) / "eigenvalue_asymptotics.svg", asymptotics_svg(rep, false));
      write_text(out_dir(c) / "eigenfunction_asymptotics.svg", asymptotics_svg(rep, true));
    }
  }
  log << "report: rendered from diagnostics.json\n";
}

void run_pipeline(const RunConfig& c, std::ostream& log) {
  stage_classify(c, log);
  stage_base(c, log);
  stage_predict(c, log);
  stage_solve(c, log);
  stage_oracle(c, log);
  stage_verify(c, log);
  stage_report(c, log);
}

int run_stage(const std::string& stage, const RunConfig& c, std::ostream& log, std::ostream& err) {
  static const std::map<std::string, void (*)(const RunConfig&, std::ostream&)> stages{
      {"classify", stage_classify}, {"base", stage_base},     {"predict", stage_predict}, {"solve", stage_solve},
      {"oracle", stage_oracle},     {"verify", stage_verify}, {"report", stage_report},   {"run", run_pipeline}};
  const auto it = stages.find(stage);
  if (it == stages.end()) {
    err << "error: ConfigParse: unknown subcommand '" << stage << "'\n";
    return 2;
  }
  try {
    fs::create_directories(out_dir(c));
    it->second(c, log);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << "\n";
    return 5;
  }
}

}  // namespace vecsturm::app
