#include <iostream>

#include <CLI11.hpp>

#include "pipeline.hpp"

int main(int argc, char** argv) {
  using namespace vecsturm::app;
  CLI::App app{"Eigenvalues of vector Sturm-Liouville operators with strongly regular boundary conditions"};
  app.require_subcommand(1, 1);

  std::string config_path;
  Overrides overrides;
  const std::vector<std::pair<std::string, std::string>> stages{
      {"classify", "theta coefficients, regularity class and gamma"},
      {"base", "unperturbed scalar eigenpairs"},
      {"predict", "spectrum of the mean matrix and lattice predictions"},
      {"solve", "matrix eigenvalues and eigenfunctions"},
      {"oracle", "dense finite difference reference spectrum"},
      {"verify", "asymptotics, identity, biorthogonality and Riesz diagnostics"},
      {"report", "CSV and SVG rendering of diagnostics.json"},
      {"run", "all stages in order"}};
  for (const auto& [name, help] : stages) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", overrides.out, "output directory");
    sub->add_option("--tol", overrides.tol, "propagator tolerance");
    auto* lo = sub->add_option("--k-min", overrides.k_min, "smallest |label|");
    auto* hi = sub->add_option("--k-max", overrides.k_max, "largest |label|");
    lo->needs(hi);
    hi->needs(lo);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: ConfigParse: " << e.what() << "\n";
    return 2;
  }

  RunConfig config;
  try {
    config = load_config(config_path);
    apply_overrides(config, overrides);
  } catch (const vecsturm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  }
  return run_stage(app.get_subcommands().front()->get_name(), config, std::cout, std::cerr);
}
