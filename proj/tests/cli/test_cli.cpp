#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "artifacts.hpp"
#include "pipeline.hpp"

using namespace vecsturm;
using namespace vecsturm::app;

namespace {

const fs::path kBinary = VECSTURM_BINARY;
const fs::path kConfigs = VECSTURM_CONFIGS;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "vecsturm_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Run {
  int status = -1;
  std::string err;
};

Run cli(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = kBinary.string() + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  std::ifstream in(err);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, {std::istreambuf_iterator<char>(in), {}}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

nlohmann::json minimal(int m = 1) {
  nlohmann::json zero = nlohmann::json::array();
  for (int r = 0; r < m; ++r) {
    zero.push_back(nlohmann::json::array());
    for (int c = 0; c < m; ++c) zero[static_cast<std::size_t>(r)].push_back({0, 0});
  }
  return {{"schema", kSchema},
          {"problem",
           {{"m", m},
            {"boundary", {{{"k", 0}, {"alpha", {1, 0}}}, {{"k", 0}, {"beta", {1, 0}}}}},
            {"potential", {{"type", "constant"}, {"m", m}, {"matrix", zero}}}}}};
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

ErrorKind parse_error(const nlohmann::json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults") {
    const auto c = parse_config(minimal());
    CHECK(c.solver.tol == 1e-10);
    CHECK(c.solver.n_start == 5);
    CHECK(c.solver.grid == 2048);
    CHECK(c.outputs.directory == "out");
    CHECK_FALSE(c.outputs.svg);
  }
  SUBCASE("rejections") {
    auto j = minimal();
    j.erase("schema");
    CHECK(parse_error(j) == ErrorKind::ConfigParse);
    j = minimal();
    j["schema"] = "vecsturm/0";
    CHECK(parse_error(j) == ErrorKind::ConfigParse);
    j = minimal();
    j["solver"] = {{"tolerance", 1e-8}};
    CHECK(parse_error(j) == ErrorKind::ConfigParse);
    j = minimal();
    j["solver"] = {{"tol", -1.0}};
    CHECK(parse_error(j) == ErrorKind::ConfigParse);
    j = minimal();
    j["solver"] = {{"k_range", {8, 3}}};
    CHECK(parse_error(j) == ErrorKind::ConfigParse);
    j = minimal();
    j["solver"] = {{"oracle_p", 301}};
    CHECK(parse_error(j) == ErrorKind::ConfigParse);
    j = minimal();
    j["problem"]["m"] = 2;
    CHECK(parse_error(j) == ErrorKind::ConfigParse);
    j = minimal();
    j["problem"]["boundary"][0]["alpha"] = {1, 0, 0};
    CHECK(parse_error(j) == ErrorKind::ConfigParse);
    j = minimal();
    j["problem"]["boundary"][1] = {{"k", 0}};
    CHECK(parse_error(j) == ErrorKind::ConfigParse);
    j = minimal();
    j["problem"]["potential"] = {{"type", "spline"}, {"m", 1}};
    CHECK(parse_error(j) == ErrorKind::ConfigParse);
  }
  SUBCASE("potential shapes") {
    auto j = minimal(2);
    j["problem"]["potential"] = {
        {"type", "trig"},
        {"m", 2},
        {"harmonics", {{{"n", 1}, {"matrix", {{{0, 0}, {1, 0}}, {{2, 0}, {0, 0}}}}}}}};
    const auto q = parse_config(j).problem.potential();
    CHECK(std::abs(q.evaluate(0.25)(0, 1) - std::exp(I * pi / 2.0)) < 1e-14);
    j["problem"]["potential"] = {{"type", "piecewise"},
                                 {"m", 2},
                                 {"breaks", {0.0, 0.5, 1.0}},
                                 {"values", {{{1, 0}, {0, 0}}, {{0, 0}, {1, 0}}}}};
    const auto pw = parse_config(j).problem.potential();
    CHECK(pw.evaluate(0.25)(0, 0) == cplx(1.0, 0.0));
    CHECK(pw.evaluate(0.75)(1, 0) == cplx(1.0, 0.0));
    j["problem"]["potential"]["values"].erase(1);
    CHECK(parse_error(j) == ErrorKind::ConfigParse);
  }
  SUBCASE("overrides") {
    auto c = parse_config(minimal());
    apply_overrides(c, {std::string("elsewhere"), 1e-8, 2, 9});
    CHECK(c.outputs.directory == "elsewhere");
    CHECK(c.solver.tol == 1e-8);
    CHECK(c.solver.k_min == 2);
    CHECK(c.solver.k_max == 9);
    CHECK_THROWS_AS(apply_overrides(c, {std::nullopt, std::nullopt, 5, 4}), Error);
  }
}

TEST_CASE("exit codes") {
  CHECK(exit_code(ErrorKind::ConfigParse) == 2);
  CHECK(exit_code(ErrorKind::MissingArtifact) == 2);
  CHECK(exit_code(ErrorKind::NotRegular) == 3);
  CHECK(exit_code(ErrorKind::NonSimpleC) == 4);
  CHECK(exit_code(ErrorKind::NewtonDivergence) == 5);
}

TEST_CASE("Dirichlet m = 1, Q = 0 reproduces the (n pi)^2 lattice") {
  const auto dir = scratch("dirichlet");
  const auto r = cli("run --config " + (kConfigs / "dirichlet_m1.json").string() + " --out " + (dir / "out").string() +
                         " --k-min 0 --k-max 10",
                     dir);
  REQUIRE(r.status == 0);
  const auto csv = read_csv(dir / "out" / "eigenvalues.csv");
  REQUIRE(csv.rows.size() == 21);
  std::vector<double> lambda;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    CHECK(csv.text(i, "status") == "ok");
    lambda.push_back(csv.number(i, "lambda_re"));
    CHECK(std::abs(csv.number(i, "lambda_im")) < 1e-10);
  }
  std::sort(lambda.begin(), lambda.end());
  for (std::size_t n = 0; n < lambda.size(); ++n) {
    const double target = std::pow((static_cast<double>(n) + 1.0) * pi, 2);
    CHECK(std::abs(lambda[n] - target) <= 1e-10 * target);
  }
  for (const char* name : {"base.csv", "predictions.csv", "oracle.csv", "diagnostics.json", "summary.csv",
                           "asymptotics.csv", "eigenvalue_asymptotics.svg"})
    CHECK_MESSAGE(fs::exists(dir / "out" / name), name);
  const auto diag = read_json(dir / "out" / "diagnostics.json");
  CHECK(diag.at("summary").at("simple").get<bool>());
}

TEST_CASE("periodic conditions stop at classify") {
  const auto dir = scratch("periodic");
  const auto r = cli("classify --config " + (kConfigs / "periodic.json").string() + " --out " + dir.string(), dir);
  CHECK(r.status == 3);
  CHECK(r.err.find("RegularNotStronglyRegular") != std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  const auto j = read_json(dir / "classify.json");
  CHECK(j.at("class") == "RegularNotStronglyRegular");
}

TEST_CASE("repeated eigenvalues of C give NonSimpleC") {
  const auto dir = scratch("nonsimple");
  auto j = minimal(2);
  j["problem"]["potential"] = {{"type", "constant"}, {"m", 2}, {"matrix", {{{1, 0}, {0, 0}}, {{0, 0}, {1, 0}}}}};
  j["outputs"] = {{"directory", (dir / "out").string()}};
  const auto config = write_config(dir, j);
  REQUIRE(cli("base --config " + config.string() + " --k-min 5 --k-max 6", dir).status == 0);
  const auto r = cli("predict --config " + config.string(), dir);
  CHECK(r.status == 4);
  CHECK(r.err.rfind("error: NonSimpleC", 0) == 0);
}

TEST_CASE("configuration and artifact errors exit with 2") {
  const auto dir = scratch("errors");
  CHECK(cli("classify --config " + (dir / "absent.json").string(), dir).status == 2);
  std::ofstream(dir / "broken.json") << "{ \"schema\": ";
  CHECK(cli("classify --config " + (dir / "broken.json").string(), dir).status == 2);
  const auto config = write_config(dir, minimal());
  CHECK(cli("solve --config " + config.string() + " --out " + (dir / "empty").string(), dir).status == 2);
  CHECK(cli("solve --config " + config.string() + " --k-min 3", dir).status == 2);
  CHECK(cli("frobnicate --config " + config.string(), dir).status == 2);
}

TEST_CASE("stages run independently and report is idempotent") {
  const auto dir = scratch("stages");
  auto j = minimal(2);
  j["problem"]["potential"] = {
      {"type", "trig"},
      {"m", 2},
      {"harmonics",
       {{{"n", 0}, {"matrix", {{{0, 0}, {1, 0}}, {{1, 0}, {0, 0}}}}},
        {{"n", 1}, {"matrix", {{{0, 0}, {0.5, 0}}, {{0.5, 0}, {0, 0}}}}},
        {{"n", -1}, {"matrix", {{{0, 0}, {0.5, 0}}, {{0.5, 0}, {0, 0}}}}}}}};
  j["solver"] = {{"k_range", {2, 11}}, {"n_start", 2}, {"grid", 512}, {"oracle_p", 200}, {"oracle_count", 4}};
  j["outputs"] = {{"directory", (dir / "out").string()}, {"svg", true}};
  const auto config = write_config(dir, j);
  for (const char* stage : {"base", "predict", "solve", "verify", "report"})
    REQUIRE_MESSAGE(cli(std::string(stage) + " --config " + config.string(), dir).status == 0, stage);
  CHECK_FALSE(fs::exists(dir / "out" / "classify.json"));
  CHECK(fs::exists(dir / "out" / "traces" / "trace_-2_0.csv"));

  const auto before = slurp(dir / "out" / "asymptotics.csv");
  const auto svg = slurp(dir / "out" / "eigenvalue_asymptotics.svg");
  REQUIRE(cli("report --config " + config.string(), dir).status == 0);
  CHECK(slurp(dir / "out" / "asymptotics.csv") == before);
  CHECK(slurp(dir / "out" / "eigenvalue_asymptotics.svg") == svg);

  const auto diag = read_json(dir / "out" / "diagnostics.json");
  CHECK(diag.at("summary").at("accepted") == 40);
  CHECK(diag.at("summary").at("identity").get<bool>());
  CHECK(diag.at("negative_control").at("rejected").get<bool>());
}
