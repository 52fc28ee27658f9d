#include <doctest.h>

#include <cmath>
#include <vector>

#include "vecsturm/oracle.hpp"
#include "vecsturm/propagator.hpp"
#include "vecsturm/spectral.hpp"

using namespace vecsturm;

namespace {

MatrixPotential cosine(int m, double amplitude) {
  std::map<int, CMatrix> h;
  h[1] = CMatrix::Identity(m, m) * (0.5 * amplitude);
  h[-1] = CMatrix::Identity(m, m) * (0.5 * amplitude);
  return MatrixPotential::trig(m, h);
}

MatrixPotential scalar_trig(cplx c0, cplx c1, cplx cm1) {
  std::map<int, CMatrix> h;
  h[0] = CMatrix::Constant(1, 1, c0);
  h[1] = CMatrix::Constant(1, 1, c1);
  h[-1] = CMatrix::Constant(1, 1, cm1);
  return MatrixPotential::trig(1, h);
}

std::vector<cplx> values_of(const OracleSpectrum& s) {
  std::vector<cplx> v;
  for (const auto& mode : s.modes) v.push_back(mode.lambda);
  return v;
}

double stencil_eigenvalue(int k, int intervals) {
  const double h = 1.0 / intervals;
  return 4.0 / (h * h) * std::pow(std::sin(k * pi * h / 2.0), 2);
}

}  // namespace

TEST_CASE("discretized operator") {
  SUBCASE("Dirichlet free problem is the classical stencil") {
    const auto op = discretize(MatrixPotential::zero(1), BoundaryConditionPair::dirichlet(), 64);
    REQUIRE(op.size() == 63);
    CMatrix expected = CMatrix::Zero(63, 63);
    for (int i = 0; i < 63; ++i) {
      expected(i, i) = 2.0 * 64 * 64;
      if (i + 1 < 63) expected(i, i + 1) = expected(i + 1, i) = -1.0 * 64 * 64;
    }
    CHECK((op.matrix - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK(op.hermitian);
    CHECK(op.real);
    CHECK(op.endpoint_map.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("endpoint values satisfy the discrete boundary rows") {
    const BoundaryConditionPair bc({1, 1.0, cplx(0.3, 0.2), 0.5, 0.0}, {0, 1.0, 0.0, cplx(-0.4, 1.0), 0.0});
    const auto op = discretize(cosine(2, 1.0), bc, 80);
    const auto g = GeneralBoundaryMatrix::from_pair(bc, 2);
    CVector u = CVector::Random(op.size());
    const CMatrix y = op.nodal(u);
    const double h = 1.0 / 80;
    CVector stacked(8);
    stacked << y.col(0), (-3.0 * y.col(0) + 4.0 * y.col(1) - y.col(2)) / (2.0 * h), y.col(80),
        (3.0 * y.col(80) - 4.0 * y.col(79) + y.col(78)) / (2.0 * h);
    CHECK((g.rows() * stacked).norm() < 1e-10 * u.norm() / h);
    CHECK_FALSE(op.hermitian);
  }
  SUBCASE("singular elimination") {
    // y'(0) + (3P/2) y(0) = 0 has no one-sided solve for y(0)
    const BoundaryConditionPair bc({1, 1.0, 96.0, 0.0, 0.0}, {0, 0.0, 0.0, 1.0, 0.0});
    try {
      discretize(MatrixPotential::zero(1), bc, 64);
      FAIL("expected EliminationSingular");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EliminationSingular);
    }
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(discretize(MatrixPotential::zero(1), BoundaryConditionPair::dirichlet(), 32), Error);
    CHECK_THROWS_AS(oracle_spectrum(MatrixPotential::zero(1), BoundaryConditionPair::dirichlet(), 64, 64), Error);
  }
}

TEST_CASE("oracle spectrum") {
  SUBCASE("free Dirichlet") {
    const auto s = oracle_spectrum(MatrixPotential::zero(1), BoundaryConditionPair::dirichlet(), 1000, 10);
    CHECK(s.solver == "dsyevr");
    REQUIRE(s.modes.size() == 10);
    CHECK(std::abs(s.modes[0].lambda - pi * pi) / (pi * pi) < 1e-5);
    for (int k = 1; k <= 10; ++k) {
      const double exact = stencil_eigenvalue(k, 1000);
      CHECK(std::abs(s.modes[k - 1].lambda - exact) < 1e-10 * exact);
    }
  }
  SUBCASE("eigenvectors on the output grid") {
    const auto grid = uniform_grid(300);
    const auto s = oracle_spectrum(MatrixPotential::zero(1), BoundaryConditionPair::dirichlet(), 400, 3, &grid);
    for (int k = 1; k <= 3; ++k) {
      double err = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double exact = std::sqrt(2.0) * std::sin(k * pi * grid.x[i]);
        // sign fixed by the largest sample being real positive
        err = std::max(err, std::abs(std::abs(s.modes[k - 1].trace(0, i)) - std::abs(exact)));
      }
      CHECK(err < 1e-6);
      CHECK(trace_norm(grid, s.modes[k - 1].trace) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("constant shift") {
    for (const auto& bc : {BoundaryConditionPair::dirichlet(), BoundaryConditionPair::neumann()}) {
      const auto base = oracle_spectrum(MatrixPotential::zero(1), bc, 128, 12);
      const auto shifted = oracle_spectrum(MatrixPotential::constant(CMatrix::Constant(1, 1, 3.0)), bc, 128, 12);
      for (std::size_t i = 0; i < 12; ++i) {
        CHECK(std::abs(shifted.modes[i].lambda - base.modes[i].lambda - 3.0) < 1e-8 * std::abs(shifted.modes[i].lambda));
      }
    }
  }
  SUBCASE("Neumann takes the general solver") {
    const auto s = oracle_spectrum(MatrixPotential::zero(1), BoundaryConditionPair::neumann(), 256, 4);
    CHECK(s.solver == "zgeev");
    CHECK(std::abs(s.modes[0].lambda) < 1e-8);
    CHECK(std::abs(s.modes[1].lambda - pi * pi) < 1e-3 * pi * pi);
  }
  SUBCASE("block-diagonal potential gives the union") {
    const auto q1 = scalar_trig(0.0, 0.7, 0.7);
    const auto q2 = scalar_trig(2.0, cplx(0.0, 0.4), cplx(0.0, -0.4));  // real, 2 - 0.8 sin 2 pi x
    std::map<int, CMatrix> h;
    for (int n : {-1, 0, 1}) {
      CMatrix block = CMatrix::Zero(2, 2);
      block(0, 0) = std::get<MatrixPotential::Trig>(q1.representation()).harmonics.at(n)(0, 0);
      block(1, 1) = std::get<MatrixPotential::Trig>(q2.representation()).harmonics.at(n)(0, 0);
      h[n] = block;
    }
    const auto q = MatrixPotential::trig(2, h);
    const auto bc = BoundaryConditionPair::dirichlet();
    const auto joint = values_of(oracle_spectrum(q, bc, 200, 16));
    const auto a = values_of(oracle_spectrum(q1, bc, 200, 16));
    const auto b = values_of(oracle_spectrum(q2, bc, 200, 16));
    std::vector<cplx> both(a);
    both.insert(both.end(), b.begin(), b.end());
    const auto report = match_spectra(joint, both, 1e-10);
    CHECK(report.unmatched_a.empty());
    CHECK(report.pairs.size() == 16);
    CHECK(report.max_rel_gap() < 1e-11);
  }
}

TEST_CASE("Richardson consistency") {
  const auto q = scalar_trig(0.0, cplx(1.0, 0.5), cplx(1.0, 0.5));
  const auto bc = BoundaryConditionPair::dirichlet();
  const auto p1 = values_of(oracle_spectrum(q, bc, 100, 10));
  const auto p2 = values_of(oracle_spectrum(q, bc, 200, 10));
  const auto p4 = values_of(oracle_spectrum(q, bc, 400, 10));
  for (std::size_t i = 0; i < 10; ++i) {
    const double ratio = std::abs(p1[i] - p2[i]) / std::abs(p2[i] - p4[i]);
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
  }
  const auto r = richardson_spectrum(q, bc, 400, 10);
  REQUIRE(r.size() == 10);
  const auto g = GeneralBoundaryMatrix::from_pair(bc, 1);
  for (const auto& mode : r) {
    CHECK(mode.matched);
    CHECK(std::abs(mode.fine - p4[&mode - r.data()]) == 0.0);
    // independent check against the shooting determinant
    const auto root = locate_eigenvalue(q, g, mode.corrected, 0.5);
    REQUIRE_FALSE(root.status.has_value());
    CHECK(std::abs(mode.corrected - root.lambda) < 1e-5 * std::abs(root.lambda));
    CHECK(std::abs(mode.fine - root.lambda) > std::abs(mode.corrected - root.lambda));
  }
}

TEST_CASE("spectrum matching") {
  const std::vector<cplx> a{{1.0, 0.0}, {4.0, 1.0}, {9.0, -2.0}, {16.0, 0.5}};
  SUBCASE("identical") {
    const auto r = match_spectra(a, a, 0.0);
    REQUIRE(r.pairs.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(r.pairs[i].a == i);
      CHECK(r.pairs[i].b == i);
      CHECK(r.pairs[i].gap == 0.0);
    }
  }
  SUBCASE("offset and permuted") {
    std::vector<cplx> b;
    for (auto it = a.rbegin(); it != a.rend(); ++it) b.push_back(*it + 1e-6);
    const auto r = match_spectra(a, b, 1e-4);
    REQUIRE(r.pairs.size() == 4);
    for (const auto& p : r.pairs) CHECK(p.b == 3 - p.a);
    CHECK(r.unmatched_a.empty());
    CHECK(r.unmatched_b.empty());
  }
  SUBCASE("one spurious value") {
    std::vector<cplx> extra(a);
    extra.insert(extra.begin() + 2, cplx(6.5, 0.0));
    const auto r = match_spectra(extra, a, 1e-3);
    CHECK(r.pairs.size() == 4);
    REQUIRE(r.unmatched_a.size() == 1);
    CHECK(r.unmatched_a[0] == 2);
    CHECK(r.unmatched_b.empty());
  }
  SUBCASE("competing neighbours resolve in later rounds") {
    const std::vector<cplx> x{{0.0, 0.0}, {0.1, 0.0}};
    const std::vector<cplx> y{{0.06, 0.0}, {0.5, 0.0}};
    const auto r = match_spectra(x, y, 1.0);
    REQUIRE(r.pairs.size() == 2);
    CHECK(r.pairs[0].b == 1);
    CHECK(r.pairs[1].b == 0);
  }
}

TEST_CASE("shooting eigenfunctions agree with the oracle interpolant") {
  CMatrix s(2, 2);
  s << 0.0, 1.0, 1.0, 0.0;
  std::map<int, CMatrix> h{{0, s}, {1, 0.5 * s}, {-1, 0.5 * s}};
  const auto q = MatrixPotential::trig(2, h);
  const auto bc = BoundaryConditionPair::dirichlet();
  const auto g = GeneralBoundaryMatrix::from_pair(bc, 2);
  const auto grid = uniform_grid(512);
  const auto oracle = oracle_spectrum(q, bc, 400, 4, &grid);
  for (const auto& mode : oracle.modes) {
    const auto root = locate_eigenvalue(q, g, mode.lambda, 0.3);
    REQUIRE_FALSE(root.status.has_value());
    const auto psi = extract_eigenfunction(q, g, root.lambda, grid, 1e-10, &mode.trace);
    CHECK((psi.values - mode.trace).cwiseAbs().maxCoeff() <= 1e-6);
  }
}
