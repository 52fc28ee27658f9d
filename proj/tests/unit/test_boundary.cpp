#include <doctest.h>

#include <cmath>
#include <random>

#include "test_helpers.hpp"
#include "vecsturm/boundary.hpp"

using namespace vecsturm;
using vecsturm::testing::random_annulus_point;
using vecsturm::testing::random_boundary;

namespace {

// Independent oracle: the 2x2 regularity determinant written out directly for
// a chosen pair of square roots of -1, then its Laurent coefficients recovered
// by least squares from samples on |s| in [0.5, 2].
Eigen::Vector3cd fitted_theta(const BoundaryConditionPair& bc, cplx w1, cplx w2, std::mt19937_64& rng) {
  const auto& r1 = bc.row(0);
  const auto& r2 = bc.row(1);
  Eigen::MatrixXcd a(10, 3);
  Eigen::VectorXcd d(10);
  for (int j = 0; j < 10; ++j) {
    const cplx s = random_annulus_point(rng, 0.5, 2.0);
    const cplx m11 = (r1.alpha + s * r1.beta) * std::pow(w1, r1.order);
    const cplx m12 = (r1.alpha + r1.beta / s) * std::pow(w2, r1.order);
    const cplx m21 = (r2.alpha + s * r2.beta) * std::pow(w1, r2.order);
    const cplx m22 = (r2.alpha + r2.beta / s) * std::pow(w2, r2.order);
    d(j) = m11 * m22 - m12 * m21;
    a(j, 0) = 1.0 / s;
    a(j, 1) = 1.0;
    a(j, 2) = s;
  }
  return a.colPivHouseholderQr().solve(d);
}

bool near(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("theta coefficients for Dirichlet and Neumann are (1, 0, -1), Case6") {
  for (const auto& bc : {BoundaryConditionPair::dirichlet(), BoundaryConditionPair::neumann()}) {
    const auto t = theta_coefficients(bc);
    CHECK(near(t.minus, 1.0, 1e-15));
    CHECK(near(t.zero, 0.0, 1e-15));
    CHECK(near(t.plus, -1.0, 1e-15));
    CHECK(t.tag == CaseTag::Case6);
  }
}

TEST_CASE("quasiperiodic theta triple matches the closed form and the Laurent fit") {
  std::mt19937_64 rng(11);
  for (double t : {pi / 3.0, pi / 2.0, 2.0}) {
    const auto bc = BoundaryConditionPair::quasiperiodic(t);
    const auto th = theta_coefficients(bc);
    const cplx e = std::exp(I * t);
    CHECK(near(th.minus, -2.0 * I * e, 1e-14));
    CHECK(near(th.plus, -2.0 * I * e, 1e-14));
    CHECK(near(th.zero, 2.0 * I * (1.0 + e * e), 1e-14));
    CHECK(th.tag == CaseTag::Case7);
    CHECK(near(th.a, -2.0 * I * e, 1e-14));
    CHECK(near(th.b, 2.0 * I * (1.0 + e * e), 1e-14));
    const auto fit = fitted_theta(bc, I, -I, rng);
    CHECK(near(fit(0), th.minus, 1e-12));
    CHECK(near(fit(1), th.zero, 1e-12));
    CHECK(near(fit(2), th.plus, 1e-12));
  }
}

TEST_CASE("theta coefficients agree with the Laurent fit for random conditions") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto bc = random_boundary(rng);
    const auto th = theta_coefficients(bc);
    const auto fit = fitted_theta(bc, I, -I, rng);
    const double scale = 1.0 + fit.cwiseAbs().maxCoeff();
    CHECK(near(fit(0), th.minus, 1e-11 * scale));
    CHECK(near(fit(1), th.zero, 1e-11 * scale));
    CHECK(near(fit(2), th.plus, 1e-11 * scale));
  }
}

TEST_CASE("degenerate rows are rejected") {
  try {
    BoundaryConditionPair(BoundaryRow{1, 0.0, 2.0, 0.0, 1.0}, BoundaryRow{0, 1.0, 0.0, 0.0, 0.0});
    FAIL("expected DegenerateCondition");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateCondition);
  }
  CHECK_THROWS_AS(BoundaryConditionPair(BoundaryRow{2, 1.0, 0.0, 0.0, 0.0}, BoundaryRow{0, 0.0, 0.0, 1.0, 0.0}),
                  Error);
}

TEST_CASE("rows are reordered so that k1 >= k2") {
  BoundaryConditionPair bc(BoundaryRow{0, -1.0, 0.0, 1.0, 0.0}, BoundaryRow{1, -1.0, 0.0, 1.0, 0.0});
  CHECK(bc.row(0).order == 1);
  CHECK(bc.row(1).order == 0);
}

TEST_CASE("classification") {
  SUBCASE("Dirichlet is strongly regular with discriminant 4") {
    const auto c = classify(theta_coefficients(BoundaryConditionPair::dirichlet()));
    CHECK(c.kind == Regularity::StronglyRegular);
    CHECK(near(c.discriminant, 4.0, 1e-14));
  }
  SUBCASE("quasiperiodic t = pi/2 has discriminant -16") {
    const auto c = classify(theta_coefficients(BoundaryConditionPair::quasiperiodic(pi / 2.0)));
    CHECK(c.kind == Regularity::StronglyRegular);
    CHECK(near(c.discriminant, -16.0, 1e-13));
  }
  SUBCASE("periodic is regular but not strongly regular") {
    const auto c = classify(theta_coefficients(BoundaryConditionPair::quasiperiodic(0.0)));
    CHECK(c.kind == Regularity::RegularNotStronglyRegular);
    CHECK(std::abs(c.discriminant) < 1e-14);
  }
  SUBCASE("zero leading coefficient is not regular") {
    ThetaTriple t;
    t.minus = 1.0;
    t.zero = 2.0;
    CHECK(classify(t).kind == Regularity::NotRegular);
  }
}

TEST_CASE("characteristic roots and exponents") {
  SUBCASE("Dirichlet gives gamma = (0, pi)") {
    const auto g = characteristic_roots(theta_coefficients(BoundaryConditionPair::dirichlet()));
    CHECK(g.gamma[0] == cplx(0.0, 0.0));
    CHECK(g.gamma[1] == cplx(pi, 0.0));
    CHECK(near(g.zeta[0], 1.0, 0.0));
    CHECK(near(g.zeta[1], -1.0, 0.0));
  }
  SUBCASE("quasiperiodic t = pi/3") {
    const auto g = characteristic_roots(theta_coefficients(BoundaryConditionPair::quasiperiodic(pi / 3.0)));
    CHECK(near(g.gamma[0], -pi / 3.0, 1e-14));
    CHECK(near(g.gamma[1], pi / 3.0, 1e-14));
    CHECK(near(g.zeta[0], std::exp(-I * pi / 3.0), 1e-14));
    CHECK(near(g.gamma[0] + g.gamma[1], 0.0, 1e-14));
  }
  SUBCASE("Case7 with a = 1, b = 0") {
    ThetaTriple t;
    t.minus = t.plus = 1.0;
    const auto g = characteristic_roots(t);
    CHECK(near(g.zeta[0], -I, 1e-15));
    CHECK(near(g.zeta[1], I, 1e-15));
    CHECK(near(g.gamma[0], -pi / 2.0, 1e-15));
    CHECK(near(g.gamma[1], pi / 2.0, 1e-15));
  }
  SUBCASE("coincident roots are reported") {
    const auto t = theta_coefficients(BoundaryConditionPair::quasiperiodic(0.0));
    try {
      characteristic_roots(t);
      FAIL("expected CoincidentRoots");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CoincidentRoots);
    }
    const auto g = characteristic_roots(t, 1e-10, true);
    CHECK(near(g.gamma[0], 0.0, 1e-7));
  }
  SUBCASE("seeds") {
    const auto g = characteristic_roots(theta_coefficients(BoundaryConditionPair::dirichlet()));
    CHECK(near(g.seed(1, 3), 36.0 * pi * pi, 1e-10));
    CHECK(near(g.seed(2, 0), pi * pi, 1e-12));
  }
}

TEST_CASE("properties over random strongly regular conditions") {
  std::mt19937_64 rng(2024);
  int tested = 0;
  while (tested < 40) {
    const auto bc = random_boundary(rng);
    const auto th = theta_coefficients(bc);
    const auto cls = classify(th);
    if (cls.kind != Regularity::StronglyRegular) continue;
    ++tested;
    const auto g = characteristic_roots(th);
    for (std::size_t j = 0; j < 2; ++j) {
      const cplx z = g.zeta[j];
      CHECK(std::abs(th.plus * z * z + th.zero * z + th.minus) <= 1e-11 * (1.0 + std::abs(z) * std::abs(z)));
      CHECK(g.gamma[j].real() > -pi);
      CHECK(g.gamma[j].real() <= pi);
      CHECK(near(std::exp(I * g.gamma[j]), z, 1e-12 * std::abs(z)));
    }

    // Swapping omega_1 <-> omega_2 exchanges theta_{+1} and theta_{-1} up to an overall sign.
    const auto swapped = fitted_theta(bc, -I, I, rng);
    const double scale = 1.0 + std::abs(th.minus) + std::abs(th.plus) + std::abs(th.zero);
    CHECK(near(swapped(0), -th.plus, 1e-10 * scale));
    CHECK(near(swapped(1), -th.zero, 1e-10 * scale));
    CHECK(near(swapped(2), -th.minus, 1e-10 * scale));
    ThetaTriple sw{swapped(0), swapped(1), swapped(2)};
    CHECK(classify(sw).kind == Regularity::StronglyRegular);
    const auto gs = characteristic_roots(sw);
    // reciprocal roots, exponents negated
    const bool direct = near(gs.zeta[0] * g.zeta[0], 1.0, 1e-8) && near(gs.zeta[1] * g.zeta[1], 1.0, 1e-8);
    const bool crossed = near(gs.zeta[0] * g.zeta[1], 1.0, 1e-8) && near(gs.zeta[1] * g.zeta[0], 1.0, 1e-8);
    CHECK((direct || crossed));

    // Row scaling leaves roots and class untouched.
    const cplx c = testing::random_complex(rng, 0.5, 2.0);
    const auto scaled = theta_coefficients(bc.scaled_row(1, c));
    CHECK(near(scaled.minus, c * th.minus, 1e-13 * scale * std::abs(c)));
    CHECK(near(scaled.plus, c * th.plus, 1e-13 * scale * std::abs(c)));
    CHECK(classify(scaled).kind == Regularity::StronglyRegular);
    const auto g2 = characteristic_roots(scaled);
    CHECK(near(g2.gamma[0], g.gamma[0], 1e-9));
    CHECK(near(g2.gamma[1], g.gamma[1], 1e-9));
  }
}

TEST_CASE("Case6 and Case7 keep a reciprocal-closed root set") {
  for (double t : {0.4, 1.0, 2.5}) {
    const auto g = characteristic_roots(theta_coefficients(BoundaryConditionPair::quasiperiodic(t)));
    CHECK(near(g.zeta[0] * g.zeta[1], 1.0, 1e-14));
    CHECK(near(g.gamma[0] + g.gamma[1], 0.0, 1e-14));
  }
}

TEST_CASE("vector regularity determinant factorizes") {
  SUBCASE("Dirichlet, m = 2, s = 2") {
    const cplx s[] = {2.0};
    const auto rep = vector_regularity_check(BoundaryConditionPair::dirichlet(), 2, s);
    CHECK(near(rep.det_m[0], 2.25, 1e-14));
    CHECK(rep.max_deviation < 1e-15);
  }
  SUBCASE("m = 1 is the identity case") {
    std::mt19937_64 rng(3);
    const auto bc = random_boundary(rng);
    std::vector<cplx> s{0.7, cplx(1.2, 0.4), cplx(-0.5, 1.1)};
    CHECK(vector_regularity_check(bc, 1, s).max_deviation == 0.0);
  }
  SUBCASE("quasiperiodic t = pi/2, m = 3") {
    std::mt19937_64 rng(8);
    std::vector<cplx> s;
    for (int j = 0; j < 10; ++j) s.push_back(random_annulus_point(rng, 0.5, 2.0));
    const auto bc = BoundaryConditionPair::quasiperiodic(pi / 2.0);
    const auto rep = vector_regularity_check(bc, 3, s);
    CHECK(rep.max_deviation <= 1e-10);
    const auto th = theta_coefficients(bc);
    CHECK(near(rep.theta_plus_m, std::pow(th.plus, 3), 1e-12));
    CHECK(near(rep.theta_minus_m, std::pow(th.minus, 3), 1e-12));
  }
}

TEST_CASE("adjoint boundary conditions") {
  SUBCASE("Dirichlet is self-adjoint") {
    const auto v = adjoint_boundary(BoundaryConditionPair::dirichlet()).rows();
    CHECK(v.col(1).norm() < 1e-14);
    CHECK(v.col(3).norm() < 1e-14);
    CHECK(v.fullPivLu().rank() == 2);
  }
  SUBCASE("Neumann is self-adjoint") {
    const auto v = adjoint_boundary(BoundaryConditionPair::neumann()).rows();
    CHECK(v.col(0).norm() < 1e-14);
    CHECK(v.col(2).norm() < 1e-14);
  }
  SUBCASE("boundary form vanishes on admissible pairs") {
    std::mt19937_64 rng(17);
    std::vector<BoundaryConditionPair> cases{BoundaryConditionPair::quasiperiodic(0.9),
                                             BoundaryConditionPair::quasiperiodic(2.0)};
    for (int j = 0; j < 5; ++j) cases.push_back(random_boundary(rng));
    for (const auto& bc : cases) {
      const Eigen::Matrix<cplx, 2, 4> u = bc.matrix();
      const CMatrix v = adjoint_boundary(bc).rows();
      const CMatrix ker_u = Eigen::FullPivLU<CMatrix>(CMatrix(u)).kernel();
      const CMatrix ker_v = Eigen::FullPivLU<CMatrix>(v).kernel();
      REQUIRE(ker_u.cols() == 2);
      REQUIRE(ker_v.cols() == 2);
      for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Vector4cd y = ker_u * Eigen::Vector2cd::Random();
        const Eigen::Vector4cd z = ker_v * Eigen::Vector2cd::Random();
        CHECK(std::abs(boundary_form(y, z)) <= 1e-12 * y.norm() * z.norm());
      }
    }
  }
  SUBCASE("vector case is the scalar conditions tensored with identity") {
    const auto v2 = adjoint_boundary(BoundaryConditionPair::quasiperiodic(1.0), 2);
    CHECK(v2.rows().rows() == 4);
    CHECK(v2.rows().cols() == 8);
    CHECK(v2.rows().fullPivLu().rank() == 4);
  }
}
