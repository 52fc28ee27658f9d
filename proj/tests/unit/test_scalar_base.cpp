#include <doctest.h>

#include <cmath>
#include <random>

#include "test_helpers.hpp"
#include "vecsturm/scalar_base.hpp"

using namespace vecsturm;

namespace {

GammaPair roots_of(const BoundaryConditionPair& bc) { return characteristic_roots(theta_coefficients(bc)); }

// det [U e^{iwx}, U e^{-iwx}] written out from the boundary rows.
cplx exponential_determinant(const BoundaryConditionPair& bc, cplx lambda, double* term_size = nullptr) {
  const cplx w = std::sqrt(lambda);
  auto data = [](cplx kappa) {
    const cplx e = std::exp(I * kappa);
    return Eigen::Vector4cd(1.0, I * kappa, e, I * kappa * e);
  };
  const Eigen::Matrix<cplx, 2, 4> u = bc.matrix();
  const Eigen::Vector2cd p = u * data(w), q = u * data(-w);
  if (term_size) *term_size = std::abs(p(0) * q(1)) + std::abs(p(1) * q(0));
  return p(0) * q(1) - p(1) * q(0);
}

Eigen::Vector4cd boundary_values(const ExpSum& f) { return {f(0.0), f.derivative(0.0), f(1.0), f.derivative(1.0)}; }

}  // namespace

TEST_CASE("base determinant") {
  const auto dir = BoundaryConditionPair::dirichlet();
  const auto neu = BoundaryConditionPair::neumann();
  CHECK(std::abs(base_determinant(dir, pi * pi)) < 1e-12);
  CHECK(std::abs(base_determinant(dir, 2.0)) > 0.1);
  CHECK(std::abs(base_determinant(neu, 0.0)) < 1e-15);
  CHECK(std::abs(base_determinant(dir, 0.0) - 1.0) < 1e-15);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto bc = testing::random_boundary(rng);
    const cplx lambda(std::uniform_real_distribution<double>(-50.0, 2000.0)(rng),
                      std::uniform_real_distribution<double>(-40.0, 40.0)(rng));
    const cplx w = principal_sqrt(lambda);
    double terms = 0.0;
    const double damp = std::exp(-std::abs(w.imag())) / std::abs(w);
    const cplx expected = exponential_determinant(bc, lambda, &terms) / (-2.0 * I * w) * std::exp(-std::abs(w.imag()));
    CHECK(std::abs(base_determinant(bc, lambda) - expected) <= 1e-13 * terms * damp);
  }
  // Dirichlet determinant is sin(w)/w on both sides of the cut
  for (cplx lambda : {cplx(-30.0, 1e-9), cplx(-30.0, -1e-9), cplx(50.0, 20.0)}) {
    const cplx w = std::sqrt(lambda);
    CHECK(std::abs(base_determinant(dir, lambda) - std::sin(w) / w * std::exp(-std::abs(w.imag()))) < 1e-12);
  }
}

TEST_CASE("Dirichlet base spectrum under the integer enumeration") {
  const auto bc = BoundaryConditionPair::dirichlet();
  const auto spec = unperturbed_spectrum(bc, roots_of(bc), -20, 20);
  REQUIRE(spec.pairs.size() == 41);
  CHECK(spec.failures.empty());
  CHECK_FALSE(spec.label_zero_vacant);
  CHECK(spec.collisions.empty());
  for (const auto& p : spec.pairs) {
    const double n = p.label >= 1 ? 2.0 * p.label : 2.0 * (-p.label) + 1.0;
    CHECK(std::abs(p.rho - n * n * pi * pi) <= 1e-10 * n * n * pi * pi);
    CHECK(std::abs(inner(p.phi, p.phi_adj) - 1.0) <= 1e-10);
    CHECK(std::abs(inner(p.phi, p.phi) - 1.0) <= 1e-12);
    CHECK(p.within_cap);
  }
  const auto* one = spec.find(1);
  REQUIRE(one != nullptr);
  CHECK(one->branch == 1);
  const cplx phase = one->phi(0.1) / (std::sqrt(2.0) * std::sin(2.0 * pi * 0.1));
  CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
  for (double x : {0.05, 0.3, 0.6, 0.77}) CHECK(std::abs(one->phi(x) - phase * std::sqrt(2.0) * std::sin(2.0 * pi * x)) < 1e-12);
  CHECK(one->amplitude_plus().imag() == 0.0);
  CHECK(one->amplitude_plus().real() > 0.0);

  const auto* zero = spec.find(0);
  REQUIRE(zero != nullptr);
  CHECK(zero->branch == 2);
  CHECK(zero->k == 0);
  CHECK(std::abs(zero->rho - pi * pi) < 1e-10);
}

TEST_CASE("Neumann base spectrum") {
  const auto bc = BoundaryConditionPair::neumann();
  const auto spec = unperturbed_spectrum(bc, roots_of(bc), -20, 20);
  REQUIRE(spec.pairs.size() == 41);
  for (const auto& p : spec.pairs) {
    const double n = p.label >= 1 ? 2.0 * p.label : 2.0 * (-p.label) + 1.0;
    CHECK(std::abs(p.rho - n * n * pi * pi) <= 1e-10 * n * n * pi * pi);
    CHECK(std::abs(inner(p.phi, p.phi_adj) - 1.0) <= 1e-10);
  }
  const auto* one = spec.find(1);
  for (double x : {0.0, 0.2, 0.45, 1.0})
    CHECK(std::abs(one->phi(x) - std::sqrt(2.0) * std::cos(2.0 * pi * x)) < 1e-12);
}

TEST_CASE("quasiperiodic base spectrum is a single exponential per label") {
  const double t = pi / 2.0;
  const auto bc = BoundaryConditionPair::quasiperiodic(t);
  const auto g = roots_of(bc);
  const auto spec = unperturbed_spectrum(bc, g, -10, 10);
  REQUIRE(spec.pairs.size() == 21);
  for (const auto& p : spec.pairs) {
    const cplx expected = std::pow(2.0 * pi * p.k + g.gamma[static_cast<std::size_t>(p.branch - 1)], 2);
    CHECK(std::abs(p.rho - expected) <= 1e-10 * std::abs(expected));
    // e^{i w x} with e^{i w} = e^{it}
    CHECK(std::abs(std::abs(p.phi(0.3)) - 1.0) < 1e-10);
    CHECK(std::abs(p.phi(1.0) - std::exp(I * t) * p.phi(0.0)) < 1e-10);
    CHECK(std::abs(inner(p.phi, p.phi_adj) - 1.0) < 1e-12);
  }
}

TEST_CASE("Robin condition: roots satisfy the transcendental equation") {
  const double h = 2.5;
  // y'(0) + h y(0) = 0, y(1) = 0
  BoundaryConditionPair bc(BoundaryRow{1, 1.0, h, 0.0, 0.0}, BoundaryRow{0, 0.0, 0.0, 1.0, 0.0});
  const auto g = roots_of(bc);
  const auto spec = unperturbed_spectrum(bc, g, -15, 15);
  CHECK(spec.failures.empty());
  CHECK(spec.collisions.empty());
  for (const auto& p : spec.pairs) {
    const cplx w = p.omega;
    CHECK(std::abs(-w * std::cos(w) + h * std::sin(w)) <= 1e-9 * std::abs(w));
  }
  CHECK(spec.max_seed_offset < 20.0);
}

TEST_CASE("random strongly regular conditions: boundary residuals and biorthogonality") {
  std::mt19937_64 rng(77);
  int tested = 0;
  while (tested < 10) {
    const auto bc = testing::random_boundary(rng);
    const auto th = theta_coefficients(bc);
    if (classify(th).kind != Regularity::StronglyRegular) continue;
    const auto g = characteristic_roots(th);
    if (std::min(std::abs(std::exp(I * (g.gamma[0] - g.gamma[1])) - 1.0), 2.0) < 0.3) continue;
    ++tested;
    const auto spec = unperturbed_spectrum(bc, g, -6, 6);
    const Eigen::Matrix<cplx, 2, 4> u = bc.matrix();
    const CMatrix v = adjoint_boundary(bc).rows();
    for (const auto& p : spec.pairs) {
      CHECK((u * boundary_values(p.phi)).norm() <= 1e-9 * (1.0 + std::abs(p.omega)));
      CHECK((v * boundary_values(p.phi_adj)).norm() <= 1e-9 * (1.0 + std::abs(p.omega)) * p.adjoint_sup_norm);
      for (const auto& q : spec.pairs) {
        const cplx pq = inner(p.phi, q.phi_adj);
        if (p.label == q.label) CHECK(std::abs(pq - 1.0) < 1e-10);
        else CHECK(std::abs(pq) < 1e-8 * (1.0 + p.adjoint_sup_norm + q.adjoint_sup_norm));
      }
    }
  }
}

TEST_CASE("product expansion") {
  SUBCASE("Dirichlet") {
    const auto bc = BoundaryConditionPair::dirichlet();
    const auto g = roots_of(bc);
    for (int n : {-7, -1, 0, 1, 4, 12}) {
      const auto pe = product_expansion(base_eigenpair(bc, g, n), g);
      CHECK(std::abs(pe.constant - 1.0) < 1e-10);
      CHECK(std::abs(pe.a + 0.5) < 1e-10);
      CHECK(std::abs(pe.b + 0.5) < 1e-10);
      CHECK(pe.residual < 1e-10);
    }
  }
  SUBCASE("Neumann") {
    const auto bc = BoundaryConditionPair::neumann();
    const auto g = roots_of(bc);
    for (int n : {-3, 2, 9}) {
      const auto pe = product_expansion(base_eigenpair(bc, g, n), g);
      CHECK(std::abs(pe.constant - 1.0) < 1e-10);
      CHECK(std::abs(pe.a - 0.5) < 1e-10);
      CHECK(std::abs(pe.b - 0.5) < 1e-10);
    }
  }
  SUBCASE("quasiperiodic") {
    const auto bc = BoundaryConditionPair::quasiperiodic(pi / 2.0);
    const auto g = roots_of(bc);
    for (int n = 5; n <= 40; n += 5) {
      const auto pe = product_expansion(base_eigenpair(bc, g, n), g);
      CHECK(std::abs(pe.constant - 1.0) < 1e-10);
      CHECK(pe.residual < 1e-10);
    }
  }
}

TEST_CASE("product expansion agrees with a sampled least-squares fit") {
  BoundaryRow r1, r2;
  r1.order = 1;
  r1.alpha = 1.0;
  r1.beta = cplx(0.3, 0.2);
  r1.alpha0 = 0.5;
  r2.alpha = 1.0;
  r2.beta = 2.0;
  const BoundaryConditionPair bc(r1, r2);
  const auto g = roots_of(bc);
  const auto grid = uniform_grid(4096);
  for (int n : {-3, 1, 6}) {
    const auto p = base_eigenpair(bc, g, n);
    const auto pe = product_expansion(p, g);
    const cplx nu = 4.0 * pi * p.k + 2.0 * g.gamma[static_cast<std::size_t>(p.branch - 1)];
    Eigen::MatrixXcd a(static_cast<Eigen::Index>(grid.size()), 3);
    Eigen::VectorXcd f(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double x = grid.x[static_cast<std::size_t>(i)];
      const double sw = std::sqrt(grid.w[static_cast<std::size_t>(i)]);
      a(i, 0) = sw;
      a(i, 1) = sw * std::exp(I * nu * x);
      a(i, 2) = sw * std::exp(-I * nu * x);
      f(i) = sw * std::conj(p.phi_adj(x)) * p.phi(x);
    }
    const Eigen::Vector3cd c = a.colPivHouseholderQr().solve(f);
    CHECK(std::abs(pe.constant - c(0)) < 1e-8);
    CHECK(std::abs(pe.a - c(1)) < 1e-8);
    CHECK(std::abs(pe.b - c(2)) < 1e-8);
    CHECK(std::abs(pe.residual - (f - a * c).norm()) < 1e-7);
  }
}

TEST_CASE("chain detection") {
  for (const auto& rec : detect_chains(BoundaryConditionPair::dirichlet(), 6)) CHECK(rec.zero_count == 1);
  for (const auto& rec : detect_chains(BoundaryConditionPair::quasiperiodic(pi / 2.0), 6)) {
    CHECK(rec.zero_count == 1);
    CHECK(rec.chain_length == 0);
  }
  for (const auto& rec : detect_chains(BoundaryConditionPair::quasiperiodic(0.0), 4)) {
    CHECK(rec.zero_count == (rec.label == 0 ? 1 : 2));
    CHECK(rec.has_associated == (rec.label != 0));
  }
}

TEST_CASE("row scaling leaves the base spectrum unchanged") {
  const auto bc = BoundaryConditionPair::quasiperiodic(1.1);
  const auto g = roots_of(bc);
  const auto scaled = bc.scaled_row(0, cplx(0.3, -2.0));
  for (int n : {-4, 0, 3}) {
    CHECK(std::abs(base_eigenpair(bc, g, n).rho - base_eigenpair(scaled, g, n).rho) < 1e-9);
  }
}
