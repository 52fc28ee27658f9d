#include "vecsturm/boundary.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace vecsturm {

namespace {

// omega_1 = i, omega_2 = -i.
cplx omega_power(int which, int order) {
  if (order == 0) return {1.0, 0.0};
  return which == 1 ? I : -I;
}

BoundaryRow fold(BoundaryRow row) {
  if (row.order != 0 && row.order != 1) {
    throw Error(ErrorKind::InvalidArgument, "boundary condition order must be 0 or 1");
  }
  if (row.order == 0) {
    row.alpha += row.alpha0;
    row.beta += row.beta0;
    row.alpha0 = 0.0;
    row.beta0 = 0.0;
  }
  if (row.alpha == 0.0 && row.beta == 0.0) {
    throw Error(ErrorKind::DegenerateCondition, "both alpha and beta vanish in a boundary row");
  }
  return row;
}

}  // namespace

BoundaryConditionPair::BoundaryConditionPair(const BoundaryRow& first, const BoundaryRow& second)
    : rows_{fold(first), fold(second)} {
  if (rows_[0].order < rows_[1].order) std::swap(rows_[0], rows_[1]);
}

BoundaryConditionPair BoundaryConditionPair::dirichlet() {
  return {BoundaryRow{0, 1.0, 0.0, 0.0, 0.0}, BoundaryRow{0, 0.0, 0.0, 1.0, 0.0}};
}

BoundaryConditionPair BoundaryConditionPair::neumann() {
  return {BoundaryRow{1, 1.0, 0.0, 0.0, 0.0}, BoundaryRow{1, 0.0, 0.0, 1.0, 0.0}};
}

BoundaryConditionPair BoundaryConditionPair::quasiperiodic(double t) {
  const cplx e = std::exp(I * t);
  return {BoundaryRow{1, -e, 0.0, 1.0, 0.0}, BoundaryRow{0, -e, 0.0, 1.0, 0.0}};
}

BoundaryConditionPair BoundaryConditionPair::scaled_row(int i, cplx factor) const {
  auto rows = rows_;
  auto& r = rows.at(static_cast<std::size_t>(i));
  r.alpha *= factor;
  r.alpha0 *= factor;
  r.beta *= factor;
  r.beta0 *= factor;
  return {rows[0], rows[1]};
}

Eigen::Matrix<cplx, 2, 4> BoundaryConditionPair::matrix() const {
  Eigen::Matrix<cplx, 2, 4> u = Eigen::Matrix<cplx, 2, 4>::Zero();
  for (int i = 0; i < 2; ++i) {
    const auto& r = rows_[static_cast<std::size_t>(i)];
    if (r.order == 1) {
      u(i, 0) = r.alpha0;
      u(i, 1) = r.alpha;
      u(i, 2) = r.beta0;
      u(i, 3) = r.beta;
    } else {
      u(i, 0) = r.alpha;
      u(i, 2) = r.beta;
    }
  }
  return u;
}

cplx GammaPair::seed(int branch, int k) const {
  const cplx root = 2.0 * pi * k + gamma.at(static_cast<std::size_t>(branch - 1));
  return root * root;
}

GeneralBoundaryMatrix::GeneralBoundaryMatrix(CMatrix rows, int m) : rows_(std::move(rows)), m_(m) {
  if (m < 1 || rows_.rows() != 2 * m || rows_.cols() != 4 * m) {
    throw Error(ErrorKind::InvalidArgument, "boundary matrix must be 2m x 4m");
  }
}

GeneralBoundaryMatrix GeneralBoundaryMatrix::from_scalar(const Eigen::Matrix<cplx, 2, 4>& scalar, int m) {
  CMatrix s = scalar;
  CMatrix big = Eigen::kroneckerProduct(s, CMatrix::Identity(m, m)).eval();
  return {big, m};
}

GeneralBoundaryMatrix GeneralBoundaryMatrix::from_pair(const BoundaryConditionPair& bc, int m) {
  return from_scalar(bc.matrix(), m);
}

ThetaTriple theta_coefficients(const BoundaryConditionPair& bc, const ThetaOptions& options) {
  const auto& r1 = bc.row(0);
  const auto& r2 = bc.row(1);
  const cplx p = omega_power(1, r1.order) * omega_power(2, r2.order);
  const cplx q = omega_power(2, r1.order) * omega_power(1, r2.order);

  ThetaTriple t;
  t.minus = p * r1.alpha * r2.beta - q * r1.beta * r2.alpha;
  t.zero = (p - q) * (r1.alpha * r2.alpha + r1.beta * r2.beta);
  t.plus = p * r1.beta * r2.alpha - q * r1.alpha * r2.beta;

  const double tol = options.case_tolerance;
  if (std::abs(t.minus) > 0.0) {
    const cplx n0 = t.zero / t.minus;
    const cplx n1 = t.plus / t.minus;
    if (std::abs(n0) <= tol && std::abs(n1 + 1.0) <= tol) {
      t.tag = CaseTag::Case6;
    } else if (std::abs(n1 - 1.0) <= tol) {
      t.tag = CaseTag::Case7;
      t.a = t.plus;
      t.b = t.zero;
    }
  }
  return t;
}

RegularityClass classify(const ThetaTriple& theta, double eps_reg, double eps_disc) {
  RegularityClass out;
  out.discriminant = theta.zero * theta.zero - 4.0 * theta.plus * theta.minus;
  const double scale = std::max({std::abs(theta.minus), std::abs(theta.zero), std::abs(theta.plus)});
  if (!(scale > 0.0) || std::min(std::abs(theta.minus), std::abs(theta.plus)) <= eps_reg * scale) {
    out.kind = Regularity::NotRegular;
    return out;
  }
  out.kind = std::abs(out.discriminant) > eps_disc * scale * scale ? Regularity::StronglyRegular
                                                                    : Regularity::RegularNotStronglyRegular;
  return out;
}

GammaPair characteristic_roots(const ThetaTriple& theta, double tolerance, bool allow_coincident) {
  const double scale = std::max({std::abs(theta.minus), std::abs(theta.zero), std::abs(theta.plus)});
  if (!(scale > 0.0) || std::abs(theta.plus) <= 1e-14 * scale || std::abs(theta.minus) <= 1e-14 * scale) {
    throw Error(ErrorKind::NotRegular, "leading coefficients of the characteristic quadratic vanish");
  }
  const cplx disc = theta.zero * theta.zero - 4.0 * theta.plus * theta.minus;
  cplx root = std::sqrt(disc);
  if ((std::conj(theta.zero) * root).real() < 0.0) root = -root;
  const cplx q = -0.5 * (theta.zero + root);
  GammaPair g;
  if (std::abs(q) == 0.0) {
    g.zeta = {std::sqrt(-theta.minus / theta.plus), -std::sqrt(-theta.minus / theta.plus)};
  } else {
    g.zeta = {q / theta.plus, theta.minus / q};
  }
  const double zeta_scale = std::max({1.0, std::abs(g.zeta[0]), std::abs(g.zeta[1])});
  if (!allow_coincident && std::abs(g.zeta[0] - g.zeta[1]) <= tolerance * zeta_scale) {
    throw Error(ErrorKind::CoincidentRoots, "characteristic roots coincide; conditions are not strongly regular");
  }
  for (std::size_t j = 0; j < 2; ++j) {
    double re = std::arg(g.zeta[j]);
    if (re < -pi + 1e-12) re += 2.0 * pi;
    g.gamma[j] = cplx{re, -std::log(std::abs(g.zeta[j]))};
  }
  auto before = [](cplx a, cplx b) {
    if (std::abs(a.real() - b.real()) > 1e-12) return a.real() < b.real();
    return a.imag() < b.imag();
  };
  if (before(g.gamma[1], g.gamma[0])) {
    std::swap(g.gamma[0], g.gamma[1]);
    std::swap(g.zeta[0], g.zeta[1]);
  }
  return g;
}

CMatrix regularity_matrix(const BoundaryConditionPair& bc, int m, cplx s) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  const auto& r1 = bc.row(0);
  const auto& r2 = bc.row(1);
  Eigen::Matrix2cd scalar;
  scalar << (r1.alpha + s * r1.beta) * omega_power(1, r1.order), (r1.alpha + r1.beta / s) * omega_power(2, r1.order),
      (r2.alpha + s * r2.beta) * omega_power(1, r2.order), (r2.alpha + r2.beta / s) * omega_power(2, r2.order);
  CMatrix sm = scalar;
  return Eigen::kroneckerProduct(sm, CMatrix::Identity(m, m)).eval();
}

VectorRegularityReport vector_regularity_check(const BoundaryConditionPair& bc, int m,
                                               std::span<const cplx> s_samples) {
  VectorRegularityReport rep;
  rep.m = m;
  for (const cplx s : s_samples) {
    if (s == 0.0) throw Error(ErrorKind::InvalidArgument, "regularity samples must be nonzero");
    const cplx dm = regularity_matrix(bc, m, s).partialPivLu().determinant();
    const cplx d1 = regularity_matrix(bc, 1, s).partialPivLu().determinant();
    const cplx power = std::pow(d1, m);
    rep.det_m.push_back(dm);
    rep.det_1_power.push_back(power);
    const double dev = dm == 0.0 ? std::abs(power) : std::abs(dm - power) / std::abs(dm);
    rep.max_deviation = std::max(rep.max_deviation, dev);
  }
  const ThetaTriple t = theta_coefficients(bc);
  rep.theta_plus_m = std::pow(t.plus, m);
  rep.theta_minus_m = std::pow(t.minus, m);
  return rep;
}

namespace {

Eigen::Matrix4cd lagrange_form() {
  Eigen::Matrix4cd j = Eigen::Matrix4cd::Zero();
  j(0, 1) = 1.0;
  j(1, 0) = -1.0;
  j(2, 3) = -1.0;
  j(3, 2) = 1.0;
  return j;
}

}  // namespace

cplx boundary_form(const Eigen::Vector4cd& y, const Eigen::Vector4cd& z) {
  return (y.transpose() * lagrange_form() * z.conjugate())(0, 0);
}

GeneralBoundaryMatrix adjoint_boundary(const BoundaryConditionPair& bc, int m) {
  const Eigen::Matrix<cplx, 2, 4> u = bc.matrix();
  Eigen::JacobiSVD<Eigen::Matrix<cplx, 2, 4>> svd(u, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(1) <= 1e-12 * sv(0)) {
    throw Error(ErrorKind::RankDeficiency, "boundary conditions do not have rank 2");
  }
  const Eigen::Matrix<cplx, 4, 2> kernel = svd.matrixV().rightCols(2);
  const Eigen::Matrix<cplx, 2, 4> v = kernel.adjoint() * lagrange_form();
  return GeneralBoundaryMatrix::from_scalar(v, m);
}

}  // namespace vecsturm
