#pragma once

#include <array>
#include <span>
#include <vector>

#include "vecsturm/common.hpp"

namespace vecsturm {

/// One two-point condition
///   alpha*y^(k)(0) + alpha0*y(0) + beta*y^(k)(1) + beta0*y(1) = 0.
struct BoundaryRow {
  int order = 0;
  cplx alpha{0.0, 0.0};
  cplx alpha0{0.0, 0.0};
  cplx beta{0.0, 0.0};
  cplx beta0{0.0, 0.0};
};

/// A pair of two-point conditions shared by the scalar and the vector problem.
///
/// Rows are stored with orders k1 >= k2. For an order-0 row the alpha0/beta0
/// coefficients multiply the same boundary values as alpha/beta, so they are
/// folded into alpha/beta on construction; the leading coefficients then are
/// the ones entering the regularity determinant.
class BoundaryConditionPair {
 public:
  /// Throws DegenerateCondition if a row has alpha = beta = 0, InvalidArgument
  /// for orders outside {0, 1}.
  BoundaryConditionPair(const BoundaryRow& first, const BoundaryRow& second);

  static BoundaryConditionPair dirichlet();
  static BoundaryConditionPair neumann();
  /// y'(1) = e^{it} y'(0), y(1) = e^{it} y(0).
  static BoundaryConditionPair quasiperiodic(double t);

  const BoundaryRow& row(int i) const { return rows_.at(static_cast<std::size_t>(i)); }
  BoundaryConditionPair scaled_row(int i, cplx factor) const;

  /// 2x4 matrix acting on (y(0), y'(0), y(1), y'(1)).
  Eigen::Matrix<cplx, 2, 4> matrix() const;

 private:
  std::array<BoundaryRow, 2> rows_;
};

enum class CaseTag { None, Case6, Case7 };

/// Laurent coefficients of the regularity determinant in s.
struct ThetaTriple {
  cplx minus{0.0, 0.0};  // coefficient of 1/s
  cplx zero{0.0, 0.0};
  cplx plus{0.0, 0.0};   // coefficient of s
  CaseTag tag = CaseTag::None;
  cplx a{0.0, 0.0};      // Case7 only: theta_{+1} = theta_{-1} = a
  cplx b{0.0, 0.0};      // Case7 only: theta_0 = b
};

enum class Regularity { NotRegular, RegularNotStronglyRegular, StronglyRegular };

struct RegularityClass {
  Regularity kind = Regularity::NotRegular;
  cplx discriminant{0.0, 0.0};
};

/// Roots zeta of theta_{+1} z^2 + theta_0 z + theta_{-1} = 0 and the exponents
/// gamma = -i Log zeta with Re gamma in (-pi, pi], ordered by (Re, Im) ascending.
struct GammaPair {
  std::array<cplx, 2> zeta{};
  std::array<cplx, 2> gamma{};

  /// (2 k pi + gamma_r)^2 for branch r in {1, 2}.
  cplx seed(int branch, int k) const;
};

/// Boundary conditions for m-vector functions as a 2m x 4m matrix acting on the
/// stacked vector (Y(0), Y'(0), Y(1), Y'(1)); row i*m + a is condition i on
/// component a.
class GeneralBoundaryMatrix {
 public:
  GeneralBoundaryMatrix() = default;
  GeneralBoundaryMatrix(CMatrix rows, int m);

  /// scalar (2x4) matrix tensored with the m x m identity.
  static GeneralBoundaryMatrix from_scalar(const Eigen::Matrix<cplx, 2, 4>& scalar, int m);
  static GeneralBoundaryMatrix from_pair(const BoundaryConditionPair& bc, int m);

  int dimension() const { return m_; }
  const CMatrix& rows() const { return rows_; }
  /// Column block for one of the four boundary values: 0 = Y(0), 1 = Y'(0), 2 = Y(1), 3 = Y'(1).
  CMatrix block(int which) const { return rows_.middleCols(which * m_, m_); }

 private:
  CMatrix rows_;
  int m_ = 0;
};

struct ThetaOptions {
  double case_tolerance = 1e-10;
};

ThetaTriple theta_coefficients(const BoundaryConditionPair& bc, const ThetaOptions& options = {});

RegularityClass classify(const ThetaTriple& theta, double eps_reg = 1e-10, double eps_disc = 1e-10);

/// Throws NotRegular if the leading coefficients vanish and CoincidentRoots when
/// |zeta1 - zeta2| <= tolerance. With `allow_coincident` the double root is
/// returned instead (diagnostic use on non-strongly-regular conditions).
GammaPair characteristic_roots(const ThetaTriple& theta, double tolerance = 1e-10, bool allow_coincident = false);

/// The 2m x 2m matrix M(m) of the vector regularity determinant at s.
CMatrix regularity_matrix(const BoundaryConditionPair& bc, int m, cplx s);

struct VectorRegularityReport {
  int m = 1;
  double max_deviation = 0.0;
  std::vector<cplx> det_m;
  std::vector<cplx> det_1_power;
  cplx theta_plus_m{0.0, 0.0};   // theta_{+1}^m
  cplx theta_minus_m{0.0, 0.0};  // theta_{-1}^m
};

/// Compares det M(m) with (det M(1))^m at each sample s.
VectorRegularityReport vector_regularity_check(const BoundaryConditionPair& bc, int m, std::span<const cplx> s_samples);

/// Conditions V z = 0 under which the Lagrange boundary form
/// [y, z] = (y' conj(z) - y conj(z'))|_0^1 vanishes for every admissible y.
/// Throws RankDeficiency if the scalar conditions do not have rank 2.
GeneralBoundaryMatrix adjoint_boundary(const BoundaryConditionPair& bc, int m = 1);

/// [y, z] for scalar boundary data (y(0), y'(0), y(1), y'(1)).
cplx boundary_form(const Eigen::Vector4cd& y, const Eigen::Vector4cd& z);

}  // namespace vecsturm
