#pragma once

#include <map>
#include <variant>
#include <vector>

#include "vecsturm/boundary.hpp"
#include "vecsturm/common.hpp"

namespace vecsturm {

/// m x m complex matrix potential Q(x) on [0,1].
class MatrixPotential {
 public:
  /// Q(x) = sum_n Q_n exp(2 pi i n x).
  struct Trig {
    std::map<int, CMatrix> harmonics;
  };
  /// values[p] on [breaks[p], breaks[p+1]); breaks start at 0 and end at 1.
  struct Piecewise {
    std::vector<double> breaks;
    std::vector<CMatrix> values;
  };
  /// samples[p] at x = p / P, p = 0..P.
  struct Sampled {
    std::vector<CMatrix> samples;
    bool cubic = false;  // Catmull-Rom instead of linear interpolation
  };

  static MatrixPotential trig(int m, std::map<int, CMatrix> harmonics);
  static MatrixPotential piecewise(int m, std::vector<double> breaks, std::vector<CMatrix> values);
  static MatrixPotential sampled(int m, std::vector<CMatrix> samples, bool cubic = false);
  static MatrixPotential constant(const CMatrix& value);
  static MatrixPotential zero(int m);

  int dim() const { return m_; }
  const std::variant<Trig, Piecewise, Sampled>& representation() const { return rep_; }

  /// Throws OutOfDomain for x outside [0,1].
  CMatrix evaluate(double x) const;

  /// Entry (s, i) of Q(x) without building the whole matrix.
  cplx entry(int s, int i, double x) const;

  /// Points in (0,1) where Q may fail to be smooth. The propagator never steps across them.
  std::vector<double> breakpoints() const;

  /// Pointwise conjugate transpose, the potential of the adjoint operator.
  MatrixPotential adjoint() const;

  /// a*this + b*other; both must share the variant (and breakpoints / grid).
  MatrixPotential combine(cplx a, const MatrixPotential& other, cplx b) const;

  /// Largest entry magnitude over the representation data.
  double scale() const;

 private:
  MatrixPotential(int m, std::variant<Trig, Piecewise, Sampled> rep);
  int m_ = 0;
  std::variant<Trig, Piecewise, Sampled> rep_;
};

/// C = integral of Q over [0,1]; exact for trig and piecewise, trapezoid for sampled.
CMatrix mean_matrix(const MatrixPotential& q);

enum class ProbeSign { Plus, Minus };

/// integral_0^1 Q_{s,i}(x) exp(+-i(4 pi k + 2 gamma) x) dx, indices 0-based.
cplx probe_coefficient(const MatrixPotential& q, int s, int i, int k, cplx gamma, ProbeSign sign);

struct ProbeValue {
  int k = 0;
  int s = 0;
  int i = 0;
  int branch = 1;
  ProbeSign sign = ProbeSign::Plus;
  cplx value{0.0, 0.0};
};

/// alpha_k = max |probe| over entries, both exponents gamma_r and both signs.
struct AlphaSequence {
  int k_min = 0;
  std::vector<double> alpha;
  std::vector<ProbeValue> probes;

  int k_max() const { return k_min + static_cast<int>(alpha.size()) - 1; }
  /// Throws InvalidArgument outside the stored range.
  double at(int k) const;
};

AlphaSequence alpha_sequence(const MatrixPotential& q, const GammaPair& gamma, int k_min, int k_max);

}  // namespace vecsturm
