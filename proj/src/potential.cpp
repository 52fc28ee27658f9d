#include "vecsturm/potential.hpp"

#include <algorithm>
#include <cmath>

#include "vecsturm/numerics.hpp"

namespace vecsturm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_square(const CMatrix& a, int m) {
  if (a.rows() != m || a.cols() != m) throw Error(ErrorKind::InvalidArgument, "potential entries must be m x m");
  if (!a.allFinite()) throw Error(ErrorKind::InvalidArgument, "potential entries must be finite");
}

// Catmull-Rom weights for the four neighbours of t in [0,1).
std::array<double, 4> catmull_rom(double t) {
  const double t2 = t * t, t3 = t2 * t;
  return {-0.5 * t3 + t2 - 0.5 * t, 1.5 * t3 - 2.5 * t2 + 1.0, -1.5 * t3 + 2.0 * t2 + 0.5 * t, 0.5 * t3 - 0.5 * t2};
}

// Integral of exp(i c x) over [0,1]; exact 0/1 when c is a multiple of 2 pi (harmonic extraction).
cplx harmonic_integral(cplx c) {
  const double turns = c.real() / (2.0 * pi);
  const double nearest = std::round(turns);
  if (std::abs(c.imag()) <= 1e-12 && std::abs(turns - nearest) <= 1e-12 * std::max(1.0, std::abs(turns))) {
    return nearest == 0.0 ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
  }
  return exp_integral(c);
}

}  // namespace

MatrixPotential::MatrixPotential(int m, std::variant<Trig, Piecewise, Sampled> rep) : m_(m), rep_(std::move(rep)) {}

MatrixPotential MatrixPotential::trig(int m, std::map<int, CMatrix> harmonics) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  for (const auto& [n, a] : harmonics) check_square(a, m);
  return {m, Trig{std::move(harmonics)}};
}

MatrixPotential MatrixPotential::piecewise(int m, std::vector<double> breaks, std::vector<CMatrix> values) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  if (breaks.size() != values.size() + 1 || values.empty()) {
    throw Error(ErrorKind::InvalidArgument, "piecewise potential needs one more break than values");
  }
  if (breaks.front() != 0.0 || breaks.back() != 1.0 || !std::is_sorted(breaks.begin(), breaks.end()) ||
      std::adjacent_find(breaks.begin(), breaks.end()) != breaks.end()) {
    throw Error(ErrorKind::InvalidArgument, "breaks must increase strictly from 0 to 1");
  }
  for (const auto& a : values) check_square(a, m);
  return {m, Piecewise{std::move(breaks), std::move(values)}};
}

MatrixPotential MatrixPotential::sampled(int m, std::vector<CMatrix> samples, bool cubic) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  if (samples.size() < 2) throw Error(ErrorKind::InvalidArgument, "sampled potential needs at least 2 samples");
  for (const auto& a : samples) check_square(a, m);
  return {m, Sampled{std::move(samples), cubic}};
}

MatrixPotential MatrixPotential::constant(const CMatrix& value) {
  return trig(static_cast<int>(value.rows()), {{0, value}});
}

MatrixPotential MatrixPotential::zero(int m) { return trig(m, {}); }

CMatrix MatrixPotential::evaluate(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::OutOfDomain, "x = " + std::to_string(x) + " outside [0,1]");
  return std::visit(
      overloaded{
          [&](const Trig& t) {
            CMatrix out = CMatrix::Zero(m_, m_);
            for (const auto& [n, a] : t.harmonics) out += a * std::exp(I * (2.0 * pi * n * x));
            return out;
          },
          [&](const Piecewise& p) {
            auto it = std::upper_bound(p.breaks.begin(), p.breaks.end(), x);
            auto piece = static_cast<std::size_t>(std::distance(p.breaks.begin(), it)) - 1;
            piece = std::min(piece, p.values.size() - 1);
            return CMatrix(p.values[piece]);
          },
          [&](const Sampled& s) {
            const int cells = static_cast<int>(s.samples.size()) - 1;
            const double t = x * cells;
            const int c = std::min(static_cast<int>(std::floor(t)), cells - 1);
            const double f = t - c;
            if (!s.cubic || cells < 2) return CMatrix((1.0 - f) * s.samples[c] + f * s.samples[c + 1]);
            const auto w = catmull_rom(f);
            auto at = [&](int idx) -> const CMatrix& { return s.samples[std::clamp(idx, 0, cells)]; };
            // Clamped ends use a linear extrapolated ghost value.
            CMatrix left = c == 0 ? CMatrix(2.0 * at(0) - at(1)) : CMatrix(at(c - 1));
            CMatrix right = c + 1 == cells ? CMatrix(2.0 * at(cells) - at(cells - 1)) : CMatrix(at(c + 2));
            return CMatrix(w[0] * left + w[1] * at(c) + w[2] * at(c + 1) + w[3] * right);
          },
      },
      rep_);
}

cplx MatrixPotential::entry(int s, int i, double x) const {
  if (const auto* t = std::get_if<Trig>(&rep_)) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::OutOfDomain, "x outside [0,1]");
    cplx out{0.0, 0.0};
    for (const auto& [n, a] : t->harmonics) out += a(s, i) * std::exp(I * (2.0 * pi * n * x));
    return out;
  }
  return evaluate(x)(s, i);
}

std::vector<double> MatrixPotential::breakpoints() const {
  return std::visit(overloaded{
                        [](const Trig&) { return std::vector<double>{}; },
                        [](const Piecewise& p) { return std::vector<double>(p.breaks.begin() + 1, p.breaks.end() - 1); },
                        [](const Sampled& s) {
                          const int cells = static_cast<int>(s.samples.size()) - 1;
                          std::vector<double> out;
                          for (int c = 1; c < cells; ++c) out.push_back(static_cast<double>(c) / cells);
                          return out;
                        },
                    },
                    rep_);
}

MatrixPotential MatrixPotential::adjoint() const {
  return std::visit(overloaded{
                        [&](const Trig& t) {
                          std::map<int, CMatrix> h;
                          for (const auto& [n, a] : t.harmonics) h[-n] = a.adjoint();
                          return MatrixPotential(m_, Trig{std::move(h)});
                        },
                        [&](const Piecewise& p) {
                          Piecewise out = p;
                          for (auto& v : out.values) v = v.adjoint().eval();
                          return MatrixPotential(m_, std::move(out));
                        },
                        [&](const Sampled& s) {
                          Sampled out = s;
                          for (auto& v : out.samples) v = v.adjoint().eval();
                          return MatrixPotential(m_, std::move(out));
                        },
                    },
                    rep_);
}

MatrixPotential MatrixPotential::combine(cplx a, const MatrixPotential& other, cplx b) const {
  if (other.m_ != m_ || other.rep_.index() != rep_.index()) {
    throw Error(ErrorKind::InvalidArgument, "potentials must share dimension and representation");
  }
  if (const auto* t = std::get_if<Trig>(&rep_)) {
    std::map<int, CMatrix> h;
    for (const auto& [n, v] : t->harmonics) h[n] = a * v;
    for (const auto& [n, v] : std::get<Trig>(other.rep_).harmonics) {
      auto it = h.find(n);
      if (it == h.end()) h[n] = b * v;
      else it->second += b * v;
    }
    return {m_, Trig{std::move(h)}};
  }
  if (const auto* p = std::get_if<Piecewise>(&rep_)) {
    const auto& q = std::get<Piecewise>(other.rep_);
    if (q.breaks != p->breaks) throw Error(ErrorKind::InvalidArgument, "piecewise breaks differ");
    Piecewise out = *p;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a * p->values[i] + b * q.values[i];
    return {m_, std::move(out)};
  }
  const auto& s = std::get<Sampled>(rep_);
  const auto& r = std::get<Sampled>(other.rep_);
  if (s.samples.size() != r.samples.size()) throw Error(ErrorKind::InvalidArgument, "sample grids differ");
  Sampled out = s;
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] = a * s.samples[i] + b * r.samples[i];
  return {m_, std::move(out)};
}

double MatrixPotential::scale() const {
  double out = 0.0;
  std::visit(overloaded{
                 [&](const Trig& t) {
                   for (const auto& [n, a] : t.harmonics) out = std::max(out, a.cwiseAbs().maxCoeff());
                 },
                 [&](const Piecewise& p) {
                   for (const auto& a : p.values) out = std::max(out, a.cwiseAbs().maxCoeff());
                 },
                 [&](const Sampled& s) {
                   for (const auto& a : s.samples) out = std::max(out, a.cwiseAbs().maxCoeff());
                 },
             },
             rep_);
  return out;
}

CMatrix mean_matrix(const MatrixPotential& q) {
  const int m = q.dim();
  return std::visit(overloaded{
                        [&](const MatrixPotential::Trig& t) {
                          auto it = t.harmonics.find(0);
                          return it == t.harmonics.end() ? CMatrix(CMatrix::Zero(m, m)) : it->second;
                        },
                        [&](const MatrixPotential::Piecewise& p) {
                          CMatrix out = CMatrix::Zero(m, m);
                          for (std::size_t i = 0; i < p.values.size(); ++i) {
                            out += (p.breaks[i + 1] - p.breaks[i]) * p.values[i];
                          }
                          return out;
                        },
                        [&](const MatrixPotential::Sampled& s) {
                          const auto cells = static_cast<double>(s.samples.size() - 1);
                          CMatrix out = 0.5 * (s.samples.front() + s.samples.back());
                          for (std::size_t i = 1; i + 1 < s.samples.size(); ++i) out += s.samples[i];
                          return CMatrix(out / cells);
                        },
                    },
                    q.representation());
}

cplx probe_coefficient(const MatrixPotential& q, int s, int i, int k, cplx gamma, ProbeSign sign) {
  if (s < 0 || i < 0 || s >= q.dim() || i >= q.dim()) throw Error(ErrorKind::InvalidArgument, "probe index out of range");
  const double sg = sign == ProbeSign::Plus ? 1.0 : -1.0;
  const cplx freq = sg * (4.0 * pi * k + 2.0 * gamma);
  return std::visit(overloaded{
                        [&](const MatrixPotential::Trig& t) {
                          cplx out{0.0, 0.0};
                          for (const auto& [n, a] : t.harmonics) {
                            if (a(s, i) != 0.0) out += a(s, i) * harmonic_integral(2.0 * pi * n + freq);
                          }
                          return out;
                        },
                        [&](const MatrixPotential::Piecewise& p) {
                          cplx out{0.0, 0.0};
                          for (std::size_t c = 0; c < p.values.size(); ++c) {
                            const double a = p.breaks[c], b = p.breaks[c + 1];
                            out += p.values[c](s, i) * std::exp(I * freq * a) * (b - a) * exp_integral(freq * (b - a));
                          }
                          return out;
                        },
                        [&](const MatrixPotential::Sampled& smp) {
                          const int cells = static_cast<int>(smp.samples.size()) - 1;
                          const double tol = 1e-12 * (1.0 + q.scale());
                          auto f = [&](double x) { return q.entry(s, i, std::clamp(x, 0.0, 1.0)) * std::exp(I * freq * x); };
                          cplx out{0.0, 0.0};
                          for (int c = 0; c < cells; ++c) {
                            out += integrate(f, static_cast<double>(c) / cells, static_cast<double>(c + 1) / cells, 1e-12,
                                             tol / cells);
                          }
                          return out;
                        },
                    },
                    q.representation());
}

double AlphaSequence::at(int k) const {
  if (k < k_min || k > k_max()) throw Error(ErrorKind::InvalidArgument, "alpha index outside computed range");
  return alpha[static_cast<std::size_t>(k - k_min)];
}

AlphaSequence alpha_sequence(const MatrixPotential& q, const GammaPair& gamma, int k_min, int k_max) {
  if (k_max < k_min) throw Error(ErrorKind::InvalidArgument, "empty alpha range");
  AlphaSequence out;
  out.k_min = k_min;
  for (int k = k_min; k <= k_max; ++k) {
    double best = 0.0;
    for (int s = 0; s < q.dim(); ++s) {
      for (int i = 0; i < q.dim(); ++i) {
        for (int r = 1; r <= 2; ++r) {
          for (auto sign : {ProbeSign::Plus, ProbeSign::Minus}) {
            const cplx v = probe_coefficient(q, s, i, k, gamma.gamma[static_cast<std::size_t>(r - 1)], sign);
            out.probes.push_back({k, s, i, r, sign, v});
            best = std::max(best, std::abs(v));
          }
        }
      }
    }
    out.alpha.push_back(best);
  }
  return out;
}

}  // namespace vecsturm
