#pragma once

#include <random>

#include "vecsturm/boundary.hpp"

namespace vecsturm::testing {

inline cplx random_complex(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng)};
}

/// Random boundary pair; orders drawn from {(0,0), (1,0), (1,1)}.
inline BoundaryConditionPair random_boundary(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 2);
  const int shape = pick(rng);
  const int k1 = shape >= 1 ? 1 : 0;
  const int k2 = shape == 2 ? 1 : 0;
  BoundaryRow a{k1, random_complex(rng), k1 ? random_complex(rng) : cplx{}, random_complex(rng),
                k1 ? random_complex(rng) : cplx{}};
  BoundaryRow b{k2, random_complex(rng), k2 ? random_complex(rng) : cplx{}, random_complex(rng),
                k2 ? random_complex(rng) : cplx{}};
  return {a, b};
}

inline cplx random_annulus_point(std::mt19937_64& rng, double r_lo, double r_hi) {
  std::uniform_real_distribution<double> r(r_lo, r_hi), phase(0.0, 2.0 * pi);
  return std::polar(r(rng), phase(rng));
}

}  // namespace vecsturm::testing
