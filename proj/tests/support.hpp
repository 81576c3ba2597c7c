// Shared helpers for the test binaries.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>

#include "vortex/continuation.hpp"
#include "vortex/higgs.hpp"

namespace vt {

using namespace vortex;

inline CMat random_matrix(std::mt19937_64& rng, int r) {
  std::normal_distribution<double> normal;
  CMat a(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  return a;
}

inline CMat random_hermitian(std::mt19937_64& rng, int r, double scale = 1.0) {
  const CMat a = random_matrix(rng, r);
  return scale * 0.5 * (a + a.adjoint());
}

inline CMat random_spd(std::mt19937_64& rng, int r) {
  const CMat a = random_matrix(rng, r);
  CMat m = a * a.adjoint() + 0.1 * CMat::Identity(r, r);
  return 0.5 * (m + m.adjoint());
}

/// exp of a smooth random Hermitian field.
inline MatrixField positive_field(const Geometry& g, int r, std::uint64_t seed, double amplitude) {
  return smooth_random_field(g, r, seed, amplitude).map([](const CMat& x) { return fiber::herm_exp(x); });
}

/// Largest relative gap between the analytic derivative of Lhat and a
/// central difference with step t, over `probes` smooth directions.
template <typename Residual, typename Apply>
double fd_mismatch(const Geometry& g, int r, const MatrixField& f, Residual residual, Apply apply, int probes,
                   std::uint64_t seed, double t = 1e-6) {
  double worst = 0.0;
  for (int k = 0; k < probes; ++k) {
    const MatrixField dir = smooth_random_field(g, r, seed + 17 * k, 1.0);
    MatrixField plus = f, minus = f;
    plus.axpy(t, dir);
    minus.axpy(-t, dir);
    MatrixField fd = residual(plus) - residual(minus);
    fd *= 1.0 / (2.0 * t);
    const MatrixField exact = apply(dir);
    worst = std::max(worst, (fd - exact).sup_norm() / std::max(exact.sup_norm(), 1e-300));
  }
  return worst;
}

}  // namespace vt
