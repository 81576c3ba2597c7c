#include <cmath>
#include <limits>
#include <random>

#include "vortex/continuation.hpp"

namespace vortex {

namespace {

double field_inner(const Geometry& g, const MatrixField& a, const MatrixField& b) {
  RealField density(a.points());
  for (std::size_t p = 0; p < a.points(); ++p) density[p] = (a.at(p).cwiseProduct(b.at(p).conjugate())).sum().real();
  return g.integrate(density);
}

/// c sum_ij Psi(l_i, l_j) |(U^* ds U)_ij|^2 with s = U diag(l) U^*.
double psi_density(double c, const CMat& s, const CMat& ds) {
  const fiber::HermEig e = fiber::herm_eig(fiber::hermitian_part(s));
  const CMat b = e.vectors.adjoint() * ds * e.vectors;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) sum += fiber::psi_kernel(e.values(i), e.values(j)) * std::norm(b(i, j));
  return c * sum;
}

/// Connection form f^{-1} d f of a flat-frame field on form points.
MatrixField flat_connection_form(const Geometry& g, const MatrixField& f) {
  const std::size_t n = f.points();
  MatrixField out(n, f.rank());
  if (g.kind() == BackendKind::torus) {
    const MatrixField df = g.d(f);
    for (std::size_t p = 0; p < n; ++p) out.at(p) = f.at(p).inverse() * df.at(p);
    return out;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const CMat isqrt = fiber::herm_inv_sqrt(f.at(k));
    const CMat sq = fiber::herm_sqrt(f.at(k));
    const CMat q = fiber::hermitian_part(isqrt * f.at((k + 1) % n) * isqrt);
    out.at(k) = isqrt * fiber::herm_log(q) * sq / g.spacing();
  }
  return out;
}

MatrixField random_hermitian(std::size_t points, int rank, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  MatrixField out(points, rank);
  for (std::size_t p = 0; p < points; ++p) {
    CMat a(rank, rank);
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j) a(i, j) = Complex(normal(rng), normal(rng));
    out.at(p) = fiber::hermitian_part(a);
  }
  return out;
}

}  // namespace

EnergyIdentity energy_identity(const PairProblem& p, double eps, const MatrixField& f, const MatrixField* theta,
                               const MatrixField* log_f) {
  const Geometry& g = p.geometry();
  const Linearization lin(p, eps, f, theta);
  const MatrixField s = log_f ? *log_f : f.map([](const CMat& x) { return fiber::herm_log(x); });
  MatrixField k0 = p.background_curvature();
  const SectionField phi = p.phi();
  // size of the separate pieces of K0 against |s|, so the scale does not
  // vanish when they cancel at a solution
  RealField magnitude(f.points());
  const double tau_part = 0.5 * std::abs(p.tau()) * std::sqrt(static_cast<double>(p.rank()));
  for (std::size_t k = 0; k < f.points(); ++k) {
    const CMat outer = 0.5 * phi.at(k) * (phi.at(k).adjoint() * f.at(k));
    magnitude[k] = (k0.at(k).norm() + outer.norm() + tau_part) * s.at(k).norm();
    k0.at(k) += outer;
    k0.at(k).diagonal().array() -= 0.5 * p.tau();
  }
  if (theta) k0 += higgs_bracket(p, *theta, f);

  const double s2 = field_inner(g, s, s);
  const double ls = field_inner(g, lin.residual(), s);
  const double ks = field_inner(g, k0, s);
  const MatrixField ds = p.d0_reference(s);
  const MatrixField s_edge = g.to_form_points(s);
  RealField density(f.points());
  for (std::size_t k = 0; k < f.points(); ++k) density[k] = psi_density(g.contraction(), s_edge.at(k), ds.at(k));
  const double psi = g.integrate(density);

  EnergyIdentity out;
  out.lhs = ls - eps * s2;
  out.rhs = ks + psi;
  out.gap = std::abs(out.lhs - out.rhs);
  out.scale = eps * s2 + std::abs(ks) + std::abs(psi) + std::abs(ls) + g.integrate(magnitude);
  return out;
}

DiagnosticsRecord diagnostics_check(const ContinuationState& state, const PairProblem& p,
                                    const ContinuationState* previous, const MatrixField* theta, int ritz_steps) {
  const Geometry& g = p.geometry();
  const std::size_t n = state.f.points();
  DiagnosticsRecord d;
  d.newton_iterations = state.diagnostics.newton_iterations;
  const double eps = state.eps;

  MatrixField k0 = mean_curvature(p, MatrixField::identity(n, p.rank()));
  if (theta) k0 += higgs_bracket(p, *theta, MatrixField::identity(n, p.rank()));
  const double k0_sup = k0.sup_norm();

  d.sup_log_f = state.s.sup_norm();
  d.l2_log_f = std::sqrt(field_inner(g, state.s, state.s));
  if (eps > 0.0) {
    d.apriori_bound = k0_sup / eps;
    d.apriori_margin = d.sup_log_f - d.apriori_bound;
  } else {
    d.apriori_bound = std::numeric_limits<double>::infinity();
    d.apriori_margin = -std::numeric_limits<double>::infinity();
  }

  // 1/2 P|s|^2 + eps |s|^2 <= |K0| |s|
  RealField s2(n);
  for (std::size_t k = 0; k < n; ++k) s2[k] = state.s.at(k).squaredNorm();
  const RealField ps2 = g.p_operator(s2);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double lhs = 0.5 * ps2[k] + eps * s2[k];
    worst = std::max(worst, lhs - k0.at(k).norm() * std::sqrt(s2[k]));
  }
  d.inequality_margin = worst;

  const EnergyIdentity e = energy_identity(p, eps, state.f, theta, &state.s);
  d.energy_gap = e.gap;
  d.energy_scale = e.scale;

  if (previous) {
    double inc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const CMat isqrt = fiber::herm_inv_sqrt(previous->f.at(k));
      const fiber::HermEig e = fiber::herm_eig(fiber::hermitian_part(isqrt * state.f.at(k) * isqrt));
      inc = std::max(inc, e.values.array().log().matrix().norm());
    }
    d.cauchy_increment = inc;
  }

  const SectionField phi = p.phi();
  RealField mono(n);
  for (std::size_t k = 0; k < n; ++k) {
    const CMat outer = phi.at(k) * phi.at(k).adjoint();
    const CMat diff = outer * state.f.at(k) - outer;
    mono[k] = (diff * state.s.at(k)).trace().real();
  }
  d.monotonicity = g.integrate(mono);

  if (ritz_steps > 0) {
    const Linearization lin(p, eps, state.f, theta);
    const MatrixField start = random_hermitian(n, p.rank(), 7);
    d.min_ritz = smallest_ritz([&lin](const MatrixField& x) { return lin.apply(x); }, start, ritz_steps);
  } else {
    d.min_ritz = std::numeric_limits<double>::quiet_NaN();
  }
  return d;
}

double nie_zhang_check(const Geometry& g, const MatrixField& f) {
  g.check_shape(f.points());
  const std::size_t n = f.points();
  const MatrixField s = f.map([](const CMat& x) { return fiber::herm_log(x); });
  const MatrixField m = flat_connection_form(g, f);
  const MatrixField ds = g.d(s);
  const MatrixField dbar_s = g.kind() == BackendKind::torus
                                 ? g.dbar(s)
                                 : ds.map([](const CMat& x) { return CMat(x.adjoint()); });
  const MatrixField s_edge = g.to_form_points(s);
  const double c = g.contraction();
  RealField gap(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex lhs = c * (m.at(k) * dbar_s.at(k)).trace();
    const double rhs = psi_density(c, s_edge.at(k), ds.at(k));
    gap[k] = std::abs(lhs - rhs);
  }
  return g.integrate(gap);
}

}  // namespace vortex
