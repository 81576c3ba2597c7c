#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "vortex/commands.hpp"

namespace vortex {

namespace {

constexpr double kPi = std::numbers::pi;

CMat random_hermitian(std::mt19937_64& rng, int r, double scale) {
  std::normal_distribution<double> normal;
  CMat a(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  return scale * fiber::hermitian_part(a);
}

CMat random_matrix(std::mt19937_64& rng, int r) {
  std::normal_distribution<double> normal;
  CMat a(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  return a;
}

VerifyCheck at_most(std::string name, double value, double threshold, std::string detail = "") {
  return {std::move(name), value, threshold, std::isfinite(value) && value <= threshold, std::move(detail)};
}

VerifyCheck at_least(std::string name, double value, double threshold, std::string detail = "") {
  return {std::move(name), value, threshold, std::isfinite(value) && value >= threshold, std::move(detail)};
}

double sup_diff(const MatrixField& a, const MatrixField& b) { return (a - b).sup_norm(); }

/// Largest relative central-difference mismatch of d Lhat over probes.
double linearization_mismatch(const PairProblem& p, double eps, const MatrixField& f, const MatrixField* theta,
                              int probes, std::uint64_t seed) {
  const Linearization lin(p, eps, f, theta);
  double worst = 0.0;
  const double t = 1e-6;
  for (int k = 0; k < probes; ++k) {
    const MatrixField dir = smooth_random_field(p.geometry(), p.rank(), seed + k, 1.0);
    MatrixField plus = f, minus = f;
    plus.axpy(t, dir);
    minus.axpy(-t, dir);
    MatrixField fd = residual_hat(p, eps, plus, theta) - residual_hat(p, eps, minus, theta);
    fd *= 1.0 / (2.0 * t);
    const MatrixField exact = lin.apply_hat(dir);
    worst = std::max(worst, sup_diff(fd, exact) / std::max(exact.sup_norm(), 1e-300));
  }
  return worst;
}

}  // namespace

std::vector<VerifyCheck> run_verify_suite(const RunConfig& cfg, bool quick) {
  std::vector<VerifyCheck> checks;
  std::mt19937_64 rng(cfg.seed);
  const double sign = cfg.lambda_sign;
  const int torus_n = quick ? 16 : 32;
  const int hopf_n = quick ? 64 : 256;
  const int fibers = quick ? 200 : 1000;
  const int probes = quick ? 100 : 500;
  const int fd_probes = quick ? 4 : 20;
  const GeometryPtr torus = Geometry::torus(torus_n, 1.0, sign);
  const GeometryPtr hopf = Geometry::hopf(hopf_n, sign);
  ContinuationConfig cc = cfg.continuation;
  cc.ritz_steps = 0;

  // fiber calculus
  {
    double worst = 0.0;
    for (int k = 0; k < fibers; ++k) {
      const int r = 1 + k % 3;
      const CMat a = random_matrix(rng, r);
      const CMat m = fiber::hermitian_part(a * a.adjoint()) + 0.1 * CMat::Identity(r, r);
      worst = std::max(worst, (fiber::herm_exp(fiber::herm_log(m)) - m).norm() / m.norm());
    }
    checks.push_back(at_most("fiber.exp_log_roundtrip", worst, 1e-10));
  }
  {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < fibers; ++k) {
      const int r = 1 + k % 3;
      const CMat a = random_matrix(rng, r);
      const CMat h0 = fiber::hermitian_part(a * a.adjoint()) + 0.2 * CMat::Identity(r, r);
      // h0-self-adjoint: h0 s is Hermitian
      const CMat s = h0.inverse() * random_hermitian(rng, r, 1.5);
      CVec phi(r);
      for (int i = 0; i < r; ++i) phi(i) = random_matrix(rng, 1)(0, 0);
      worst = std::min(worst, fiber::xi_path(phi, s, h0, 1.0) - fiber::xi_path(phi, s, h0, 0.0));
    }
    checks.push_back(at_least("fiber.xi_monotone", worst, -1e-12));
  }
  {
    double xi_prime = std::numeric_limits<double>::infinity();
    double form = std::numeric_limits<double>::infinity();
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int k = 0; k < probes; ++k) {
      const int r = 1 + k % 3;
      const CMat theta = random_matrix(rng, r);
      const CMat s = random_hermitian(rng, r, 1.0);
      xi_prime = std::min(xi_prime, fiber::higgs_xi_derivative(theta, s, unit(rng), 2.0));
      const CMat f = fiber::herm_exp(random_hermitian(rng, r, 1.0));
      form = std::min(form, fiber::higgs_theta_form(theta, f, random_hermitian(rng, r, 1.0), 2.0));
    }
    checks.push_back(at_least("higgs.xi_derivative_nonnegative", xi_prime, 0.0));
    checks.push_back(at_least("higgs.theta_form_semipositive", form, -1e-12));
  }

  // geometry
  for (const GeometryPtr& g : {torus, hopf}) {
    const std::string tag = to_string(g->kind());
    const MatrixField u = smooth_random_field(*g, 1, cfg.seed + 11, 1.0);
    RealField real(g->points());
    for (std::size_t p = 0; p < g->points(); ++p) real[p] = u.at(p)(0, 0).real();
    const RealField pu = g->p_operator(real);
    checks.push_back(at_most("geometry.gauduchon_" + tag, std::abs(g->integrate(pu)), 1e-8));
    const std::size_t top = std::max_element(real.begin(), real.end()) - real.begin();
    const double scale = *std::max_element(pu.begin(), pu.end());
    checks.push_back(at_least("geometry.maximum_principle_" + tag, pu[top] / std::max(scale, 1e-300), -1e-8,
                              "P u at the maximum of u, relative"));
  }

  // degree invariance under a smooth change of metric
  {
    SplitModel m;
    m.degrees = {1.0};
    const PairProblem p = make_split_pair(torus, m, {1.0}, 6.0 * kPi);
    const MatrixField g = smooth_random_field(*torus, 1, cfg.seed + 12, 1.0).map([](const CMat& x) { return fiber::herm_exp(x); });
    checks.push_back(at_most("geometry.degree_invariance_torus", std::abs(p.with_reference(g).degree() - p.degree()), 1e-8));
    SplitModel mh;
    mh.degrees = {hopf_line_degree(*hopf, 2.0)};
    const PairProblem ph = make_split_pair(hopf, mh, {1.0}, 3.0);
    const MatrixField gh = smooth_random_field(*hopf, 1, cfg.seed + 13, 1.0).map([](const CMat& x) { return fiber::herm_exp(x); });
    checks.push_back(at_most("geometry.degree_invariance_hopf", std::abs(ph.with_reference(gh).degree() - ph.degree()), 1e-8));
  }

  // continuation
  {
    const GeometryPtr g = Geometry::torus(quick ? 16 : 64, 1.0, sign);
    const PairProblem p(g, MatrixField::zeros(g->points(), 1), SectionField::constant(g->points(), CVec::Ones(1)), 2.0);
    double err = std::numeric_limits<double>::infinity();
    std::string detail;
    try {
      const SolveReport r = run_continuation(p, cc);
      if (r.final_metric) err = (*r.final_metric - MatrixField::constant(g->points(), 2.0 * CMat::Identity(1, 1))).sup_norm();
      detail = to_string(r.status);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    checks.push_back(at_most("continuation.trivial_solution", err, 1e-8, detail));
  }
  {
    SplitModel m;
    m.degrees = {1.0};
    const PairProblem p = make_split_pair(torus, m, {1.0}, 1.5 * 4.0 * kPi);
    const MatrixField start = smooth_random_field(*torus, 1, cfg.seed + 21, 1.0).map([](const CMat& x) { return fiber::herm_exp(x); });
    const auto [gp, f1] = initial_gauge(p, start);
    checks.push_back(at_most("continuation.homotopy_start", residual_L(gp, 1.0, f1).sup_norm(), 1e-10));
    const MatrixField f = smooth_random_field(*torus, 1, cfg.seed + 22, 0.5).map([](const CMat& x) { return fiber::herm_exp(x); });
    checks.push_back(at_most("continuation.linearization_fd_torus", linearization_mismatch(gp, 0.3, f, nullptr, fd_probes, cfg.seed + 100), 1e-5));

    double apriori = std::numeric_limits<double>::infinity(), energy = apriori, mono = -apriori;
    std::string detail;
    try {
      const SolveReport r = run_continuation(p, cc);
      detail = to_string(r.status);
      if (r.status == RunStatus::converged) {
        apriori = -std::numeric_limits<double>::infinity();
        energy = 0.0;
        mono = std::numeric_limits<double>::infinity();
        for (const TraceRow& row : r.trace) {
          if (row.eps > 0.0) apriori = std::max(apriori, row.diagnostics.apriori_margin);
          energy = std::max(energy, row.diagnostics.energy_gap / std::max(row.diagnostics.energy_scale, 1e-300));
          mono = std::min(mono, row.diagnostics.monotonicity);
        }
      }
    } catch (const std::exception& e) {
      detail = e.what();
    }
    checks.push_back(at_most("continuation.apriori_bound", apriori, 1e-6, detail));
    checks.push_back(at_most("continuation.energy_identity", energy, 1e-4, "relative gap"));
    checks.push_back(at_least("continuation.monotonicity", mono, -1e-8));
  }
  {
    SplitModel mh;
    mh.degrees = {hopf_line_degree(*hopf, 2.0)};
    const PairProblem ph = make_split_pair(hopf, mh, {1.0}, 3.0);
    const MatrixField start = smooth_random_field(*hopf, 1, cfg.seed + 23, 1.0).map([](const CMat& x) { return fiber::herm_exp(x); });
    const auto [gp, f1] = initial_gauge(ph, start);
    checks.push_back(at_most("continuation.homotopy_start_hopf", residual_L(gp, 1.0, f1).sup_norm(), 1e-10));
    const MatrixField f = smooth_random_field(*hopf, 1, cfg.seed + 24, 0.5).map([](const CMat& x) { return fiber::herm_exp(x); });
    checks.push_back(at_most("continuation.linearization_fd_hopf", linearization_mismatch(gp, 0.3, f, nullptr, fd_probes, cfg.seed + 200), 1e-5));
  }
  {
    const GeometryPtr fine = Geometry::torus(64, 1.0, sign);
    const MatrixField f = smooth_random_field(*fine, 1, cfg.seed + 31, 0.8).map([](const CMat& x) { return fiber::herm_exp(x); });
    checks.push_back(at_most("continuation.nie_zhang_rank1_torus", nie_zhang_check(*fine, f), 1e-8));
    const MatrixField fh = smooth_random_field(*hopf, 1, cfg.seed + 32, 0.8).map([](const CMat& x) { return fiber::herm_exp(x); });
    checks.push_back(at_most("continuation.nie_zhang_rank1_hopf", nie_zhang_check(*hopf, fh), 1e-8));
  }

  // higgs
  {
    CMat theta = CMat::Zero(2, 2);
    theta(0, 1) = 1.0;
    const HiggsProblem hp = make_higgs_split(torus, {0.0, 0.0}, theta, 0.0);
    const MatrixField f = smooth_random_field(*torus, 2, cfg.seed + 41, 0.5).map([](const CMat& x) { return fiber::herm_exp(x); });
    checks.push_back(at_most("higgs.bracket_trace_free", MatrixField::from_scalar(bracket_curvature(hp, f).trace()).sup_norm(), 1e-12));
    checks.push_back(at_most("higgs.linearization_fd", linearization_mismatch(hp.pair(), 0.3, f, &hp.theta(), fd_probes, cfg.seed + 300), 1e-5));
    const HiggsProblem h1 = make_higgs_split(torus, {1.0}, CMat::Constant(1, 1, Complex(0.7, -0.2)), 2.0 * kPi);
    const MatrixField f1 = smooth_random_field(*torus, 1, cfg.seed + 42, 0.5).map([](const CMat& x) { return fiber::herm_exp(x); });
    checks.push_back(at_most("higgs.rank1_reduction", sup_diff(residual_higgs(h1, 0.4, f1), residual_L(h1.pair(), 0.4, f1)), 1e-14));
  }

  // phi-simplicity
  {
    SplitModel m;
    m.degrees = {0.0, 0.0};
    const PairProblem split = make_split_pair(torus, m, {1.0, 0.0}, 1.0);
    SplitModel mixed;
    mixed.degrees = {0.0, 1.0};
    const PairProblem twisted = make_split_pair(torus, mixed, {1.0, 1.0}, 1.0);
    const bool ok = !phi_simple_check(split) && phi_simple_check(twisted);
    checks.push_back({"pair.phi_simple", ok ? 0.0 : 1.0, 0.0, ok, "degrees (0,0) phi (1,0) not simple, degrees (0,1) phi (1,1) simple"});
  }
  return checks;
}

}  // namespace vortex
