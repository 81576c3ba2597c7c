#include "vortex/continuation.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace vortex {

void ContinuationConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string("continuation: ") + name + " must be positive");
  };
  positive(eps_min, "eps_min");
  positive(newton_tolerance, "newton_tolerance");
  positive(linear_tolerance, "linear_tolerance");
  positive(cap, "cap");
  positive(armijo, "armijo");
  positive(min_step, "min_step");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("continuation: ratio must lie in (0,1)");
  if (eps_min >= 1.0) throw std::invalid_argument("continuation: eps_min must be below 1");
  if (max_newton < 1 || gmres_restart < 1 || gmres_max_iterations < 1 || max_steps < 1)
    throw std::invalid_argument("continuation: iteration limits must be positive");
  if (ritz_steps < 0) throw std::invalid_argument("continuation: ritz_steps must be non-negative");
  if (min_step > 1.0) throw std::invalid_argument("continuation: min_step must not exceed 1");
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::diverged: return "diverged";
    case RunStatus::failed: return "failed";
  }
  return "?";
}

std::string to_string(FailureCause c) {
  switch (c) {
    case FailureCause::none: return "none";
    case FailureCause::divergence_cap: return "divergence_cap";
    case FailureCause::newton_min_step: return "newton_min_step";
    case FailureCause::linear_breakdown: return "linear_breakdown";
    case FailureCause::polish_failure: return "polish_failure";
    case FailureCause::step_limit: return "step_limit";
  }
  return "?";
}

namespace {

MatrixField herm_exp_field(const MatrixField& s) {
  return s.map([](const CMat& x) { return fiber::herm_exp(x); });
}

MatrixField herm_log_field(const MatrixField& f) {
  return f.map([](const CMat& x) { return fiber::herm_log(x); });
}

MatrixField hermitian_field(const MatrixField& a) {
  return a.map([](const CMat& x) { return fiber::hermitian_part(x); });
}

}  // namespace

MatrixField higgs_bracket(const PairProblem& problem, const MatrixField& theta_raw, const MatrixField& f) {
  const MatrixField theta = problem.to_reference_frame(theta_raw);
  const double c = problem.geometry().contraction();
  MatrixField out(f.points(), f.rank());
  for (std::size_t p = 0; p < f.points(); ++p) {
    out.at(p) = fiber::higgs_bracket(theta.at(p), f.at(p), c);
  }
  return out;
}

// --- Linearization -------------------------------------------------------

Linearization::Linearization(const PairProblem& problem, double eps, const MatrixField& f, const MatrixField* theta)
    : problem_(&problem), theta_(theta), eps_(eps), f_(f), residual_(f.points(), f.rank()),
      f_sqrt_(f.points(), f.rank()), f_inv_sqrt_(f.points(), f.rank()), f_inv_(f.points(), f.rank()),
      theta_ref_(f.points(), f.rank()) {
  const std::size_t n = f.points();
  const int r = f.rank();
  f_eig_.resize(n);
  MatrixField log_f(n, r);
  for (std::size_t p = 0; p < n; ++p) {
    f_eig_[p] = fiber::herm_eig(f.at(p));
    const fiber::HermEig& e = f_eig_[p];
    if (!(e.values.minCoeff() > 0.0)) throw SingularMatrixError("Linearization: f is not positive");
    f_sqrt_.at(p) = fiber::from_eig(e, [](double x) { return std::sqrt(x); });
    f_inv_sqrt_.at(p) = fiber::from_eig(e, [](double x) { return 1.0 / std::sqrt(x); });
    f_inv_.at(p) = fiber::from_eig(e, [](double x) { return 1.0 / x; });
    log_f.at(p) = fiber::from_eig(e, [](double x) { return std::log(x); });
  }
  const MatrixField metric = problem.raw_metric(f);
  chern_.emplace(problem, metric);
  MatrixField raw = problem.raw_curvature();
  raw += chern_->curvature_update();
  const SectionField& phi = problem.raw_phi();
  for (std::size_t p = 0; p < n; ++p) {
    raw.at(p) += 0.5 * phi.at(p) * (phi.at(p).adjoint() * metric.at(p));
    raw.at(p).diagonal().array() -= 0.5 * problem.tau();
  }
  residual_ = problem.to_reference_frame(raw);
  residual_.axpy(eps, log_f);
  if (theta_) {
    theta_ref_ = problem.to_reference_frame(*theta_);
    residual_ += higgs_bracket(problem, *theta_, f);
  }

  // shift: eps plus the mean of the zeroth-order phi term
  const SectionField phi_ref = problem.phi();
  double mean = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    mean += 0.5 * (phi_ref.at(p).adjoint() * f.at(p) * phi_ref.at(p))(0).real() / r;
  mean /= static_cast<double>(n);
  sigma_ = std::max(eps + mean, 1e-8);
}

MatrixField Linearization::residual_hat() const {
  MatrixField out(f_.points(), f_.rank());
  for (std::size_t p = 0; p < f_.points(); ++p) out.at(p) = fiber::hermitian_part(f_.at(p) * residual_.at(p));
  return out;
}

MatrixField Linearization::residual_h() const {
  MatrixField out(f_.points(), f_.rank());
  for (std::size_t p = 0; p < f_.points(); ++p)
    out.at(p) = fiber::hermitian_part(f_sqrt_.at(p) * residual_.at(p) * f_inv_sqrt_.at(p));
  return out;
}

double Linearization::residual_sup() const { return residual_h().sup_norm(); }

MatrixField Linearization::apply_hat(const MatrixField& direction) const {
  const PairProblem& p = *problem_;
  const std::size_t n = direction.points();
  const MatrixField d_metric = p.raw_metric(direction);
  MatrixField d_raw = p.lambda_dbar_raw(chern_->linearize(d_metric));
  const SectionField& phi = p.raw_phi();
  for (std::size_t k = 0; k < n; ++k) d_raw.at(k) += 0.5 * phi.at(k) * (phi.at(k).adjoint() * d_metric.at(k));
  MatrixField d_res = p.to_reference_frame(d_raw);
  const double c = p.geometry().contraction();
  MatrixField out(n, direction.rank());
  for (std::size_t k = 0; k < n; ++k) {
    const auto& fk = f_.at(k);
    CMat dl = d_res.at(k);
    if (eps_ != 0.0) dl += eps_ * fiber::dlog_apply(f_eig_[k], direction.at(k));
    if (theta_) dl += fiber::higgs_bracket_derivative(theta_ref_.at(k), fk, f_inv_.at(k), direction.at(k), c);
    out.at(k) = direction.at(k) * residual_.at(k) + fk * dl;
  }
  return out;
}

MatrixField Linearization::apply(const MatrixField& direction) const { return hermitian_field(apply_hat(direction)); }

MatrixField Linearization::precondition(const MatrixField& r) const {
  // principal part: G^{-1/2} (P + sigma)(G^{1/2} x G^{1/2}) G^{-1/2}
  const MatrixField lifted = problem_->raw_metric(r);
  const MatrixField solved = problem_->geometry().solve_shifted(lifted, sigma_);
  return problem_->reference_metric(solved);
}

MatrixField Linearization::to_log_step(const MatrixField& df) const {
  MatrixField out(df.points(), df.rank());
  for (std::size_t p = 0; p < df.points(); ++p)
    out.at(p) = fiber::hermitian_part(fiber::dlog_apply(f_eig_[p], df.at(p)));
  return out;
}

// --- operations ------------------------------------------------------------

std::pair<PairProblem, MatrixField> initial_gauge(const PairProblem& p, const MatrixField& start, const MatrixField* theta) {
  const std::size_t n = start.points();
  p.geometry().check_shape(n);
  if (start.rank() != p.rank()) throw std::invalid_argument("initial_gauge: start metric rank mismatch");
  for (std::size_t k = 0; k < n; ++k)
    if (!(fiber::herm_eig(start.at(k)).values.minCoeff() > 0.0))
      throw std::invalid_argument("initial_gauge: start metric is not positive");
  // K0 at the raw metric h, independent of any current reference
  const ChernConnection chern(p, start);
  MatrixField raw = p.raw_curvature();
  raw += chern.curvature_update();
  const SectionField& phi = p.raw_phi();
  const double c = p.geometry().contraction();
  MatrixField gauge(n, p.rank());
  for (std::size_t k = 0; k < n; ++k) {
    const CMat& h = start.at(k);
    CMat kk = raw.at(k) + 0.5 * phi.at(k) * (phi.at(k).adjoint() * h);
    kk.diagonal().array() -= 0.5 * p.tau();
    if (theta) kk += fiber::higgs_bracket(theta->at(k), h, c);
    if (!kk.allFinite()) throw std::runtime_error("initial_gauge: mean curvature is not finite");
    const CMat a = fiber::herm_sqrt(h);
    const CMat a_inv = fiber::herm_inv_sqrt(h);
    const CMat k_sym = fiber::hermitian_part(a * kk * a_inv);
    gauge.at(k) = fiber::hermitian_part(a * fiber::herm_exp(k_sym) * a);
  }
  PairProblem gauged = p.with_reference(gauge);
  MatrixField f1 = gauged.reference_metric(start);
  return {std::move(gauged), std::move(f1)};
}

MatrixField residual_L(const PairProblem& p, double eps, const MatrixField& f, const MatrixField* theta) {
  return Linearization(p, eps, f, theta).residual_h();
}

MatrixField residual_hat(const PairProblem& p, double eps, const MatrixField& f, const MatrixField* theta) {
  const Linearization lin(p, eps, f, theta);
  MatrixField out(f.points(), f.rank());
  for (std::size_t k = 0; k < f.points(); ++k) out.at(k) = f.at(k) * lin.residual().at(k);
  return out;
}

MatrixField linearization_apply(const PairProblem& p, double eps, const MatrixField& f, const MatrixField& direction,
                                const MatrixField* theta) {
  return Linearization(p, eps, f, theta).apply_hat(direction);
}

NewtonOutcome newton_solve_at(const PairProblem& p, double eps, const MatrixField& s_init, const ContinuationConfig& cfg,
                              const MatrixField* theta) {
  NewtonOutcome out;
  MatrixField s = s_init;
  MatrixField f = herm_exp_field(s);
  auto lin = std::make_unique<Linearization>(p, eps, f, theta);
  double res = lin->residual_sup();
  GmresOptions gopt{cfg.linear_tolerance, cfg.gmres_restart, cfg.gmres_max_iterations};
  auto finish = [&](bool ok, FailureCause cause, std::string msg) {
    out.converged = ok;
    out.cause = cause;
    out.message = std::move(msg);
    out.state.eps = eps;
    out.state.s = s;
    out.state.f = f;
    out.state.residual = res;
    out.state.diagnostics.newton_iterations = out.iterations;
    return out;
  };
  for (;;) {
    if (!std::isfinite(res)) return finish(false, FailureCause::newton_min_step, "non-finite residual");
    if (s.sup_norm() > cfg.cap) return finish(false, FailureCause::divergence_cap, "sup|log f| exceeded the cap");
    if (res <= cfg.newton_tolerance) return finish(true, FailureCause::none, "");
    if (out.iterations >= cfg.max_newton) return finish(false, FailureCause::newton_min_step, "Newton iteration limit");
    ++out.iterations;
    const Linearization& L = *lin;
    MatrixField rhs = L.residual_hat();
    rhs *= -1.0;
    const GmresResult solve = gmres([&L](const MatrixField& x) { return L.apply(x); }, rhs,
                                    [&L](const MatrixField& x) { return L.precondition(x); }, gopt);
    if (!solve.converged && !(solve.relative_residual < 0.5))
      return finish(false, FailureCause::linear_breakdown, "linear solve stagnated");
    const MatrixField ds = L.to_log_step(solve.solution);
    double alpha = 1.0;
    for (;;) {
      MatrixField s_try = s;
      s_try.axpy(alpha, ds);
      MatrixField f_try = herm_exp_field(s_try);
      std::unique_ptr<Linearization> trial;
      double res_try = std::numeric_limits<double>::infinity();
      try {
        trial = std::make_unique<Linearization>(p, eps, f_try, theta);
        res_try = trial->residual_sup();
      } catch (const std::exception&) {
      }
      if (std::isfinite(res_try) && res_try <= (1.0 - cfg.armijo * alpha) * res) {
        s = std::move(s_try);
        f = std::move(f_try);
        lin = std::move(trial);
        res = res_try;
        break;
      }
      alpha *= 0.5;
      if (alpha < cfg.min_step) {
        std::ostringstream msg;
        msg << "line search failed at residual " << res;
        return finish(false, FailureCause::newton_min_step, msg.str());
      }
    }
  }
}

SolveReport run_continuation(const PairProblem& p, const ContinuationConfig& cfg, const MatrixField* theta,
                             const MatrixField* start) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  const MatrixField identity = MatrixField::identity(p.geometry().points(), p.rank());
  auto [gauged, f1] = initial_gauge(p, start ? *start : identity, theta);
  rep.problem = gauged;
  const PairProblem& gp = *rep.problem;

  auto finish = [&](RunStatus status, FailureCause cause, std::string msg) -> SolveReport& {
    rep.status = status;
    rep.cause = cause;
    rep.message = std::move(msg);
    if (rep.final_state) {
      rep.final_residual = rep.final_state->residual;
      rep.final_sup_log_f = rep.final_state->s.sup_norm();
      rep.final_metric = gp.raw_metric(rep.final_state->f);
    }
    rep.wall_seconds = elapsed();
    return rep;
  };
  auto accept = [&](NewtonOutcome& step, const ContinuationState* previous) {
    step.state.diagnostics = diagnostics_check(step.state, gp, previous, theta, cfg.ritz_steps);
    step.state.diagnostics.newton_iterations = step.iterations;
    const DiagnosticsRecord& d = step.state.diagnostics;
    rep.trace.push_back({step.state.eps, step.state.residual, d});
    rep.newton_total += step.iterations;
    rep.max_sup_log_f = std::max(rep.max_sup_log_f, d.sup_log_f);
    if (step.state.eps > 0.0) {
      rep.max_l2_log_f = std::max(rep.max_l2_log_f, d.l2_log_f);
      if (d.apriori_margin > 1e-6) rep.flagged = true;
    }
    if (d.energy_gap > 1e-4 * std::max(1.0, d.energy_scale) || d.monotonicity < -1e-8) rep.flagged = true;
    rep.eps_reached = step.state.eps;
    rep.final_state = std::move(step.state);
  };
  auto record_failure = [&](const NewtonOutcome& step) {
    rep.max_sup_log_f = std::max(rep.max_sup_log_f, step.state.s.sup_norm());
    rep.newton_total += step.iterations;
  };

  NewtonOutcome first = newton_solve_at(gp, 1.0, herm_log_field(f1), cfg, theta);
  if (!first.converged) {
    record_failure(first);
    return finish(RunStatus::failed, first.cause, "no solution at eps = 1: " + first.message);
  }
  accept(first, nullptr);

  double eps = 1.0;
  double ratio = cfg.ratio;
  int steps = 0;
  while (eps > cfg.eps_min) {
    if (++steps > cfg.max_steps) return finish(RunStatus::failed, FailureCause::step_limit, "eps step limit reached");
    const double next = std::max(eps * ratio, cfg.eps_min);
    const ContinuationState previous = *rep.final_state;
    NewtonOutcome step = newton_solve_at(gp, next, previous.s, cfg, theta);
    if (step.converged) {
      accept(step, &previous);
      eps = next;
      ratio = cfg.ratio;
      continue;
    }
    record_failure(step);
    if (step.cause == FailureCause::divergence_cap) {
      rep.eps_reached = next;
      std::ostringstream msg;
      msg << "sup|log f| passed the cap " << cfg.cap << " at eps = " << next;
      return finish(RunStatus::diverged, FailureCause::divergence_cap, msg.str());
    }
    ratio = std::sqrt(ratio);
    if (1.0 - ratio < 1e-3) {
      std::ostringstream msg;
      msg << "Newton failure at minimal eps step from eps = " << eps << ": " << step.message;
      return finish(RunStatus::failed, step.cause, msg.str());
    }
  }

  if (cfg.polish) {
    const ContinuationState previous = *rep.final_state;
    NewtonOutcome polish = newton_solve_at(gp, 0.0, previous.s, cfg, theta);
    if (!polish.converged) {
      record_failure(polish);
      if (polish.cause == FailureCause::divergence_cap)
        return finish(RunStatus::diverged, FailureCause::divergence_cap, "sup|log f| passed the cap in the eps = 0 polish");
      return finish(RunStatus::diverged, FailureCause::polish_failure, "eps = 0 polish did not converge: " + polish.message);
    }
    accept(polish, &previous);
    if (rep.final_state->residual > 10.0 * cfg.newton_tolerance)
      return finish(RunStatus::failed, FailureCause::polish_failure, "final residual above tolerance");
  }
  return finish(RunStatus::converged, FailureCause::none, "");
}

double uniqueness_probe(const PairProblem& p, const ContinuationConfig& cfg, const MatrixField& h_a,
                        const MatrixField& h_b) {
  auto run = [&](const MatrixField& h) { return run_continuation(p, cfg, nullptr, &h); };
  auto fa = std::async(std::launch::async, run, std::cref(h_a));
  SolveReport b = run(h_b);
  SolveReport a = fa.get();
  if (a.status != RunStatus::converged || b.status != RunStatus::converged)
    throw std::runtime_error("uniqueness_probe: a continuation run did not converge");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.final_metric->points(); ++k)
    worst = std::max(worst, (a.final_metric->at(k) - b.final_metric->at(k)).norm());
  return worst;
}

}  // namespace vortex
