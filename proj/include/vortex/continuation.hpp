// Perturbed equation L_eps(f) = K0_{h0 f} + eps log f, its linearization,
// damped Newton solves in s = log f, and the eps-continuation from the
// exact gauged start at eps = 1 down to eps_min, finished by an eps = 0
// polish.
//
// All fields f, s, L are expressed in the h0-unitary frame of the problem
// (see pair.hpp). L~ = L_eps(f) in that frame is f-self-adjoint; the
// Newton system is the Hermitian part of Lhat = f L~. Residual norms are
// taken in the h-unitary frame, |f^{1/2} L~ f^{-1/2}|, so they equal the
// pointwise h-norm of L_eps(f).
//
// An optional Higgs field (raw frame (1,0)-coefficients) adds the bracket
// term c [Theta, f^{-1} Theta^* f].
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vortex/krylov.hpp"
#include "vortex/pair.hpp"

namespace vortex {

struct ContinuationConfig {
  double eps_min = 1e-3;
  double ratio = 0.7;
  double newton_tolerance = 1e-10;
  int max_newton = 50;
  double linear_tolerance = 1e-8;
  double cap = 50.0;
  double armijo = 1e-4;
  double min_step = 1.0 / 1024.0;
  int gmres_restart = 40;
  int gmres_max_iterations = 600;
  /// Arnoldi steps for the smallest-Ritz estimate on accepted states (0 = off).
  int ritz_steps = 12;
  int max_steps = 400;
  bool polish = true;

  void validate() const;
};

struct DiagnosticsRecord {
  double sup_log_f = 0.0;
  double l2_log_f = 0.0;
  /// eps^{-1} sup|K0_{h0}| (infinite at eps = 0).
  double apriori_bound = 0.0;
  /// sup|log f| - bound; non-positive when the estimate holds.
  double apriori_margin = 0.0;
  /// max over points of 1/2 P|s|^2 + eps |s|^2 - |K0_{h0}| |s|.
  double inequality_margin = 0.0;
  double energy_gap = 0.0;
  double energy_scale = 0.0;
  /// sup|log(f_prev^{-1} f)| against the previous accepted state.
  double cauchy_increment = 0.0;
  /// int <phi phi^*_{h0 f} - phi phi^*_{h0}, log f>.
  double monotonicity = 0.0;
  int newton_iterations = 0;
  double min_ritz = 0.0;
};

struct ContinuationState {
  double eps = 1.0;
  MatrixField s;
  MatrixField f;
  double residual = 0.0;
  DiagnosticsRecord diagnostics;
};

enum class RunStatus { converged, diverged, failed };
enum class FailureCause { none, divergence_cap, newton_min_step, linear_breakdown, polish_failure, step_limit };

std::string to_string(RunStatus s);
std::string to_string(FailureCause c);

/// Cached evaluation of L~ and its derivative at (eps, f).
class Linearization {
 public:
  Linearization(const PairProblem& problem, double eps, const MatrixField& f,
                const MatrixField* theta = nullptr);

  /// L~ in the h0-unitary frame.
  const MatrixField& residual() const { return residual_; }
  /// Hermitian part of f L~.
  MatrixField residual_hat() const;
  /// Hermitian h-frame residual f^{1/2} L~ f^{-1/2}.
  MatrixField residual_h() const;
  double residual_sup() const;

  /// d/dt Lhat(f + t dir) at t = 0 for Lhat = f L~.
  MatrixField apply_hat(const MatrixField& direction) const;
  /// Hermitian part of apply_hat: the Newton operator.
  MatrixField apply(const MatrixField& direction) const;
  /// Approximate inverse of apply.
  MatrixField precondition(const MatrixField& r) const;
  /// Converts a Newton correction df into ds = dlog(f)[df].
  MatrixField to_log_step(const MatrixField& df) const;

 private:
  const PairProblem* problem_;
  const MatrixField* theta_;
  double eps_;
  MatrixField f_;
  MatrixField residual_;
  std::vector<fiber::HermEig> f_eig_;
  MatrixField f_sqrt_;
  MatrixField f_inv_sqrt_;
  MatrixField f_inv_;
  std::optional<ChernConnection> chern_;
  MatrixField theta_ref_;
  double sigma_ = 1.0;
};

/// Background Higgs bracket in the h0 frame: c [Theta~, f^{-1} Theta~^* f].
MatrixField higgs_bracket(const PairProblem& problem, const MatrixField& theta_raw, const MatrixField& f);

/// Re-bases the problem at the raw starting metric h (Gram field): returns
/// the problem with h0 = h e^{K0_h} and f1 = e^{-K0_h} in its frame.
std::pair<PairProblem, MatrixField> initial_gauge(const PairProblem& p, const MatrixField& start,
                                                  const MatrixField* theta = nullptr);

/// Hermitian h-frame residual of L_eps(f).
MatrixField residual_L(const PairProblem& p, double eps, const MatrixField& f, const MatrixField* theta = nullptr);
/// Lhat = f L~ (not symmetrized).
MatrixField residual_hat(const PairProblem& p, double eps, const MatrixField& f, const MatrixField* theta = nullptr);
MatrixField linearization_apply(const PairProblem& p, double eps, const MatrixField& f, const MatrixField& direction,
                                const MatrixField* theta = nullptr);

struct NewtonOutcome {
  bool converged = false;
  FailureCause cause = FailureCause::none;
  ContinuationState state;
  int iterations = 0;
  std::string message;
};

/// Damped Newton in s = log f at fixed eps from s_init.
NewtonOutcome newton_solve_at(const PairProblem& p, double eps, const MatrixField& s_init,
                              const ContinuationConfig& cfg, const MatrixField* theta = nullptr);

struct EnergyIdentity {
  /// int <L~, s> - eps |s|^2 (equals -eps |s|^2 at a solution).
  double lhs = 0.0;
  /// int <K0_f, s> + int <Psi(s)(dbar s), dbar s>.
  double rhs = 0.0;
  double gap = 0.0;
  double scale = 0.0;
};

/// `log_f`, when given, is used for s instead of log(f) (it avoids the
/// clamp of herm_log for states far from the reference).
EnergyIdentity energy_identity(const PairProblem& p, double eps, const MatrixField& f,
                               const MatrixField* theta = nullptr, const MatrixField* log_f = nullptr);

/// Fills the diagnostics of an accepted state; `previous` feeds the Cauchy
/// increment.
DiagnosticsRecord diagnostics_check(const ContinuationState& state, const PairProblem& p,
                                    const ContinuationState* previous = nullptr,
                                    const MatrixField* theta = nullptr, int ritz_steps = 0);

/// Integrated |c tr(M dbar s) - c sum Psi(l_i, l_j) |(ds)_ij|^2| for
/// M = f^{-1} d f, s = log f, on a flat frame.
double nie_zhang_check(const Geometry& g, const MatrixField& f);

struct TraceRow {
  double eps = 0.0;
  double residual_sup = 0.0;
  DiagnosticsRecord diagnostics;
};

struct SolveReport {
  RunStatus status = RunStatus::failed;
  FailureCause cause = FailureCause::none;
  std::string message;
  std::vector<TraceRow> trace;
  std::optional<PairProblem> problem;  // gauged problem
  std::optional<ContinuationState> final_state;
  /// Raw-frame Gram matrix of the final metric.
  std::optional<MatrixField> final_metric;
  double final_residual = 0.0;
  double final_sup_log_f = 0.0;
  /// Last eps reached (accepted) before finishing or failing.
  double eps_reached = 1.0;
  /// Largest sup|log f| seen.
  double max_sup_log_f = 0.0;
  /// Largest L2 norm of log f over accepted eps > 0 states.
  double max_l2_log_f = 0.0;
  int newton_total = 0;
  double wall_seconds = 0.0;
  /// Diagnostics beyond slack on some accepted state.
  bool flagged = false;
};

/// Full continuation from the raw starting metric `start` (identity when
/// null).
SolveReport run_continuation(const PairProblem& p, const ContinuationConfig& cfg, const MatrixField* theta = nullptr,
                             const MatrixField* start = nullptr);

/// Sup distance between the final raw metrics of two runs started at h_a
/// and h_b. Throws std::runtime_error if either run fails.
double uniqueness_probe(const PairProblem& p, const ContinuationConfig& cfg, const MatrixField& h_a,
                        const MatrixField& h_b);

}  // namespace vortex
