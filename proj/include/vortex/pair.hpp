// Holomorphic pair problem instances, Chern curvature of deformed metrics,
// and slope stability of split models.
//
// Frames. A problem is stored in a "raw" frame that is unitary for a raw
// reference metric h_raw. The reference metric of the problem is
// h0 = h_raw . G for a positive field G (identity unless the problem has
// been re-based by initial_gauge). Public operations that take or return a
// deformation f work in the h0-unitary frame obtained by conjugating with
// G^{1/2}, where f, log f and L_eps(f) f^{-1}-type quantities are ordinary
// Hermitian matrices. The metric h0 . f has raw Gram matrix
// H = G^{1/2} f G^{1/2}.
//
// End E is modelled with a periodic adjoint connection (torus only) and the
// background mean curvature i Lambda F_raw is carried as independent data;
// split models realize line degrees by constant curvature (torus) or by
// the linear-in-t weights of the Hopf line bundles L_lambda.
#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vortex/geometry.hpp"

namespace vortex {

/// Coordinate split model E = L_1 + ... + L_r.
struct SplitModel {
  std::vector<double> degrees;
  /// Index (0-based) of the summand containing phi.
  int phi_index = 0;
  /// Non-zero second fundamental form entries (i, j): dbar e_j has an
  /// e_i component, so any holomorphic sub-sum containing j contains i.
  std::vector<std::pair<int, int>> extensions;

  int rank() const { return static_cast<int>(degrees.size()); }
  double total_degree() const;
  double slope() const { return total_degree() / rank(); }
  void validate() const;
};

enum class Verdict { stable, boundary, unstable };
std::string to_string(Verdict v);

struct SubSum {
  std::vector<int> members;
  double degree = 0.0;
  double slope = 0.0;
  bool contains_phi = false;
};

struct StabilityReport {
  double mu_max = 0.0;
  double mu_min_phi = std::numeric_limits<double>::infinity();
  double volume = 0.0;
  double window_low = 0.0;
  double window_high = std::numeric_limits<double>::infinity();
  bool window_empty = false;
  std::optional<Verdict> verdict;
  std::vector<SubSum> audited;
  std::string scope_note;
};

double mu_M(const SplitModel& m, const Geometry& g);
double mu_m_phi(const SplitModel& m, const Geometry& g);
StabilityReport stability_window(const SplitModel& m, const Geometry& g);
Verdict classify(const SplitModel& m, const Geometry& g, double tau);
StabilityReport analyze(const SplitModel& m, const Geometry& g, double tau);

/// lambda rank(E) (mu(E) - tau Vol / 4 pi).
double nu_case1(double lambda, const SplitModel& m, const Geometry& g, double tau);

struct ChainStep {
  double slope = 0.0;
  int rank = 0;
};

/// lambda_l rank E (mu(E) - x) - sum_i (lambda_{i+1} - lambda_i) rank E_i (mu(E_i) - x),
/// x = tau Vol / 4 pi, for ascending eigenvalues lambda_1 < ... < lambda_l and a
/// chain E_1 c ... c E_{l-1} described by its slopes and ranks.
double nu_case2(const std::vector<double>& eigenvalues, const std::vector<ChainStep>& chain,
                const SplitModel& m, const Geometry& g, double tau);

struct PairOptions {
  /// (1,0)-part a of the adjoint background connection on End E (raw
  /// frame, torus only); the (0,1)-part is -a^*.
  std::optional<MatrixField> connection;
  double holomorphic_tolerance = 1e-8;
  /// Overrides the numerically computed holomorphic defect of phi, for
  /// sections given by closed-form representatives.
  std::optional<double> section_defect;
  std::optional<SplitModel> model;
};

class PairProblem {
 public:
  PairProblem(GeometryPtr geometry, MatrixField raw_curvature, SectionField phi, double tau,
              PairOptions options = {});

  const Geometry& geometry() const { return *geometry_; }
  const GeometryPtr& geometry_ptr() const { return geometry_; }
  int rank() const { return rank_; }
  double tau() const { return tau_; }
  const MatrixField& raw_curvature() const { return raw_curvature_; }
  const SectionField& raw_phi() const { return phi_; }
  const std::optional<MatrixField>& connection() const { return connection_; }
  const std::optional<SplitModel>& model() const { return model_; }
  double holomorphic_defect() const { return holomorphic_defect_; }
  double holomorphic_tolerance() const { return holomorphic_tolerance_; }

  bool rebased() const { return reference_.has_value(); }
  /// G with h0 = h_raw . G (identity when not re-based).
  MatrixField reference() const;

  /// Same holomorphic data with reference metric h_raw . reference.
  PairProblem with_reference(const MatrixField& reference) const;
  PairProblem with_tau(double tau) const;

  /// H = G^{1/2} f G^{1/2} for f in the h0-unitary frame.
  MatrixField raw_metric(const MatrixField& f) const;
  /// Inverse of raw_metric: G^{-1/2} H G^{-1/2}.
  MatrixField reference_metric(const MatrixField& raw) const;
  /// Conjugates a raw-frame endomorphism field into the h0-unitary frame.
  MatrixField to_reference_frame(const MatrixField& raw) const;
  MatrixField from_reference_frame(const MatrixField& f) const;
  /// phi in the h0-unitary frame.
  SectionField phi() const;

  /// i Lambda F_{h0} in the h0-unitary frame.
  MatrixField background_curvature() const;
  /// phi (x) phi^*_{h0} in the h0-unitary frame.
  MatrixField phi_outer_reference() const;
  double phi_norm_squared() const;
  /// Degree from the trace of the background curvature.
  double degree() const;

  /// d0 on End E in the raw frame: du + [a, u], on form points.
  MatrixField d0_raw(const MatrixField& u) const;
  /// i Lambda dbar_E m for an End E valued (1,0)-form on form points.
  MatrixField lambda_dbar_raw(const MatrixField& m) const;
  /// (1,0)-part of the h0 Chern connection on End E, in the h0 frame.
  /// On the Hopf reduction only rank 1 or an un-based flat problem is
  /// supported.
  MatrixField d0_reference(const MatrixField& u) const;

 private:
  GeometryPtr geometry_;
  int rank_ = 0;
  double tau_ = 0.0;
  MatrixField raw_curvature_;
  SectionField phi_;
  std::optional<MatrixField> connection_;
  std::optional<SplitModel> model_;
  double holomorphic_defect_ = 0.0;
  double holomorphic_tolerance_ = 0.0;
  std::optional<MatrixField> reference_;
  std::optional<MatrixField> reference_sqrt_;
  std::optional<MatrixField> reference_inv_sqrt_;
};

/// Chern connection form M = H^{-1} d0 H of a raw metric H, on form points,
/// with its linearization in H. On the torus M is evaluated pointwise with
/// spectral derivatives; on the Hopf reduction M_{k+1/2} =
/// log(H_k^{-1} H_{k+1}) / dt, whose trace is exactly the discrete
/// derivative of log det H.
class ChernConnection {
 public:
  ChernConnection(const PairProblem& problem, const MatrixField& metric);

  const MatrixField& form() const { return form_; }
  /// i Lambda dbar_E (H^{-1} d0 H), the curvature change F_H - F_raw.
  MatrixField curvature_update() const;
  /// Derivative of the connection form along a raw metric direction dH.
  MatrixField linearize(const MatrixField& direction) const;

 private:
  const PairProblem* problem_;
  MatrixField metric_;
  MatrixField metric_inv_;
  MatrixField d_metric_;  // torus: d0 H on nodes
  MatrixField form_;
  // Hopf edge data: X = H_k^{-1} H_{k+1} = S diag(mu) S^{-1}.
  std::vector<CMat> edge_s_;
  std::vector<CMat> edge_s_inv_;
  std::vector<CMat> edge_kernel_;
};

/// K0_h = i Lambda F_h + phi (x) phi^*_h / 2 - tau/2 id for h = h0 . f, in
/// the h0-unitary frame.
MatrixField mean_curvature(const PairProblem& problem, const MatrixField& f);

/// Returns true when no non-zero constant endomorphism commuting with the
/// background structure annihilates phi.
bool phi_simple_check(const PairProblem& problem, double tolerance = 1e-9);

// --- instance builders -------------------------------------------------

/// Theta function theta(z) = sum_n exp(-pi n^2 + 2 pi i n z) on C/(Z + iZ).
Complex theta_function(Complex z);

/// Split model instance. Per summand:
///  torus: constant curvature 2 pi d / Vol; a non-zero phi amplitude a is
///    the constant section a (d = 0) or a theta(z)^d (d a positive integer,
///    unit period), written in the unitary frame of exp(-2 pi d y^2).
///  hopf: curvature i Lambda F = 2 pi d / Vol = log2(lambda) for the deck
///    weight lambda; phi amplitude a is the section a z_1^k (lambda = 2^k),
///    entering through its U(2)-averaged density |a|^2 / (k + 1).
PairProblem make_split_pair(const GeometryPtr& geometry, const SplitModel& model,
                            const std::vector<Complex>& phi_amplitudes, double tau);

/// Degree of the Hopf line bundle L_lambda with the standard metric.
double hopf_line_degree(const Geometry& g, double deck_weight);

}  // namespace vortex
