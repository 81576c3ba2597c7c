// Higgs bundle variant: L_eps(f) = i Lambda (F_h + [theta, theta^*_h])
// - lambda id + eps log f, solved with the continuation machinery (the
// pair problem underneath has phi = 0 and tau = 2 lambda).
#pragma once

#include <vector>

#include "vortex/continuation.hpp"

namespace vortex {

struct HiggsOptions {
  /// (1,0)-part of the adjoint background connection (torus only).
  std::optional<MatrixField> connection;
  double holomorphic_tolerance = 1e-8;
};

class HiggsProblem {
 public:
  /// theta holds the dz (torus) or e (Hopf) coefficient of the Higgs field
  /// in the raw frame.
  HiggsProblem(GeometryPtr geometry, MatrixField raw_curvature, MatrixField theta, double lambda,
               HiggsOptions options = {});

  const PairProblem& pair() const { return pair_; }
  const Geometry& geometry() const { return pair_.geometry(); }
  int rank() const { return pair_.rank(); }
  const MatrixField& theta() const { return theta_; }
  double lambda() const { return lambda_; }
  double holomorphic_defect() const { return holomorphic_defect_; }

 private:
  PairProblem pair_;
  MatrixField theta_;
  double lambda_ = 0.0;
  double holomorphic_defect_ = 0.0;
};

/// Split background with constant curvature 2 pi d_i / Vol and a constant
/// Higgs coefficient.
HiggsProblem make_higgs_split(const GeometryPtr& geometry, const std::vector<double>& degrees, const CMat& theta,
                              double lambda);

/// 2 pi deg / (r Vol): the only lambda compatible with a solution.
double higgs_lambda_from_degree(const HiggsProblem& hp);

/// c [Theta, f^{-1} Theta^* f] in the reference frame (trace-free, Hermitian
/// in the h-frame).
MatrixField bracket_curvature(const HiggsProblem& hp, const MatrixField& f);
MatrixField residual_higgs(const HiggsProblem& hp, double eps, const MatrixField& f);
MatrixField residual_higgs_hat(const HiggsProblem& hp, double eps, const MatrixField& f);
MatrixField linearization_higgs_apply(const HiggsProblem& hp, double eps, const MatrixField& f,
                                      const MatrixField& direction);

/// Minimum over probes and points of the Theta-form
/// Re tr(f^{1/2} D[f^{1/2} eta f^{1/2}] f^{-1/2} eta).
double higgs_semipositivity_check(const HiggsProblem& hp, const MatrixField& f, const std::vector<MatrixField>& probes);

/// |int tr(i Lambda F_h + bracket) - lambda r Vol| at f.
double higgs_lambda_consistency(const HiggsProblem& hp, const MatrixField& f);

SolveReport run_higgs(const HiggsProblem& hp, const ContinuationConfig& cfg);

}  // namespace vortex
