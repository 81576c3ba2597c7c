#include "vortex/higgs.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace vortex {

namespace {

PairProblem make_base(GeometryPtr geometry, MatrixField raw_curvature, double lambda, HiggsOptions& options) {
  const std::size_t n = raw_curvature.points();
  const int r = raw_curvature.rank();
  PairOptions po;
  po.connection = options.connection;
  po.holomorphic_tolerance = options.holomorphic_tolerance;
  return PairProblem(std::move(geometry), std::move(raw_curvature), SectionField(n, r), 2.0 * lambda, std::move(po));
}

}  // namespace

HiggsProblem::HiggsProblem(GeometryPtr geometry, MatrixField raw_curvature, MatrixField theta, double lambda,
                           HiggsOptions options)
    : pair_(make_base(std::move(geometry), std::move(raw_curvature), lambda, options)),
      theta_(std::move(theta)),
      lambda_(lambda) {
  const Geometry& g = pair_.geometry();
  g.check_shape(theta_.points());
  if (theta_.rank() != pair_.rank()) throw std::invalid_argument("HiggsProblem: theta rank mismatch");
  if (!std::isfinite(lambda_)) throw std::invalid_argument("HiggsProblem: lambda must be finite");
  if (g.kind() == BackendKind::hopf) {
    // dbar e has a non-zero torsion part, so only theta = 0 is holomorphic
    holomorphic_defect_ = theta_.sup_norm();
  } else {
    MatrixField db = g.dbar(theta_);
    if (pair_.connection()) {
      for (std::size_t p = 0; p < theta_.points(); ++p) {
        const CMat b = -pair_.connection()->at(p).adjoint();
        db.at(p) += fiber::commutator(b, theta_.at(p));
      }
    }
    holomorphic_defect_ = db.sup_norm();
  }
  if (holomorphic_defect_ > options.holomorphic_tolerance * std::max(1.0, theta_.sup_norm())) {
    std::ostringstream msg;
    msg << "HiggsProblem: theta is not holomorphic (defect " << holomorphic_defect_ << ")";
    throw std::invalid_argument(msg.str());
  }
}

HiggsProblem make_higgs_split(const GeometryPtr& geometry, const std::vector<double>& degrees, const CMat& theta,
                              double lambda) {
  const int r = static_cast<int>(degrees.size());
  if (r == 0 || theta.rows() != r || theta.cols() != r)
    throw std::invalid_argument("make_higgs_split: theta must be r x r");
  CMat curvature = CMat::Zero(r, r);
  for (int i = 0; i < r; ++i) curvature(i, i) = 2.0 * std::numbers::pi * degrees[i] / geometry->volume();
  const std::size_t n = geometry->points();
  return HiggsProblem(geometry, MatrixField::constant(n, curvature), MatrixField::constant(n, theta), lambda);
}

double higgs_lambda_from_degree(const HiggsProblem& hp) {
  return 2.0 * std::numbers::pi * hp.pair().degree() / (hp.rank() * hp.geometry().volume());
}

MatrixField bracket_curvature(const HiggsProblem& hp, const MatrixField& f) {
  return higgs_bracket(hp.pair(), hp.theta(), f);
}

MatrixField residual_higgs(const HiggsProblem& hp, double eps, const MatrixField& f) {
  return residual_L(hp.pair(), eps, f, &hp.theta());
}

MatrixField residual_higgs_hat(const HiggsProblem& hp, double eps, const MatrixField& f) {
  return residual_hat(hp.pair(), eps, f, &hp.theta());
}

MatrixField linearization_higgs_apply(const HiggsProblem& hp, double eps, const MatrixField& f,
                                      const MatrixField& direction) {
  return linearization_apply(hp.pair(), eps, f, direction, &hp.theta());
}

double higgs_semipositivity_check(const HiggsProblem& hp, const MatrixField& f, const std::vector<MatrixField>& probes) {
  const MatrixField theta = hp.pair().to_reference_frame(hp.theta());
  const double c = hp.geometry().contraction();
  double best = std::numeric_limits<double>::infinity();
  for (const MatrixField& eta : probes) {
    if (eta.points() != f.points() || eta.rank() != f.rank())
      throw std::invalid_argument("higgs_semipositivity_check: probe shape mismatch");
    for (std::size_t p = 0; p < f.points(); ++p)
      best = std::min(best, fiber::higgs_theta_form(theta.at(p), f.at(p), eta.at(p), c));
  }
  return best;
}

double higgs_lambda_consistency(const HiggsProblem& hp, const MatrixField& f) {
  MatrixField k = mean_curvature(hp.pair(), f);
  k += bracket_curvature(hp, f);
  // mean_curvature already subtracts lambda id
  return std::abs(hp.geometry().integrate(k.trace()).real());
}

SolveReport run_higgs(const HiggsProblem& hp, const ContinuationConfig& cfg) {
  return run_continuation(hp.pair(), cfg, &hp.theta());
}

}  // namespace vortex
