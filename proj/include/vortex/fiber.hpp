// Pointwise Hermitian linear algebra on a single fiber of End E.
//
// Everything here works on small dense complex matrices (rank r <= ~8).
// Matrices are assumed to be written in a frame that is unitary for the
// reference metric unless a function takes an explicit h0 argument.
#pragma once

#include <complex>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

namespace vortex {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace fiber {

/// Eigenvalues below this are clamped before taking logarithms.
inline constexpr double kLogClamp = 1e-14;
/// Relative clamping beyond this is reported as a singular input.
inline constexpr double kLogClampReject = 1e-10;
/// Divided differences switch to a Taylor expansion below this gap.
inline constexpr double kTaylorGap = 1e-6;

struct HermEig {
  RVec values;   // ascending
  CMat vectors;  // columns are orthonormal eigenvectors
};

/// Unitary eigendecomposition of the Hermitian part of `s`.
HermEig herm_eig(const CMat& s);

CMat hermitian_part(const CMat& a);
double frobenius(const CMat& a);
/// Relative distance from Hermitian, ||a - a^*|| / max(1, ||a||).
double hermitian_defect(const CMat& a);

CMat from_eig(const HermEig& e, const std::function<double(double)>& g);

CMat herm_exp(const CMat& s);
/// Principal logarithm of a positive-definite Hermitian matrix.
/// Throws SingularMatrixError when an eigenvalue is not positive.
CMat herm_log(const CMat& f);
CMat herm_sqrt(const CMat& f);
CMat herm_inv_sqrt(const CMat& f);

/// Reference exponential by scaling and squaring with a Taylor core,
/// valid for arbitrary square matrices. Used as an independent check.
CMat expm_scaling_squaring(const CMat& a);

/// One-variable functional calculus g(s) = sum g(lambda_i) e_i (x) theta^i.
CMat funcalc_one(const std::function<double(double)>& g, const CMat& s);

/// Real kernel F(x, y) with an explicit rule on and near the diagonal.
class TwoVarKernel {
 public:
  using Off = std::function<double(double, double)>;
  using Near = std::function<double(double, double)>;

  TwoVarKernel(Off off, Near near) : off_(std::move(off)), near_(std::move(near)) {}

  double operator()(double x, double y) const {
    return std::abs(x - y) < kTaylorGap ? near_(x, y) : off_(x, y);
  }

  /// Constant kernel F == c.
  static TwoVarKernel constant(double c);
  /// Divided difference (g(x)-g(y))/(x-y) with g'(x) + g''(x)(y-x)/2 near
  /// the diagonal.
  static TwoVarKernel divided_difference(std::function<double(double)> g,
                                         std::function<double(double)> dg,
                                         std::function<double(double)> d2g);
  static TwoVarKernel psi();

 private:
  Off off_;
  Near near_;
};

/// F(s)(A): in the eigenbasis of s, entry (i, j) of A is scaled by
/// F(lambda_j, lambda_i).
CMat funcalc_two(const TwoVarKernel& kernel, const CMat& s, const CMat& a);
CMat funcalc_two(const TwoVarKernel& kernel, const HermEig& e, const CMat& a);

/// (e^{y-x} - 1) / (y - x), equal to 1 on the diagonal.
double psi_kernel(double x, double y);

/// Divided difference of log on the positive axis.
double dlog_kernel(double x, double y);
/// Divided difference of exp.
double dexp_kernel(double x, double y);

/// Derivative of log at f in direction a, using a precomputed eigensystem
/// of f (eigenvalues must be positive).
CMat dlog_apply(const HermEig& f_eig, const CMat& a);

/// phi (x) phi^*_h for h = h0 . f, i.e. the endomorphism
/// s -> h0(f s, phi) phi. h0 is the Gram matrix of the reference metric.
CMat phi_outer(const CVec& phi, const CMat& f, const CMat& h0);

/// h0 inner product on End E, Re tr(a b^{*h0}).
double h0_inner(const CMat& a, const CMat& b, const CMat& h0);

/// Functional calculus for an h0-self-adjoint s given in an arbitrary frame.
CMat funcalc_h0(const std::function<double(double)>& g, const CMat& s, const CMat& h0);

/// xi(t) = h0(phi (x) phi^*_{h0} o e^{t s}, s).
double xi_path(const CVec& phi, const CMat& s, const CMat& h0, double t);

/// Higgs path xi(t) = c tr([theta, e^{-ts} theta^* e^{ts}] s) for
/// a unitary frame; c is the contraction constant of the base metric.
double higgs_xi(const CMat& theta, const CMat& s, double t, double c = 1.0);
/// Closed-form derivative c |[s, e^{ts/2} theta e^{-ts/2}]|^2.
double higgs_xi_derivative(const CMat& theta, const CMat& s, double t, double c = 1.0);

CMat commutator(const CMat& a, const CMat& b);

/// c [theta, f^{-1} theta^* f]: i Lambda [theta, theta^*_h] for h = h0 f in
/// an h0-unitary frame.
CMat higgs_bracket(const CMat& theta, const CMat& f, double c);
/// Derivative of higgs_bracket in f along dir (f_inv = f^{-1}).
CMat higgs_bracket_derivative(const CMat& theta, const CMat& f, const CMat& f_inv, const CMat& dir, double c);
/// Re tr(f^{1/2} D[f^{1/2} eta f^{1/2}] f^{-1/2} eta) for D the bracket
/// derivative; equals c |[f^{1/2} theta f^{-1/2}, eta]|^2.
double higgs_theta_form(const CMat& theta, const CMat& f, const CMat& eta, double c);

}  // namespace fiber
}  // namespace vortex
