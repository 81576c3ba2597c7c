#include "vortex/fiber.hpp"

#include <cmath>
#include <sstream>

namespace vortex::fiber {

CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

double frobenius(const CMat& a) { return a.norm(); }

double hermitian_defect(const CMat& a) {
  return (a - a.adjoint()).norm() / std::max(1.0, a.norm());
}

HermEig herm_eig(const CMat& s) {
  if (s.rows() == 1) {
    return {RVec::Constant(1, s(0, 0).real()), CMat::Identity(1, 1)};
  }
  Eigen::SelfAdjointEigenSolver<CMat> solver(hermitian_part(s));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMat from_eig(const HermEig& e, const std::function<double(double)>& g) {
  const auto n = e.values.size();
  RVec mapped(n);
  for (Eigen::Index i = 0; i < n; ++i) mapped(i) = g(e.values(i));
  return e.vectors * mapped.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

CMat herm_exp(const CMat& s) {
  return from_eig(herm_eig(s), [](double x) { return std::exp(x); });
}

CMat herm_log(const CMat& f) {
  HermEig e = herm_eig(f);
  const double top = std::max(std::abs(e.values.maxCoeff()), 1.0);
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    double& v = e.values(i);
    if (v < kLogClamp) {
      if (kLogClamp - v > kLogClampReject * top) {
        std::ostringstream msg;
        msg << "herm_log: eigenvalue " << v << " is not positive";
        throw SingularMatrixError(msg.str());
      }
      v = kLogClamp;
    }
  }
  return from_eig(e, [](double x) { return std::log(x); });
}

CMat herm_sqrt(const CMat& f) {
  return from_eig(herm_eig(f), [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

CMat herm_inv_sqrt(const CMat& f) {
  HermEig e = herm_eig(f);
  if (e.values.minCoeff() <= 0.0) throw SingularMatrixError("herm_inv_sqrt: not positive definite");
  return from_eig(e, [](double x) { return 1.0 / std::sqrt(x); });
}

CMat expm_scaling_squaring(const CMat& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const CMat scaled = a / std::ldexp(1.0, squarings);
  CMat result = CMat::Identity(a.rows(), a.cols());
  CMat term = result;
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (term.norm() < 1e-18 * result.norm()) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

CMat funcalc_one(const std::function<double(double)>& g, const CMat& s) {
  return from_eig(herm_eig(s), g);
}

TwoVarKernel TwoVarKernel::constant(double c) {
  return TwoVarKernel([c](double, double) { return c; }, [c](double, double) { return c; });
}

TwoVarKernel TwoVarKernel::divided_difference(std::function<double(double)> g,
                                              std::function<double(double)> dg,
                                              std::function<double(double)> d2g) {
  return TwoVarKernel([g](double x, double y) { return (g(x) - g(y)) / (x - y); },
                      [dg, d2g](double x, double y) { return dg(x) + 0.5 * d2g(x) * (y - x); });
}

TwoVarKernel TwoVarKernel::psi() {
  return TwoVarKernel([](double x, double y) { return psi_kernel(x, y); },
                      [](double x, double y) { return psi_kernel(x, y); });
}

CMat funcalc_two(const TwoVarKernel& kernel, const HermEig& e, const CMat& a) {
  const auto n = e.values.size();
  CMat b = e.vectors.adjoint() * a * e.vectors;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) b(i, j) *= kernel(e.values(j), e.values(i));
  return e.vectors * b * e.vectors.adjoint();
}

CMat funcalc_two(const TwoVarKernel& kernel, const CMat& s, const CMat& a) {
  return funcalc_two(kernel, herm_eig(s), a);
}

double psi_kernel(double x, double y) {
  const double d = y - x;
  if (std::abs(d) < kTaylorGap) return 1.0 + d / 2.0 + d * d / 6.0;
  return std::expm1(d) / d;
}

double dlog_kernel(double x, double y) {
  const double d = y - x;
  if (std::abs(d) < kTaylorGap * std::max(1.0, x)) return 1.0 / x - d / (2.0 * x * x) + d * d / (3.0 * x * x * x);
  return (std::log(x) - std::log(y)) / (x - y);
}

double dexp_kernel(double x, double y) {
  const double d = y - x;
  if (std::abs(d) < kTaylorGap) return std::exp(x) * (1.0 + d / 2.0 + d * d / 6.0);
  return std::exp(x) * std::expm1(d) / d;
}

CMat dlog_apply(const HermEig& f_eig, const CMat& a) {
  const auto n = f_eig.values.size();
  if (n == 1) return a / f_eig.values(0);
  CMat b = f_eig.vectors.adjoint() * a * f_eig.vectors;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) b(i, j) *= dlog_kernel(f_eig.values(i), f_eig.values(j));
  return f_eig.vectors * b * f_eig.vectors.adjoint();
}

CMat phi_outer(const CVec& phi, const CMat& f, const CMat& h0) {
  // h(s, phi) = phi^* H0 f s, so the endomorphism is phi phi^* H0 f.
  return phi * (phi.adjoint() * h0 * f);
}

double h0_inner(const CMat& a, const CMat& b, const CMat& h0) {
  const CMat b_star = h0.inverse() * b.adjoint() * h0;
  return (a * b_star).trace().real();
}

CMat funcalc_h0(const std::function<double(double)>& g, const CMat& s, const CMat& h0) {
  // s is h0-self-adjoint; conjugate to the h0-unitary frame and back.
  const CMat root = herm_sqrt(h0);
  const CMat root_inv = herm_inv_sqrt(h0);
  return root_inv * funcalc_one(g, root * s * root_inv) * root;
}

double xi_path(const CVec& phi, const CMat& s, const CMat& h0, double t) {
  const CMat flow = funcalc_h0([t](double x) { return std::exp(t * x); }, s, h0);
  return h0_inner(phi_outer(phi, CMat::Identity(s.rows(), s.cols()), h0) * flow, s, h0);
}

CMat commutator(const CMat& a, const CMat& b) { return a * b - b * a; }

double higgs_xi(const CMat& theta, const CMat& s, double t, double c) {
  const HermEig e = herm_eig(s);
  const CMat plus = from_eig(e, [t](double x) { return std::exp(t * x); });
  const CMat minus = from_eig(e, [t](double x) { return std::exp(-t * x); });
  return c * (commutator(theta, minus * theta.adjoint() * plus) * s).trace().real();
}

double higgs_xi_derivative(const CMat& theta, const CMat& s, double t, double c) {
  const HermEig e = herm_eig(s);
  const CMat half = from_eig(e, [t](double x) { return std::exp(0.5 * t * x); });
  const CMat half_inv = from_eig(e, [t](double x) { return std::exp(-0.5 * t * x); });
  return c * commutator(s, half * theta * half_inv).squaredNorm();
}

CMat higgs_bracket(const CMat& theta, const CMat& f, double c) {
  return c * commutator(theta, CMat(f.inverse() * theta.adjoint() * f));
}

CMat higgs_bracket_derivative(const CMat& theta, const CMat& f, const CMat& f_inv, const CMat& dir, double c) {
  const CMat star = theta.adjoint();
  return c * commutator(theta, CMat(-f_inv * dir * f_inv * star * f + f_inv * star * dir));
}

double higgs_theta_form(const CMat& theta, const CMat& f, const CMat& eta, double c) {
  const HermEig e = herm_eig(f);
  const CMat root = from_eig(e, [](double x) { return std::sqrt(x); });
  const CMat inv_root = from_eig(e, [](double x) { return 1.0 / std::sqrt(x); });
  const CMat f_inv = from_eig(e, [](double x) { return 1.0 / x; });
  const CMat d = higgs_bracket_derivative(theta, f, f_inv, root * eta * root, c);
  return (root * d * inv_root * eta).trace().real();
}

}  // namespace vortex::fiber
