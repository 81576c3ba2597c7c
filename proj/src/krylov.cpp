#include "vortex/krylov.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace vortex {

namespace {

void givens(double a, double b, double& c, double& s) {
  if (b == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  const double r = std::hypot(a, b);
  c = a / r;
  s = b / r;
}

}  // namespace

GmresResult gmres(const FieldOperator& op, const MatrixField& rhs, const FieldOperator& precond,
                  const GmresOptions& options) {
  GmresResult out{MatrixField(rhs.points(), rhs.rank())};
  const double bnorm = std::sqrt(rhs.dot(rhs));
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  const int m = std::max(1, options.restart);
  const double target = options.relative_tolerance * bnorm;
  MatrixField r = rhs;
  double beta = bnorm;

  while (out.iterations < options.max_iterations) {
    std::vector<MatrixField> v;
    std::vector<MatrixField> z;
    v.reserve(m + 1);
    v.push_back((1.0 / beta) * r);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
    std::vector<double> cs(m), sn(m);
    g(0) = beta;
    int k = 0;
    bool lucky = false;
    for (; k < m && out.iterations < options.max_iterations; ++k) {
      ++out.iterations;
      z.push_back(precond ? precond(v[k]) : v[k]);
      MatrixField w = op(z[k]);
      // modified Gram-Schmidt with one reorthogonalization pass
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= k; ++i) {
          const double hij = w.dot(v[i]);
          h(i, k) += hij;
          w.axpy(-hij, v[i]);
        }
      const double wnorm = std::sqrt(w.dot(w));
      h(k + 1, k) = wnorm;
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
        h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
        h(i, k) = t;
      }
      givens(h(k, k), h(k + 1, k), cs[k], sn[k]);
      h(k, k) = cs[k] * h(k, k) + sn[k] * h(k + 1, k);
      h(k + 1, k) = 0.0;
      g(k + 1) = -sn[k] * g(k);
      g(k) = cs[k] * g(k);
      if (std::abs(g(k + 1)) <= target) {
        ++k;
        break;
      }
      if (wnorm <= 1e-14 * bnorm) {
        lucky = true;
        ++k;
        break;
      }
      v.push_back((1.0 / wnorm) * w);
    }
    // back substitution on the triangular k x k system
    Eigen::VectorXd y = Eigen::VectorXd::Zero(k);
    for (int i = k - 1; i >= 0; --i) {
      double sum = g(i);
      for (int j = i + 1; j < k; ++j) sum -= h(i, j) * y(j);
      y(i) = h(i, i) != 0.0 ? sum / h(i, i) : 0.0;
    }
    for (int i = 0; i < k; ++i) out.solution.axpy(y(i), z[i]);
    r = rhs - op(out.solution);
    beta = std::sqrt(r.dot(r));
    out.relative_residual = beta / bnorm;
    if (beta <= target) {
      out.converged = true;
      return out;
    }
    if (lucky) {
      out.breakdown = true;
      return out;
    }
  }
  return out;
}

double smallest_ritz(const FieldOperator& op, const MatrixField& start, int steps) {
  const double norm = std::sqrt(start.dot(start));
  if (norm == 0.0 || steps <= 0) return std::numeric_limits<double>::quiet_NaN();
  std::vector<MatrixField> v{(1.0 / norm) * start};
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(steps + 1, steps);
  int k = 0;
  for (; k < steps; ++k) {
    MatrixField w = op(v[k]);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= k; ++i) {
        const double hij = w.dot(v[i]);
        h(i, k) += hij;
        w.axpy(-hij, v[i]);
      }
    const double wnorm = std::sqrt(w.dot(w));
    h(k + 1, k) = wnorm;
    if (wnorm < 1e-13) {
      ++k;
      break;
    }
    v.push_back((1.0 / wnorm) * w);
  }
  const Eigen::MatrixXd square = h.topLeftCorner(k, k);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(square, false);
  return solver.eigenvalues().cwiseAbs().minCoeff();
}

}  // namespace vortex
