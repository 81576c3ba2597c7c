// Restarted GMRES and Arnoldi-Ritz probes on matrix fields, with the real
// inner product Re tr(A B^*). Operators act on Hermitian fields, so every
// Krylov coefficient is real.
#pragma once

#include <functional>

#include "vortex/field.hpp"

namespace vortex {

using FieldOperator = std::function<MatrixField(const MatrixField&)>;

struct GmresOptions {
  double relative_tolerance = 1e-8;
  int restart = 40;
  int max_iterations = 600;
};

struct GmresResult {
  MatrixField solution;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  /// Lucky breakdown with a non-zero residual: the Krylov space is invariant
  /// but does not contain the right-hand side.
  bool breakdown = false;
};

/// Solves op(x) = rhs with right preconditioning by `precond` (identity when
/// empty), starting from zero.
GmresResult gmres(const FieldOperator& op, const MatrixField& rhs, const FieldOperator& precond,
                  const GmresOptions& options);

/// Smallest modulus among the Ritz values of `op` after `steps` Arnoldi
/// steps from `start`.
double smallest_ritz(const FieldOperator& op, const MatrixField& start, int steps);

}  // namespace vortex
