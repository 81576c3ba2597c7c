// Discretized compact Gauduchon base manifolds.
//
// Two backends share one interface:
//
//  * torus: the flat square torus C/(L Z + i L Z) with omega = dx ^ dy,
//    spectral (Fourier) differentiation. Forms live on the grid nodes.
//  * hopf: the U(2)-invariant reduction of the Hopf surface
//    (C^2 \ 0)/(z ~ 2z) with omega = |z|^-2 sum_j i dz_j ^ dzbar_j, in the
//    variable t = log|z|^2 over one period [0, log 4). Invariant (1,0)- and
//    (0,1)-forms are multiples of dt-parts e = d t, ebar = dbar t and live
//    on the cell edges t_{k+1/2}; second-order centered differences.
//
// Conventions (both backends):
//   P u = i Lambda dbar d u,  with P = -Delta/2 on the torus and
//   P u = -(u'' + u') on the Hopf reduction;
//   i Lambda (a e ^ b ebar) = c a b with c = contraction();
//   dvol = omega^n / n!, so deg = (1/2pi) int tr(i Lambda F) dvol.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>

#include "vortex/field.hpp"

namespace vortex {

enum class BackendKind { torus, hopf };

std::string to_string(BackendKind kind);

/// A (1,1)-form in reduced coordinates: `main` multiplies ebar ^ e and
/// `torsion` multiplies dbar e (non-zero only on the Hopf reduction).
struct Form11 {
  ComplexField main;
  ComplexField torsion;
};

struct MatrixForm11 {
  MatrixField main;
  MatrixField torsion;
};

class Geometry {
 public:
  static std::shared_ptr<const Geometry> torus(int n, double period = 1.0, double lambda_sign = 1.0);
  static std::shared_ptr<const Geometry> hopf(int n, double lambda_sign = 1.0);

  BackendKind kind() const { return kind_; }
  int grid() const { return n_; }
  std::size_t points() const { return points_; }
  double spacing() const { return spacing_; }
  double period() const { return period_; }
  double cell_volume() const { return cell_volume_; }
  double volume() const { return cell_volume_ * static_cast<double>(points_); }
  /// i Lambda (e ^ ebar) for the reduced (1,0)/(0,1) basis.
  double contraction() const { return lambda_sign_ * contraction_; }
  /// i Lambda (dbar e); zero on the torus.
  double torsion_contraction() const { return lambda_sign_ * torsion_contraction_; }
  /// Truncation order of first derivatives (0 means spectral).
  int order() const { return kind_ == BackendKind::torus ? 0 : 2; }
  std::string convention() const;

  /// Node coordinates: (x, y) on the torus, (t, 0) on the Hopf reduction.
  std::array<double, 2> node(std::size_t p) const;
  /// Coordinates of the points where 1-form coefficients live.
  std::array<double, 2> form_point(std::size_t p) const;

  // Scalar operators. 1-form coefficients are returned on form points.
  ComplexField d(const ComplexField& u) const;
  ComplexField dbar(const ComplexField& u) const;
  /// dbar of a (1,0)-form m e, as a (1,1)-form on nodes.
  Form11 dbar_form(const ComplexField& m) const;
  /// i Lambda of a (1,1)-form.
  ComplexField lambda_contract(const Form11& alpha) const;
  /// i Lambda dbar (m e).
  ComplexField lambda_dbar(const ComplexField& m) const;
  /// P = i Lambda dbar d, evaluated directly from its symbol/stencil.
  ComplexField p_operator(const ComplexField& u) const;
  RealField p_operator(const RealField& u) const;
  /// (P + sigma)^{-1} rhs, sigma > 0.
  ComplexField solve_shifted(const ComplexField& rhs, double sigma) const;
  /// Interpolates node values to form points (identity on the torus).
  ComplexField to_form_points(const ComplexField& u) const;

  // Entrywise matrix versions.
  MatrixField d(const MatrixField& u) const;
  MatrixField dbar(const MatrixField& u) const;
  MatrixForm11 dbar_form(const MatrixField& m) const;
  MatrixField lambda_contract(const MatrixForm11& alpha) const;
  MatrixField lambda_dbar(const MatrixField& m) const;
  MatrixField p_operator(const MatrixField& u) const;
  MatrixField solve_shifted(const MatrixField& rhs, double sigma) const;
  MatrixField to_form_points(const MatrixField& u) const;

  double integrate(const RealField& u) const;
  Complex integrate(const ComplexField& u) const;
  /// (1/2pi) int u dvol for u = tr(i Lambda F).
  double degree(const RealField& trace_curvature) const;
  double degree(const ComplexField& trace_curvature) const;

  void check_shape(std::size_t points) const;

 private:
  Geometry() = default;
  void fft(ComplexField& data, bool inverse) const;
  /// Multiplies the spectrum of u by symbol(k) and transforms back.
  template <typename Symbol>
  ComplexField apply_symbol(const ComplexField& u, Symbol symbol) const;
  double wavenumber(int k, bool zero_nyquist) const;

  BackendKind kind_ = BackendKind::torus;
  int n_ = 0;
  std::size_t points_ = 0;
  double period_ = 1.0;
  double spacing_ = 0.0;
  double cell_volume_ = 0.0;
  double contraction_ = 1.0;
  double torsion_contraction_ = 0.0;
  double lambda_sign_ = 1.0;
};

using GeometryPtr = std::shared_ptr<const Geometry>;

/// Smooth periodic Hermitian field built from the lowest Fourier modes
/// (|k| <= 2 per direction) with normal coefficients scaled so the sup norm
/// is about `amplitude`. Deterministic in `seed`.
MatrixField smooth_random_field(const Geometry& g, int rank, std::uint64_t seed, double amplitude);

/// Hopf-surface measure constant: dvol = kHopfMeasure dt.
inline constexpr double kHopfMeasure = 39.47841760435743;  // 4 pi^2

}  // namespace vortex
