#include "vortex/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace vortex {

namespace {

constexpr double kPi = std::numbers::pi;

const Complex kI(0.0, 1.0);

}  // namespace

std::string to_string(BackendKind kind) { return kind == BackendKind::torus ? "torus" : "hopf"; }

GeometryPtr Geometry::torus(int n, double period, double lambda_sign) {
  if (n < 8 || n % 2 != 0) throw std::invalid_argument("torus backend needs an even grid size >= 8");
  if (!(period > 0.0)) throw std::invalid_argument("torus period must be positive");
  auto g = std::shared_ptr<Geometry>(new Geometry());
  g->kind_ = BackendKind::torus;
  g->n_ = n;
  g->points_ = static_cast<std::size_t>(n) * n;
  g->period_ = period;
  g->spacing_ = period / n;
  g->cell_volume_ = g->spacing_ * g->spacing_;
  // omega = dx^dy = (i/2) dz^dzbar, so i Lambda(dz ^ dzbar) = 2.
  g->contraction_ = 2.0;
  g->torsion_contraction_ = 0.0;
  g->lambda_sign_ = lambda_sign;
  return g;
}

GeometryPtr Geometry::hopf(int n, double lambda_sign) {
  if (n < 16) throw std::invalid_argument("hopf backend needs a grid size >= 16");
  auto g = std::shared_ptr<Geometry>(new Geometry());
  g->kind_ = BackendKind::hopf;
  g->n_ = n;
  g->points_ = static_cast<std::size_t>(n);
  g->period_ = std::log(4.0);
  g->spacing_ = g->period_ / n;
  // omega^2/2 = 4 dV_euclid / |z|^4 = 4 pi^2 dt after integrating over S^3.
  g->cell_volume_ = kHopfMeasure * g->spacing_;
  // With beta = i dt ^ dbar t: Lambda beta = 1, Lambda omega = 2, and
  // i ddbar t = omega - beta, hence i Lambda dbar d t = -1.
  g->contraction_ = 1.0;
  g->torsion_contraction_ = -1.0;
  g->lambda_sign_ = lambda_sign;
  return g;
}

std::string Geometry::convention() const {
  std::ostringstream out;
  if (kind_ == BackendKind::torus) {
    out << "flat torus, omega = dx^dy, period " << period_ << ", P = -Delta/2, i Lambda(dz^dzbar) = 2";
  } else {
    out << "Hopf surface U(2)-reduction, omega = |z|^-2 sum i dz^dzbar, t = log|z|^2 in [0, log 4), "
           "P = -(u'' + u'), dvol = 4 pi^2 dt";
  }
  if (lambda_sign_ != 1.0) out << " [Lambda sign " << lambda_sign_ << "]";
  return out.str();
}

std::array<double, 2> Geometry::node(std::size_t p) const {
  if (kind_ == BackendKind::torus) {
    const auto i = p % n_;
    const auto j = p / n_;
    return {static_cast<double>(i) * spacing_, static_cast<double>(j) * spacing_};
  }
  return {static_cast<double>(p) * spacing_, 0.0};
}

std::array<double, 2> Geometry::form_point(std::size_t p) const {
  if (kind_ == BackendKind::torus) return node(p);
  return {(static_cast<double>(p) + 0.5) * spacing_, 0.0};
}

void Geometry::check_shape(std::size_t points) const {
  if (points != points_) {
    std::ostringstream msg;
    msg << "field has " << points << " points, backend expects " << points_;
    throw std::invalid_argument(msg.str());
  }
}

void Geometry::fft(ComplexField& data, bool inverse) const {
  Eigen::FFT<double> engine;
  if (kind_ == BackendKind::hopf) {
    ComplexField out(data.size());
    if (inverse)
      engine.inv(out, data);
    else
      engine.fwd(out, data);
    data.swap(out);
    return;
  }
  ComplexField line(n_), out(n_);
  // rows: x varies fastest
  for (int j = 0; j < n_; ++j) {
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(j) * n_, n_, line.begin());
    if (inverse)
      engine.inv(out, line);
    else
      engine.fwd(out, line);
    std::copy_n(out.begin(), n_, data.begin() + static_cast<std::ptrdiff_t>(j) * n_);
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) line[j] = data[static_cast<std::size_t>(j) * n_ + i];
    if (inverse)
      engine.inv(out, line);
    else
      engine.fwd(out, line);
    for (int j = 0; j < n_; ++j) data[static_cast<std::size_t>(j) * n_ + i] = out[j];
  }
}

double Geometry::wavenumber(int k, bool zero_nyquist) const {
  if (zero_nyquist && 2 * k == n_) return 0.0;
  const int signed_k = (2 * k <= n_) ? k : k - n_;
  return 2.0 * kPi * signed_k / period_;
}

template <typename Symbol>
ComplexField Geometry::apply_symbol(const ComplexField& u, Symbol symbol) const {
  check_shape(u.size());
  ComplexField spec = u;
  fft(spec, false);
  if (kind_ == BackendKind::torus) {
    for (int j = 0; j < n_; ++j)
      for (int i = 0; i < n_; ++i) spec[static_cast<std::size_t>(j) * n_ + i] *= symbol(i, j);
  } else {
    for (int k = 0; k < n_; ++k) spec[k] *= symbol(k, 0);
  }
  fft(spec, true);
  return spec;
}

ComplexField Geometry::d(const ComplexField& u) const {
  if (kind_ == BackendKind::torus) {
    // d/dz = (d/dx - i d/dy) / 2
    return apply_symbol(u, [this](int i, int j) {
      return 0.5 * (kI * wavenumber(i, true) + wavenumber(j, true));
    });
  }
  check_shape(u.size());
  ComplexField out(n_);
  for (int k = 0; k < n_; ++k) out[k] = (u[(k + 1) % n_] - u[k]) / spacing_;
  return out;
}

ComplexField Geometry::dbar(const ComplexField& u) const {
  if (kind_ == BackendKind::torus) {
    // d/dzbar = (d/dx + i d/dy) / 2
    return apply_symbol(u, [this](int i, int j) {
      return 0.5 * (kI * wavenumber(i, true) - wavenumber(j, true));
    });
  }
  return d(u);
}

Form11 Geometry::dbar_form(const ComplexField& m) const {
  Form11 out;
  if (kind_ == BackendKind::torus) {
    out.main = dbar(m);
    out.torsion.assign(m.size(), Complex(0.0));
    return out;
  }
  check_shape(m.size());
  out.main.resize(n_);
  out.torsion.resize(n_);
  for (int k = 0; k < n_; ++k) {
    const Complex right = m[k];
    const Complex left = m[(k + n_ - 1) % n_];
    out.main[k] = (right - left) / spacing_;
    out.torsion[k] = 0.5 * (right + left);
  }
  return out;
}

ComplexField Geometry::lambda_contract(const Form11& alpha) const {
  check_shape(alpha.main.size());
  ComplexField out(alpha.main.size());
  const double c = contraction();
  const double ct = torsion_contraction();
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p] = -c * alpha.main[p];
    if (!alpha.torsion.empty()) out[p] += ct * alpha.torsion[p];
  }
  return out;
}

ComplexField Geometry::lambda_dbar(const ComplexField& m) const { return lambda_contract(dbar_form(m)); }

ComplexField Geometry::p_operator(const ComplexField& u) const {
  if (kind_ == BackendKind::torus) {
    return apply_symbol(u, [this](int i, int j) {
      const double kx = wavenumber(i, true);
      const double ky = wavenumber(j, true);
      return Complex(lambda_sign_ * 0.5 * (kx * kx + ky * ky), 0.0);
    });
  }
  check_shape(u.size());
  ComplexField out(n_);
  const double h = spacing_;
  for (int k = 0; k < n_; ++k) {
    const Complex up = u[(k + 1) % n_];
    const Complex dn = u[(k + n_ - 1) % n_];
    out[k] = -lambda_sign_ * ((up - 2.0 * u[k] + dn) / (h * h) + (up - dn) / (2.0 * h));
  }
  return out;
}

RealField Geometry::p_operator(const RealField& u) const {
  ComplexField z(u.begin(), u.end());
  const ComplexField pz = p_operator(z);
  RealField out(u.size());
  for (std::size_t p = 0; p < u.size(); ++p) out[p] = pz[p].real();
  return out;
}

ComplexField Geometry::solve_shifted(const ComplexField& rhs, double sigma) const {
  if (!(sigma > 0.0)) throw std::invalid_argument("solve_shifted: sigma must be positive");
  if (kind_ == BackendKind::torus) {
    return apply_symbol(rhs, [this, sigma](int i, int j) {
      const double kx = wavenumber(i, true);
      const double ky = wavenumber(j, true);
      return Complex(1.0 / (lambda_sign_ * 0.5 * (kx * kx + ky * ky) + sigma), 0.0);
    });
  }
  const double h = spacing_;
  return apply_symbol(rhs, [this, sigma, h](int k, int) {
    const double w = 2.0 * kPi * k / n_;
    const Complex symbol = -lambda_sign_ * Complex((2.0 * std::cos(w) - 2.0) / (h * h), std::sin(w) / h);
    return 1.0 / (symbol + sigma);
  });
}

ComplexField Geometry::to_form_points(const ComplexField& u) const {
  if (kind_ == BackendKind::torus) return u;
  check_shape(u.size());
  ComplexField out(n_);
  for (int k = 0; k < n_; ++k) out[k] = 0.5 * (u[k] + u[(k + 1) % n_]);
  return out;
}

namespace {

template <typename Op>
MatrixField entrywise(const MatrixField& u, Op op) {
  MatrixField out(u.points(), u.rank());
  for (int c = 0; c < u.rank(); ++c)
    for (int r = 0; r < u.rank(); ++r) out.set_entry(r, c, op(u.entry(r, c)));
  return out;
}

}  // namespace

MatrixField Geometry::d(const MatrixField& u) const {
  return entrywise(u, [this](const ComplexField& x) { return d(x); });
}

MatrixField Geometry::dbar(const MatrixField& u) const {
  return entrywise(u, [this](const ComplexField& x) { return dbar(x); });
}

MatrixForm11 Geometry::dbar_form(const MatrixField& m) const {
  MatrixForm11 out{MatrixField(m.points(), m.rank()), MatrixField(m.points(), m.rank())};
  for (int c = 0; c < m.rank(); ++c)
    for (int r = 0; r < m.rank(); ++r) {
      Form11 f = dbar_form(m.entry(r, c));
      out.main.set_entry(r, c, f.main);
      out.torsion.set_entry(r, c, f.torsion);
    }
  return out;
}

MatrixField Geometry::lambda_contract(const MatrixForm11& alpha) const {
  MatrixField out(alpha.main.points(), alpha.main.rank());
  for (int c = 0; c < out.rank(); ++c)
    for (int r = 0; r < out.rank(); ++r)
      out.set_entry(r, c, lambda_contract(Form11{alpha.main.entry(r, c), alpha.torsion.entry(r, c)}));
  return out;
}

MatrixField Geometry::lambda_dbar(const MatrixField& m) const {
  return entrywise(m, [this](const ComplexField& x) { return lambda_dbar(x); });
}

MatrixField Geometry::p_operator(const MatrixField& u) const {
  return entrywise(u, [this](const ComplexField& x) { return p_operator(x); });
}

MatrixField Geometry::solve_shifted(const MatrixField& rhs, double sigma) const {
  return entrywise(rhs, [this, sigma](const ComplexField& x) { return solve_shifted(x, sigma); });
}

MatrixField Geometry::to_form_points(const MatrixField& u) const {
  if (kind_ == BackendKind::torus) return u;
  return entrywise(u, [this](const ComplexField& x) { return to_form_points(x); });
}

double Geometry::integrate(const RealField& u) const {
  check_shape(u.size());
  double sum = 0.0;
  for (double v : u) sum += v;
  return sum * cell_volume_;
}

Complex Geometry::integrate(const ComplexField& u) const {
  check_shape(u.size());
  Complex sum(0.0);
  for (const Complex& v : u) sum += v;
  return sum * cell_volume_;
}

double Geometry::degree(const RealField& trace_curvature) const {
  return integrate(trace_curvature) / (2.0 * kPi);
}

double Geometry::degree(const ComplexField& trace_curvature) const {
  return integrate(trace_curvature).real() / (2.0 * kPi);
}

MatrixField smooth_random_field(const Geometry& g, int rank, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const std::size_t n = g.points();
  const double two_pi = 2.0 * std::numbers::pi;
  const double length = g.kind() == BackendKind::torus ? g.period() : g.spacing() * g.grid();
  MatrixField out(n, rank);
  for (int i = 0; i < rank; ++i)
    for (int j = i; j < rank; ++j) {
      ComplexField entry(n, Complex(0.0));
      const int ky_max = g.kind() == BackendKind::torus ? 2 : 0;
      for (int kx = -2; kx <= 2; ++kx)
        for (int ky = -ky_max; ky <= ky_max; ++ky) {
          const Complex coeff(normal(rng), normal(rng));
          for (std::size_t p = 0; p < n; ++p) {
            const auto [x, y] = g.node(p);
            entry[p] += coeff * std::exp(Complex(0.0, two_pi * (kx * x + ky * y) / length));
          }
        }
      for (std::size_t p = 0; p < n; ++p) {
        Complex v = entry[p];
        if (i == j) v = v.real();
        out.at(p)(i, j) = v;
        out.at(p)(j, i) = std::conj(v);
      }
    }
  const double sup = out.sup_norm();
  if (sup > 0.0) out *= amplitude / sup;
  return out;
}

}  // namespace vortex
