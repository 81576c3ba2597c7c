#include "vortex/pair.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace vortex {

namespace {

constexpr double kPi = std::numbers::pi;

double window_scale(const Geometry& g) { return 4.0 * kPi / g.volume(); }

bool admissible(const SplitModel& m, unsigned mask) {
  for (const auto& [i, j] : m.extensions) {
    const bool has_j = mask & (1u << j);
    const bool has_i = mask & (1u << i);
    if (has_j && !has_i) return false;
  }
  return true;
}

std::vector<SubSum> enumerate(const SplitModel& m) {
  m.validate();
  const int r = m.rank();
  std::vector<SubSum> out;
  for (unsigned mask = 1; mask < (1u << r); ++mask) {
    if (!admissible(m, mask)) continue;
    SubSum s;
    for (int i = 0; i < r; ++i)
      if (mask & (1u << i)) {
        s.members.push_back(i);
        s.degree += m.degrees[i];
      }
    s.slope = s.degree / static_cast<double>(s.members.size());
    s.contains_phi = mask & (1u << m.phi_index);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

double SplitModel::total_degree() const {
  double sum = 0.0;
  for (double d : degrees) sum += d;
  return sum;
}

void SplitModel::validate() const {
  if (degrees.empty()) throw std::invalid_argument("split model has no summands");
  if (degrees.size() > 16) throw std::invalid_argument("split model rank above 16 is not supported");
  if (phi_index < 0 || phi_index >= rank()) throw std::invalid_argument("phi summand index out of range");
  for (const auto& [i, j] : extensions)
    if (i < 0 || j < 0 || i >= rank() || j >= rank() || i == j)
      throw std::invalid_argument("extension entry out of range");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "tau-stable";
    case Verdict::boundary: return "boundary";
    case Verdict::unstable: return "unstable";
  }
  return "?";
}

double mu_M(const SplitModel& m, const Geometry&) {
  double best = -std::numeric_limits<double>::infinity();
  for (const SubSum& s : enumerate(m)) best = std::max(best, s.slope);
  return best;
}

double mu_m_phi(const SplitModel& m, const Geometry&) {
  const double total = m.total_degree();
  const int r = m.rank();
  double best = std::numeric_limits<double>::infinity();
  for (const SubSum& s : enumerate(m)) {
    const int k = static_cast<int>(s.members.size());
    if (!s.contains_phi || k == r) continue;
    best = std::min(best, (total - s.degree) / (r - k));
  }
  return best;
}

StabilityReport stability_window(const SplitModel& m, const Geometry& g) {
  StabilityReport rep;
  rep.audited = enumerate(m);
  rep.mu_max = mu_M(m, g);
  rep.mu_min_phi = mu_m_phi(m, g);
  rep.volume = g.volume();
  rep.window_low = window_scale(g) * rep.mu_max;
  rep.window_high = std::isinf(rep.mu_min_phi) ? rep.mu_min_phi : window_scale(g) * rep.mu_min_phi;
  rep.window_empty = rep.mu_max >= rep.mu_min_phi;
  rep.scope_note = "audited coordinate sub-sums of the split model only; other subsheaves are not enumerated";
  return rep;
}

Verdict classify(const SplitModel& m, const Geometry& g, double tau) {
  const double x = tau * g.volume() / (4.0 * kPi);
  const double lo = mu_M(m, g);
  const double hi = mu_m_phi(m, g);
  const double tol = 1e-9 * std::max(1.0, std::abs(x));
  if (std::abs(x - lo) <= tol || (std::isfinite(hi) && std::abs(x - hi) <= tol)) return Verdict::boundary;
  if (lo < x && x < hi) return Verdict::stable;
  return Verdict::unstable;
}

StabilityReport analyze(const SplitModel& m, const Geometry& g, double tau) {
  StabilityReport rep = stability_window(m, g);
  rep.verdict = classify(m, g, tau);
  return rep;
}

double nu_case1(double lambda, const SplitModel& m, const Geometry& g, double tau) {
  const double x = tau * g.volume() / (4.0 * kPi);
  return lambda * m.rank() * (m.slope() - x);
}

double nu_case2(const std::vector<double>& eigenvalues, const std::vector<ChainStep>& chain,
                const SplitModel& m, const Geometry& g, double tau) {
  if (eigenvalues.empty() || chain.size() + 1 != eigenvalues.size())
    throw std::invalid_argument("nu_case2: need one chain step per eigenvalue gap");
  for (std::size_t i = 1; i < eigenvalues.size(); ++i)
    if (eigenvalues[i] < eigenvalues[i - 1]) throw std::invalid_argument("nu_case2: eigenvalues must ascend");
  const double x = tau * g.volume() / (4.0 * kPi);
  double nu = eigenvalues.back() * m.rank() * (m.slope() - x);
  for (std::size_t i = 0; i < chain.size(); ++i)
    nu -= (eigenvalues[i + 1] - eigenvalues[i]) * chain[i].rank * (chain[i].slope - x);
  return nu;
}

// --- PairProblem --------------------------------------------------------

PairProblem::PairProblem(GeometryPtr geometry, MatrixField raw_curvature, SectionField phi, double tau,
                         PairOptions options)
    : geometry_(std::move(geometry)),
      rank_(raw_curvature.rank()),
      tau_(tau),
      raw_curvature_(std::move(raw_curvature)),
      phi_(std::move(phi)),
      connection_(std::move(options.connection)),
      model_(std::move(options.model)),
      holomorphic_tolerance_(options.holomorphic_tolerance) {
  if (!geometry_) throw std::invalid_argument("PairProblem: missing geometry");
  geometry_->check_shape(raw_curvature_.points());
  geometry_->check_shape(phi_.points());
  if (phi_.rank() != rank_) throw std::invalid_argument("PairProblem: phi rank differs from bundle rank");
  if (!std::isfinite(tau_)) throw std::invalid_argument("PairProblem: tau must be finite");
  if (raw_curvature_.hermitian_defect() > 1e-10)
    throw std::invalid_argument("PairProblem: background curvature is not Hermitian");
  if (connection_) {
    if (geometry_->kind() != BackendKind::torus)
      throw std::invalid_argument("PairProblem: background connections are supported on the torus only");
    if (connection_->rank() != rank_) throw std::invalid_argument("PairProblem: connection rank mismatch");
    geometry_->check_shape(connection_->points());
  }

  if (options.section_defect) {
    holomorphic_defect_ = *options.section_defect;
  } else {
    double worst = 0.0;
    std::vector<ComplexField> dbar_phi(rank_);
    for (int i = 0; i < rank_; ++i) dbar_phi[i] = geometry_->dbar(phi_.component(i));
    for (std::size_t p = 0; p < phi_.points(); ++p) {
      CVec v(rank_);
      for (int i = 0; i < rank_; ++i) v(i) = dbar_phi[i][p];
      if (connection_) v -= connection_->at(p).adjoint() * phi_.at(p);
      worst = std::max(worst, v.norm());
    }
    holomorphic_defect_ = worst;
  }
  if (holomorphic_defect_ > holomorphic_tolerance_ * std::max(1.0, phi_.sup_norm())) {
    std::ostringstream msg;
    msg << "PairProblem: phi is not holomorphic (defect " << holomorphic_defect_ << ")";
    throw std::invalid_argument(msg.str());
  }
  if (model_) {
    model_->validate();
    if (model_->rank() != rank_) throw std::invalid_argument("PairProblem: split model rank mismatch");
    const double deg = degree();
    if (std::abs(deg - model_->total_degree()) > 1e-8 * std::max(1.0, std::abs(deg)))
      throw std::invalid_argument("PairProblem: declared degrees disagree with the background curvature");
  }
}

MatrixField PairProblem::reference() const {
  return reference_ ? *reference_ : MatrixField::identity(geometry_->points(), rank_);
}

PairProblem PairProblem::with_reference(const MatrixField& reference) const {
  PairProblem out = *this;
  out.reference_ = reference;
  out.reference_sqrt_ = reference.map([](const CMat& g) { return fiber::herm_sqrt(g); });
  out.reference_inv_sqrt_ = reference.map([](const CMat& g) { return fiber::herm_inv_sqrt(g); });
  return out;
}

PairProblem PairProblem::with_tau(double tau) const {
  PairProblem out = *this;
  out.tau_ = tau;
  return out;
}

MatrixField PairProblem::raw_metric(const MatrixField& f) const {
  if (!reference_) return f;
  return MatrixField::zip(*reference_sqrt_, f, [](const CMat& r, const CMat& x) { return CMat(r * x * r); });
}

MatrixField PairProblem::reference_metric(const MatrixField& raw) const {
  if (!reference_) return raw;
  return MatrixField::zip(*reference_inv_sqrt_, raw, [](const CMat& r, const CMat& x) {
    return fiber::hermitian_part(r * x * r);
  });
}

MatrixField PairProblem::to_reference_frame(const MatrixField& raw) const {
  if (!reference_) return raw;
  MatrixField out(raw.points(), rank_);
  for (std::size_t p = 0; p < raw.points(); ++p)
    out.at(p) = reference_sqrt_->at(p) * raw.at(p) * reference_inv_sqrt_->at(p);
  return out;
}

MatrixField PairProblem::from_reference_frame(const MatrixField& f) const {
  if (!reference_) return f;
  MatrixField out(f.points(), rank_);
  for (std::size_t p = 0; p < f.points(); ++p)
    out.at(p) = reference_inv_sqrt_->at(p) * f.at(p) * reference_sqrt_->at(p);
  return out;
}

SectionField PairProblem::phi() const {
  if (!reference_) return phi_;
  SectionField out(phi_.points(), rank_);
  for (std::size_t p = 0; p < phi_.points(); ++p) out.at(p) = reference_sqrt_->at(p) * phi_.at(p);
  return out;
}

MatrixField PairProblem::background_curvature() const {
  if (!reference_) return raw_curvature_;
  MatrixField raw = raw_curvature_;
  raw += ChernConnection(*this, *reference_).curvature_update();
  return to_reference_frame(raw);
}

MatrixField PairProblem::phi_outer_reference() const {
  const SectionField v = phi();
  MatrixField out(v.points(), rank_);
  for (std::size_t p = 0; p < v.points(); ++p) out.at(p) = v.at(p) * v.at(p).adjoint();
  return out;
}

double PairProblem::phi_norm_squared() const {
  const SectionField v = phi();
  RealField density(v.points());
  for (std::size_t p = 0; p < v.points(); ++p) density[p] = v.at(p).squaredNorm();
  return geometry_->integrate(density);
}

double PairProblem::degree() const { return geometry_->degree(background_curvature().trace()); }

MatrixField PairProblem::d0_raw(const MatrixField& u) const {
  MatrixField out = geometry_->d(u);
  if (connection_) {
    for (std::size_t p = 0; p < u.points(); ++p) out.at(p) += fiber::commutator(connection_->at(p), u.at(p));
  }
  return out;
}

MatrixField PairProblem::lambda_dbar_raw(const MatrixField& m) const {
  MatrixField out = geometry_->lambda_dbar(m);
  if (connection_) {
    // i Lambda ([b, m] ebar ^ e) = -c [b, m] with b = -a^*.
    const double c = geometry_->contraction();
    for (std::size_t p = 0; p < m.points(); ++p) {
      const CMat b = -connection_->at(p).adjoint();
      out.at(p) -= c * fiber::commutator(b, m.at(p));
    }
  }
  return out;
}

MatrixField PairProblem::d0_reference(const MatrixField& u) const {
  if (geometry_->kind() == BackendKind::hopf) {
    if (rank_ != 1 && (reference_ || connection_))
      throw std::invalid_argument("d0_reference: Hopf backend supports rank 1 or flat unbased problems only");
    return geometry_->d(u);
  }
  if (!reference_) return d0_raw(u);
  const MatrixField raw = from_reference_frame(u);
  MatrixField out = d0_raw(raw);
  const MatrixField form = ChernConnection(*this, *reference_).form();
  for (std::size_t p = 0; p < raw.points(); ++p) out.at(p) += fiber::commutator(form.at(p), raw.at(p));
  return to_reference_frame(out);
}

// --- ChernConnection ----------------------------------------------------

ChernConnection::ChernConnection(const PairProblem& problem, const MatrixField& metric)
    : problem_(&problem), metric_(metric) {
  const Geometry& g = problem.geometry();
  const std::size_t n = metric.points();
  metric_inv_ = metric.map([](const CMat& h) { return CMat(h.inverse()); });
  if (g.kind() == BackendKind::torus) {
    d_metric_ = problem.d0_raw(metric);
    form_ = MatrixField(n, metric.rank());
    for (std::size_t p = 0; p < n; ++p) form_.at(p) = metric_inv_.at(p) * d_metric_.at(p);
    return;
  }
  const double h = g.spacing();
  const int r = metric.rank();
  form_ = MatrixField(n, r);
  edge_s_.resize(n);
  edge_s_inv_.resize(n);
  edge_kernel_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k1 = (k + 1) % n;
    const fiber::HermEig left = fiber::herm_eig(metric.at(k));
    if (left.values.minCoeff() <= 0.0) throw SingularMatrixError("ChernConnection: metric not positive");
    const CMat left_isqrt = fiber::from_eig(left, [](double x) { return 1.0 / std::sqrt(x); });
    const CMat left_sqrt = fiber::from_eig(left, [](double x) { return std::sqrt(x); });
    const fiber::HermEig q = fiber::herm_eig(left_isqrt * metric.at(k1) * left_isqrt);
    if (q.values.minCoeff() <= 0.0) throw SingularMatrixError("ChernConnection: metric not positive");
    edge_s_[k] = left_isqrt * q.vectors;
    edge_s_inv_[k] = q.vectors.adjoint() * left_sqrt;
    CMat kernel(r, r);
    CMat log_d = CMat::Zero(r, r);
    for (int i = 0; i < r; ++i) {
      log_d(i, i) = std::log(q.values(i));
      for (int j = 0; j < r; ++j) kernel(i, j) = fiber::dlog_kernel(q.values(i), q.values(j));
    }
    edge_kernel_[k] = kernel;
    form_.at(k) = edge_s_[k] * log_d * edge_s_inv_[k] / h;
  }
}

MatrixField ChernConnection::curvature_update() const { return problem_->lambda_dbar_raw(form_); }

MatrixField ChernConnection::linearize(const MatrixField& direction) const {
  const Geometry& g = problem_->geometry();
  const std::size_t n = direction.points();
  MatrixField out(n, direction.rank());
  if (g.kind() == BackendKind::torus) {
    const MatrixField d_dir = problem_->d0_raw(direction);
    for (std::size_t p = 0; p < n; ++p) {
      const auto& hinv = metric_inv_.at(p);
      out.at(p) = hinv * (d_dir.at(p) - direction.at(p) * form_.at(p));
    }
    return out;
  }
  const double h = g.spacing();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k1 = (k + 1) % n;
    // X = H_k^{-1} H_{k+1}; dX = H_k^{-1} (dH_{k+1} - dH_k X)
    const CMat x = metric_inv_.at(k) * metric_.at(k1);
    const CMat dx = metric_inv_.at(k) * (direction.at(k1) - direction.at(k) * x);
    CMat y = edge_s_inv_[k] * dx * edge_s_[k];
    y = y.cwiseProduct(edge_kernel_[k]);
    out.at(k) = edge_s_[k] * y * edge_s_inv_[k] / h;
  }
  return out;
}

MatrixField mean_curvature(const PairProblem& problem, const MatrixField& f) {
  const MatrixField metric = problem.raw_metric(f);
  MatrixField raw = problem.raw_curvature();
  raw += ChernConnection(problem, metric).curvature_update();
  const SectionField& phi = problem.raw_phi();
  const double half_tau = 0.5 * problem.tau();
  for (std::size_t p = 0; p < raw.points(); ++p) {
    raw.at(p) += 0.5 * phi.at(p) * (phi.at(p).adjoint() * metric.at(p));
    raw.at(p).diagonal().array() -= half_tau;
  }
  return problem.to_reference_frame(raw);
}

bool phi_simple_check(const PairProblem& problem, double tolerance) {
  if (problem.geometry().kind() != BackendKind::torus)
    throw std::invalid_argument("phi_simple_check: supported on the torus backend only");
  const int r = problem.rank();
  const std::size_t n = problem.geometry().points();
  const Eigen::Index dim = static_cast<Eigen::Index>(r) * r;
  CMat gram = CMat::Zero(dim, dim);
  const CMat eye = CMat::Identity(r, r);
  auto add_commutant = [&](const CMat& x) {
    // vec(x u - u x) = (I (x) x - x^T (x) I) vec(u)
    CMat c(dim, dim);
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b)
        c.block(a * r, b * r, r, r) = eye(a, b) * x - x(b, a) * eye;
    gram += c.adjoint() * c / static_cast<double>(n);
  };
  const MatrixField& curvature = problem.raw_curvature();
  const SectionField& phi = problem.raw_phi();
  for (std::size_t p = 0; p < n; ++p) {
    add_commutant(curvature.at(p));
    if (problem.connection()) add_commutant(problem.connection()->at(p));
    // vec(u phi) = (phi^T (x) I) vec(u)
    CMat c(r, dim);
    for (int b = 0; b < r; ++b) c.block(0, b * r, r, r) = phi.at(p)(b) * eye;
    gram += c.adjoint() * c / static_cast<double>(n);
  }
  Eigen::SelfAdjointEigenSolver<CMat> solver(gram);
  const double scale = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
  return solver.eigenvalues().minCoeff() > tolerance * scale;
}

// --- builders -------------------------------------------------------------

Complex theta_function(Complex z) {
  const Complex i(0.0, 1.0);
  Complex sum(0.0);
  for (int k = -10; k <= 10; ++k) sum += std::exp(-kPi * k * k + 2.0 * kPi * i * static_cast<double>(k) * z);
  return sum;
}

double hopf_line_degree(const Geometry& g, double deck_weight) {
  if (!(deck_weight > 0.0)) throw std::invalid_argument("deck weight must be positive");
  return std::log2(deck_weight) * g.volume() / (2.0 * kPi);
}

namespace {

/// max |d/dzbar F| over the grid nodes by fourth-order central differences.
template <typename Fn>
double torus_dbar_defect(const Geometry& g, Fn fn) {
  const double step = 1e-3;
  const Complex i(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t p = 0; p < g.points(); ++p) {
    const auto [x, y] = g.node(p);
    const Complex z(x, y);
    auto diff = [&](Complex dir) {
      return (-fn(z + 2.0 * step * dir) + 8.0 * fn(z + step * dir) - 8.0 * fn(z - step * dir) +
              fn(z - 2.0 * step * dir)) /
             (12.0 * step);
    };
    worst = std::max(worst, std::abs(0.5 * (diff(1.0) + i * diff(i))));
  }
  return worst;
}

}  // namespace

PairProblem make_split_pair(const GeometryPtr& geometry, const SplitModel& model,
                            const std::vector<Complex>& phi_amplitudes, double tau) {
  model.validate();
  const int r = model.rank();
  if (static_cast<int>(phi_amplitudes.size()) != r)
    throw std::invalid_argument("make_split_pair: one phi amplitude per summand expected");
  const Geometry& g = *geometry;
  const std::size_t n = g.points();
  CMat curvature = CMat::Zero(r, r);
  for (int i = 0; i < r; ++i) curvature(i, i) = 2.0 * kPi * model.degrees[i] / g.volume();
  SectionField phi(n, r);
  double defect = 0.0;
  for (int i = 0; i < r; ++i) {
    const Complex a = phi_amplitudes[i];
    if (a == Complex(0.0)) continue;
    const double d = model.degrees[i];
    if (g.kind() == BackendKind::torus) {
      const bool integral = std::abs(d - std::round(d)) < 1e-12 && d >= 0.0;
      if (!integral) throw std::invalid_argument("make_split_pair: summand with non-integral or negative degree has no section");
      const int level = static_cast<int>(std::round(d));
      if (level > 0 && std::abs(g.period() - 1.0) > 1e-12)
        throw std::invalid_argument("make_split_pair: theta sections need a unit-period torus");
      ComplexField values(n);
      for (std::size_t p = 0; p < n; ++p) {
        const auto [x, y] = g.node(p);
        values[p] = level == 0 ? a
                               : a * std::pow(theta_function(Complex(x, y)), level) *
                                     std::exp(-kPi * level * y * y);
      }
      phi.set_component(i, values);
      if (level > 0) {
        defect = std::max(defect, torus_dbar_defect(g, [a, level](Complex z) {
                            return a * std::pow(theta_function(z), level);
                          }));
      }
    } else {
      const double k = curvature(i, i).real();
      const bool integral = std::abs(k - std::round(k)) < 1e-9 && k > -1e-12;
      if (!integral) throw std::invalid_argument("make_split_pair: Hopf summand L_lambda needs lambda = 2^k for a section");
      const int power = static_cast<int>(std::round(k));
      phi.set_component(i, ComplexField(n, a / std::sqrt(power + 1.0)));
    }
  }
  PairOptions options;
  options.model = model;
  options.holomorphic_tolerance = g.kind() == BackendKind::torus ? 1e-8 : 1e-6;
  if (g.kind() == BackendKind::torus) {
    // constant components are checked spectrally, theta components above
    double spectral = 0.0;
    for (int i = 0; i < r; ++i) {
      if (model.degrees[i] != 0.0) continue;
      const ComplexField db = g.dbar(phi.component(i));
      for (const Complex& v : db) spectral = std::max(spectral, std::abs(v));
    }
    options.section_defect = std::max(defect, spectral);
  } else {
    // a z_1^k is a polynomial; its reduced representative is exactly constant
    options.section_defect = 0.0;
  }
  return PairProblem(geometry, MatrixField::constant(n, curvature), std::move(phi), tau, std::move(options));
}

}  // namespace vortex
