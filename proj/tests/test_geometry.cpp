#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"

using namespace vt;

namespace {
constexpr double kPi = std::numbers::pi;

ComplexField sample(const Geometry& g, const std::function<Complex(double, double)>& fn) {
  ComplexField u(g.points());
  for (std::size_t p = 0; p < g.points(); ++p) {
    const auto [x, y] = g.node(p);
    u[p] = fn(x, y);
  }
  return u;
}

double sup_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
}  // namespace

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(Geometry::torus(7), std::invalid_argument);
  CHECK_THROWS_AS(Geometry::torus(6), std::invalid_argument);
  CHECK_THROWS_AS(Geometry::torus(16, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Geometry::hopf(8), std::invalid_argument);
  const GeometryPtr g = Geometry::torus(16);
  CHECK_THROWS_AS(g->p_operator(ComplexField(10)), std::invalid_argument);
  CHECK_THROWS_AS(g->solve_shifted(ComplexField(g->points()), 0.0), std::invalid_argument);
}

TEST_CASE("volumes") {
  CHECK(Geometry::torus(16)->volume() == doctest::Approx(1.0));
  CHECK(Geometry::torus(16, 2.0)->volume() == doctest::Approx(4.0));
  CHECK(Geometry::hopf(64)->volume() == doctest::Approx(4 * kPi * kPi * std::log(4.0)));
}

TEST_CASE("torus derivatives of a plane wave") {
  const GeometryPtr g = Geometry::torus(16);
  const Complex i(0.0, 1.0);
  const ComplexField u = sample(*g, [&](double x, double y) { return std::exp(2 * kPi * i * (x + 2 * y)); });
  // d/dz = (dx - i dy)/2, d/dzbar = (dx + i dy)/2
  ComplexField du(u.size()), dbu(u.size()), pu(u.size());
  for (std::size_t p = 0; p < u.size(); ++p) {
    du[p] = 0.5 * (2 * kPi * i + 2 * kPi * 2.0) * u[p];
    dbu[p] = 0.5 * (2 * kPi * i - 2 * kPi * 2.0) * u[p];
    pu[p] = 0.5 * (4 * kPi * kPi * 5.0) * u[p];
  }
  CHECK(sup_diff(g->d(u), du) < 1e-10);
  CHECK(sup_diff(g->dbar(u), dbu) < 1e-10);
  CHECK(sup_diff(g->p_operator(u), pu) < 1e-9);
}

TEST_CASE("P agrees with i Lambda dbar d") {
  for (const GeometryPtr& g : {Geometry::torus(32), Geometry::hopf(128)}) {
    const MatrixField u = smooth_random_field(*g, 1, 3, 1.0);
    const ComplexField v = u.entry(0, 0);
    const ComplexField composed = g->lambda_dbar(g->d(v));
    CHECK(sup_diff(composed, g->p_operator(v)) < 1e-8 * std::max(1.0, g->volume()));
  }
}

TEST_CASE("Hopf P is second order accurate") {
  auto error = [](int n) {
    const GeometryPtr g = Geometry::hopf(n);
    const double w = 2 * kPi / std::log(4.0);
    ComplexField u(n), exact(n);
    for (int k = 0; k < n; ++k) {
      const double t = g->node(k)[0];
      u[k] = std::sin(w * t);
      // -(u'' + u')
      exact[k] = w * w * std::sin(w * t) - w * std::cos(w * t);
    }
    return sup_diff(g->p_operator(u), exact);
  };
  const double e1 = error(64), e2 = error(128);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("Gauduchon: P integrates to zero on both backends") {
  for (const GeometryPtr& g : {Geometry::torus(32), Geometry::hopf(256)}) {
    for (std::uint64_t seed : {1ull, 2ull}) {
      const ComplexField v = smooth_random_field(*g, 1, seed, 3.0).entry(0, 0);
      CHECK(std::abs(g->integrate(g->p_operator(v))) < 1e-8);
    }
  }
}

TEST_CASE("maximum principle for P") {
  for (const GeometryPtr& g : {Geometry::torus(32), Geometry::hopf(256)}) {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      const ComplexField v = smooth_random_field(*g, 1, seed, 1.0).entry(0, 0);
      std::size_t top = 0;
      for (std::size_t p = 0; p < v.size(); ++p)
        if (v[p].real() > v[top].real()) top = p;
      CHECK(g->p_operator(v)[top].real() >= 0.0);
    }
  }
}

TEST_CASE("flipping the contraction sign breaks the maximum principle") {
  const GeometryPtr g = Geometry::hopf(128, -1.0);
  const ComplexField v = smooth_random_field(*g, 1, 1, 1.0).entry(0, 0);
  std::size_t top = 0;
  for (std::size_t p = 0; p < v.size(); ++p)
    if (v[p].real() > v[top].real()) top = p;
  CHECK(g->p_operator(v)[top].real() < 0.0);
}

TEST_CASE("shifted solve inverts P + sigma") {
  for (const GeometryPtr& g : {Geometry::torus(16), Geometry::hopf(64)}) {
    const ComplexField rhs = smooth_random_field(*g, 1, 9, 1.0).entry(0, 0);
    const ComplexField x = g->solve_shifted(rhs, 0.7);
    ComplexField back = g->p_operator(x);
    for (std::size_t p = 0; p < back.size(); ++p) back[p] += 0.7 * x[p];
    CHECK(sup_diff(back, rhs) < 1e-10);
  }
}

TEST_CASE("degree of constant curvature") {
  const GeometryPtr g = Geometry::torus(16, 1.5);
  const RealField k(g->points(), 2 * kPi * 3.0 / g->volume());
  CHECK(g->degree(k) == doctest::Approx(3.0));
}

TEST_CASE("smooth random fields") {
  const GeometryPtr g = Geometry::torus(16);
  const MatrixField a = smooth_random_field(*g, 2, 5, 0.5), b = smooth_random_field(*g, 2, 5, 0.5);
  CHECK((a - b).sup_norm() == 0.0);
  CHECK(a.hermitian_defect() < 1e-14);
  CHECK(a.sup_norm() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK((a - smooth_random_field(*g, 2, 6, 0.5)).sup_norm() > 0.0);
}

TEST_CASE("matrix field algebra") {
  MatrixField a = MatrixField::identity(4, 2);
  const MatrixField b = MatrixField::constant(4, 3.0 * CMat::Identity(2, 2));
  a.axpy(2.0, b);
  CHECK(a.at(3)(1, 1) == Complex(7.0));
  CHECK(a.dot(MatrixField::identity(4, 2)) == doctest::Approx(56.0));
  CHECK(a.trace()[0] == Complex(14.0));
  CHECK_THROWS(a += MatrixField::identity(3, 2));
}
