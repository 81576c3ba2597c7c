#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"

using namespace vt;

namespace {
constexpr double kPi = std::numbers::pi;

PairProblem line(const GeometryPtr& g, double degree, double tau) {
  SplitModel m;
  m.degrees = {degree};
  return make_split_pair(g, m, {1.0}, tau);
}

PairProblem trivial(const GeometryPtr& g, double tau) {
  return PairProblem(g, MatrixField::zeros(g->points(), 1), SectionField::constant(g->points(), CVec::Ones(1)), tau);
}

ContinuationConfig quiet() {
  ContinuationConfig c;
  c.ritz_steps = 0;
  return c;
}
}  // namespace

TEST_CASE("gmres on a diagonal operator") {
  const GeometryPtr g = Geometry::torus(8);
  const MatrixField weights = positive_field(*g, 2, 1, 1.0);
  const FieldOperator op = [&](const MatrixField& x) {
    return MatrixField::zip(x, weights, [](const CMat& a, const CMat& w) {
      return CMat(0.5 * (w * a + a * w));
    });
  };
  const MatrixField rhs = smooth_random_field(*g, 2, 2, 1.0);
  const GmresResult res = gmres(op, rhs, {}, GmresOptions{1e-12, 30, 500});
  CHECK(res.converged);
  CHECK((op(res.solution) - rhs).sup_norm() < 1e-9);
}

TEST_CASE("gmres with zero right-hand side") {
  const GeometryPtr g = Geometry::torus(8);
  const FieldOperator id = [](const MatrixField& x) { return x; };
  const GmresResult res = gmres(id, MatrixField::zeros(g->points(), 1), {}, {});
  CHECK(res.converged);
  CHECK(res.solution.sup_norm() == 0.0);
}

TEST_CASE("smallest Ritz value of a scaled identity") {
  const GeometryPtr g = Geometry::torus(8);
  const FieldOperator op = [](const MatrixField& x) { return 3.0 * x; };
  CHECK(smallest_ritz(op, smooth_random_field(*g, 1, 3, 1.0), 5) == doctest::Approx(3.0));
}

TEST_CASE("config validation") {
  ContinuationConfig c;
  CHECK_NOTHROW(c.validate());
  c.ratio = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.eps_min = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.eps_min = 2.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.max_newton = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("initial gauge gives an exact solution at eps = 1") {
  SplitModel m2;
  m2.degrees = {0.0, 1.0};
  const GeometryPtr t = Geometry::torus(32), h = Geometry::hopf(128);
  const std::vector<PairProblem> problems = {line(t, 1.0, 9.0), make_split_pair(t, m2, {1.0, 0.5}, 9.0),
                                             line(h, hopf_line_degree(*h, 4.0), 2.0)};
  for (const PairProblem& p : problems) {
    for (std::uint64_t seed : {1ull, 2ull}) {
      const auto [gp, f1] = initial_gauge(p, positive_field(p.geometry(), p.rank(), seed, 0.02));
      CHECK(residual_L(gp, 1.0, f1).sup_norm() < 1e-10);
      CHECK(gp.degree() == doctest::Approx(p.degree()).epsilon(1e-9));
    }
  }
}

TEST_CASE("initial gauge rejects bad starts") {
  const GeometryPtr g = Geometry::torus(16);
  const PairProblem p = trivial(g, 2.0);
  CHECK_THROWS_AS(initial_gauge(p, MatrixField::identity(g->points(), 2)), std::invalid_argument);
  CHECK_THROWS_AS(initial_gauge(p, -1.0 * MatrixField::identity(g->points(), 1)), std::invalid_argument);
}

TEST_CASE("linearization matches finite differences") {
  SplitModel m2;
  m2.degrees = {0.0, 1.0};
  const GeometryPtr t = Geometry::torus(16), h = Geometry::hopf(128);
  const std::vector<PairProblem> problems = {make_split_pair(t, m2, {1.0, 0.5}, 9.0),
                                             line(h, hopf_line_degree(*h, 2.0), 3.0)};
  for (const PairProblem& base : problems) {
    const Geometry& g = base.geometry();
    const auto [p, f1] = initial_gauge(base, positive_field(g, base.rank(), 4, 0.02));
    const MatrixField f = positive_field(g, base.rank(), 5, 0.5);
    for (double eps : {0.0, 0.4}) {
      const Linearization lin(p, eps, f);
      const double gap = fd_mismatch(
          g, base.rank(), f, [&](const MatrixField& x) { return residual_hat(p, eps, x); },
          [&](const MatrixField& d) { return lin.apply_hat(d); }, 5, 6);
      CHECK(gap < 1e-5);
    }
  }
}

TEST_CASE("Newton operator is the Hermitian part of the derivative") {
  const GeometryPtr g = Geometry::torus(16);
  const PairProblem p = line(g, 1.0, 9.0);
  const MatrixField f = positive_field(*g, 1, 7, 0.3);
  const Linearization lin(p, 0.5, f);
  const MatrixField d = smooth_random_field(*g, 1, 8, 1.0);
  const MatrixField full = lin.apply_hat(d);
  const MatrixField herm = full.map([](const CMat& x) { return fiber::hermitian_part(x); });
  CHECK((lin.apply(d) - herm).sup_norm() < 1e-12);
  CHECK((linearization_apply(p, 0.5, f, d) - full).sup_norm() == 0.0);
}

TEST_CASE("linearization rejects a non-positive state") {
  const GeometryPtr g = Geometry::torus(8);
  const PairProblem p = trivial(g, 2.0);
  CHECK_THROWS_AS(Linearization(p, 0.5, -1.0 * MatrixField::identity(g->points(), 1)), SingularMatrixError);
}

TEST_CASE("trivial problem converges to f = 2") {
  const GeometryPtr g = Geometry::torus(16);
  const SolveReport r = run_continuation(trivial(g, 2.0), quiet());
  REQUIRE(r.status == RunStatus::converged);
  CHECK(r.cause == FailureCause::none);
  for (std::size_t p = 0; p < g->points(); ++p) CHECK(std::abs(r.final_metric->at(p)(0, 0) - 2.0) < 1e-8);
  CHECK(r.trace.front().eps == 1.0);
  CHECK(r.trace.back().eps == 0.0);
  CHECK(r.eps_reached == 0.0);
  // eps schedule: geometric with ratio 0.7 down to the floor
  CHECK(r.trace[1].eps == doctest::Approx(0.7));
}

TEST_CASE("Newton at fixed eps from the exact solution takes no steps") {
  const GeometryPtr g = Geometry::torus(16);
  const PairProblem p = trivial(g, 2.0);
  MatrixField s(g->points(), 1);
  for (std::size_t i = 0; i < g->points(); ++i) s.at(i)(0, 0) = std::log(2.0);
  const NewtonOutcome out = newton_solve_at(p, 0.0, s, quiet());
  CHECK(out.converged);
  CHECK(out.iterations == 0);
}

TEST_CASE("stable and unstable line bundles") {
  const GeometryPtr g = Geometry::torus(16);
  const SolveReport ok = run_continuation(line(g, 1.0, 1.3 * 4 * kPi), quiet());
  CHECK(ok.status == RunStatus::converged);
  CHECK_FALSE(ok.flagged);
  const SolveReport bad = run_continuation(line(g, 1.0, 0.7 * 4 * kPi), quiet());
  CHECK(bad.status == RunStatus::diverged);
  CHECK(bad.cause == FailureCause::divergence_cap);
  CHECK(bad.eps_reached > 1e-2);
}

TEST_CASE("no polish stops at eps_min") {
  const GeometryPtr g = Geometry::hopf(64);
  ContinuationConfig c = quiet();
  c.polish = false;
  c.eps_min = 0.05;
  const SolveReport r = run_continuation(line(g, hopf_line_degree(*g, 2.0), 3.0), c);
  CHECK(r.status == RunStatus::converged);
  CHECK(r.eps_reached == doctest::Approx(0.05));
}

TEST_CASE("diagnostics of accepted states") {
  const GeometryPtr g = Geometry::torus(16);
  const SolveReport r = run_continuation(line(g, 1.0, 1.5 * 4 * kPi), quiet());
  REQUIRE(r.status == RunStatus::converged);
  for (const TraceRow& row : r.trace) {
    CHECK(row.diagnostics.energy_gap <= 1e-8 * std::max(1.0, row.diagnostics.energy_scale));
    CHECK(row.diagnostics.monotonicity >= -1e-10);
    if (row.eps > 0.0) {
      CHECK(row.diagnostics.apriori_margin <= 1e-6);
      CHECK(row.diagnostics.inequality_margin >= -1e-6);
    }
  }
  CHECK(r.max_sup_log_f >= r.final_sup_log_f);
}

TEST_CASE("energy identity on random rank-2 states") {
  auto gap = [](const GeometryPtr& g) {
    CVec phi(2);
    phi << 1.0, 0.3;
    const PairProblem p(g, MatrixField::zeros(g->points(), 2), SectionField::constant(g->points(), phi), 2.0);
    const EnergyIdentity e = energy_identity(p, 0.2, positive_field(*g, 2, 9, 0.5));
    return e.gap / e.scale;
  };
  CHECK(gap(Geometry::torus(32)) < 1e-12);
  const double a = gap(Geometry::hopf(128)), b = gap(Geometry::hopf(256));
  CHECK(a / b == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("Nie-Zhang identity for a rank-1 closed form") {
  const GeometryPtr g = Geometry::torus(64);
  MatrixField f(g->points(), 1);
  for (std::size_t p = 0; p < g->points(); ++p) {
    const auto [x, y] = g->node(p);
    f.at(p)(0, 0) = std::exp(std::sin(2 * kPi * x) * std::cos(2 * kPi * y));
  }
  CHECK(nie_zhang_check(*g, f) < 1e-8);
}

TEST_CASE("uniqueness from two gauged starts") {
  const GeometryPtr g = Geometry::hopf(128);
  const PairProblem p = line(g, hopf_line_degree(*g, 2.0), 3.0);
  const double d = uniqueness_probe(p, quiet(), positive_field(*g, 1, 1, 0.1), positive_field(*g, 1, 2, 0.1));
  CHECK(d < 1e-6);
  CHECK_THROWS_AS(uniqueness_probe(p.with_tau(1.0), quiet(), MatrixField::identity(g->points(), 1),
                                   MatrixField::identity(g->points(), 1)),
                  std::runtime_error);
}

TEST_CASE("status names") {
  CHECK(to_string(RunStatus::diverged) == "diverged");
  CHECK(to_string(FailureCause::divergence_cap) != to_string(FailureCause::polish_failure));
}
