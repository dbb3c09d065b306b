#include <doctest.h>

#include <cmath>

#include "legnorm/errors.hpp"
#include "legnorm/geometry.hpp"
#include "random_maps.hpp"

using namespace legnorm;
using namespace legnorm::testing;

namespace {

ChartPoint at_v(Vec v) { return {Vec(v.size(), 0.0), std::move(v)}; }

MapDefinition parse_map(std::size_t n, std::vector<const char*> comps) {
  std::vector<Expression> e;
  for (const char* c : comps) e.push_back(parse_expression(c));
  return make_explicit_map(n, std::move(e));
}

MapDefinition classical(std::size_t n) {
  std::vector<Expression> e;
  for (std::size_t i = 1; i <= n; ++i) e.push_back(v(i));
  return make_explicit_map(n, std::move(e));
}

MapDefinition non_normal() {
  return parse_map(3, {"v1 + v2*v3", "v2", "v3"});
}

// A - A^T of the exp-scaled example, written out by hand.
Mat exp_scaled_antisym(const Vec& v) {
  const double s = std::exp(-v[0]);
  return Mat{{0, s * v[1], s * v[2]}, {-s * v[1], 0, 0}, {-s * v[2], 0, 0}};
}

double rel(const Mat& a, const Mat& b) {
  return (a - b).max_abs() / std::max(1.0, b.max_abs());
}

}  // namespace

TEST_CASE("exp-scaled frame at the origin") {
  const FiberFrame f = evaluate_frame(builtin_exp_scaled_map(), at_v({0, 0, 0}));
  CHECK(f.g == Mat::identity(3));
  CHECK(f.omega == 1.0);
  CHECK(f.L_up == Vec{1, 0, 0});
  CHECK(f.P == Mat{{0, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK((f.A - f.A.transposed()).max_abs() == 0.0);
  const DualA a = recover_A(f);
  CHECK(a.up == Vec{1, 0, 0});
}

TEST_CASE("exp-scaled frame at v = (0,2,3)") {
  const FiberFrame f = evaluate_frame(builtin_exp_scaled_map(), at_v({0, 2, 3}));
  CHECK(f.g == Mat{{1, 0, 0}, {2, 1, 0}, {3, 0, 1}});
  CHECK(f.g_inv == Mat{{1, 0, 0}, {-2, 1, 0}, {-3, 0, 1}});
  CHECK(f.omega == doctest::Approx(1.0));
  CHECK(f.L_up[0] == doctest::Approx(-12));
  CHECK(f.L_up[1] == doctest::Approx(2));
  CHECK(f.L_up[2] == doctest::Approx(3));
}

TEST_CASE("exp-scaled A - A^T entry at v = (0,1,1)") {
  const FiberFrame f = evaluate_frame(builtin_exp_scaled_map(), at_v({0, 1, 1}));
  const Mat d = f.A - f.A.transposed();
  CHECK(d(0, 1) == doctest::Approx(1.0));
  CHECK(d(0, 2) == doctest::Approx(1.0));
  CHECK(std::abs(d(1, 2)) <= 1e-12);
}

TEST_CASE("exp-scaled map over random points") {
  const MapDefinition m = builtin_exp_scaled_map();
  ExprGen gen(3, 42);
  for (int t = 0; t < 100; ++t) {
    const ChartPoint p = random_point(3, gen, 2.0, 1.0);
    const FiberFrame f = evaluate_frame(m, p);
    CHECK(rel(f.A - f.A.transposed(), exp_scaled_antisym(p.v)) <= 1e-9);
    CHECK(rel(compute_A_dual_derivative(f) -
                  compute_A_dual_derivative(f).transposed(),
              exp_scaled_antisym(p.v)) <= 1e-9);
    CHECK(residual_full(f).max_abs() < 1e-10);
    CHECK(residual_reduced(f).max_abs() < 1e-10);
    const Vec A = recover_A(f).down;
    CHECK(alternation_residual(f, A).max_abs() < 1e-10);
    CHECK((u_from_A(f, A) - f.u_down).max_abs() <= 1e-9);
    const Classification c = classify_gauge(f, A, {});
    CHECK(c.branch == Branch::DegenerateU);
    CHECK(c.rank_u == 2);
    CHECK(rank_and_kernel(f.u_up, 1e-8).rank == 2);
    CHECK(rank_and_kernel(f.u_down, 1e-8).rank == 2);
  }
}

TEST_CASE("classical map") {
  const MapDefinition m = classical(3);
  const ChartPoint p = at_v({0.5, -1, 2});
  const FiberFrame f = evaluate_frame(m, p);
  CHECK(f.g == Mat::identity(3));
  CHECK(f.L_up == p.v);
  CHECK(f.L_down == p.v);
  CHECK(f.omega == doctest::Approx(5.25));
  CHECK((f.P - f.P.transposed()).max_abs() <= 1e-15);
  CHECK(f.A == Mat::identity(3));
  CHECK(compute_A_dual_derivative(f) == Mat::identity(3));
  CHECK(residual_full(f).max_abs() <= 1e-15);
  const Vec a = recover_A(f).up;
  for (std::size_t i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(p.v[i] / 5.25));
  CHECK(alternation_residual(f, Vec(3, 0.0)).max_abs() == 0.0);
  CHECK_THROWS_AS(evaluate_frame(m, at_v({0, 0, 0})), NullOmega);
}

TEST_CASE("classical potential map from make_trivial_map") {
  const MapDefinition m = make_trivial_map(
      num(0), parse_expression("0.5*(v1^2 + v2^2 + v3^2)"), 3);
  ExprGen gen(3, 4);
  for (int t = 0; t < 20; ++t) {
    const ChartPoint p = random_point(3, gen);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(m.components[i].eval_scalar(p) == doctest::Approx(p.v[i]));
  }
}

TEST_CASE("make_trivial_map reproduces the exp-scaled components") {
  const MapDefinition m = builtin_exp_scaled_map();
  CHECK(m.components[0].expression() == parse_expression("exp(v1)"));
  ExprGen gen(3, 2);
  for (int t = 0; t < 20; ++t) {
    const ChartPoint p = random_point(3, gen, 2.0, 1.0);
    const double e = std::exp(p.v[0]);
    CHECK(m.components[1].eval_scalar(p) == doctest::Approx(p.v[1] * e).epsilon(1e-15));
    CHECK(m.components[2].eval_scalar(p) == doctest::Approx(p.v[2] * e).epsilon(1e-15));
  }
  CHECK(std::holds_alternative<PotentialPair>(m.body));
}

TEST_CASE("trivial maps are normal") {
  ExprGen gen(3, 8);
  const char* phis[] = {"x1*v2", "sin(v1) + x3", "0.3*v1*v2"};
  const char* pots[] = {"v1^2 + v2^2 + v3^2 + v1*v3", "exp(0.3*v1) + v2^2 + v3^2",
                        "0.5*(v1^2 + 2*v2^2 + 3*v3^2) + 0.1*v1^3"};
  for (const char* phi : phis)
    for (const char* pot : pots) {
      const MapDefinition m =
          make_trivial_map(parse_expression(phi), parse_expression(pot), 3);
      int evaluated = 0;
      for (int t = 0; t < 10; ++t) {
        const auto f = random_frame(m, gen);
        if (!f) continue;
        ++evaluated;
        const double scale = std::max(1.0, f->g_inv.max_abs() * f->g.max_abs());
        CHECK(residual_full(*f).max_abs() <= 1e-9 * scale);
        CHECK(residual_reduced(*f).max_abs() <= 1e-9 * scale);
      }
      CHECK(evaluated > 0);
    }
}

TEST_CASE("non-normal fixture") {
  const MapDefinition m = non_normal();
  // g = [[1, v3, v2], [0, 1, 0], [0, 0, 1]] at v = (0, 1, 2)
  const Mat g{{1, 2, 1}, {0, 1, 0}, {0, 0, 1}};
  const Vec L{2, 1, 2};
  const Mat gi = invert(g, 1e-12).inverse;
  const Vec L_up = left_multiply(L, gi);
  const Vec L_check = gi * L;
  const double omega = dot(L, L_up);
  const Mat u = gi - (1.0 / omega) * outer(L_check, L_up);
  const Mat S = u - u.transposed();
  REQUIRE(S(0, 1) == doctest::Approx(-6));

  const FiberFrame f = evaluate_frame(m, at_v({0, 1, 2}));
  CHECK(f.g == g);
  CHECK((residual_reduced(f) - S).max_abs() <= 1e-12);
  CHECK(residual_reduced(f).max_abs() > 0.1);
  CHECK(residual_full(f).max_abs() > 0.1);
  CHECK(alternation_residual(f, recover_A(f).down).max_abs() > 0.1);

  // on the locus v2 = v3 the residual vanishes
  const FiberFrame on = evaluate_frame(m, at_v({0, 1, 1}));
  CHECK(residual_reduced(on).max_abs() <= 1e-12);
  CHECK(residual_full(on).max_abs() <= 1e-12);
}

TEST_CASE("two-dimensional frames have zero residual") {
  ExprGen gen(2, 12);
  int evaluated = 0;
  for (int t = 0; t < 50; ++t) {
    const MapDefinition m = random_map(2, gen);
    const auto f = random_frame(m, gen);
    if (!f) continue;
    ++evaluated;
    CHECK(residual_full(*f).max_abs() < 1e-10);
    CHECK(residual_reduced(*f).max_abs() < 1e-10);
  }
  CHECK(evaluated >= 40);
}

TEST_CASE("frame identities on random maps") {
  int evaluated = 0;
  for (std::size_t n = 2; n <= 4; ++n) {
    ExprGen gen(n, 100 + n);
    for (int t = 0; t < 30; ++t) {
      const MapDefinition m = random_map(n, gen);
      const auto fo = random_frame(m, gen);
      if (!fo) continue;
      const FiberFrame& f = *fo;
      ++evaluated;
      CHECK((f.P * f.P - f.P).max_abs() <= 1e-9);
      CHECK(max_abs(f.u_up * f.L_down) <= 1e-9);
      CHECK((f.P * f.g_inv.transposed() - f.u_up.transposed()).max_abs() <= 1e-9);
      CHECK(std::abs(dot(f.L_check_up, f.L_down) - f.omega) <=
            1e-10 * std::max(1.0, std::abs(f.omega)));
      CHECK(rank_and_kernel(f.u_up, 1e-8).rank <= n - 1);
      const Mat d27 = compute_A_dual_derivative(f);
      const Mat d31 = compute_A_hessian(f);
      CHECK(((d27 - d27.transposed()) - (d31 - d31.transposed())).max_abs() <= 1e-8);
      const Mat chain = f.P * (f.g_inv - f.g_inv.transposed()) * f.P.transposed();
      CHECK((residual_full(f) - chain).max_abs() <= 1e-9);
      CHECK((residual_full(f) - residual_reduced(f)).max_abs() <= 1e-9);
      const Mat u = u_from_A(f, recover_A(f).down);
      CHECK(u == u.transposed());
    }
  }
  CHECK(evaluated >= 80);
}

TEST_CASE("singular metric is reported") {
  const MapDefinition m = parse_map(2, {"v1 + v2", "2*v1 + 2*v2"});
  CHECK_THROWS_AS(evaluate_frame(m, at_v({1, 1})), SingularMetric);
  const MapDefinition d = parse_map(2, {"ln(v1)", "v2"});
  CHECK_THROWS_AS(evaluate_frame(d, at_v({-1, 1})), DomainError);
  const MapDefinition z = parse_map(2, {"v2", "-v1"});
  CHECK_THROWS_AS(evaluate_frame(z, at_v({0.3, 0.7})), NullOmega);
}

TEST_CASE("u_from_A with zero A is the symmetric part of g") {
  const FiberFrame f = evaluate_frame(non_normal(), at_v({0.2, 1, 2}));
  const Mat u = u_from_A(f, Vec(3, 0.0));
  CHECK(u == 0.5 * (f.g + f.g.transposed()));
}

TEST_CASE("gauge transform") {
  const Mat u = Mat::identity(3);
  const Vec L{1, 0, 0}, A{0.3, -0.1, 2};
  const Gauge same = gauge_transform(u, A, L, 0.0);
  CHECK(same.u == u);
  CHECK(same.A == A);
  CHECK(gauge_transform(u, A, L, -1.0).u == Mat{{0, 0, 0}, {0, 1, 0}, {0, 0, 1}});

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> un(-2, 2);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 4);
    Mat uu(n);
    Vec LL(n), AA(n);
    for (std::size_t i = 0; i < n; ++i) {
      LL[i] = un(rng);
      AA[i] = un(rng);
      for (std::size_t j = 0; j <= i; ++j) uu(i, j) = uu(j, i) = un(rng);
    }
    const double lambda = un(rng);
    const Gauge g = gauge_transform(uu, AA, LL, lambda);
    CHECK(((g.u + outer(LL, g.A)) - (uu + outer(LL, AA))).max_abs() <= 1e-12);
  }
}

TEST_CASE("norm_u") {
  CHECK(norm_u(Mat::identity(3), {1, 0, 0}, 1e-12) == 1.0);
  CHECK(norm_u(Mat{{2, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {1, 0, 0}, 1e-12) == 0.5);
  CHECK_THROWS_AS(norm_u(Mat{{1, 0, 0}, {0, 1, 0}, {0, 0, 0}}, {1, 0, 0}, 1e-12),
                  SingularMatrix);
}

TEST_CASE("classification branches") {
  const Classification fix =
      classify_decomposition(Mat::identity(3), {1, 0, 0}, {});
  CHECK(fix.branch == Branch::GaugeFixable);
  CHECK(fix.lambda == -1.0);
  CHECK(fix.det_vanishes);
  CHECK(det(gauge_transform(Mat::identity(3), Vec(3, 0.0), {1, 0, 0}, fix.lambda).u) ==
        0.0);

  // sum w^{rs} L_r L_s with w = diag(1,-1,1), L = (1,1,0) is 1 - 1 = 0
  const Mat u{{1, 0, 0}, {0, -1, 0}, {0, 0, 1}};
  const Vec L{1, 1, 0};
  const Mat w = invert(u, 1e-12).inverse;
  REQUIRE(dot(L, w * L) == 0.0);
  const Classification obs = classify_decomposition(u, L, {});
  CHECK(obs.branch == Branch::Obstructed);
  CHECK(obs.rank_u == 3);

  const Classification deg =
      classify_decomposition(Mat{{1, 0, 0}, {0, 1, 0}, {0, 0, 0}}, {0, 0, 1}, {});
  CHECK(deg.branch == Branch::DegenerateU);
  CHECK(deg.rank_u == 2);
  CHECK(branch_name(Branch::GaugeFixable) == "GaugeFixable");
}

TEST_CASE("assembly examples and rejections") {
  const Mat u{{1, 0, 0}, {0, 1, 0}, {0, 0, 0}};
  const Assembled a =
      assemble_from_decomposition({u, {0, 0, 1}, Variant::Upper}, {0, 0, 1}, {});
  CHECK(a.matrix == Mat::identity(3));
  CHECK(a.g == Mat::identity(3));
  CHECK(a.residual_reduced == 0.0);
  CHECK(a.residual_full == 0.0);

  Mat skew = u;
  skew(0, 1) = 1e-3;
  CHECK_THROWS_AS(
      assemble_from_decomposition({skew, {0, 0, 1}, Variant::Upper}, {0, 0, 1}, {}),
      NotSymmetric);
  CHECK_THROWS_AS(assemble_from_decomposition(
                      {Mat::identity(3), {0, 0, 1}, Variant::Lower}, {0, 0, 1}, {}),
                  NotDegenerate);
  CHECK_THROWS_AS(
      assemble_from_decomposition({u, {1, 0, 0}, Variant::Lower}, {0, 0, 1}, {}),
      SingularResult);
}

TEST_CASE("recover then reassemble reproduces the frame") {
  const MapDefinition m = builtin_exp_scaled_map();
  ExprGen gen(3, 77);
  for (int t = 0; t < 30; ++t) {
    const FiberFrame f = evaluate_frame(m, random_point(3, gen, 2.0, 1.0));
    const DualA A = recover_A(f);
    Mat uu = 0.5 * (f.u_up + f.u_up.transposed());
    const Assembled up =
        assemble_from_decomposition({uu, A.up, Variant::Upper}, f.L_up, {});
    CHECK(rel(up.matrix, f.g_inv) <= 1e-9);
    CHECK(up.residual_reduced < 1e-9);
    Mat ud = 0.5 * (f.u_down + f.u_down.transposed());
    const Assembled lo =
        assemble_from_decomposition({ud, A.down, Variant::Lower}, f.L_down, {});
    CHECK(rel(lo.matrix, f.g) <= 1e-9);
    CHECK(lo.residual_reduced < 1e-9);
  }
}

TEST_CASE("tolerances must be positive") {
  Tolerances t;
  CHECK_NOTHROW(t.validate());
  t.fd_step = 0;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}
