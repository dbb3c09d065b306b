#include <doctest.h>

#include <cmath>

#include "finite_diff.hpp"
#include "legnorm/errors.hpp"
#include "legnorm/jet.hpp"
#include "random_maps.hpp"

using namespace legnorm;
using namespace legnorm::testing;

namespace {

void check_symmetric(const Jet2& j) {
  for (std::size_t q = 0; q < j.dim(); ++q)
    for (std::size_t k = 0; k < j.dim(); ++k)
      REQUIRE(j.hess(q, k) == j.hess(k, q));
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
}

}  // namespace

TEST_CASE("seeding") {
  const Jet2 a = Jet2::seed(VarKind::Fiber, 2, 5.0, 3);
  CHECK(a.value() == 5.0);
  CHECK(a.gradient() == std::vector<double>{0, 1, 0});
  CHECK(a.hessian() == std::vector<double>(9, 0.0));
  const Jet2 b = Jet2::seed(VarKind::Base, 1, 7.0, 3);
  CHECK(b.value() == 7.0);
  CHECK(b.gradient() == std::vector<double>(3, 0.0));
  CHECK(b.hessian() == std::vector<double>(9, 0.0));
  CHECK_THROWS_AS(Jet2::seed(VarKind::Fiber, 4, 0, 3), IndexOutOfRange);
  CHECK_THROWS_AS(Jet2::seed(VarKind::Fiber, 0, 0, 3), IndexOutOfRange);
}

TEST_CASE("arithmetic examples") {
  const Jet2 v1 = Jet2::seed(VarKind::Fiber, 1, 0.0, 3);
  const Jet2 v2 = Jet2::seed(VarKind::Fiber, 2, 3.0, 3);
  const Jet2 e = exp(v1);
  CHECK(e.value() == 1.0);
  CHECK(e.gradient() == std::vector<double>{1, 0, 0});
  CHECK(e.hessian() == std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0, 0});

  const Jet2 p = v2 * e;
  CHECK(p.value() == 3.0);
  CHECK(p.gradient() == std::vector<double>{3, 1, 0});
  CHECK(p.hess(0, 0) == 3.0);
  CHECK(p.hess(0, 1) == 1.0);
  CHECK(p.hess(1, 0) == 1.0);
  CHECK(p.hess(1, 1) == 0.0);
  check_symmetric(p);
}

TEST_CASE("a / a is the constant one") {
  const Jet2 v1 = Jet2::seed(VarKind::Fiber, 1, 0.4, 3);
  const Jet2 v3 = Jet2::seed(VarKind::Fiber, 3, -1.2, 3);
  const Jet2 a = sin(v1) * exp(v3) + v1 * v3 * v3 + 2.0 * v1;
  const Jet2 q = a / a;
  CHECK(std::abs(q.value() - 1.0) <= 1e-12);
  for (double g : q.gradient()) CHECK(std::abs(g) <= 1e-12);
  for (double h : q.hessian()) CHECK(std::abs(h) <= 1e-12);
}

TEST_CASE("domain errors") {
  const Jet2 z = Jet2::seed(VarKind::Fiber, 1, 0.0, 2);
  const Jet2 m = Jet2::seed(VarKind::Fiber, 1, -1.0, 2);
  CHECK_THROWS_AS(z / z, DomainError);
  CHECK_THROWS_AS(log(z), DomainError);
  CHECK_THROWS_AS(log(m), DomainError);
  CHECK_THROWS_AS(sqrt(m), DomainError);
  CHECK_THROWS_AS(sqrt(z), DomainError);
  CHECK_THROWS_AS(pow(z, -1), DomainError);
  CHECK_THROWS_AS(pow(m, Jet2(0.5, 2)), DomainError);
  CHECK(pow(m, 3).value() == -1.0);
  CHECK(pow(z, 0).value() == 1.0);
}

TEST_CASE("elementary functions against closed derivatives") {
  const double x = 0.7;
  const Jet2 a = Jet2::seed(VarKind::Fiber, 1, x, 1);
  struct Case {
    Jet2 j;
    double f, f1, f2;
  };
  const Case cases[] = {
      {exp(a), std::exp(x), std::exp(x), std::exp(x)},
      {log(a), std::log(x), 1 / x, -1 / (x * x)},
      {sin(a), std::sin(x), std::cos(x), -std::sin(x)},
      {cos(a), std::cos(x), -std::sin(x), -std::cos(x)},
      {sqrt(a), std::sqrt(x), 0.5 / std::sqrt(x), -0.25 / (x * std::sqrt(x))},
      {pow(a, 3), x * x * x, 3 * x * x, 6 * x},
      {pow(a, -2), 1 / (x * x), -2 / (x * x * x), 6 / (x * x * x * x)},
      {pow(a, Jet2(1.5, 1)), std::pow(x, 1.5), 1.5 * std::sqrt(x),
       0.75 / std::sqrt(x)},
  };
  for (const auto& c : cases) {
    CHECK(c.j.value() == doctest::Approx(c.f).epsilon(1e-14));
    CHECK(c.j.grad(0) == doctest::Approx(c.f1).epsilon(1e-14));
    CHECK(c.j.hess(0, 0) == doctest::Approx(c.f2).epsilon(1e-13));
  }
}

TEST_CASE("linearity") {
  ExprGen gen(3, 5);
  for (int t = 0; t < 50; ++t) {
    const BoundExpression f = bind(gen(3), 3);
    const BoundExpression g = bind(gen(3), 3);
    const double alpha = gen.uniform(-2, 2), beta = gen.uniform(-2, 2);
    const ChartPoint p = random_point(3, gen);
    const Jet2 jf = f.eval_jet(p), jg = g.eval_jet(p);
    const Jet2 sum = alpha * jf + beta * jg;
    const BoundExpression combined =
        bind(add(mul(num(alpha), f.expression()), mul(num(beta), g.expression())), 3);
    const Jet2 direct = combined.eval_jet(p);
    const double scale = 1e-12 * std::max(1.0, std::abs(sum.value()));
    CHECK(std::abs(direct.value() - sum.value()) <= scale);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(std::abs(direct.grad(k) - sum.grad(k)) <=
            1e-12 * std::max(1.0, std::abs(sum.grad(k))));
      for (std::size_t q = 0; q < 3; ++q)
        CHECK(std::abs(direct.hess(q, k) - sum.hess(q, k)) <=
              1e-12 * std::max(1.0, std::abs(sum.hess(q, k))));
    }
  }
}

TEST_CASE("random trees agree with finite differences") {
  ExprGen gen(3, 99);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    const BoundExpression e = bind(gen(4), 3);
    const ChartPoint p = random_point(3, gen, 0.9, 0.9);
    const Jet2 j = e.eval_jet(p);
    check_symmetric(j);
    const auto g = fd_gradient(e, p, 1e-5);
    const auto H = fd_hessian(e, p, 1e-4);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(close(j.grad(k), g[k], 1e-6));
      for (std::size_t q = 0; q < 3; ++q)
        CHECK(close(j.hess(q, k), H[q * 3 + k], 1e-4));
    }
    ++checked;
  }
  CHECK(checked == 200);
}
