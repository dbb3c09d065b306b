#include <doctest.h>

#include <cmath>

#include "legnorm/errors.hpp"
#include "legnorm/expr.hpp"
#include "random_maps.hpp"

using namespace legnorm;
using namespace legnorm::testing;

namespace {

ChartPoint at_v(Vec v) { return {Vec(v.size(), 0.0), std::move(v)}; }

}  // namespace

TEST_CASE("parse single call") {
  const Expression e = parse_expression("exp(v1)");
  REQUIRE(e.kind() == K::Call);
  CHECK(e.func() == Func::Exp);
  CHECK(e.lhs() == v(1));
}

TEST_CASE("parse potential of the exp-scaled example") {
  const Expression e = parse_expression("v1 + 0.5*(v2^2 + v3^2)");
  const Expression want =
      add(v(1), mul(num(0.5), add(Expression::binary(K::Pow, v(2), num(2)),
                                   Expression::binary(K::Pow, v(3), num(2)))));
  CHECK(e == want);
}

TEST_CASE("syntax error points at the offending token") {
  try {
    parse_expression("v1 + * v2");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.position() == 5);
    CHECK_FALSE(e.expected().empty());
  }
  CHECK_THROWS_AS(parse_expression(""), SyntaxError);
  CHECK_THROWS_AS(parse_expression("(v1"), SyntaxError);
  CHECK_THROWS_AS(parse_expression("v1 v2"), SyntaxError);
  CHECK_THROWS_AS(parse_expression("exp"), SyntaxError);
  CHECK_THROWS_AS(parse_expression("tan(v1)"), UnknownFunction);
  CHECK_THROWS_AS(parse_expression("y1 + v1"), UnknownVariable);
}

TEST_CASE("precedence and associativity") {
  auto val = [](const char* s) {
    return bind(parse_expression(s), 2).eval_scalar(at_v({0, 0}));
  };
  CHECK(val("2^3^2") == doctest::Approx(512));
  CHECK(val("-2^2") == doctest::Approx(-4));
  CHECK(val("2*3+4") == doctest::Approx(10));
  CHECK(val("2+3*4") == doctest::Approx(14));
  CHECK(val("8/4/2") == doctest::Approx(1));
  CHECK(val("8-4-2") == doctest::Approx(2));
  CHECK(val("2^-1") == doctest::Approx(0.5));
  CHECK(val("1e-3*1000") == doctest::Approx(1));
  CHECK(val("1.5E2") == doctest::Approx(150));
}

TEST_CASE("bind checks indices against the dimension") {
  CHECK_NOTHROW(bind(parse_expression("v3"), 3));
  CHECK_THROWS_AS(bind(parse_expression("v4"), 3), UnknownVariable);
  CHECK_NOTHROW(bind(parse_expression("x2 * v1"), 2));
  CHECK_THROWS_AS(bind(parse_expression("x3"), 2), UnknownVariable);
  CHECK_THROWS_AS(bind(parse_expression("v0"), 2), UnknownVariable);
}

TEST_CASE("eval_scalar") {
  CHECK(bind(parse_expression("exp(v1)"), 2).eval_scalar(at_v({0, 0})) == 1.0);
  const double got = bind(parse_expression("v1 + 0.5*(v2^2 + v3^2)"), 3)
                         .eval_scalar(at_v({1, 2, 3}));
  CHECK(got == doctest::Approx(1 + 0.5 * (4 + 9)).epsilon(1e-15));
  CHECK_THROWS_AS(bind(parse_expression("ln(v1)"), 2).eval_scalar(at_v({-1, 0})),
                  DomainError);
  CHECK_THROWS_AS(bind(parse_expression("sqrt(v1)"), 2).eval_scalar(at_v({-1, 0})),
                  DomainError);
  CHECK_THROWS_AS(bind(parse_expression("1/v1"), 2).eval_scalar(at_v({0, 0})),
                  DomainError);
  CHECK_THROWS_AS(bind(parse_expression("v1^0.5"), 2).eval_scalar(at_v({-1, 0})),
                  DomainError);
  CHECK(bind(parse_expression("v1^3"), 2).eval_scalar(at_v({-2, 0})) == -8.0);
  CHECK(bind(parse_expression("x1*v2"), 2).eval_scalar({{3, 0}, {0, 2}}) == 6.0);
}

TEST_CASE("eval_jet examples") {
  const Jet2 j = bind(parse_expression("exp(v1)"), 3).eval_jet(at_v({0, 0.3, -0.2}));
  CHECK(j.value() == 1.0);
  CHECK(j.gradient() == std::vector<double>{1, 0, 0});
  CHECK(j.hessian() == std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0, 0});

  const BoundExpression b = bind(parse_expression("v2*exp(v1)"), 2);
  const ChartPoint p = at_v({0, 3});
  const Jet2 k = b.eval_jet(p);
  CHECK(k.value() == doctest::Approx(3));
  CHECK(k.grad(0) == doctest::Approx(3));
  CHECK(k.grad(1) == doctest::Approx(1));
  CHECK(k.hess(0, 1) == doctest::Approx(1));
  CHECK(k.hess(0, 0) == doctest::Approx(3));
  CHECK(k.hess(1, 1) == 0.0);

  const Jet2 c = bind(parse_expression("x1^2 + sin(x2)"), 2).eval_jet({{1, 2}, {3, 4}});
  CHECK(c.gradient() == std::vector<double>{0, 0});
  CHECK(c.hessian() == std::vector<double>(4, 0.0));
}

TEST_CASE("printer round trip is a fixed point") {
  const char* samples[] = {"v1 + 0.5*(v2^2 + v3^2)", "-v1", "-(v1 + v2)",
                           "2^3^2", "(2^3)^2", "-2^2", "(-2)^2", "a",
                           "v1 - (v2 - v3)", "v1/(v2*v3)", "exp(-v1)*sin(x1)",
                           "v1^-2", "1e-7 + 3"};
  for (const char* s : samples) {
    CAPTURE(s);
    if (std::string_view(s) == "a") {
      CHECK_THROWS(parse_expression(s));
      continue;
    }
    const Expression e = parse_expression(s);
    const std::string once = e.to_string();
    CHECK(parse_expression(once) == e);
    CHECK(parse_expression(once).to_string() == once);
  }
}

TEST_CASE("printer round trip on random trees") {
  ExprGen gen(3, 7);
  for (int t = 0; t < 300; ++t) {
    const Expression e = gen(5);
    const std::string s = e.to_string();
    CAPTURE(s);
    const Expression back = parse_expression(s);
    CHECK(back.to_string() == s);
    const ChartPoint p{{0.3, -0.2, 0.7}, {0.1, 0.5, -0.4}};
    const double a = bind(e, 3).eval_scalar(p);
    const double b = bind(back, 3).eval_scalar(p);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("jet value equals scalar value exactly") {
  ExprGen gen(3, 11);
  for (int t = 0; t < 200; ++t) {
    const BoundExpression e = bind(gen(4), 3);
    const ChartPoint p = random_point(3, gen);
    CHECK(e.eval_jet(p).value() == e.eval_scalar(p));
  }
}

TEST_CASE("symbolic derivative agrees with the jet gradient") {
  ExprGen gen(3, 23);
  for (int t = 0; t < 100; ++t) {
    const Expression e = gen(4);
    const ChartPoint p = random_point(3, gen);
    const Jet2 j = bind(e, 3).eval_jet(p);
    for (std::size_t i = 1; i <= 3; ++i) {
      const double d = bind(differentiate(e, i), 3).eval_scalar(p);
      CHECK(d == doctest::Approx(j.grad(i - 1)).epsilon(1e-9).scale(1));
    }
  }
  CHECK(differentiate(parse_expression("x1 + 3"), 1).is_number(0.0));
  CHECK(differentiate(parse_expression("v2"), 2).is_number(1.0));
}

TEST_CASE("map construction") {
  CHECK_THROWS_AS(make_explicit_map(3, {v(1), v(2)}), FormatError);
  const MapDefinition m = make_explicit_map(2, {v(1), mul(v(2), x(1))});
  CHECK(m.n == 2);
  CHECK(m.components.size() == 2);
  CHECK(m.to_text() == "dim = 2\nL1 = v1\nL2 = v2*x1\n");
}
