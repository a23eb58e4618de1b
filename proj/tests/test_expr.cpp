// Arithmetic/boolean expression engine used by the decision-table
// interpreter: precedence, comparisons, logic, built-in functions, errors.
#include <cmath>
#include <limits>

#include "clonal/errors.hpp"
#include "clonal/expr.hpp"
#include "doctest.h"

using clonal::ExprError;
using clonal::expr::Environment;
using clonal::expr::Expression;
using clonal::expr::evaluate;
using clonal::expr::lookup_in;

TEST_CASE("arithmetic precedence and grouping") {
  const Environment env;
  CHECK(evaluate("1 + 2 * 3", env) == doctest::Approx(7.0));
  CHECK(evaluate("(1 + 2) * 3", env) == doctest::Approx(9.0));
  CHECK(evaluate("2 - 3 - 4", env) == doctest::Approx(-5.0));  // left assoc
  CHECK(evaluate("12 / 3 / 2", env) == doctest::Approx(2.0));
  CHECK(evaluate("-2 * 3", env) == doctest::Approx(-6.0));
  CHECK(evaluate("--4", env) == doctest::Approx(4.0));
  CHECK(evaluate("1.5e2 + 0.5", env) == doctest::Approx(150.5));
  CHECK(evaluate("1/0", env) == std::numeric_limits<double>::infinity());
}

TEST_CASE("variables resolve through the environment") {
  const Environment env{{"S10", 0.888888888888889},
                        {"S21", 1.130434782608696},
                        {"alpha", 0.5}};
  CHECK(evaluate("1/S10 - alpha", env) == doctest::Approx(0.625));
  CHECK(evaluate("S21 * (1/S10 - alpha)", env) ==
        doctest::Approx(0.706521739130435).epsilon(1e-12));
  CHECK_THROWS_AS(evaluate("S10 + unknown_name", env), ExprError);
}

TEST_CASE("comparisons and boolean connectives") {
  const Environment env{{"a", 2.0}, {"b", 3.0}, {"z", 0.0}};
  CHECK(evaluate("a < b", env) == 1.0);
  CHECK(evaluate("a > b", env) == 0.0);
  CHECK(evaluate("a <= 2", env) == 1.0);
  CHECK(evaluate("a >= 2.5", env) == 0.0);
  CHECK(evaluate("a == 2", env) == 1.0);
  CHECK(evaluate("a != 2", env) == 0.0);
  CHECK(evaluate("a < b && b < 4", env) == 1.0);
  CHECK(evaluate("a > b || b > 2", env) == 1.0);
  CHECK(evaluate("a > b && b > 2", env) == 0.0);
  CHECK(evaluate("!z", env) == 1.0);
  CHECK(evaluate("!(a < b)", env) == 0.0);
  // Precedence: comparison binds tighter than '&&', which binds tighter
  // than '||'.
  CHECK(evaluate("1 < 2 && 3 < 2 || 1 < 4", env) == 1.0);
  // Arithmetic on boolean results (0/1 encoding).
  CHECK(evaluate("(a < b) + (b < a)", env) == doctest::Approx(1.0));
}

TEST_CASE("comparisons with NaN are false") {
  const Environment env{{"nan", std::numeric_limits<double>::quiet_NaN()},
                        {"x", 1.0}};
  CHECK(evaluate("nan < x", env) == 0.0);
  CHECK(evaluate("nan > x", env) == 0.0);
  CHECK(evaluate("nan == nan", env) == 0.0);
  CHECK(evaluate("nan != nan", env) == 0.0);
  CHECK(evaluate("nan <= x || nan >= x", env) == 0.0);
}

TEST_CASE("built-in functions") {
  const Environment env{{"x", -2.25}, {"y", 3.0}};
  CHECK(evaluate("abs(x)", env) == doctest::Approx(2.25));
  CHECK(evaluate("min(x, y)", env) == doctest::Approx(-2.25));
  CHECK(evaluate("max(x, y)", env) == doctest::Approx(3.0));
  CHECK(evaluate("log(exp(y))", env) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(evaluate("sqrt(y * y)", env) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(evaluate("min(abs(x), max(1, 2))", env) == doctest::Approx(2.0));
  CHECK_THROWS_AS(evaluate("min(1)", env), ExprError);     // arity
  CHECK_THROWS_AS(evaluate("abs(1, 2)", env), ExprError);  // arity
  CHECK_THROWS_AS(evaluate("frobnicate(1)", env), ExprError);
}

TEST_CASE("parse errors and reusable expression objects") {
  CHECK_THROWS_AS(Expression::parse("1 +"), ExprError);
  CHECK_THROWS_AS(Expression::parse("(1 + 2"), ExprError);
  CHECK_THROWS_AS(Expression::parse("1 2"), ExprError);
  CHECK_THROWS_AS(Expression::parse(""), ExprError);
  CHECK_THROWS_AS(Expression::parse("a @ b"), ExprError);

  const Expression expr = Expression::parse("u / v > 1");
  CHECK(expr.text() == "u / v > 1");
  CHECK_FALSE(expr.empty());
  const Environment big{{"u", 5.0}, {"v", 2.0}};
  const Environment small{{"u", 1.0}, {"v", 2.0}};
  CHECK(expr.truthy(lookup_in(big)));
  CHECK_FALSE(expr.truthy(lookup_in(small)));
  CHECK(Expression().empty());
}
