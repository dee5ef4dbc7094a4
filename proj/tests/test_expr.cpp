#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tsgb/errors.hpp"
#include "tsgb/expr.hpp"
#include "tsgb/util.hpp"

using namespace tsgb;

namespace {

const std::vector<std::string> kX = {"x"};
const std::vector<std::string> kTS = {"t", "s"};

double ev(const std::string& src, double x) {
  return Expr::parse(src, kX).eval1(x);
}

bool throws_code(Errc want, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == want;
  }
  return false;
}

// Random tree over every node kind, for round-trip checks.
Expr random_tree(Rng& rng, int depth, const std::vector<std::string>& vars) {
  if (depth <= 0 || rng.integer(0, 5) == 0) {
    if (rng.integer(0, 1) == 0)
      return Expr::num(rng.real(-4.0, 4.0));
    return Expr::var(rng.integer(0, static_cast<int>(vars.size()) - 1), vars);
  }
  switch (rng.integer(0, 9)) {
    case 0:
      return Expr::unary(ast::Kind::Neg, random_tree(rng, depth - 1, vars));
    case 1:
      return Expr::unary(ast::Kind::Exp, random_tree(rng, depth - 1, vars));
    case 2:
      return Expr::unary(ast::Kind::Abs, random_tree(rng, depth - 1, vars));
    case 3:
      return Expr::binary(ast::Kind::Add, random_tree(rng, depth - 1, vars),
                          random_tree(rng, depth - 1, vars));
    case 4:
      return Expr::binary(ast::Kind::Sub, random_tree(rng, depth - 1, vars),
                          random_tree(rng, depth - 1, vars));
    case 5:
      return Expr::binary(ast::Kind::Mul, random_tree(rng, depth - 1, vars),
                          random_tree(rng, depth - 1, vars));
    case 6:
      return Expr::binary(ast::Kind::Min, random_tree(rng, depth - 1, vars),
                          random_tree(rng, depth - 1, vars));
    case 7:
      return Expr::binary(ast::Kind::Max, random_tree(rng, depth - 1, vars),
                          random_tree(rng, depth - 1, vars));
    case 8:
      return Expr::binary(ast::Kind::Div, random_tree(rng, depth - 1, vars),
                          Expr::binary(ast::Kind::Add,
                                       Expr::unary(ast::Kind::Abs,
                                                   random_tree(rng, depth - 1,
                                                               vars)),
                                       Expr::num(1.0)));
    default:
      return Expr::binary(ast::Kind::Pow,
                          Expr::unary(ast::Kind::Abs,
                                      random_tree(rng, depth - 1, vars)),
                          Expr::num(rng.real(0.2, 2.0)));
  }
}

}  // namespace

TEST_CASE("evaluation of representative sources") {
  CHECK(ev("x", 3.5) == 3.5);
  CHECK(ev("pow(x, 2) + 3 * x", 2.0) == 10.0);
  CHECK(ev("x ^ 2 + 3 * x", 2.0) == 10.0);
  CHECK(ev("min(x, 2) + max(x, 5)", 3.0) == 7.0);
  CHECK(ev("sqrt(abs(x))", -9.0) == 3.0);
  CHECK(ev("exp(0) + log(1)", 1.0) == 1.0);
  CHECK(ev("1 / (1 + x)", 1.0) == 0.5);
  Expr two = Expr::parse("t + 2 * s", kTS);
  CHECK(two.eval2(1.0, 3.0) == 7.0);
}

TEST_CASE("precedence and associativity") {
  CHECK(ev("-x ^ 2", 3.0) == 9.0);       // unary minus binds tighter
  CHECK(ev("2 ^ 3 ^ 2", 0.0) == 512.0);  // right-associative power
  CHECK(ev("1 - 2 - 3", 0.0) == -4.0);
  CHECK(ev("6 / 3 / 2", 0.0) == 1.0);
  CHECK(ev("2 + 3 * 4 ^ 2", 0.0) == 50.0);
}

TEST_CASE("syntax errors carry 1-based byte offsets") {
  try {
    Expr::parse("log(x", kX);
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SyntaxError);
    CHECK(std::string(e.what()).find("offset 6") != std::string::npos);
  }
  CHECK(throws_code(Errc::SyntaxError, [] { Expr::parse("", kX); }));
  CHECK(throws_code(Errc::SyntaxError, [] { Expr::parse("1 + * 2", kX); }));
  CHECK(throws_code(Errc::SyntaxError, [] { Expr::parse("min(x)", kX); }));
  CHECK(throws_code(Errc::SyntaxError, [] { Expr::parse("sqrt(x, 2)", kX); }));
}

TEST_CASE("unknown identifiers name the scope") {
  try {
    Expr::parse("y + 1", kX);
    FAIL("expected an identifier error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownIdentifier);
    CHECK(std::string(e.what()).find("x") != std::string::npos);
  }
  CHECK(throws_code(Errc::UnknownIdentifier,
                    [] { Expr::parse("t + u", kTS); }));
}

TEST_CASE("print round-trips to an identical tree and value") {
  Rng rng(17);
  for (int iter = 0; iter < 200; ++iter) {
    const std::vector<std::string>& vars = (iter % 2 == 0) ? kX : kTS;
    Expr e = random_tree(rng, 4, vars);
    Expr back = Expr::parse(e.print(), vars);
    CHECK(Expr::equal(e, back));
    double args[2] = {rng.real(0.1, 3.0), rng.real(0.1, 3.0)};
    double v1 = 0, v2 = 0;
    bool f1 = false, f2 = false;
    try {
      v1 = e.eval(args, vars.size());
    } catch (const Error&) {
      f1 = true;
    }
    try {
      v2 = back.eval(args, vars.size());
    } catch (const Error&) {
      f2 = true;
    }
    CHECK(f1 == f2);
    if (!f1) CHECK(v1 == v2);
  }
}

TEST_CASE("domain faults are loud and carry the offending input") {
  CHECK(throws_code(Errc::EvalFault, [] { ev("log(x)", -1.0); }));
  CHECK(throws_code(Errc::EvalFault, [] { ev("sqrt(x)", -4.0); }));
  CHECK(throws_code(Errc::EvalFault, [] { ev("1 / x", 0.0); }));
  CHECK(throws_code(Errc::EvalFault, [] { ev("exp(x)", 1000.0); }));
  CHECK(throws_code(Errc::EvalFault, [] { ev("pow(x, 1 / 2)", -1.0); }));
}

TEST_CASE("certificates: identity passes everything") {
  ScalarMap m("x");
  Certificates c = check_properties(m, 10.0, 400, 42);
  CHECK(c.nondecreasing.pass);
  CHECK(c.positive.pass);
  CHECK(c.subadditive.pass);
  CHECK(c.submultiplicative.pass);
  CHECK(c.class_s.pass);
  CHECK(c.defined_at_zero);
}

TEST_CASE("certificates: the square fails subadditivity with a witness") {
  ScalarMap m("pow(x, 2)");
  Certificates c = check_properties(m, 10.0, 400, 42);
  CHECK(!c.subadditive.pass);
  CHECK(c.subadditive.worst > 0.0);
  // The witness reproduces the violation.
  const double x = c.subadditive.wx, y = c.subadditive.wy;
  CHECK((x + y) * (x + y) - (x * x + y * y) ==
        doctest::Approx(c.subadditive.worst).epsilon(1e-12));
  CHECK(c.submultiplicative.pass);  // (xy)^2 = x^2 y^2
  CHECK(!c.class_s.pass);           // scaling down helps the square
}

TEST_CASE("certificates: comparison-functional admissibility") {
  ScalarMap lin("x");
  CHECK(check_properties(lin, 10.0, 400, 1).class_s.pass);
  ScalarMap root("sqrt(x)");
  CHECK(check_properties(root, 10.0, 400, 1).class_s.pass);
  ScalarMap logm("log(1 + x)");
  CHECK(check_properties(logm, 10.0, 400, 1).class_s.pass);
  ScalarMap ratio("x / (1 + x)");
  CHECK(check_properties(ratio, 10.0, 400, 1).class_s.pass);
  ScalarMap affine("1 / 2 + x / 2");
  CHECK(check_properties(affine, 10.0, 400, 1).class_s.pass);
}

TEST_CASE("certificates: the bounded ratio is not submultiplicative") {
  ScalarMap m("x / (1 + x)");
  Certificates c = check_properties(m, 10.0, 400, 7);
  CHECK(!c.submultiplicative.pass);  // x=y=1: 1/2 > 1/4
}

TEST_CASE("certificates are deterministic in the seed") {
  ScalarMap m1("sqrt(x)"), m2("sqrt(x)");
  Certificates a = check_properties(m1, 10.0, 300, 99);
  Certificates b = check_properties(m2, 10.0, 300, 99);
  CHECK(a.subadditive.worst == b.subadditive.worst);
  CHECK(a.subadditive.wx == b.subadditive.wx);
  CHECK(a.nondecreasing.worst == b.nondecreasing.worst);
  ScalarMap m3("sqrt(x)");
  Certificates c = check_properties(m3, 10.0, 300, 100);
  CHECK(a.subadditive.wx != c.subadditive.wx);
}

TEST_CASE("zero-probe flag distinguishes maps defined at zero") {
  ScalarMap a("log(1 + x)");
  CHECK(check_properties(a, 10.0, 200, 5).defined_at_zero);
  ScalarMap b("1 / x");
  CHECK(!check_properties(b, 10.0, 200, 5).defined_at_zero);
}

TEST_CASE("insufficient sampling is rejected") {
  ScalarMap m("x");
  CHECK(throws_code(Errc::BadSpec, [&] { check_properties(m, 10.0, 50, 1); }));
  CHECK(throws_code(Errc::BadSpec,
                    [&] { check_properties(m, -1.0, 400, 1); }));
}
