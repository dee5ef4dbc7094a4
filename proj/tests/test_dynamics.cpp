#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tsgb/dynamics.hpp"
#include "tsgb/errors.hpp"

using namespace tsgb;

namespace {

bool throws_code(Errc want, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == want;
  }
  return false;
}

IvpSpec make_spec(ScalePtr scale, const std::string& F, const std::string& K,
                  double u_a, const std::string& h, const std::string& Phi) {
  Expr h_expr = Expr::parse(h, {"t"});
  std::vector<double> hv(scale->size());
  for (std::size_t i = 0; i < scale->size(); ++i)
    hv[i] = h_expr.eval1(scale->at(i));
  return IvpSpec{scale,
                 Expr::parse(F, {"t", "u", "v"}),
                 Expr::parse(K, {"t", "u"}),
                 u_a,
                 GridFunction(scale, hv),
                 ScalarMap(Phi)};
}

}  // namespace

TEST_CASE("step rule: zero drift keeps the state constant") {
  ScalePtr zi = TimeScale::build(ScaleSpec::integer(0, 5));
  IvpSpec spec = make_spec(zi, "0", "u", 2.5, "1", "x");
  IvpSolution sol = solve_ivp(spec);
  for (std::size_t i = 0; i < zi->size(); ++i) {
    CHECK(sol.u[i] == 2.5);
    CHECK(sol.V[i] == 2.5 * double(i));  // memory term of a constant state
  }
}

TEST_CASE("step rule: pure self-coupling doubles on the unit lattice") {
  ScalePtr zi = TimeScale::build(ScaleSpec::integer(0, 6));
  IvpSpec spec = make_spec(zi, "u", "0", 1.0, "1", "x");
  IvpSolution sol = solve_ivp(spec);
  for (std::size_t i = 0; i < zi->size(); ++i)
    CHECK(sol.u[i] == std::pow(2.0, double(i)));
}

TEST_CASE("step rule: memory-driven pin values") {
  // Drift equals the memory term; memory integrates the state itself.
  ScalePtr zi = TimeScale::build(ScaleSpec::integer(0, 3));
  IvpSpec spec = make_spec(zi, "v", "u", 1.0, "1", "x");
  IvpSolution sol = solve_ivp(spec);
  const double want[4] = {1.0, 1.0, 2.0, 4.0};
  for (std::size_t i = 0; i < 4; ++i) CHECK(sol.u[i] == want[i]);
  CHECK(sol.V[0] == 0.0);
  CHECK(sol.V[1] == 1.0);
  CHECK(sol.V[2] == 2.0);
  CHECK(sol.V[3] == 4.0);
}

TEST_CASE("blow-up trips the overflow guard") {
  ScalePtr zi = TimeScale::build(ScaleSpec::integer(0, 12));
  IvpSpec spec = make_spec(zi, "u * u", "0", 2.0, "1", "x");
  CHECK(throws_code(Errc::Overflow, [&] { solve_ivp(spec); }));
}

TEST_CASE("a-priori estimate collapses to the growth factor when memory-free") {
  ScalePtr zi = TimeScale::build(ScaleSpec::integer(0, 5));
  IvpSpec spec = make_spec(zi, "u", "0", 1.0, "0", "x");
  BoundReport rep = application_bound(spec);
  for (std::size_t i = 0; i < zi->size(); ++i) {
    CHECK(rep.points[i].in_domain);
    CHECK(rep.points[i].bound ==
          doctest::Approx(std::pow(2.0, double(i))).epsilon(1e-12));
  }
  // The trajectory saturates it exactly.
  ApplicationReport ar = verify_application(spec);
  CHECK(ar.pass);
  CHECK(ar.residual_ok);
  CHECK(ar.dominated);
  for (std::size_t i = 0; i < zi->size(); ++i)
    CHECK(std::abs(ar.margin[i]) <= 1e-9 * std::max(1.0, ar.bound[i]));
}

TEST_CASE("envelope screens reject drifts and memories that outrun their caps") {
  ScalePtr zi = TimeScale::build(ScaleSpec::integer(0, 4));
  // Quadratic drift exceeds |u| + |v| immediately at u_a = 2.
  CHECK(throws_code(Errc::EnvelopeViolated, [&] {
    verify_application(make_spec(zi, "u * u", "0", 2.0, "1", "x"));
  }));
  // Quadratic memory exceeds h * Phi(|u|) with h = 1, Phi = identity.
  CHECK(throws_code(Errc::EnvelopeViolated, [&] {
    verify_application(make_spec(zi, "0", "u * u", 2.0, "1", "x"));
  }));
}

TEST_CASE("zero initial value has no admissible lead coefficient") {
  ScalePtr zi = TimeScale::build(ScaleSpec::integer(0, 4));
  IvpSpec spec = make_spec(zi, "u", "0", 0.0, "1", "x");
  CHECK(throws_code(Errc::BadInstance, [&] { application_bound(spec); }));
  CHECK(throws_code(Errc::BadInstance, [&] { verify_application(spec); }));
}

TEST_CASE("averaged drift with full memory passes end to end") {
  for (ScaleSpec spec_desc :
       {ScaleSpec::uniform(0, 1, 100), ScaleSpec::integer(0, 5)}) {
    ScalePtr s = TimeScale::build(spec_desc);
    IvpSpec spec = make_spec(s, "(u + v) / 2", "u", 1.0, "1", "x");
    ApplicationReport ar = verify_application(spec);
    CHECK(ar.pass);
    CHECK(ar.residual_ok);
    CHECK(ar.dominated);
    CHECK(ar.worst_margin >= 0.0);
    double umax = 0.0;
    for (double v : ar.u) umax = std::max(umax, std::abs(v));
    CHECK(ar.residual_max <= 1e-12 * std::max(1.0, umax));
    // The state and the estimate both start at the initial value.
    CHECK(ar.u[0] == 1.0);
    CHECK(ar.bound[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("estimate depends on the envelope data, not the trajectory") {
  // Two different drifts under the same envelope data share the same
  // a-priori estimate.
  ScalePtr s = TimeScale::build(ScaleSpec::uniform(0, 2, 30));
  IvpSpec one = make_spec(s, "u / 4", "u", 1.0, "1 + t", "sqrt(x)");
  IvpSpec two = make_spec(s, "v / 8", "u / 2", 1.0, "1 + t", "sqrt(x)");
  BoundReport r1 = application_bound(one);
  BoundReport r2 = application_bound(two);
  REQUIRE(r1.points.size() == r2.points.size());
  for (std::size_t i = 0; i < r1.points.size(); ++i)
    CHECK(r1.points[i].bound == r2.points[i].bound);
}
