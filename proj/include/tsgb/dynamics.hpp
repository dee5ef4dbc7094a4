#pragma once

#include <vector>

#include "tsgb/bounds.hpp"
#include "tsgb/expr.hpp"
#include "tsgb/timescale.hpp"

namespace tsgb {

// A first-order initial value problem on a finite scale with a memory term:
// the state advances by the step rule
//   u(sigma(t)) = u(t) + mu(t) * F(t, u(t), V(t)),
//   V(t) = integral over [a, t) of K(t, u(tau)),
// from u(min) = u_a. F takes (t, u, v); K takes (t, u). h_fn and Phi are the
// envelope data for the a-priori estimate.
struct IvpSpec {
  ScalePtr scale;
  Expr F;
  Expr K;
  double u_a = 1.0;
  GridFunction h_fn;
  ScalarMap Phi;
};

struct IvpSolution {
  GridFunction u;
  std::vector<double> V;  // memory term at each grid point
};

// Forward recursion; exact on a finite scale up to rounding. Errors with
// Overflow once |u| passes the blow-up cutoff.
IvpSolution solve_ivp(const IvpSpec& spec);

// The a-priori estimate for |u|: the separable bound with constant lead
// |u_a|, unit outer coefficient and weight, h and Phi from the spec, and
// the identity W. Requires u_a != 0.
BoundReport application_bound(const IvpSpec& spec, double x0 = 1.0);

struct ApplicationReport {
  std::vector<double> t, u, bound, margin;  // margin = bound - |u|
  std::vector<char> in_domain;
  double residual_max = 0;   // worst defect of the integral-equation form
  double worst_margin = 0;   // over in-domain points
  bool residual_ok = false;
  bool dominated = false;
  bool pass = false;
  BoundReport report;
};

// Solve, check the two envelope conditions along the computed trajectory
// (throws EnvelopeViolated with a witness if either fails), re-evaluate the
// integral-equation residual from scratch, and compare |u| against the
// a-priori estimate.
ApplicationReport verify_application(const IvpSpec& spec, double x0 = 1.0);

}  // namespace tsgb
