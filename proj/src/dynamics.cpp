#include "tsgb/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "tsgb/errors.hpp"
#include "tsgb/util.hpp"

namespace tsgb {

namespace {

void validate_spec(const IvpSpec& spec) {
  if (!spec.scale) fail(Errc::BadSpec, "ivp needs a scale");
  if (spec.F.arity() != 3)
    fail(Errc::BadSpec, "F must use variables t, u and v");
  if (spec.K.arity() != 2) fail(Errc::BadSpec, "K must use variables t and u");
  if (spec.h_fn.scale().get() != spec.scale.get())
    fail(Errc::BadSpec, "h is sampled on a different scale object");
  for (std::size_t i = 0; i < spec.scale->size(); ++i)
    if (spec.h_fn.values()[i] < 0.0)
      fail(Errc::BadSpec, "h must be nonnegative");
}

// V(t_i) = sum over tau < i of mu_tau K(t_i, u_tau).
double memory_term(const IvpSpec& spec, const std::vector<double>& u,
                   std::size_t i) {
  const std::vector<double>& mu = spec.scale->mu_all();
  double acc = 0.0;
  for (std::size_t tau = 0; tau < i; ++tau)
    acc += mu[tau] * spec.K.eval2(spec.scale->at(i), u[tau]);
  return acc;
}

}  // namespace

IvpSolution solve_ivp(const IvpSpec& spec) {
  validate_spec(spec);
  const ScalePtr& scale = spec.scale;
  const std::size_t n = scale->size();
  const std::vector<double>& mu = scale->mu_all();
  std::vector<double> u(n), V(n);
  u[0] = spec.u_a;
  for (std::size_t i = 0; i < n; ++i) {
    V[i] = memory_term(spec, u, i);
    if (i + 1 < n) {
      u[i + 1] = u[i] + mu[i] * spec.F.eval3(scale->at(i), u[i], V[i]);
      if (!(std::abs(u[i + 1]) <= tol::overflow_ivp))
        fail(Errc::Overflow, "state exceeds the blow-up cutoff at t=" +
                                 format_double(scale->at(i + 1)));
    }
  }
  return IvpSolution{GridFunction(scale, std::move(u)), std::move(V)};
}

BoundReport application_bound(const IvpSpec& spec, double x0) {
  validate_spec(spec);
  if (spec.u_a == 0.0)
    fail(Errc::BadInstance,
         "the a-priori estimate needs a nonzero initial value");
  InstanceInputs in;
  in.scale = spec.scale;
  in.form = BoundForm::Separable;
  in.a_fn = GridFunction::constant(spec.scale, std::abs(spec.u_a));
  in.f_fn = GridFunction::constant(spec.scale, 1.0);
  in.b_fn = GridFunction::constant(spec.scale, 1.0);
  in.h_fn = spec.h_fn;
  in.Phi = spec.Phi;
  in.W = ScalarMap::identity();
  in.x0 = x0;
  return compute_bound(ProblemInstance::build(std::move(in)));
}

ApplicationReport verify_application(const IvpSpec& spec, double x0) {
  IvpSolution sol = solve_ivp(spec);
  const ScalePtr& scale = spec.scale;
  const std::size_t n = scale->size();
  const std::vector<double>& mu = scale->mu_all();
  const std::vector<double>& u = sol.u.values();
  ScalarMap phi = spec.Phi;  // envelope evaluations may record certificates

  // Envelope 1 at every kernel evaluation the trajectory used:
  // |K(t_i, u_j)| <= h(t_i) Phi(|u_j|), j < i.
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = spec.h_fn.values()[i];
    for (std::size_t j = 0; j < i; ++j) {
      const double lhs = std::abs(spec.K.eval2(scale->at(i), u[j]));
      const double rhs = hi * phi(std::abs(u[j]));
      if (lhs > rhs + 1e-12 * (1.0 + std::abs(rhs))) {
        std::ostringstream os;
        os << "memory envelope fails at t=" << format_double(scale->at(i))
           << ", u=" << format_double(u[j]) << ": |K|=" << format_double(lhs)
           << " > h*Phi=" << format_double(rhs);
        fail(Errc::EnvelopeViolated, os.str());
      }
    }
  }
  // Envelope 2 at every step: |F(t, u, V)| <= |u| + |V|.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double lhs =
        std::abs(spec.F.eval3(scale->at(i), u[i], sol.V[i]));
    const double rhs = std::abs(u[i]) + std::abs(sol.V[i]);
    if (lhs > rhs + 1e-12 * (1.0 + std::abs(rhs))) {
      std::ostringstream os;
      os << "step envelope fails at t=" << format_double(scale->at(i))
         << ": |F|=" << format_double(lhs)
         << " > |u|+|v|=" << format_double(rhs);
      fail(Errc::EnvelopeViolated, os.str());
    }
  }

  ApplicationReport rep;
  rep.report = application_bound(spec, x0);

  // Defect of the equivalent summed form, recomputed from scratch.
  double maxu = 0.0;
  for (double v : u) maxu = std::max(maxu, std::abs(v));
  rep.residual_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = spec.u_a;
    for (std::size_t s = 0; s < i; ++s) {
      const double V = memory_term(spec, u, s);
      acc += mu[s] * spec.F.eval3(scale->at(s), u[s], V);
    }
    rep.residual_max = std::max(rep.residual_max, std::abs(u[i] - acc));
  }
  rep.residual_ok = rep.residual_max <= 1e-12 * std::max(1.0, maxu);

  rep.t.resize(n);
  rep.u.resize(n);
  rep.bound.resize(n);
  rep.margin.resize(n);
  rep.in_domain.resize(n);
  rep.dominated = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    rep.t[i] = scale->at(i);
    rep.u[i] = u[i];
    const BoundPoint& pt = rep.report.points[i];
    rep.bound[i] = pt.bound;
    rep.in_domain[i] = pt.in_domain ? 1 : 0;
    rep.margin[i] = pt.in_domain ? pt.bound - std::abs(u[i])
                                 : std::numeric_limits<double>::quiet_NaN();
    if (pt.in_domain) {
      rep.worst_margin = std::min(rep.worst_margin, rep.margin[i]);
      if (std::abs(u[i]) > pt.bound + 1e-9 * std::max(1.0, pt.bound))
        rep.dominated = false;
    }
  }
  rep.pass = rep.residual_ok && rep.dominated;
  return rep;
}

}  // namespace tsgb
