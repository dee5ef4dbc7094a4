#include "tsgb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsgb/errors.hpp"
#include "tsgb/quadrature.hpp"

namespace tsgb {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Symbolic instances

ProblemInstance SymbolicInstance::instantiate() const {
  return instantiate(TimeScale::build(scale_spec));
}

ProblemInstance SymbolicInstance::instantiate(ScalePtr scale) const {
  const std::size_t n = scale->size();
  auto sample = [&](const std::string& src) {
    Expr e = Expr::parse(src, {"t"});
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = e.eval1(scale->at(i));
    return GridFunction(scale, std::move(v));
  };
  InstanceInputs in;
  in.scale = scale;
  in.form = form;
  in.x0 = x0;
  in.delta0 = delta0;
  if (!f.empty()) in.f_fn = sample(f);
  if (!a.empty()) in.a_fn = sample(a);
  if (!h.empty()) in.h_fn = sample(h);
  if (!b.empty()) in.b_fn = sample(b);
  if (!k.empty()) in.kernel_expr = Expr::parse(k, {"t", "s"});
  if (!Phi.empty()) in.Phi = ScalarMap(Phi);
  if (!W.empty()) in.W = ScalarMap(W);
  if (!g.empty()) in.g = ScalarMap(g);
  return ProblemInstance::build(std::move(in));
}

// ---------------------------------------------------------------------------
// Extremal chain and hypothesis evaluation

namespace {

// Shared accumulation for both directions. When `given` is null the output
// vector doubles as the chain being built (indices < i are final when index
// i is formed), so both modes run the identical operation sequence.
std::vector<double> chain_values(const ProblemInstance& inst,
                                 const double* given) {
  const ScalePtr& scale = inst.scale();
  const std::size_t n = scale->size();
  const std::vector<double>& mu = scale->mu_all();
  const std::vector<double>& f = inst.f_fn().values();
  const std::vector<double>& a = inst.a_fn().values();
  const bool sep = form_is_separable(inst.form());
  const bool sform = form_is_class_s(inst.form());
  const ScalarMap& Phi = inst.Phi();
  const ScalarMap& W = inst.W();

  std::vector<double> out(n);
  const double* src = given ? given : out.data();
  out[0] = a[0];
  double acc_lin = 0.0, acc_w = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t s = i - 1;
    double inner = 0.0;
    for (std::size_t tau = 0; tau < s; ++tau) {
      const double mid =
          sep ? inst.b_fn().values()[tau] : inst.kernel().k(s, tau);
      inner += mu[tau] * mid * Phi(src[tau]);
    }
    acc_lin += mu[s] * f[s] * (sform ? inst.g()(src[s]) : src[s]);
    acc_w += mu[s] * f[s] * (sep ? inst.h_fn().values()[s] : 1.0) * W(inner);
    out[i] = a[i] + acc_lin + acc_w;
    if (!given && !(std::abs(out[i]) <= tol::overflow_u))
      fail(Errc::Overflow, "extremal chain exceeds the cutoff at t=" +
                               format_double(scale->at(i)));
  }
  return out;
}

}  // namespace

GridFunction synthesize_extremal(const ProblemInstance& inst) {
  return GridFunction(inst.scale(), chain_values(inst, nullptr));
}

std::vector<double> hypothesis_rhs(const ProblemInstance& inst,
                                   const std::vector<double>& u) {
  if (u.size() != inst.scale()->size())
    fail(Errc::BadSpec, "u has the wrong number of samples");
  return chain_values(inst, u.data());
}

DominationResult verify_domination(const ProblemInstance& inst,
                                   const GridFunction& u) {
  if (u.scale().get() != inst.scale().get())
    fail(Errc::BadSpec, "u is sampled on a different scale object");
  const std::size_t n = inst.scale()->size();
  const std::vector<double>& uv = u.values();
  std::vector<double> rhs = hypothesis_rhs(inst, uv);
  for (std::size_t i = 0; i < n; ++i)
    if (uv[i] > rhs[i] + 1e-9 * std::max(1.0, std::abs(rhs[i])))
      fail(Errc::HypothesisViolated,
           "u exceeds the hypothesis display at t=" +
               format_double(inst.scale()->at(i)) +
               ": u=" + format_double(uv[i]) +
               " > rhs=" + format_double(rhs[i]));

  DominationResult res;
  res.report = compute_bound(inst);
  res.t.resize(n);
  res.u = uv;
  res.bound.resize(n);
  res.margin.resize(n);
  res.in_domain.resize(n);
  res.pass = true;
  res.worst_margin = std::numeric_limits<double>::infinity();
  res.tightness = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const BoundPoint& pt = res.report.points[i];
    res.t[i] = pt.t;
    res.bound[i] = pt.bound;
    res.in_domain[i] = pt.in_domain ? 1 : 0;
    res.margin[i] = pt.in_domain ? pt.bound - uv[i] : kNan;
    if (!pt.in_domain) continue;
    res.worst_margin = std::min(res.worst_margin, res.margin[i]);
    if (pt.bound > 0.0)
      res.tightness = std::max(res.tightness, uv[i] / pt.bound);
    if (uv[i] > pt.bound + 1e-9 * std::max(1.0, pt.bound)) res.pass = false;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Random generation over the curated libraries

ScaleSpec random_scale_spec(Rng& rng) {
  switch (rng.integer(0, 5)) {
    case 0: {
      const int a0 = rng.integer(-2, 3);
      return ScaleSpec::integer(a0, a0 + rng.integer(6, 14));
    }
    case 1:
    case 2:
    case 3: {
      static const double steps[3] = {0.1, 0.5, 2.0};
      const double h = steps[rng.integer(0, 2)];
      const double a = rng.integer(-3, 3) * h;
      return ScaleSpec::hgrid(a, a + rng.integer(8, 18) * h, h);
    }
    case 4: {
      const double a = rng.real(-0.5, 0.5);
      return ScaleSpec::uniform(a, a + rng.real(1.0, 3.0),
                                rng.integer(8, 24));
    }
    default:
      return ScaleSpec::qgeometric(rng.real(1.2, 1.8), rng.real(0.5, 1.5),
                                   rng.integer(8, 16));
  }
}

namespace {

std::string random_kernel_source(Rng& rng, double span, double tmax_abs) {
  switch (rng.integer(0, 4)) {
    case 0:
      return format_double(rng.real(0.2, 2.0) / span);
    case 1:
      return format_double(rng.real(0.2, 2.0) / (span * (1.0 + span))) +
             " * (1 + t - s)";
    case 2:
      return format_double(rng.real(0.2, 2.0) / (3.0 * span)) + " * exp(" +
             format_double(rng.real(0.0, 1.0 / (1.0 + tmax_abs))) + " * t)";
    case 3:
      return format_double(rng.real(0.2, 2.0) / (3.0 * span)) + " * exp(-" +
             format_double(rng.real(0.0, 1.0 / (1.0 + tmax_abs))) + " * s)";
    default:
      return format_double(rng.real(0.1, 1.0) / span) + " + " +
             format_double(rng.real(0.0, 1.0) / (span * (1.0 + span))) +
             " * (t - s)";
  }
}

std::string random_phi_source(Rng& rng) {
  switch (rng.integer(0, 4)) {
    case 0: return "x";
    case 1: return "sqrt(x)";
    case 2: return "pow(x, " + format_double(rng.real(0.4, 1.0)) + ")";
    case 3: return format_double(rng.real(1.0, 2.0)) + " * x";
    default: return "x + sqrt(x)";
  }
}

std::string random_w_source(Rng& rng) {
  static const char* lib[4] = {"x", "sqrt(x)", "x / (1 + x)", "log(1 + x)"};
  return lib[rng.integer(0, 3)];
}

std::string random_g_source(Rng& rng) {
  static const char* lib[5] = {"x", "sqrt(x)", "x / (1 + x)", "log(1 + x)",
                               "1"};
  return lib[rng.integer(0, 4)];
}

}  // namespace

ProblemInstance random_instance(Rng& rng, BoundForm form,
                                const ScaleSpec& spec) {
  ScalePtr scale = TimeScale::build(spec);
  const std::size_t n = scale->size();
  const double span = scale->span();
  const double tmax_abs =
      std::max(std::abs(scale->min()), std::abs(scale->max()));
  const bool sep = form_is_separable(form);
  const bool sform = form_is_class_s(form);

  for (int attempt = 0; attempt < 40; ++attempt) {
    try {
      InstanceInputs in;
      in.scale = scale;
      in.form = form;
      const double mass = rng.real(0.3, 1.6);
      std::vector<double> fv(n), av(n);
      for (std::size_t i = 0; i < n; ++i)
        fv[i] = rng.real(0.0, 2.0 * mass / span);
      av[0] = rng.real(0.3, 2.0);
      for (std::size_t i = 1; i < n; ++i)
        av[i] = av[i - 1] + rng.real(0.0, 1.0 / static_cast<double>(n));
      in.f_fn = GridFunction(scale, std::move(fv));
      in.a_fn = GridFunction(scale, std::move(av));
      if (sep) {
        std::vector<double> hv(n), bv(n);
        for (std::size_t i = 0; i < n; ++i) hv[i] = rng.real(0.0, 1.5);
        for (std::size_t i = 0; i < n; ++i)
          bv[i] = rng.real(0.1, 2.0) / span;
        in.h_fn = GridFunction(scale, std::move(hv));
        in.b_fn = GridFunction(scale, std::move(bv));
      } else {
        in.kernel_expr =
            Expr::parse(random_kernel_source(rng, span, tmax_abs), {"t", "s"});
      }
      in.Phi = ScalarMap(random_phi_source(rng));
      in.W = ScalarMap(random_w_source(rng));
      if (sform) in.g = ScalarMap(random_g_source(rng));
      return ProblemInstance::build(std::move(in));
    } catch (const Error& e) {
      if (e.code() != Errc::BadInstance && e.code() != Errc::CertificateFail)
        throw;
    }
  }
  fail(Errc::GeneratorExhausted,
       "no admissible instance after 40 draws on " + spec.describe());
}

// ---------------------------------------------------------------------------
// Sweep

SweepResult run_sweep(std::uint64_t seed, int instances,
                      const std::vector<BoundForm>& forms) {
  if (instances < 1) fail(Errc::BadSpec, "sweep needs at least one instance");
  if (forms.empty()) fail(Errc::BadSpec, "sweep needs at least one form");
  Rng master(seed);
  SweepResult out;
  out.total = instances;
  for (int idx = 0; idx < instances; ++idx) {
    const std::uint64_t iseed = master.child_seed();
    const BoundForm form = forms[static_cast<std::size_t>(idx) % forms.size()];
    Rng local(iseed);
    const ScaleSpec sspec = random_scale_spec(local);
    try {
      ProblemInstance inst = random_instance(local, form, sspec);
      GridFunction u = synthesize_extremal(inst);
      DominationResult dom = verify_domination(inst, u);
      if (!dom.pass) ++out.violations;
      out.rows.push_back(SweepRow{iseed, form, sspec.describe(),
                                  dom.worst_margin, dom.tightness});
    } catch (const Error& e) {
      if (e.code() == Errc::Overflow) {
        ++out.skipped_overflow;
        continue;
      }
      throw;
    }
  }
  std::sort(out.rows.begin(), out.rows.end(),
            [](const SweepRow& x, const SweepRow& y) { return x.seed < y.seed; });
  return out;
}

// ---------------------------------------------------------------------------
// Convergence study

std::vector<ConvergenceRow> convergence_study(
    const SymbolicInstance& base, const std::vector<int>& factors) {
  if (factors.empty()) fail(Errc::BadSpec, "convergence needs factors");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i] < 1) fail(Errc::BadSpec, "factors must be >= 1");
    if (i > 0 && factors[i] <= factors[i - 1])
      fail(Errc::BadSpec, "factors must be strictly increasing");
  }
  if (base.f.empty())
    fail(Errc::BadSpec, "convergence study needs an f expression");

  ScalePtr coarse = TimeScale::build(base.scale_spec);
  const std::size_t m = coarse->size();
  Expr fex = Expr::parse(base.f, {"t"});
  std::vector<double> exp_integral(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double integral = adaptive_simpson(
        [&](double t) { return fex.eval1(t); }, coarse->min(), coarse->at(i));
    exp_integral[i] = std::exp(integral);
  }

  std::vector<ConvergenceRow> rows;
  std::vector<double> prev;
  double prev_diff = kNan;
  for (std::size_t kidx = 0; kidx < factors.size(); ++kidx) {
    const int factor = factors[kidx];
    ScalePtr fine = refine(base.scale_spec, factor);
    ProblemInstance inst = base.instantiate(fine);
    BoundReport rep = compute_bound(inst);
    GridFunction p = compute_p(inst.f_fn());

    std::vector<double> at_base(m);
    double p_gap = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = fine->index_of(coarse->at(i));
      at_base[i] = rep.points[j].in_domain ? rep.points[j].bound : kNan;
      p_gap = std::max(p_gap, std::abs(p.values()[j] - exp_integral[i]));
    }

    ConvergenceRow row;
    row.factor = factor;
    row.points = fine->size();
    row.sup_diff = kNan;
    row.order = kNan;
    row.p_gap = p_gap;
    if (kidx > 0) {
      double d = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double gap = std::abs(at_base[i] - prev[i]);
        d = std::isnan(gap) ? kNan : std::max(d, gap);
        if (std::isnan(d)) break;
      }
      row.sup_diff = d;
      if (kidx > 1 && prev_diff > 0.0 && d > 0.0) {
        const double ratio = static_cast<double>(factors[kidx]) /
                             static_cast<double>(factors[kidx - 1]);
        row.order = std::log(prev_diff / d) / std::log(ratio);
      }
      prev_diff = d;
    }
    rows.push_back(row);
    prev = std::move(at_base);
  }
  return rows;
}

}  // namespace tsgb
