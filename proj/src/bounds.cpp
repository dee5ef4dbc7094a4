#include "tsgb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tsgb/errors.hpp"
#include "tsgb/kern.hpp"
#include "tsgb/util.hpp"

namespace tsgb {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

const char* bound_form_name(BoundForm f) {
  switch (f) {
    case BoundForm::Kernel: return "kernel";
    case BoundForm::Separable: return "separable";
    case BoundForm::KernelS: return "kernel_s";
    case BoundForm::SeparableS: return "separable_s";
  }
  return "?";
}

BoundForm bound_form_from(const std::string& name) {
  if (name == "kernel") return BoundForm::Kernel;
  if (name == "separable") return BoundForm::Separable;
  if (name == "kernel_s") return BoundForm::KernelS;
  if (name == "separable_s") return BoundForm::SeparableS;
  fail(Errc::BadSpec, "unknown bound form '" + name +
                          "' (expected kernel, separable, kernel_s or "
                          "separable_s)");
}

bool form_is_separable(BoundForm f) {
  return f == BoundForm::Separable || f == BoundForm::SeparableS;
}

bool form_is_class_s(BoundForm f) {
  return f == BoundForm::KernelS || f == BoundForm::SeparableS;
}

// ---------------------------------------------------------------------------
// KernelMap

KernelMap::KernelMap(ScalePtr scale, const Expr& expr)
    : scale_(std::move(scale)), expr_(expr) {
  if (!scale_) fail(Errc::BadSpec, "kernel needs a scale");
  if (expr_.arity() != 2)
    fail(Errc::BadSpec, "kernel expression must use variables t and s");
  const std::size_t n = scale_->size();
  k_.resize(n * (n + 1) / 2);
  double maxk = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = scale_->at(i);
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = expr_.eval2(t, scale_->at(j));
      if (v < 0.0)
        fail(Errc::BadInstance,
             "kernel negative at (t=" + format_double(t) +
                 ", s=" + format_double(scale_->at(j)) +
                 "): " + format_double(v));
      k_[i * (i + 1) / 2 + j] = v;
      maxk = std::max(maxk, v);
    }
  }
  // First-argument monotonicity: the forward difference across one step of
  // the first slot must be nonnegative, up to rounding in the two samples.
  const double slack = 1e-9 * (1.0 + maxk);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double diff = k(i + 1, j) - k(i, j);
      if (diff < -slack)
        fail(Errc::BadInstance,
             "kernel decreasing in its first argument at (t=" +
                 format_double(scale_->at(i)) +
                 ", s=" + format_double(scale_->at(j)) +
                 "): step " + format_double(diff));
    }
  }
  // The bound constant integrates k over pairs with t off the maximum and
  // s at least two steps from it; a kernel vanishing there is useless.
  double maxk_range = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j <= i && j + 2 < n; ++j)
      maxk_range = std::max(maxk_range, k(i, j));
  if (maxk_range <= 0.0)
    fail(Errc::BadInstance,
         "kernel vanishes identically on the admissible index range");
}

KernelMap KernelMap::parse(ScalePtr scale, const std::string& source) {
  return KernelMap(std::move(scale), Expr::parse(source, {"t", "s"}));
}

double KernelMap::d1(std::size_t i, std::size_t j) const {
  const std::size_t n = scale_->size();
  if (i + 1 >= n)
    fail(Errc::NotInKappa, "first-argument derivative needs t below the "
                           "maximum of the scale");
  return (k(i + 1, j) - k(i, j)) / scale_->mu_at(i);
}

// ---------------------------------------------------------------------------
// ProblemInstance

namespace {

void require_on_scale(const ScalePtr& scale, const GridFunction& gf,
                      const char* name) {
  if (gf.scale().get() != scale.get())
    fail(Errc::BadInstance,
         std::string(name) + " is sampled on a different scale object");
}

void require_certs(ScalarMap& m, const char* role,
                   std::initializer_list<const char*> props, double hi,
                   std::uint64_t seed) {
  if (!m.certs().nondecreasing.checked) check_properties(m, hi, 256, seed);
  const Certificates& c = m.certs();
  auto demand = [&](const char* prop, const CertRecord& rec) {
    for (const char* p : props) {
      if (std::string(p) == prop && !rec.pass) {
        std::ostringstream os;
        os << role << ": " << prop << " certificate FAIL (worst violation "
           << format_double(rec.worst) << " at x=" << format_double(rec.wx);
        if (std::string(prop) == "subadditive" ||
            std::string(prop) == "submultiplicative" ||
            std::string(prop) == "class_s")
          os << ", y=" << format_double(rec.wy);
        os << ")";
        fail(Errc::CertificateFail, os.str());
      }
    }
  };
  demand("nondecreasing", c.nondecreasing);
  demand("positive", c.positive);
  demand("subadditive", c.subadditive);
  demand("submultiplicative", c.submultiplicative);
  demand("class_s", c.class_s);
}

}  // namespace

ProblemInstance::ProblemInstance(ScalePtr scale, BoundForm form,
                                 GridFunction a, GridFunction f,
                                 std::optional<GridFunction> h,
                                 std::optional<GridFunction> b,
                                 std::optional<KernelMap> k, ScalarMap Phi,
                                 ScalarMap W, std::optional<ScalarMap> g,
                                 double x0, double delta0)
    : scale_(std::move(scale)),
      form_(form),
      a_(std::move(a)),
      f_(std::move(f)),
      h_(std::move(h)),
      b_(std::move(b)),
      kernel_(std::move(k)),
      Phi_(std::move(Phi)),
      W_(std::move(W)),
      g_(std::move(g)),
      x0_(x0),
      delta0_(delta0) {}

ProblemInstance ProblemInstance::build(InstanceInputs in) {
  if (!in.scale) fail(Errc::BadInstance, "instance needs a scale");
  const ScalePtr& scale = in.scale;
  const std::size_t n = scale->size();
  const bool sep = form_is_separable(in.form);
  const bool sform = form_is_class_s(in.form);

  auto need = [&](bool present, const char* field) {
    if (!present)
      fail(Errc::BadInstance, std::string("form ") + bound_form_name(in.form) +
                                  " requires field '" + field + "'");
  };
  auto forbid = [&](bool present, const char* field) {
    if (present)
      fail(Errc::BadInstance, std::string("form ") + bound_form_name(in.form) +
                                  " does not take field '" + field + "'");
  };
  need(in.a_fn.has_value(), "a");
  need(in.f_fn.has_value(), "f");
  need(in.Phi.has_value(), "Phi");
  need(in.W.has_value(), "W");
  if (sep) {
    need(in.h_fn.has_value(), "h");
    need(in.b_fn.has_value(), "b");
    forbid(in.kernel_expr.has_value(), "k");
  } else {
    need(in.kernel_expr.has_value(), "k");
    forbid(in.h_fn.has_value(), "h");
    forbid(in.b_fn.has_value(), "b");
  }
  if (sform)
    need(in.g.has_value(), "g");
  else
    forbid(in.g.has_value(), "g");

  if (!(in.x0 > 0.0))
    fail(Errc::NonpositiveInput, "transform base x0 must be positive");
  if (!(in.delta0 > 0.0))
    fail(Errc::NonpositiveInput, "transform base delta0 must be positive");

  require_on_scale(scale, *in.a_fn, "a");
  require_on_scale(scale, *in.f_fn, "f");
  const auto& av = in.a_fn->values();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(av[i] >= 1e-300))
      fail(Errc::BadInstance, "a must be strictly positive (a(t=" +
                                  format_double(scale->at(i)) +
                                  ") = " + format_double(av[i]) + ")");
    if (i > 0 && av[i] < av[i - 1] * (1.0 - 1e-12))
      fail(Errc::BadInstance,
           "a must be nondecreasing (drops at t=" +
               format_double(scale->at(i)) + ")");
  }
  for (std::size_t i = 0; i < n; ++i)
    if (in.f_fn->values()[i] < 0.0)
      fail(Errc::BadInstance, "f must be nonnegative (f(t=" +
                                  format_double(scale->at(i)) +
                                  ") = " + format_double(in.f_fn->values()[i]) +
                                  ")");
  if (sep) {
    require_on_scale(scale, *in.h_fn, "h");
    require_on_scale(scale, *in.b_fn, "b");
    for (std::size_t i = 0; i < n; ++i) {
      if (in.h_fn->values()[i] < 0.0)
        fail(Errc::BadInstance, "h must be nonnegative");
      if (in.b_fn->values()[i] < 0.0)
        fail(Errc::BadInstance, "b must be nonnegative");
    }
    double maxb = 0.0;
    for (std::size_t i = 0; i + 2 < n; ++i)
      maxb = std::max(maxb, in.b_fn->values()[i]);
    if (maxb <= 0.0)
      fail(Errc::BadInstance,
           "b vanishes identically on the admissible index range");
  }

  std::optional<KernelMap> kmap;
  if (!sep) kmap.emplace(scale, *in.kernel_expr);

  const double cert_hi = 10.0 * std::max(1.0, scale->span());
  require_certs(*in.Phi, "Phi",
                {"nondecreasing", "positive", "subadditive",
                 "submultiplicative"},
                cert_hi, 0xC0FFEEull);
  require_certs(*in.W, "W", {"nondecreasing", "positive"}, cert_hi,
                0xC0FFEFull);
  if (sform)
    require_certs(*in.g, "g", {"nondecreasing", "positive", "class_s"},
                  cert_hi, 0xC0FFF0ull);

  return ProblemInstance(scale, in.form, std::move(*in.a_fn),
                         std::move(*in.f_fn), std::move(in.h_fn),
                         std::move(in.b_fn), std::move(kmap),
                         std::move(*in.Phi), std::move(*in.W),
                         std::move(in.g), in.x0, in.delta0);
}

ProblemInstance ProblemInstance::with_bases(double x0, double delta0) const {
  if (!(x0 > 0.0) || !(delta0 > 0.0))
    fail(Errc::NonpositiveInput, "transform bases must be positive");
  ProblemInstance copy = *this;
  copy.x0_ = x0;
  copy.delta0_ = delta0;
  return copy;
}

// ---------------------------------------------------------------------------
// p, transforms, q

GridFunction compute_p(const GridFunction& f_fn) {
  const ScalePtr& scale = f_fn.scale();
  const std::size_t n = scale->size();
  const std::vector<double>& mu = scale->mu_all();
  const std::vector<double>& f = f_fn.values();
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Accumulate the defining sum backward so the cumulative product from
    // sigma(t_j) up to t_i extends by one factor per step.
    double acc = 0.0, prod = 1.0;
    for (std::size_t jj = i; jj-- > 0;) {
      if (jj + 1 < i) prod *= 1.0 + mu[jj + 1] * f[jj + 1];
      acc += mu[jj] * f[jj] * prod;
    }
    p[i] = 1.0 + acc;
    if (!std::isfinite(p[i]))
      fail(Errc::Overflow,
           "growth factor overflows at t=" + format_double(scale->at(i)));
  }
  return GridFunction(scale, std::move(p));
}

MonotoneTransform make_psi(const ScalarMap& Phi, const ScalarMap& W, double x0,
                           InvertSettings settings) {
  ScalarMap phi = Phi, w = W;  // own copies; the transform outlives callers
  return MonotoneTransform(
      [phi, w](double s) mutable { return 1.0 / phi(w(s)); }, x0, settings);
}

MonotoneTransform make_g_transform(const ScalarMap& g, double delta0,
                                   InvertSettings settings) {
  ScalarMap gm = g;
  return MonotoneTransform([gm](double s) mutable { return 1.0 / gm(s); },
                           delta0, settings);
}

double psi(const ScalarMap& Phi, const ScalarMap& W, double x, double x0) {
  return make_psi(Phi, W, x0).value(x);
}

double psi_inverse(const ScalarMap& Phi, const ScalarMap& W, double y,
                   double x0) {
  return make_psi(Phi, W, x0).inverse(y);
}

double G_of(const ScalarMap& g, double x, double delta0) {
  return make_g_transform(g, delta0).value(x);
}

double G_inverse(const ScalarMap& g, double y, double delta0) {
  return make_g_transform(g, delta0).inverse(y);
}

QResult compute_q(const GridFunction& f_fn, const ScalarMap& g, double delta0,
                  InvertSettings settings) {
  const ScalePtr& scale = f_fn.scale();
  const std::size_t n = scale->size();
  const std::vector<double>& mu = scale->mu_all();
  const std::vector<double>& f = f_fn.values();
  MonotoneTransform G = make_g_transform(g, delta0, settings);
  const double g1 = G.value(1.0);
  QResult out;
  out.q.assign(n, kNan);
  out.ok.assign(n, 0);
  double acc = 0.0;  // integral of f over [a, t_i)
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) acc += mu[i - 1] * f[i - 1];
    MonotoneTransform::Inverse inv = G.try_inverse(g1 + acc);
    out.ok[i] = inv.ok ? 1 : 0;
    if (inv.ok)
      out.q[i] = inv.x;
    else
      out.all_ok = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generic bound engine

namespace {

struct Pieces {
  std::vector<double> growth;   // p or q per point (NaN where q undefined)
  std::vector<char> growth_ok;  // all 1 for plain forms
  bool growth_all_needed_ok = true;  // q defined on [a, rho(b)) where required
  std::size_t first_growth_bad = 0;
  std::vector<double> lead;  // a or max(a,1)
  std::vector<double> ow;    // outer weight: f, or f*h
};

Pieces make_pieces(const ProblemInstance& inst, const InvertSettings& settings) {
  const std::size_t n = inst.scale()->size();
  Pieces out;
  out.lead.resize(n);
  out.ow.resize(n);
  const bool sform = form_is_class_s(inst.form());
  const bool sep = form_is_separable(inst.form());
  for (std::size_t i = 0; i < n; ++i) {
    const double a = inst.a_fn().values()[i];
    out.lead[i] = sform ? std::max(a, 1.0) : a;
    out.ow[i] = sep ? inst.f_fn().values()[i] * inst.h_fn().values()[i]
                    : inst.f_fn().values()[i];
  }
  if (sform) {
    QResult q = compute_q(inst.f_fn(), inst.g(), inst.delta0(), settings);
    out.growth = std::move(q.q);
    out.growth_ok = std::move(q.ok);
    for (std::size_t i = 0; i < n; ++i)
      if (!out.growth_ok[i] && i + 2 < n) {
        out.growth_all_needed_ok = false;
        out.first_growth_bad = i;
        break;
      }
  } else {
    out.growth = compute_p(inst.f_fn()).values();
    out.growth_ok.assign(n, 1);
  }
  return out;
}

double constant_of(const ProblemInstance& inst, const Pieces& pieces) {
  const std::size_t n = inst.scale()->size();
  const std::vector<double>& mu = inst.scale()->mu_all();
  const bool sep = form_is_separable(inst.form());
  // Integral over [a, rho(b)): indices 0 .. n-3, weighted by the last
  // admissible kernel row (index n-2) or by b.
  double acc = 0.0;
  for (std::size_t j = 0; j + 2 < n; ++j) {
    const double weight = sep ? inst.b_fn().values()[j] : inst.kernel().k(n - 2, j);
    acc += mu[j] * weight * inst.Phi()(pieces.growth[j] * pieces.lead[j]);
  }
  if (!std::isfinite(acc))
    fail(Errc::Overflow, "bound constant overflows");
  if (acc <= 0.0)
    fail(Errc::NonpositiveZeta,
         "bound constant is not positive: " + format_double(acc));
  return acc;
}

BoundReport all_out_report(const ProblemInstance& inst, Pieces pieces) {
  const std::size_t n = inst.scale()->size();
  BoundReport rep;
  rep.form = inst.form();
  rep.growth = std::move(pieces.growth);
  rep.constant = kNan;
  rep.psi_of_constant = kNan;
  rep.any_out_of_domain = true;
  rep.first_out_t = inst.scale()->at(pieces.first_growth_bad);
  rep.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.points[i] = BoundPoint{inst.scale()->at(i), kNan, false, false,
                               pieces.growth_ok[i] != 0};
  }
  return rep;
}

}  // namespace

BoundReport compute_bound(const ProblemInstance& inst,
                          InvertSettings settings) {
  const ScalePtr& scale = inst.scale();
  const std::size_t n = scale->size();
  const std::vector<double>& mu = scale->mu_all();
  const bool sep = form_is_separable(inst.form());

  Pieces pieces = make_pieces(inst, settings);
  // A class-S instance whose q fails inside [a, rho(b)) has no bound
  // constant at all: every point of the report is out of domain.
  if (!pieces.growth_all_needed_ok) return all_out_report(inst, pieces);

  const double zc = constant_of(inst, pieces);
  MonotoneTransform trans = make_psi(inst.Phi(), inst.W(), inst.x0(), settings);
  const double psi_zc = trans.value(zc);

  // Prefix integral of the outer weight, and the per-tau factor of the
  // middle integral.
  std::vector<double> owp(n, 0.0), w3(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    owp[i] = owp[i - 1] + mu[i - 1] * pieces.ow[i - 1];
  for (std::size_t i = 0; i < n; ++i)
    if (pieces.growth_ok[i])
      w3[i] = inst.Phi()(pieces.growth[i]) * inst.Phi()(owp[i]);

  // Middle integral M(s) for every grid point s.
  std::vector<double> M(n, 0.0);
  if (sep) {
    for (std::size_t i = 1; i < n; ++i)
      M[i] = M[i - 1] + mu[i - 1] * inst.b_fn().values()[i - 1] * w3[i - 1];
  } else {
    for (std::size_t i = 1; i < n; ++i)
      M[i] = kern::dot3(mu.data(), inst.kernel().row(i), w3.data(), i);
  }

  // Invert the transform at psi(constant) + M(s) for every s that feeds a
  // bound value; s = n-1 feeds nothing.
  std::vector<char> inv_ok(n, 1);
  std::vector<double> winv(n, kNan);
  for (std::size_t s = 0; s + 1 < n; ++s) {
    if (!std::isfinite(M[s])) fail(Errc::Overflow, "middle integral overflows");
    MonotoneTransform::Inverse inv = trans.try_inverse(psi_zc + M[s]);
    inv_ok[s] = inv.ok ? 1 : 0;
    if (inv.ok) winv[s] = inst.W()(inv.x);
  }

  BoundReport rep;
  rep.form = inst.form();
  rep.constant = zc;
  rep.psi_of_constant = psi_zc;
  rep.growth = pieces.growth;
  rep.points.resize(n);

  double outer = 0.0;  // integral over [a, t_i) of ow·W(inverse)
  bool prefix_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    BoundPoint& pt = rep.points[i];
    pt.t = scale->at(i);
    pt.g_ok = pieces.growth_ok[i] != 0;
    pt.rho_ok = inv_ok[i == 0 ? 0 : i - 1] != 0;
    pt.in_domain = prefix_ok && pt.g_ok;
    if (pt.in_domain) {
      pt.bound = pieces.growth[i] * pieces.lead[i] + pieces.growth[i] * outer;
      if (!std::isfinite(pt.bound))
        fail(Errc::Overflow,
             "bound overflows at t=" + format_double(pt.t));
    } else {
      pt.bound = kNan;
      if (!rep.any_out_of_domain) {
        rep.any_out_of_domain = true;
        rep.first_out_t = pt.t;
      }
    }
    if (i + 1 < n) {
      if (inv_ok[i])
        outer += mu[i] * pieces.ow[i] * winv[i];
      else
        prefix_ok = false;
    }
  }
  return rep;
}

namespace {
void require_form(const ProblemInstance& inst, BoundForm want,
                  const char* op) {
  if (inst.form() != want)
    fail(Errc::BadInstance, std::string(op) + " needs a " +
                                bound_form_name(want) + " instance, got " +
                                bound_form_name(inst.form()));
}
}  // namespace

double zeta(const ProblemInstance& inst) {
  require_form(inst, BoundForm::Kernel, "zeta");
  return constant_of(inst, make_pieces(inst, {}));
}

double xi(const ProblemInstance& inst) {
  require_form(inst, BoundForm::Separable, "xi");
  return constant_of(inst, make_pieces(inst, {}));
}

double zeta_bar(const ProblemInstance& inst) {
  require_form(inst, BoundForm::KernelS, "zeta_bar");
  Pieces pieces = make_pieces(inst, {});
  if (!pieces.growth_all_needed_ok)
    fail(Errc::DomainExceeded,
         "q undefined inside the constant's range at t=" +
             format_double(inst.scale()->at(pieces.first_growth_bad)));
  return constant_of(inst, pieces);
}

double xi_bar(const ProblemInstance& inst) {
  require_form(inst, BoundForm::SeparableS, "xi_bar");
  Pieces pieces = make_pieces(inst, {});
  if (!pieces.growth_all_needed_ok)
    fail(Errc::DomainExceeded,
         "q undefined inside the constant's range at t=" +
             format_double(inst.scale()->at(pieces.first_growth_bad)));
  return constant_of(inst, pieces);
}

BoundReport bound_kernel(const ProblemInstance& inst) {
  require_form(inst, BoundForm::Kernel, "bound_kernel");
  return compute_bound(inst);
}

BoundReport bound_separable(const ProblemInstance& inst) {
  require_form(inst, BoundForm::Separable, "bound_separable");
  return compute_bound(inst);
}

BoundReport bound_kernel_s(const ProblemInstance& inst) {
  require_form(inst, BoundForm::KernelS, "bound_kernel_s");
  return compute_bound(inst);
}

BoundReport bound_separable_s(const ProblemInstance& inst) {
  require_form(inst, BoundForm::SeparableS, "bound_separable_s");
  return compute_bound(inst);
}

// ---------------------------------------------------------------------------
// Comparison check

std::vector<ComparisonPoint> comparison_check(const GridFunction& r,
                                              ScalarMap& g, double x0) {
  const ScalePtr& scale = r.scale();
  const std::size_t n = scale->size();
  const std::vector<double>& rv = r.values();
  double maxr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(rv[i] > 0.0))
      fail(Errc::NonmonotoneR, "r must be strictly positive (r(t=" +
                                   format_double(scale->at(i)) +
                                   ") = " + format_double(rv[i]) + ")");
    if (i > 0 && rv[i] < rv[i - 1])
      fail(Errc::NonmonotoneR, "r must be nondecreasing (drops at t=" +
                                   format_double(scale->at(i)) + ")");
    maxr = std::max(maxr, rv[i]);
  }
  if (!g.certs().nondecreasing.checked)
    check_properties(g, 10.0 * std::max(1.0, maxr), 256, 0xC0FFF1ull);
  if (!g.certs().nondecreasing.pass)
    fail(Errc::CertificateFail, "g: nondecreasing certificate FAIL");
  if (!g.certs().positive.pass)
    fail(Errc::CertificateFail, "g: positive certificate FAIL");

  MonotoneTransform G = make_g_transform(g, x0);
  std::vector<ComparisonPoint> out(n);
  double running = G.value(rv[0]);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = ComparisonPoint{scale->at(i), G.value(rv[i]), running};
    if (i + 1 < n) running += (rv[i + 1] - rv[i]) / g(rv[i]);
  }
  return out;
}

}  // namespace tsgb
