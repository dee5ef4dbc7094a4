#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsgb/expr.hpp"
#include "tsgb/quadrature.hpp"
#include "tsgb/timescale.hpp"

namespace tsgb {

// The four bound variants, named by structure: a general two-argument kernel
// versus a separable h(s)·b(tau) one, each in a plain version (linear
// comparison term, growth factor p) and a class-S version (nonlinear
// comparison term g(u), growth factor q).
enum class BoundForm { Kernel, Separable, KernelS, SeparableS };

const char* bound_form_name(BoundForm f);
BoundForm bound_form_from(const std::string& name);
bool form_is_separable(BoundForm f);
bool form_is_class_s(BoundForm f);

// Two-variable kernel k(t,s), sampled on all admissible grid pairs s <= t
// together with its first-argument delta derivative. Construction validates
// nonnegativity of both and rejects a kernel that vanishes identically on
// the index range the bound constant integrates over.
class KernelMap {
 public:
  KernelMap(ScalePtr scale, const Expr& expr);
  static KernelMap parse(ScalePtr scale, const std::string& source);

  const Expr& expr() const { return expr_; }
  const ScalePtr& scale() const { return scale_; }

  // k(t_i, t_j), j <= i.
  double k(std::size_t i, std::size_t j) const {
    return k_[i * (i + 1) / 2 + j];
  }
  // (k(sigma(t_i), t_j) - k(t_i, t_j)) / mu(t_i); i off the maximum.
  double d1(std::size_t i, std::size_t j) const;

  // Row i as a contiguous span of j = 0..i.
  const double* row(std::size_t i) const { return k_.data() + i * (i + 1) / 2; }

 private:
  ScalePtr scale_;
  Expr expr_;
  std::vector<double> k_;  // lower-triangular, row-major
};

// Everything a bound computation needs. Use build(); it validates the
// per-form field set, sign/monotonicity hypotheses and map certificates.
struct InstanceInputs {
  ScalePtr scale;
  BoundForm form = BoundForm::Kernel;
  std::optional<GridFunction> a_fn, f_fn, h_fn, b_fn;
  std::optional<Expr> kernel_expr;
  std::optional<ScalarMap> Phi, W, g;
  double x0 = 1.0, delta0 = 1.0;
};

class ProblemInstance {
 public:
  static ProblemInstance build(InstanceInputs in);

  const ScalePtr& scale() const { return scale_; }
  BoundForm form() const { return form_; }
  const GridFunction& a_fn() const { return a_; }
  const GridFunction& f_fn() const { return f_; }
  const GridFunction& h_fn() const { return *h_; }
  const GridFunction& b_fn() const { return *b_; }
  const KernelMap& kernel() const { return *kernel_; }
  const ScalarMap& Phi() const { return Phi_; }
  const ScalarMap& W() const { return W_; }
  const ScalarMap& g() const { return *g_; }
  bool has_g() const { return g_.has_value(); }
  double x0() const { return x0_; }
  double delta0() const { return delta0_; }

  // Same functions, different transform base points.
  ProblemInstance with_bases(double x0, double delta0) const;

 private:
  ProblemInstance(ScalePtr scale, BoundForm form, GridFunction a,
                  GridFunction f, std::optional<GridFunction> h,
                  std::optional<GridFunction> b, std::optional<KernelMap> k,
                  ScalarMap Phi, ScalarMap W, std::optional<ScalarMap> g,
                  double x0, double delta0);
  ScalePtr scale_;
  BoundForm form_;
  GridFunction a_, f_;
  std::optional<GridFunction> h_, b_;
  std::optional<KernelMap> kernel_;
  ScalarMap Phi_, W_;
  std::optional<ScalarMap> g_;
  double x0_, delta0_;
};

struct BoundPoint {
  double t = 0;
  double bound = 0;       // NaN when not in domain
  bool in_domain = true;  // every inversion needed by bound(t) succeeded
  bool rho_ok = true;     // the stated side condition, checked at rho(t)
  bool g_ok = true;       // class-S forms: q(t) was invertible
};

struct BoundReport {
  BoundForm form = BoundForm::Kernel;
  std::vector<BoundPoint> points;
  std::vector<double> growth;  // p (plain forms) or q (class-S forms)
  double constant = 0;         // the zeta-type constant of the form
  double psi_of_constant = 0;
  bool any_out_of_domain = false;
  double first_out_t = 0;  // meaningful when any_out_of_domain
};

// p(t) = 1 + sum over [a,t) of mu·f·e_f(t, sigma(s)), evaluated as the
// defining sum with a backward product accumulation (not via the
// exponential identity, which tests use as a cross-check).
GridFunction compute_p(const GridFunction& f_fn);

// Transforms. psi integrates 1/Phi(W(s)) from x0; the g-transform
// integrates 1/g(s) from delta0.
MonotoneTransform make_psi(const ScalarMap& Phi, const ScalarMap& W, double x0,
                           InvertSettings settings = {});
MonotoneTransform make_g_transform(const ScalarMap& g, double delta0,
                                   InvertSettings settings = {});

double psi(const ScalarMap& Phi, const ScalarMap& W, double x, double x0);
double psi_inverse(const ScalarMap& Phi, const ScalarMap& W, double y,
                   double x0);
double G_of(const ScalarMap& g, double x, double delta0);
double G_inverse(const ScalarMap& g, double y, double delta0);

struct QResult {
  std::vector<double> q;   // NaN where not defined
  std::vector<char> ok;    // per-point G-domain flag
  bool all_ok = true;
};

// q(t) = G^{-1}(G(1) + integral of f over [a,t)).
QResult compute_q(const GridFunction& f_fn, const ScalarMap& g, double delta0,
                  InvertSettings settings = {});

// The constant of each form: an integral up to rho(b) of the per-point
// weight times Phi(growth·lead). Errors with NonpositiveZeta if it is not
// strictly positive.
double zeta(const ProblemInstance& inst);      // Kernel
double xi(const ProblemInstance& inst);        // Separable
double zeta_bar(const ProblemInstance& inst);  // KernelS
double xi_bar(const ProblemInstance& inst);    // SeparableS

// Generic engine: direct evaluation of the conclusion display with all
// nested delta integrals as prefix sums. Works on any finite scale.
BoundReport compute_bound(const ProblemInstance& inst,
                          InvertSettings settings = {});
BoundReport bound_kernel(const ProblemInstance& inst);
BoundReport bound_separable(const ProblemInstance& inst);
BoundReport bound_kernel_s(const ProblemInstance& inst);
BoundReport bound_separable_s(const ProblemInstance& inst);

// Closed-form reference engines: explicit index-range summations with the
// graininess as a literal constant (1, or the grid step h). Independent of
// the delta-calculus machinery; used as oracles against compute_bound.
BoundReport bound_integer_oracle(const ProblemInstance& inst);
BoundReport bound_hgrid_oracle(const ProblemInstance& inst);

struct ComparisonPoint {
  double t = 0;
  double lhs = 0;  // G(r(t))
  double rhs = 0;  // G(r(a)) + integral of r-delta over g(r)
};

// The comparison-functional inequality behind the class-S machinery:
// lhs <= rhs at every point, including the right endpoint.
std::vector<ComparisonPoint> comparison_check(const GridFunction& r,
                                              ScalarMap& g, double x0);

}  // namespace tsgb
