// Acceptance checks for the bound engine: one line per criterion, exit code
// equal to the number of failures. Each criterion is independent; a thrown
// error fails that criterion only.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#ifdef __unix__
#include <sys/wait.h>
#endif

#include "tsgb/bounds.hpp"
#include "tsgb/dynamics.hpp"
#include "tsgb/errors.hpp"
#include "tsgb/harness.hpp"
#include "tsgb/util.hpp"

using namespace tsgb;

namespace {

int g_fails = 0;

void criterion(int idx, const char* name,
               const std::function<std::string()>& body) {
  std::string detail;
  bool ok = false;
  try {
    detail = body();
    ok = true;
  } catch (const std::exception& e) {
    detail = e.what();
  }
  std::printf("[%d] %-46s %s  (%s)\n", idx, name, ok ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_fails;
}

void expect(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---- 1: growth factor vs scale exponential ---------------------------------

std::string growth_vs_exponential() {
  Rng rng(11001);
  double worst = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    ScaleSpec spec = iter % 10 == 0 ? ScaleSpec::uniform(0.0, 1.0, 500)
                                    : random_scale_spec(rng);
    ScalePtr s = TimeScale::build(spec);
    std::vector<double> fv(s->size());
    for (double& v : fv) v = rng.real(0.0, 1.5 / s->span());
    GridFunction f(s, fv);
    GridFunction p = compute_p(f);
    for (std::size_t i = 0; i < s->size(); ++i) {
      const double expc = ts_exponential(f, s->at(i), s->min());
      worst = std::max(worst, std::abs(p[i] - expc) / std::abs(expc));
    }
  }
  expect(worst <= 1e-10, "max relative gap " + fmt(worst));
  return "100 scales, max relative gap " + fmt(worst);
}

// ---- 2: comparison-functional inequality sweep -----------------------------

std::string comparison_sweep() {
  Rng rng(11002);
  const char* glib[5] = {"x", "sqrt(x)", "x / (1 + x)", "log(1 + x)", "1"};
  double worst_excess = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    ScalePtr s = TimeScale::build(random_scale_spec(rng));
    std::vector<double> rv(s->size());
    rv[0] = rng.real(0.1, 3.0);
    for (std::size_t i = 1; i < s->size(); ++i)
      rv[i] = rv[i - 1] + rng.real(0.0, 1.0);
    GridFunction r(s, rv);
    ScalarMap g(glib[iter % 5]);
    for (const ComparisonPoint& pt : comparison_check(r, g, 1.0)) {
      worst_excess = std::max(worst_excess, pt.lhs - pt.rhs);
      expect(pt.lhs <= pt.rhs + 1e-9,
             "inequality violated at t=" + fmt(pt.t) + " by " +
                 fmt(pt.lhs - pt.rhs));
    }
  }
  return "200 draws, worst lhs-rhs " + fmt(worst_excess);
}

// ---- 3: extremal domination across the four forms --------------------------

std::string extremal_domination() {
  const std::vector<BoundForm> all = {BoundForm::Kernel, BoundForm::Separable,
                                      BoundForm::KernelS,
                                      BoundForm::SeparableS};
  SweepResult sweep = run_sweep(11003, 2200, all);  // 550 draws per form
  expect(sweep.violations == 0,
         std::to_string(sweep.violations) + " violations");
  const int checked = sweep.total - sweep.skipped_overflow;
  expect(checked >= 2000, "only " + std::to_string(checked) + " checked");
  return std::to_string(checked) + " instances dominated, " +
         std::to_string(sweep.skipped_overflow) + " overflow skips";
}

// ---- 4: lattice oracle equivalence -----------------------------------------

std::string oracle_equivalence() {
  Rng rng(11004);
  double worst = 0.0;
  int checked = 0;
  for (int iter = 0; iter < 100; ++iter) {
    const bool use_int = iter < 50;
    ScaleSpec spec;
    if (use_int) {
      const int a0 = rng.integer(-2, 2);
      spec = ScaleSpec::integer(a0, a0 + rng.integer(5, 10));
    } else {
      const double h = iter % 2 == 0 ? 0.5 : 0.25;
      const double a0 = rng.integer(-2, 2) * h;
      spec = ScaleSpec::hgrid(a0, a0 + rng.integer(6, 14) * h, h);
    }
    const BoundForm form = static_cast<BoundForm>(iter % 4);
    ProblemInstance inst = random_instance(rng, form, spec);
    BoundReport gen = compute_bound(inst);
    BoundReport orc =
        use_int ? bound_integer_oracle(inst) : bound_hgrid_oracle(inst);
    expect(gen.points.size() == orc.points.size(), "size mismatch");
    for (std::size_t i = 0; i < gen.points.size(); ++i) {
      expect(gen.points[i].in_domain == orc.points[i].in_domain,
             "domain flag mismatch at t=" + fmt(gen.points[i].t));
      if (!gen.points[i].in_domain) continue;
      const double denom = std::max(1.0, std::abs(orc.points[i].bound));
      worst = std::max(
          worst, std::abs(gen.points[i].bound - orc.points[i].bound) / denom);
    }
    ++checked;
  }
  expect(worst <= 1e-12, "max relative gap " + fmt(worst));
  return std::to_string(checked) + " instances, max relative gap " +
         fmt(worst);
}

// ---- 5: transform base-point invariance ------------------------------------

std::string base_point_invariance() {
  Rng rng(11005);
  double worst = 0.0;
  int checked = 0;
  for (int draw = 0; draw < 200 && checked < 50; ++draw) {
    const BoundForm form = static_cast<BoundForm>(draw % 4);
    ProblemInstance inst =
        random_instance(rng, form, random_scale_spec(rng));
    try {
      BoundReport ref = compute_bound(inst);
      for (double x0 : {0.5, 1.0, 2.0}) {
        for (double d0 : {0.5, 1.0, 2.0}) {
          BoundReport alt = compute_bound(inst.with_bases(x0, d0));
          for (std::size_t i = 0; i < ref.points.size(); ++i) {
            expect(alt.points[i].in_domain == ref.points[i].in_domain,
                   "domain flag changed with base points");
            if (!ref.points[i].in_domain) continue;
            const double denom = std::max(1.0, std::abs(ref.points[i].bound));
            const double gap =
                std::abs(alt.points[i].bound - ref.points[i].bound) / denom;
            worst = std::max(worst, gap);
          }
        }
      }
      ++checked;
    } catch (const Error& e) {
      if (e.code() != Errc::Overflow) throw;
    }
  }
  expect(checked >= 50, "only " + std::to_string(checked) + " instances");
  expect(worst <= 1e-9, "max relative gap " + fmt(worst));
  return std::to_string(checked) + " instances x 9 base pairs, max gap " +
         fmt(worst);
}

// ---- 6: closed-form transforms and composed growth -------------------------

std::string closed_forms() {
  ScalarMap id("x");
  ScalarMap sq("pow(x, 2)");
  double worst_log = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double x = 0.05 * std::pow(1.45, double(i));  // 0.05 .. ~60
    worst_log = std::max(worst_log,
                         std::abs(psi(id, id, x, 1.0) - std::log(x)));
  }
  expect(worst_log <= 1e-10, "identity-maps gap " + fmt(worst_log));

  // Quadratic inner map from base 1: value 1 - 1/x with ceiling 1.
  expect(std::abs(psi(id, sq, 4.0, 1.0) - 0.75) <= 1e-10,
         "quadratic transform value off");
  bool ceiling = false;
  try {
    psi_inverse(id, sq, 1.5, 1.0);
  } catch (const Error& e) {
    ceiling = e.code() == Errc::DomainExceeded;
  }
  expect(ceiling, "ceiling crossing not detected");

  // Identity comparison map: composed growth is the exponential of the
  // accumulated coefficient.
  ScalePtr s = TimeScale::build(ScaleSpec::uniform(0.0, 1.0, 50));
  Expr fe = Expr::parse("1 + t / 2", {"t"});
  std::vector<double> fv(s->size());
  for (std::size_t i = 0; i < s->size(); ++i) fv[i] = fe.eval1(s->at(i));
  GridFunction f(s, fv);
  QResult q = compute_q(f, id, 1.0);
  expect(q.all_ok, "composed growth left its domain");
  double worst_q = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < s->size(); ++i) {
    const double want = std::exp(acc);
    worst_q = std::max(worst_q, std::abs(q.q[i] - want) / want);
    acc += s->mu_at(i) * fv[i];
  }
  expect(worst_q <= 1e-9, "composed growth gap " + fmt(worst_q));
  return "log transform " + fmt(worst_log) + ", growth gap " + fmt(worst_q);
}

// ---- 7: continuum limit and refinement decay -------------------------------

std::string continuum_limit() {
  const double e1 = std::exp(1.0);
  for (int n : {10, 100, 1000}) {
    ScalePtr s = TimeScale::build(ScaleSpec::uniform(0.0, 1.0, n));
    GridFunction one = GridFunction::constant(s, 1.0);
    const double got = ts_exponential(one, 1.0, 0.0);
    expect(std::abs(got - e1) <= 2.0 / n,
           "unit exponential at n=" + std::to_string(n) + " off by " +
               fmt(std::abs(got - e1)));
  }

  SymbolicInstance base;
  base.scale_spec = ScaleSpec::uniform(0.0, 1.0, 100);
  base.form = BoundForm::Separable;
  base.Phi = "x";
  base.W = "x / (1 + x)";
  base.f = "1 + t / 2";
  base.a = "1 + t";
  base.h = "1";
  base.b = "1 / 2";
  std::vector<ConvergenceRow> rows = convergence_study(base, {1, 2, 4, 8});
  for (std::size_t i = 1; i < rows.size(); ++i)
    expect(rows[i].p_gap < rows[i - 1].p_gap,
           "growth gap not shrinking at factor " +
               std::to_string(rows[i].factor));
  return "unit exponential within 2/n; growth gap " + fmt(rows[0].p_gap) +
         " -> " + fmt(rows.back().p_gap);
}

// ---- 8: memory IVP end-to-end estimate -------------------------------------

std::string ivp_end_to_end() {
  std::string note;
  for (ScaleSpec sd : {ScaleSpec::uniform(0.0, 1.0, 100),
                       ScaleSpec::integer(0.0, 5.0)}) {
    ScalePtr s = TimeScale::build(sd);
    IvpSpec spec{s,
                 Expr::parse("(u + v) / 2", {"t", "u", "v"}),
                 Expr::parse("u", {"t", "u"}),
                 1.0,
                 GridFunction::constant(s, 1.0),
                 ScalarMap("x")};
    ApplicationReport ar = verify_application(spec);
    double umax = 0.0;
    for (double v : ar.u) umax = std::max(umax, std::abs(v));
    expect(ar.residual_ok && ar.residual_max <= 1e-12 * std::max(1.0, umax),
           "residual " + fmt(ar.residual_max) + " on " + sd.describe());
    expect(ar.dominated, "trajectory escaped the estimate on " +
                             sd.describe());
    expect(ar.pass, "verification failed on " + sd.describe());
    if (!note.empty()) note += ", ";
    note += sd.describe() + " residual " + fmt(ar.residual_max);
  }
  return note;
}

// ---- 9: deterministic reruns and property reports --------------------------

int run_cmd(const std::string& cmd, const std::string& capture) {
  const std::string full = cmd + " > " + capture + " 2>&1";
  const int rc = std::system(full.c_str());
#ifdef __unix__
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
#else
  return rc;
#endif
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string determinism_and_reports() {
  const char* cli_env = std::getenv("TSGB_CLI_PATH");
  const char* dir_env = std::getenv("TSGB_SCENARIO_DIR");
  expect(cli_env != nullptr, "TSGB_CLI_PATH not set");
  expect(dir_env != nullptr, "TSGB_SCENARIO_DIR not set");
  const std::string cli = std::string("\"") + cli_env + "\"";
  const std::string fixture =
      std::string("\"") + dir_env + "/sweep_small.json\"";

  expect(run_cmd(cli + " sweep " + fixture + " -o acc_sweep_a.csv",
                 "acc_sweep_a.log") == 0,
         "first sweep run failed");
  expect(run_cmd(cli + " sweep " + fixture + " -o acc_sweep_b.csv",
                 "acc_sweep_b.log") == 0,
         "second sweep run failed");
  const std::string a = slurp("acc_sweep_a.csv");
  expect(!a.empty() && a == slurp("acc_sweep_b.csv"),
         "sweep reruns differ");

  expect(run_cmd(cli + " check-fn \"x\"", "acc_fn_id.txt") == 0,
         "identity property check did not pass");
  const std::string id_out = slurp("acc_fn_id.txt");
  expect(id_out.find("FAIL") == std::string::npos &&
             id_out.find("PASS") != std::string::npos,
         "identity property report malformed");

  expect(run_cmd(cli + " check-fn \"pow(x, 2)\" --props sub",
                 "acc_fn_sq.txt") == 1,
         "square subadditivity check did not fail");
  const std::string sq_out = slurp("acc_fn_sq.txt");
  expect(sq_out.find("sub: FAIL") != std::string::npos &&
             sq_out.find("worst=") != std::string::npos &&
             sq_out.find("at x=") != std::string::npos,
         "square subadditivity witness missing");
  return "sweep reruns byte-identical; property reports as pinned";
}

}  // namespace

int main() {
  criterion(1, "growth factor matches the scale exponential",
            growth_vs_exponential);
  criterion(2, "comparison-functional inequality sweep", comparison_sweep);
  criterion(3, "extremal domination across the four forms",
            extremal_domination);
  criterion(4, "lattice oracle equivalence", oracle_equivalence);
  criterion(5, "transform base-point invariance", base_point_invariance);
  criterion(6, "closed-form transforms and composed growth", closed_forms);
  criterion(7, "continuum limit and refinement decay", continuum_limit);
  criterion(8, "memory IVP end-to-end estimate", ivp_end_to_end);
  criterion(9, "deterministic reruns and property reports",
            determinism_and_reports);
  std::printf("acceptance: %d/9 passed\n", 9 - g_fails);
  return g_fails;
}
