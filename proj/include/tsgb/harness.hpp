#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsgb/bounds.hpp"
#include "tsgb/util.hpp"

namespace tsgb {

// An instance described by expression sources instead of sampled grids, so
// it can be re-sampled on a refined scale. Empty strings mean "absent".
struct SymbolicInstance {
  ScaleSpec scale_spec;
  BoundForm form = BoundForm::Kernel;
  std::string Phi, W, g, f, a, h, b, k;
  double x0 = 1.0, delta0 = 1.0;

  ProblemInstance instantiate() const;
  ProblemInstance instantiate(ScalePtr scale) const;
};

// The chain that turns the hypothesis display into an equality: u(min) =
// a(min), and each later value adds exactly the terms the display
// accumulates. The result saturates the bound up to transform rounding.
GridFunction synthesize_extremal(const ProblemInstance& inst);

// Hypothesis right-hand side evaluated along a given u (same accumulation
// order as synthesize_extremal, so the synthesized chain reproduces itself
// bit for bit).
std::vector<double> hypothesis_rhs(const ProblemInstance& inst,
                                   const std::vector<double>& u);

struct DominationResult {
  bool pass = false;
  double worst_margin = 0;  // min over in-domain points of bound - u
  double tightness = 0;     // max over in-domain points of u / bound
  std::vector<double> t, u, bound, margin;
  std::vector<char> in_domain;
  BoundReport report;
};

// Checks that u satisfies the hypothesis display (throws HypothesisViolated
// otherwise), evaluates the bound, and compares pointwise wherever the
// report is in domain.
DominationResult verify_domination(const ProblemInstance& inst,
                                   const GridFunction& u);

// Deterministic generators over the curated map and kernel libraries.
ScaleSpec random_scale_spec(Rng& rng);
ProblemInstance random_instance(Rng& rng, BoundForm form,
                                const ScaleSpec& spec);

struct SweepRow {
  std::uint64_t seed = 0;
  BoundForm form = BoundForm::Kernel;
  std::string scale;
  double worst_margin = 0;
  double tightness = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by seed
  int total = 0;
  int skipped_overflow = 0;
  int violations = 0;
};

// For each instance: draw a scale and an instance, synthesize the extremal
// chain, verify domination. Overflowing draws are counted and skipped.
SweepResult run_sweep(std::uint64_t seed, int instances,
                      const std::vector<BoundForm>& forms);

struct ConvergenceRow {
  int factor = 1;
  std::size_t points = 0;
  double sup_diff = 0;  // vs previous factor, at base points; NaN first
  double order = 0;     // empirical order from successive diffs; NaN early
  double p_gap = 0;     // sup |p - exp(integral of f)| at base points
};

// Refine the base scale by each factor, recompute the bound, and compare
// at the base points. Requires a refinable scale and an f expression.
std::vector<ConvergenceRow> convergence_study(const SymbolicInstance& base,
                                              const std::vector<int>& factors);

}  // namespace tsgb
