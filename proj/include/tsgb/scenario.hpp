#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tsgb/harness.hpp"

namespace tsgb {

enum class ScenarioMode { Bound, Verify, Solve, Sweep, Converge };
const char* scenario_mode_name(ScenarioMode m);

struct SolveScenario {
  ScaleSpec scale;
  std::string F, K, h, Phi;
  double u_a = 1.0;
  double x0 = 1.0;
};

// A fully described run, loaded from a strict JSON file: unknown keys are
// rejected, `version` and `mode` are mandatory, and each mode has a fixed
// key set (see docs/scenario.md).
struct Scenario {
  ScenarioMode mode = ScenarioMode::Bound;
  std::string output;  // CSV destination; empty = standard output

  SymbolicInstance inst;  // bound / verify / converge
  std::vector<int> factors;  // converge

  SolveScenario solve;  // solve

  std::uint64_t seed = 1;  // sweep
  int instances = 0;
  std::vector<BoundForm> forms;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text);

// Runs the scenario, writing CSV rows to `csv` and, unless `quiet`, short
// status lines to `log`. Returns 0 when every checked property held and 1
// when a verification produced a violation.
int run_scenario(const Scenario& sc, std::ostream& csv, std::ostream& log,
                 bool quiet);

}  // namespace tsgb
