#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsgb/errors.hpp"
#include "tsgb/expr.hpp"
#include "tsgb/kern.hpp"
#include "tsgb/scenario.hpp"

namespace {

// Exit codes: 0 success, 1 a checked property failed or a computation was
// rejected at runtime, 2 the input itself was unusable.
int exit_code_for(tsgb::Errc c) {
  switch (c) {
    case tsgb::Errc::BadScenario:
    case tsgb::Errc::BadSpec:
    case tsgb::Errc::SyntaxError:
    case tsgb::Errc::UnknownIdentifier:
    case tsgb::Errc::EmptyScale:
    case tsgb::Errc::NonMonotone:
    case tsgb::Errc::WrongScaleKind:
      return 2;
    default:
      return 1;
  }
}

int run_scenario_file(const std::string& path, const std::string& out_override,
                      tsgb::ScenarioMode want) {
  tsgb::Scenario sc = tsgb::load_scenario(path);
  if (sc.mode != want)
    tsgb::fail(tsgb::Errc::BadScenario,
               std::string("scenario mode '") + scenario_mode_name(sc.mode) +
                   "' does not match subcommand '" +
                   scenario_mode_name(want) + "'");
  if (!out_override.empty()) sc.output = out_override;
  if (sc.output.empty())
    return tsgb::run_scenario(sc, std::cout, std::cout, /*quiet=*/true);
  std::ofstream file(sc.output, std::ios::binary);
  if (!file)
    tsgb::fail(tsgb::Errc::BadScenario,
               "cannot write CSV output to '" + sc.output + "'");
  const int rc = tsgb::run_scenario(sc, file, std::cout, /*quiet=*/false);
  std::cout << "wrote " << sc.output << "\n";
  return rc;
}

struct PropRequest {
  std::string token;
  const tsgb::CertRecord* rec;
  bool two_sample;
};

int run_check_fn(const std::string& source, const std::string& props,
                 double domain_hi, int samples, std::uint64_t seed) {
  tsgb::ScalarMap map(source);
  tsgb::check_properties(map, domain_hi, samples, seed);
  const tsgb::Certificates& c = map.certs();

  std::vector<PropRequest> requests;
  std::string token;
  std::istringstream stream(props);
  while (std::getline(stream, token, ',')) {
    if (token == "nondec")
      requests.push_back({token, &c.nondecreasing, true});
    else if (token == "pos")
      requests.push_back({token, &c.positive, false});
    else if (token == "sub")
      requests.push_back({token, &c.subadditive, true});
    else if (token == "submul")
      requests.push_back({token, &c.submultiplicative, true});
    else if (token == "classS")
      requests.push_back({token, &c.class_s, true});
    else
      tsgb::fail(tsgb::Errc::BadSpec,
                 "unknown property '" + token +
                     "' (expected nondec, pos, sub, submul or classS)");
  }
  if (requests.empty())
    tsgb::fail(tsgb::Errc::BadSpec, "no properties requested");

  bool any_fail = false;
  for (const PropRequest& r : requests) {
    if (r.rec->pass) {
      std::cout << r.token << ": PASS\n";
    } else {
      any_fail = true;
      std::cout << r.token << ": FAIL worst=" << tsgb::format_double(r.rec->worst)
                << " at x=" << tsgb::format_double(r.rec->wx);
      if (r.two_sample)
        std::cout << ", y=" << tsgb::format_double(r.rec->wy);
      std::cout << "\n";
    }
  }
  std::cout << "defined_at_zero: " << (c.defined_at_zero ? "yes" : "no")
            << "\n";
  return any_fail ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delta-calculus inequality bounds on finite time scales"};
  app.require_subcommand(1);

  std::string kernels = "auto";
  app.add_option("--kernels", kernels,
                 "force the array-kernel implementation (auto, scalar, avx2)")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  std::string file, out_override;
  struct Sub {
    CLI::App* cmd;
    tsgb::ScenarioMode mode;
  };
  std::vector<Sub> subs;
  auto add_mode = [&](const char* name, tsgb::ScenarioMode mode,
                      const char* desc) {
    CLI::App* c = app.add_subcommand(name, desc);
    c->add_option("file", file, "scenario JSON file")->required();
    c->add_option("-o,--output", out_override,
                  "CSV destination (overrides the scenario's 'output')");
    subs.push_back({c, mode});
  };
  add_mode("bound", tsgb::ScenarioMode::Bound,
           "evaluate the bound of a scenario and emit t,bound,in_domain");
  add_mode("verify", tsgb::ScenarioMode::Verify,
           "synthesize the extremal chain and check domination");
  add_mode("solve", tsgb::ScenarioMode::Solve,
           "integrate an initial value problem and check its estimate");
  add_mode("sweep", tsgb::ScenarioMode::Sweep,
           "randomized domination sweep; emits a margin summary");
  add_mode("converge", tsgb::ScenarioMode::Converge,
           "recompute the bound on refined scales and tabulate gaps");

  CLI::App* check = app.add_subcommand(
      "check-fn", "run property certificates for a map of x");
  std::string fn_source;
  std::string props = "nondec,pos,sub,submul,classS";
  double domain_hi = 10.0;
  int samples = 400;
  std::uint64_t seed = 1;
  check->add_option("expr", fn_source, "expression in x")->required();
  check->add_option("--props", props,
                    "comma list from nondec,pos,sub,submul,classS");
  check->add_option("--domain-hi", domain_hi, "upper end of the sample range");
  check->add_option("--samples", samples, "sample pairs per property");
  check->add_option("--seed", seed, "sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    tsgb::kern::force(kernels);
    if (check->parsed())
      return run_check_fn(fn_source, props, domain_hi, samples, seed);
    for (const auto& sub : subs)
      if (sub.cmd->parsed())
        return run_scenario_file(file, out_override, sub.mode);
    return 2;
  } catch (const tsgb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
