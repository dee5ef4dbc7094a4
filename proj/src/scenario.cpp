#include "tsgb/scenario.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "tsgb/dynamics.hpp"
#include "tsgb/errors.hpp"

namespace tsgb {

using nlohmann::json;

const char* scenario_mode_name(ScenarioMode m) {
  switch (m) {
    case ScenarioMode::Bound: return "bound";
    case ScenarioMode::Verify: return "verify";
    case ScenarioMode::Solve: return "solve";
    case ScenarioMode::Sweep: return "sweep";
    case ScenarioMode::Converge: return "converge";
  }
  return "?";
}

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(Errc::BadScenario, msg); }

void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const std::string& k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) bad("unknown key '" + it.key() + "' in " + where);
  }
}

const json& need(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) bad(where + " requires key '" + key + "'");
  return *it;
}

double num(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number()) bad("key '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

int integer_of(const json& v, const char* key) {
  if (!v.is_number_integer())
    bad("key '" + std::string(key) + "' must be an integer");
  return v.get<int>();
}

std::string str(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_string()) bad("key '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

std::string opt_str(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return "";
  if (!it->is_string()) bad("key '" + std::string(key) + "' must be a string");
  return it->get<std::string>();
}

double opt_num(const json& j, const char* key, double dflt) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_number()) bad("key '" + std::string(key) + "' must be a number");
  return it->get<double>();
}

ScaleSpec parse_scale(const json& j) {
  if (!j.is_object()) bad("'scale' must be an object");
  const std::string kind = str(j, "kind", "scale");
  if (kind == "integer") {
    check_keys(j, {"kind", "a", "b"}, "integer scale");
    return ScaleSpec::integer(num(j, "a", "scale"), num(j, "b", "scale"));
  }
  if (kind == "hgrid") {
    check_keys(j, {"kind", "a", "b", "h"}, "hgrid scale");
    return ScaleSpec::hgrid(num(j, "a", "scale"), num(j, "b", "scale"),
                            num(j, "h", "scale"));
  }
  if (kind == "uniform") {
    check_keys(j, {"kind", "a", "b", "n"}, "uniform scale");
    return ScaleSpec::uniform(num(j, "a", "scale"), num(j, "b", "scale"),
                              integer_of(need(j, "n", "scale"), "n"));
  }
  if (kind == "qgeometric") {
    check_keys(j, {"kind", "q", "a", "count"}, "qgeometric scale");
    return ScaleSpec::qgeometric(num(j, "q", "scale"), num(j, "a", "scale"),
                                 integer_of(need(j, "count", "scale"),
                                            "count"));
  }
  if (kind == "explicit") {
    check_keys(j, {"kind", "points"}, "explicit scale");
    const json& pts = need(j, "points", "scale");
    if (!pts.is_array()) bad("'points' must be an array of numbers");
    std::vector<double> v;
    for (const json& p : pts) {
      if (!p.is_number()) bad("'points' must be an array of numbers");
      v.push_back(p.get<double>());
    }
    return ScaleSpec::explicit_points(std::move(v));
  }
  if (kind == "hybrid") {
    check_keys(j, {"kind", "segments"}, "hybrid scale");
    const json& segs = need(j, "segments", "scale");
    if (!segs.is_array() || segs.empty())
      bad("'segments' must be a nonempty array");
    std::vector<HybridSegment> out;
    for (const json& s : segs) {
      if (!s.is_object()) bad("each segment must be an object");
      const std::string skind = str(s, "kind", "segment");
      HybridSegment seg;
      if (skind == "uniform") {
        check_keys(s, {"kind", "a", "b", "n"}, "uniform segment");
        seg.dense = true;
        seg.a = num(s, "a", "segment");
        seg.b = num(s, "b", "segment");
        seg.n = integer_of(need(s, "n", "segment"), "n");
      } else if (skind == "points") {
        check_keys(s, {"kind", "points"}, "points segment");
        seg.dense = false;
        const json& pts = need(s, "points", "segment");
        if (!pts.is_array()) bad("'points' must be an array of numbers");
        for (const json& p : pts) {
          if (!p.is_number()) bad("'points' must be an array of numbers");
          seg.points.push_back(p.get<double>());
        }
      } else {
        bad("unknown segment kind '" + skind + "'");
      }
      out.push_back(std::move(seg));
    }
    return ScaleSpec::hybrid(std::move(out));
  }
  bad("unknown scale kind '" + kind + "'");
}

SymbolicInstance parse_instance(const json& j) {
  SymbolicInstance inst;
  inst.scale_spec = parse_scale(need(j, "scale", "scenario"));
  inst.form = bound_form_from(str(j, "theorem", "scenario"));
  inst.Phi = opt_str(j, "Phi");
  inst.W = opt_str(j, "W");
  inst.g = opt_str(j, "g");
  inst.f = opt_str(j, "f");
  inst.a = opt_str(j, "a");
  inst.h = opt_str(j, "h");
  inst.b = opt_str(j, "b");
  inst.k = opt_str(j, "k");
  inst.x0 = opt_num(j, "x0", 1.0);
  inst.delta0 = opt_num(j, "delta0", 1.0);
  return inst;
}

const std::vector<std::string> kInstanceKeys = {
    "version", "mode", "output", "scale", "theorem", "Phi", "W", "g",
    "f",       "a",    "h",      "b",     "k",       "x0",  "delta0"};

Scenario parse_json(const json& j) {
  if (!j.is_object()) bad("scenario must be a JSON object");
  const json& ver = need(j, "version", "scenario");
  if (!ver.is_number_integer() || ver.get<int>() != 1)
    bad("unsupported scenario version (expected 1)");
  const std::string mode = str(j, "mode", "scenario");

  Scenario sc;
  sc.output = opt_str(j, "output");
  if (mode == "bound" || mode == "verify") {
    sc.mode = mode == "bound" ? ScenarioMode::Bound : ScenarioMode::Verify;
    check_keys(j, kInstanceKeys, "scenario");
    sc.inst = parse_instance(j);
    return sc;
  }
  if (mode == "converge") {
    sc.mode = ScenarioMode::Converge;
    std::vector<std::string> keys = kInstanceKeys;
    keys.push_back("factors");
    check_keys(j, keys, "scenario");
    sc.inst = parse_instance(j);
    const json& fs = need(j, "factors", "scenario");
    if (!fs.is_array() || fs.empty())
      bad("'factors' must be a nonempty array of integers");
    for (const json& f : fs) sc.factors.push_back(integer_of(f, "factors"));
    return sc;
  }
  if (mode == "solve") {
    sc.mode = ScenarioMode::Solve;
    check_keys(j,
               {"version", "mode", "output", "scale", "F", "K", "u_a", "h",
                "Phi", "x0"},
               "scenario");
    sc.solve.scale = parse_scale(need(j, "scale", "scenario"));
    sc.solve.F = str(j, "F", "solve scenario");
    sc.solve.K = str(j, "K", "solve scenario");
    sc.solve.h = str(j, "h", "solve scenario");
    sc.solve.Phi = str(j, "Phi", "solve scenario");
    sc.solve.u_a = num(j, "u_a", "solve scenario");
    sc.solve.x0 = opt_num(j, "x0", 1.0);
    return sc;
  }
  if (mode == "sweep") {
    sc.mode = ScenarioMode::Sweep;
    check_keys(j, {"version", "mode", "output", "seed", "instances",
                   "theorems"},
               "scenario");
    const json& inst = need(j, "instances", "scenario");
    sc.instances = integer_of(inst, "instances");
    if (sc.instances < 1) bad("'instances' must be >= 1");
    auto it = j.find("seed");
    if (it != j.end()) {
      if (!it->is_number_unsigned() && !it->is_number_integer())
        bad("'seed' must be an integer");
      sc.seed = it->get<std::uint64_t>();
    }
    auto th = j.find("theorems");
    if (th != j.end()) {
      if (!th->is_array() || th->empty())
        bad("'theorems' must be a nonempty array of form names");
      for (const json& name : *th) {
        if (!name.is_string()) bad("'theorems' entries must be strings");
        sc.forms.push_back(bound_form_from(name.get<std::string>()));
      }
    } else {
      sc.forms = {BoundForm::Kernel, BoundForm::Separable, BoundForm::KernelS,
                  BoundForm::SeparableS};
    }
    return sc;
  }
  bad("unknown mode '" + mode + "'");
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  return parse_json(j);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

// ---------------------------------------------------------------------------
// Execution

namespace {

void emit_bound_csv(std::ostream& csv, const BoundReport& rep) {
  csv << "t,bound,in_domain\n";
  for (const BoundPoint& pt : rep.points)
    csv << format_double(pt.t) << ',' << format_double(pt.bound) << ','
        << format_bool(pt.in_domain) << '\n';
}

void emit_margin_csv(std::ostream& csv, const std::vector<double>& t,
                     const std::vector<double>& u,
                     const std::vector<double>& bound,
                     const std::vector<double>& margin,
                     const std::vector<char>& in_domain) {
  csv << "t,u,bound,margin,in_domain\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    csv << format_double(t[i]) << ',' << format_double(u[i]) << ','
        << format_double(bound[i]) << ',' << format_double(margin[i]) << ','
        << format_bool(in_domain[i] != 0) << '\n';
}

}  // namespace

int run_scenario(const Scenario& sc, std::ostream& csv, std::ostream& log,
                 bool quiet) {
  switch (sc.mode) {
    case ScenarioMode::Bound: {
      ProblemInstance inst = sc.inst.instantiate();
      BoundReport rep = compute_bound(inst);
      emit_bound_csv(csv, rep);
      if (!quiet) {
        log << "bound: form=" << bound_form_name(rep.form)
            << " points=" << rep.points.size()
            << " constant=" << format_double(rep.constant)
            << " out_of_domain=" << (rep.any_out_of_domain ? "yes" : "no")
            << "\n";
      }
      return 0;
    }
    case ScenarioMode::Verify: {
      ProblemInstance inst = sc.inst.instantiate();
      GridFunction u = synthesize_extremal(inst);
      DominationResult dom = verify_domination(inst, u);
      emit_margin_csv(csv, dom.t, dom.u, dom.bound, dom.margin, dom.in_domain);
      if (!quiet) {
        log << "verify: form=" << bound_form_name(dom.report.form)
            << " pass=" << (dom.pass ? "yes" : "no")
            << " worst_margin=" << format_double(dom.worst_margin)
            << " tightness=" << format_double(dom.tightness) << "\n";
      }
      return dom.pass ? 0 : 1;
    }
    case ScenarioMode::Solve: {
      ScalePtr scale = TimeScale::build(sc.solve.scale);
      Expr hex = Expr::parse(sc.solve.h, {"t"});
      std::vector<double> hv(scale->size());
      for (std::size_t i = 0; i < scale->size(); ++i)
        hv[i] = hex.eval1(scale->at(i));
      IvpSpec spec{scale, Expr::parse(sc.solve.F, {"t", "u", "v"}),
                   Expr::parse(sc.solve.K, {"t", "u"}), sc.solve.u_a,
                   GridFunction(scale, std::move(hv)),
                   ScalarMap(sc.solve.Phi)};
      ApplicationReport rep = verify_application(spec, sc.solve.x0);
      emit_margin_csv(csv, rep.t, rep.u, rep.bound, rep.margin, rep.in_domain);
      if (!quiet) {
        log << "solve: points=" << rep.t.size()
            << " residual_max=" << format_double(rep.residual_max)
            << " worst_margin=" << format_double(rep.worst_margin)
            << " pass=" << (rep.pass ? "yes" : "no") << "\n";
      }
      return rep.pass ? 0 : 1;
    }
    case ScenarioMode::Sweep: {
      SweepResult res = run_sweep(sc.seed, sc.instances, sc.forms);
      csv << "seed,theorem,scale,worst_margin,tightness\n";
      for (const SweepRow& row : res.rows)
        csv << row.seed << ',' << bound_form_name(row.form) << ','
            << row.scale << ',' << format_double(row.worst_margin) << ','
            << format_double(row.tightness) << '\n';
      if (!quiet) {
        log << "sweep: instances=" << res.total
            << " skipped_overflow=" << res.skipped_overflow
            << " violations=" << res.violations << "\n";
      }
      return res.violations == 0 ? 0 : 1;
    }
    case ScenarioMode::Converge: {
      std::vector<ConvergenceRow> rows =
          convergence_study(sc.inst, sc.factors);
      csv << "factor,points,sup_diff,order,p_gap\n";
      for (const ConvergenceRow& row : rows)
        csv << row.factor << ',' << row.points << ','
            << format_double(row.sup_diff) << ',' << format_double(row.order)
            << ',' << format_double(row.p_gap) << '\n';
      if (!quiet) log << "converge: rows=" << rows.size() << "\n";
      return 0;
    }
  }
  fail(Errc::BadScenario, "unhandled scenario mode");
}

}  // namespace tsgb
