#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include "unitfree/dynamics.hpp"
#include "unitfree/error.hpp"
#include "unitfree/jacobi.hpp"
#include "unitfree/product.hpp"
#include "unitfree/sampling.hpp"
#include "unitfree/system.hpp"

namespace unitfree::cli {

using json = nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

json point_json(const std::optional<Point>& p) {
  if (!p) return nullptr;
  json j = json::object();
  for (std::size_t i = 0; i < p->chart().dim(); ++i) j[p->chart().coord(i)] = (*p)[i];
  return j;
}

json report_json(const CheckReport& r) {
  json j{{"name", r.name},
         {"pass", r.pass},
         {"tol", r.tol},
         {"worst", r.worst},
         {"points", r.points},
         {"witness_label", r.witness_label},
         {"witness_value", r.witness_value},
         {"witness", point_json(r.witness)}};
  j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"label", e.label},
                       {"pass", e.pass},
                       {"worst", e.worst},
                       {"witness_value", e.witness_value},
                       {"witness", point_json(e.witness)}});
  }
  j["entries"] = std::move(entries);
  json figures = json::object();
  for (const auto& [k, v] : r.figures) figures[k] = v;
  j["figures"] = std::move(figures);
  return j;
}

void print_report(std::ostream& out, const CheckReport& r, bool informational = false) {
  if (informational) {
    out << "[info] " << r.name << ":";
    for (const auto& [k, v] : r.figures) out << " " << k << " = " << fmt(v);
    out << "\n";
    return;
  }
  out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": worst " << short_fmt(r.worst)
      << " (tol " << short_fmt(r.tol) << ", " << r.points << " points";
  if (r.seed) out << ", seed " << *r.seed;
  out << ")\n";
  for (const auto& [k, v] : r.figures) out << "    " << k << " = " << fmt(v) << "\n";
  for (const auto& e : r.entries) {
    out << "    " << (e.pass ? "ok  " : "FAIL") << " " << e.label << "  " << short_fmt(e.worst);
    if (!e.pass && e.witness) out << "  value " << fmt(e.witness_value) << " at " << to_string(*e.witness);
    out << "\n";
  }
  if (!r.pass && r.witness)
    out << "    witness: " << r.witness_label << " = " << fmt(r.witness_value) << " at " << to_string(*r.witness) << "\n";
}

/// Shared flags. The file's "sample" block is the default; flags override it.
struct Common {
  double tol = kDefaultTol;
  std::size_t points = kDefaultPoints;
  std::uint64_t seed = 0;
  bool as_json = false;
  CLI::Option* points_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* app, double default_tol) {
    tol = default_tol;
    app->add_option("--tol", tol, "tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    points_opt = app->add_option("--points", points, "number of sample points")->capture_default_str()->check(
        CLI::Range(std::size_t{1}, std::size_t{1000000}));
    seed_opt = app->add_option("--seed", seed, "sampling seed")->capture_default_str();
    app->add_flag("--json", as_json, "machine-readable report on stdout");
  }

  SampleSpec spec(const SystemDescription& sys) const {
    SampleSpec s = sys.sample;
    if (points_opt->count() || !s.count) s.count = points;
    if (seed_opt->count()) s.seed = seed;
    return s;
  }
};

struct Result {
  bool pass = true;
  json doc = json::object();
};

void emit(std::ostream& out, const Result& res, bool as_json) {
  if (as_json) out << res.doc.dump(2) << "\n";
}

// --- check -----------------------------------------------------------------

Result check_system(const SystemDescription& sys, const Common& c, std::ostream& out) {
  const auto& l = sys.structure;
  SampleSpec spec = c.spec(sys);
  auto pts = sample_points(sys.chart(), spec);

  std::vector<CheckReport> reports;
  reports.push_back(integrability_check(l, pts, c.tol));

  std::mt19937_64 rng(spec.seed);
  Expr f = random_polynomial(sys.chart(), 3, rng);
  Expr g = random_polynomial(sys.chart(), 3, rng);
  Expr h = random_polynomial(sys.chart(), 3, rng);
  reports.push_back(symbol_squiggle_suite(l, f, g, h, pts, c.tol));

  for (std::size_t k = 0; k < sys.unit_conversions.size(); ++k) {
    CheckReport r;
    try {
      r = conformal_law_check(l, sys.unit_conversions[k], spanning_pairs(sys.chart()), pts, c.tol);
    } catch (const ZeroConversionFactor& e) {
      r.pass = false;
      r.tol = c.tol;
      r.points = pts.size();
      r.witness_label = e.what();
      r.worst = std::numeric_limits<double>::infinity();
    }
    r.name = "conformal law, unit conversion " + to_string(sys.unit_conversions[k]);
    reports.push_back(std::move(r));
  }

  // Odd-dimensional Poisson structures are legitimate inputs, so nondegeneracy
  // (being contact or symplectic) is reported but does not decide the exit code.
  CheckReport nondeg = nondegeneracy_check(l, pts, c.tol);

  Result res;
  for (const auto& r : reports) res.pass = res.pass && r.pass;
  res.doc = {{"command", "check"}, {"file", sys.source}, {"chart", sys.chart().name()}, {"pass", res.pass},
             {"seed", spec.seed},  {"points", pts.size()}};
  json checks = json::array();
  for (const auto& r : reports) checks.push_back(report_json(r));
  res.doc["checks"] = std::move(checks);
  res.doc["nondegenerate"] = nondeg.pass;
  res.doc["nondegeneracy"] = report_json(nondeg);

  if (!c.as_json) {
    out << "system " << sys.source << " (chart " << sys.chart().name() << ", dim " << sys.chart().dim() << ")\n";
    for (const auto& r : reports) print_report(out, r);
    print_report(out, nondeg, true);
    out << "nondegenerate: " << (nondeg.pass ? "yes" : "no") << "\n";
    out << (res.pass ? "PASS" : "FAIL") << "\n";
  }
  return res;
}

// --- flow ------------------------------------------------------------------

struct FlowArgs {
  std::string hamiltonian;
  std::vector<double> x0;
  double dt = 1e-3;
  double t_end = 1.0;
  std::string method = "rk4";
  std::string out_file;
};

void write_csv(std::ostream& os, const SystemDescription& sys, const Trajectory& traj) {
  os << "t";
  for (const auto& c : sys.chart().coords()) os << "," << c;
  os << ",h,residual\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << fmt(traj.times[k]);
    for (double v : traj.states[k].values()) os << "," << fmt(v);
    os << "," << fmt(traj.h_values[k]) << "," << fmt(traj.residuals[k]) << "\n";
  }
}

Result flow(const SystemDescription& sys, const FlowArgs& a, const Common& c, std::ostream& out) {
  std::string name = a.hamiltonian;
  if (name.empty()) {
    if (sys.hamiltonians.size() != 1) throw ConfigError("--hamiltonian is required when the system defines " +
                                                        std::to_string(sys.hamiltonians.size()) + " hamiltonians");
    name = sys.hamiltonians.begin()->first;
  }
  auto it = sys.hamiltonians.find(name);
  if (it == sys.hamiltonians.end()) throw ConfigError("no hamiltonian named '" + name + "' in " + sys.source);
  if (a.x0.size() != sys.chart().dim())
    throw ConfigError("--x0 has " + std::to_string(a.x0.size()) + " values, chart has " +
                      std::to_string(sys.chart().dim()));

  IntegratorConfig cfg;
  cfg.method = parse_method(a.method);
  cfg.dt = a.dt;
  cfg.t_end = a.t_end;
  cfg.validate();

  auto traj = hamilton_flow(sys.structure, it->second, Point(sys.chart(), a.x0), cfg);
  if (traj.residuals.empty()) throw ConfigError("run is too short for the conservation diagnostic (needs 3 samples)");
  double worst = *std::max_element(traj.residuals.begin(), traj.residuals.end());

  if (a.out_file.empty()) {
    write_csv(out, sys, traj);
  } else {
    std::ofstream f(a.out_file, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + a.out_file + "'");
    write_csv(f, sys, traj);
  }

  Result res;
  res.pass = !std::isnan(worst) && worst <= c.tol;
  const auto& end = traj.states.back();
  res.doc = {{"command", "flow"},       {"file", sys.source},         {"hamiltonian", name},
             {"method", a.method},      {"dt", a.dt},                 {"t_end", a.t_end},
             {"samples", traj.times.size()}, {"max_residual", worst}, {"tol", c.tol},
             {"pass", res.pass},        {"final_state", point_json(end)}, {"final_h", traj.h_values.back()}};
  if (!a.out_file.empty()) res.doc["out"] = a.out_file;
  return res;
}

// --- product ---------------------------------------------------------------

Result product(const SystemDescription& a, const SystemDescription& b, bool corrupt, const Common& c,
               std::ostream& out) {
  auto ps = build_product(a.structure, b.structure, {.corrupt_yb = corrupt, .validate = false});
  std::uint64_t seed = c.seed_opt->count() ? c.seed : 0;
  auto pts = product_points(ps, c.points, seed);
  auto rep = verify_product(ps, pts, c.tol, seed);

  double r12 = 0.0;
  std::vector<CompiledExpr> rc;
  for (const auto& e : ps.structure.r().components()) rc.emplace_back(e, ps.total);
  for (const auto& x : pts) {
    for (const auto& e : rc) r12 = std::max(r12, std::abs(e(x)));
  }
  rep.figures["max_abs_R12"] = r12;

  Result res;
  res.pass = rep.pass;
  res.doc = {{"command", "product"}, {"left", a.source},  {"right", b.source}, {"chart", ps.total.name()},
             {"coords", ps.total.coords()}, {"corrupted", corrupt}, {"pass", rep.pass}, {"R12_zero", r12 == 0.0},
             {"report", report_json(rep)}};
  if (!c.as_json) {
    out << "product " << ps.total.name() << " on (";
    for (std::size_t i = 0; i < ps.total.dim(); ++i) out << (i ? ", " : "") << ps.total.coord(i);
    out << ")" << (corrupt ? " [corrupted pi^{yb}]" : "") << "\n";
    print_report(out, rep);
    out << "R12 " << (r12 == 0.0 ? "= 0" : "!= 0") << " (max |R12| = " << fmt(r12) << ")\n";
    out << (res.pass ? "PASS" : "FAIL") << "\n";
  }
  return res;
}

// --- coiso -----------------------------------------------------------------

Result coiso(const SystemDescription& sys, const std::string& name, const std::string& points_file, const Common& c,
             std::ostream& out) {
  auto it = sys.constraints.find(name);
  if (it == sys.constraints.end()) throw ConfigError("no constraint set named '" + name + "' in " + sys.source);
  auto pts = load_points(points_file, sys.chart());
  auto rep = coisotropy_test(sys.structure, it->second, pts, c.tol);
  Result res;
  res.pass = rep.pass;
  res.doc = {{"command", "coiso"}, {"file", sys.source}, {"constraints", name}, {"surface_points", points_file},
             {"pass", rep.pass},   {"report", report_json(rep)}};
  if (!c.as_json) {
    print_report(out, rep);
    out << (res.pass ? "PASS" : "FAIL") << "\n";
  }
  return res;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"unit-free Hamiltonian mechanics: structure checks, products, coisotropy and flows", "unitfree"};
  app.require_subcommand(1);

  Common check_c, flow_c, prod_c, coiso_c;
  std::string file, file_b, constraints, surface;
  bool corrupt = false;
  FlowArgs fa;

  auto* check = app.add_subcommand("check", "integrability, symbol/squiggle and conformal-law checks");
  check->add_option("file", file, "system description (JSON)")->required();
  check_c.attach(check, kDefaultTol);

  auto* fl = app.add_subcommand("flow", "integrate the Hamiltonian vector field and write a CSV trajectory");
  fl->add_option("file", file, "system description (JSON)")->required();
  fl->add_option("--hamiltonian", fa.hamiltonian, "name of the energy in the system file");
  fl->add_option("--x0", fa.x0, "initial point, comma separated")->required()->delimiter(',');
  fl->add_option("--dt", fa.dt, "step (initial step for rk45)")->capture_default_str();
  fl->add_option("--t-end", fa.t_end, "final time")->capture_default_str();
  fl->add_option("--method", fa.method, "rk4 or rk45")->capture_default_str();
  fl->add_option("--out", fa.out_file, "CSV output file (default stdout)");
  // The residual uses finite differences of the sampled energy, so it cannot reach 1e-9.
  flow_c.attach(fl, 1e-6);

  auto* pr = app.add_subcommand("product", "build the product of two structures and verify its identities");
  pr->add_option("file_a", file, "left system (JSON)")->required();
  pr->add_option("file_b", file_b, "right system (JSON)")->required();
  pr->add_flag("--corrupt", corrupt, "drop the pi^{yb} block (negative control)");
  prod_c.attach(pr, kDefaultTol);

  auto* co = app.add_subcommand("coiso", "coisotropy test of a constraint set at given surface points");
  co->add_option("file", file, "system description (JSON)")->required();
  co->add_option("--constraints", constraints, "name of the constraint set")->required();
  co->add_option("--surface-points", surface, "JSON array of points on the surface")->required();
  coiso_c.attach(co, kDefaultTol);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "unitfree: " << e.what() << "\n";
    return kExitConfig;
  }

  // Text reports go to stdout, except for flow without --out, where stdout holds the CSV.
  try {
    Result res;
    bool as_json = false;
    if (check->parsed()) {
      res = check_system(load_system(file), check_c, out);
      as_json = check_c.as_json;
      emit(out, res, as_json);
    } else if (fl->parsed()) {
      auto sys = load_system(file);
      res = flow(sys, fa, flow_c, out);
      std::ostream& summary = fa.out_file.empty() ? err : out;
      if (flow_c.as_json) {
        summary << res.doc.dump(2) << "\n";
      } else {
        summary << "max residual " << fmt(res.doc["max_residual"].get<double>()) << " (tol " << short_fmt(flow_c.tol)
                << ") " << (res.pass ? "PASS" : "FAIL") << "\n";
      }
    } else if (pr->parsed()) {
      auto a = load_system(file);
      auto b = load_system(file_b);
      res = product(a, b, corrupt, prod_c, out);
      emit(out, res, prod_c.as_json);
    } else {
      res = coiso(load_system(file), constraints, surface, coiso_c, out);
      emit(out, res, coiso_c.as_json);
    }
    return res.pass ? kExitOk : kExitFail;
  } catch (const PointOffSurface& e) {
    err << "unitfree: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "unitfree: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SyntaxError& e) {
    err << "unitfree: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnknownFunction& e) {
    err << "unitfree: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ChartMismatch& e) {
    err << "unitfree: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    // StepFailure, EvalError, NonIntegrableInput, ...: the input was well-formed but the run failed.
    err << "unitfree: " << e.what() << "\n";
    return kExitFail;
  }
}

}  // namespace unitfree::cli
