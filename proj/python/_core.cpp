#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <random>

#include "unitfree/contact.hpp"
#include "unitfree/dynamics.hpp"
#include "unitfree/error.hpp"
#include "unitfree/jacobi.hpp"
#include "unitfree/product.hpp"
#include "unitfree/sampling.hpp"
#include "unitfree/system.hpp"

namespace py = pybind11;
using namespace unitfree;

namespace {

py::object point_dict(const std::optional<Point>& p) {
  if (!p) return py::none();
  py::dict d;
  for (std::size_t i = 0; i < p->chart().dim(); ++i) d[py::str(p->chart().coord(i))] = (*p)[i];
  return std::move(d);
}

py::dict report_dict(const CheckReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["passed"] = r.pass;
  d["tol"] = r.tol;
  d["worst"] = r.worst;
  d["points"] = r.points;
  d["witness"] = point_dict(r.witness);
  d["witness_label"] = r.witness_label;
  d["witness_value"] = r.witness_value;
  py::list entries;
  for (const auto& e : r.entries) {
    py::dict ed;
    ed["label"] = e.label;
    ed["passed"] = e.pass;
    ed["worst"] = e.worst;
    ed["witness"] = point_dict(e.witness);
    ed["witness_value"] = e.witness_value;
    entries.append(ed);
  }
  d["entries"] = entries;
  d["figures"] = r.figures;
  return d;
}

Expr on_chart(const std::string& text, const Chart& chart) {
  Expr e = parse(text);
  require_chart(e, chart);
  return e;
}

std::vector<Point> to_points(const std::vector<std::vector<double>>& rows, const Chart& chart) {
  std::vector<Point> pts;
  for (const auto& r : rows) pts.emplace_back(chart, r);
  return pts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Unit-free Hamiltonian mechanics on coordinate charts";

  auto base = py::register_exception<Error>(m, "UnitfreeError", PyExc_RuntimeError);
  py::register_exception<SyntaxError>(m, "SyntaxError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ChartMismatch>(m, "ChartMismatch", base.ptr());
  py::register_exception<EvalError>(m, "EvalError", base.ptr());
  py::register_exception<StepFailure>(m, "StepFailure", base.ptr());
  py::register_exception<PointOffSurface>(m, "PointOffSurface", base.ptr());

  py::class_<Expr>(m, "Expr")
      .def(py::init([](const std::string& text) { return parse(text); }), py::arg("text"))
      .def("diff", [](const Expr& e, const std::string& v) { return simplify(diff(e, v)); }, py::arg("var"))
      .def("simplify", [](const Expr& e) { return simplify(e); })
      .def("eval",
           [](const Expr& e, const std::map<std::string, double>& values) {
             std::vector<std::string> names;
             for (const auto& [k, _] : values) names.push_back(k);
             return eval(e, Point(Chart("values", names), values));
           },
           py::arg("values"))
      .def("__str__", [](const Expr& e) { return to_string(e); })
      .def("__repr__", [](const Expr& e) { return "Expr('" + to_string(e) + "')"; })
      .def("__eq__", [](const Expr& a, const Expr& b) { return a == b; })
      .def("__add__", [](const Expr& a, const Expr& b) { return a + b; })
      .def("__sub__", [](const Expr& a, const Expr& b) { return a - b; })
      .def("__mul__", [](const Expr& a, const Expr& b) { return a * b; })
      .def("__truediv__", [](const Expr& a, const Expr& b) { return a / b; })
      .def("__neg__", [](const Expr& a) { return -a; });
  m.def("parse", [](const std::string& text) { return parse(text); }, py::arg("text"));

  py::class_<SystemDescription>(m, "System")
      .def_property_readonly("coords", [](const SystemDescription& s) { return s.chart().coords(); })
      .def_property_readonly("name", [](const SystemDescription& s) { return s.chart().name(); })
      .def_property_readonly("hamiltonians",
                             [](const SystemDescription& s) {
                               std::map<std::string, std::string> out;
                               for (const auto& [k, v] : s.hamiltonians) out[k] = to_string(v);
                               return out;
                             })
      .def_property_readonly("constraints",
                             [](const SystemDescription& s) {
                               std::map<std::string, std::vector<std::string>> out;
                               for (const auto& [k, v] : s.constraints) {
                                 for (const auto& e : v) out[k].push_back(to_string(e));
                               }
                               return out;
                             })
      .def("pi", [](const SystemDescription& s, std::size_t i, std::size_t j) { return s.structure.pi().at(i, j); })
      .def("r", [](const SystemDescription& s, std::size_t i) { return s.structure.r()[i]; });

  m.def("load_system", &load_system, py::arg("path"));
  m.def("parse_system", [](const std::string& text) { return parse_system(text); }, py::arg("json_text"));
  m.def(
      "contact_system",
      [](const std::vector<std::string>& base_coords) {
        auto cs = build_contact(Chart("base", base_coords));
        return SystemDescription{"contact", cs.structure, {}, {}, {}, {}};
      },
      py::arg("base_coords"), "Canonical contact phase space over a base chart, coordinates (q, p, z).");

  m.def(
      "bracket",
      [](const SystemDescription& s, const std::string& f, const std::string& g) {
        return simplify(bracket(s.structure, on_chart(f, s.chart()), on_chart(g, s.chart())));
      },
      py::arg("system"), py::arg("f"), py::arg("g"));
  m.def(
      "hamiltonian_vector_field",
      [](const SystemDescription& s, const std::string& h) {
        auto field = hamiltonian_vector_field(s.structure, on_chart(h, s.chart()));
        std::vector<Expr> out;
        for (const auto& c : field.components()) out.push_back(simplify(c));
        return out;
      },
      py::arg("system"), py::arg("h"));

  m.def(
      "integrability",
      [](const SystemDescription& s, std::size_t points, std::uint64_t seed, double tol) {
        return report_dict(integrability_check(s.structure, sample_points(s.chart(), points, seed), tol));
      },
      py::arg("system"), py::arg("points") = kDefaultPoints, py::arg("seed") = 0, py::arg("tol") = kDefaultTol);
  m.def(
      "nondegeneracy",
      [](const SystemDescription& s, std::size_t points, std::uint64_t seed, double tol) {
        return report_dict(nondegeneracy_check(s.structure, sample_points(s.chart(), points, seed), tol));
      },
      py::arg("system"), py::arg("points") = kDefaultPoints, py::arg("seed") = 0, py::arg("tol") = kDefaultTol);
  m.def(
      "symbol_squiggle",
      [](const SystemDescription& s, std::size_t points, std::uint64_t seed, double tol) {
        std::mt19937_64 rng(seed);
        Expr f = random_polynomial(s.chart(), 3, rng), g = random_polynomial(s.chart(), 3, rng),
             h = random_polynomial(s.chart(), 3, rng);
        return report_dict(symbol_squiggle_suite(s.structure, f, g, h, sample_points(s.chart(), points, seed), tol));
      },
      py::arg("system"), py::arg("points") = kDefaultPoints, py::arg("seed") = 0, py::arg("tol") = kDefaultTol);
  m.def(
      "coisotropy",
      [](const SystemDescription& s, const std::vector<std::string>& constraints,
         const std::vector<std::vector<double>>& surface_points, double tol) {
        std::vector<Expr> cs;
        for (const auto& c : constraints) cs.push_back(on_chart(c, s.chart()));
        return report_dict(coisotropy_test(s.structure, cs, to_points(surface_points, s.chart()), tol));
      },
      py::arg("system"), py::arg("constraints"), py::arg("surface_points"), py::arg("tol") = kDefaultTol);
  m.def(
      "product",
      [](const SystemDescription& a, const SystemDescription& b, std::size_t points, std::uint64_t seed, double tol,
         bool corrupt) {
        auto ps = build_product(a.structure, b.structure, {.corrupt_yb = corrupt, .validate = false});
        py::dict d = report_dict(verify_product(ps, product_points(ps, points, seed), tol, seed));
        d["coords"] = ps.total.coords();
        return d;
      },
      py::arg("left"), py::arg("right"), py::arg("points") = 50, py::arg("seed") = 0, py::arg("tol") = 1e-8,
      py::arg("corrupt") = false);

  m.def(
      "flow",
      [](const SystemDescription& s, const std::string& h, const std::vector<double>& x0, double dt, double t_end,
         const std::string& method) {
        IntegratorConfig cfg;
        cfg.method = parse_method(method);
        cfg.dt = dt;
        cfg.t_end = t_end;
        Expr he = s.hamiltonians.count(h) ? s.hamiltonians.at(h) : on_chart(h, s.chart());
        Trajectory traj;
        {
          py::gil_scoped_release release;
          traj = hamilton_flow(s.structure, he, Point(s.chart(), x0), cfg);
        }
        std::vector<std::vector<double>> states;
        for (const auto& x : traj.states) states.emplace_back(x.values().begin(), x.values().end());
        py::dict d;
        d["t"] = traj.times;
        d["states"] = states;
        d["h"] = traj.h_values;
        d["residual"] = traj.residuals;
        return d;
      },
      py::arg("system"), py::arg("hamiltonian"), py::arg("x0"), py::arg("dt") = 1e-3, py::arg("t_end") = 1.0,
      py::arg("method") = "rk4",
      "Integrates X_h. `hamiltonian` is a name from the system file or an expression.");
}
