#pragma once

// Helpers shared by the verification modules.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "unitfree/error.hpp"
#include "unitfree/jacobi.hpp"

namespace unitfree::detail {

inline void require_same_chart(const Chart& a, const Chart& b, const char* what) {
  if (!(a == b)) throw ChartMismatch(std::string(what) + ": charts '" + a.name() + "' and '" + b.name() + "' differ");
}

inline void require_points(const std::vector<Point>& pts, const Chart& chart) {
  if (pts.empty()) throw EmptySampleSet("no sample points given");
  for (const auto& p : pts) require_same_chart(p.chart(), chart, "sample point");
}

inline std::vector<CompiledExpr> compile_all(const std::vector<Expr>& es, const Chart& chart) {
  std::vector<CompiledExpr> out;
  out.reserve(es.size());
  for (const auto& e : es) out.emplace_back(e, chart);
  return out;
}

/// Largest |component| of a compiled vector at a point, with the signed value.
/// Residuals are evaluated in extended precision.
inline std::pair<double, double> max_component(const std::vector<CompiledExpr>& comps, const Point& x) {
  double worst = 0.0;
  double value = 0.0;
  for (const auto& c : comps) {
    double v = static_cast<double>(c.extended(x));
    if (std::abs(v) > worst || std::isnan(v)) {
      worst = std::abs(v);
      value = v;
    }
  }
  return {worst, value};
}

inline ResidualEntry scalar_residual(const std::string& label, const Expr& residual, const std::vector<Point>& pts,
                              double tol) {
  CompiledExpr compiled(residual, pts.front().chart());
  WorstTracker t;
  for (const auto& x : pts) {
    double v = static_cast<double>(compiled.extended(x));
    t.update(std::abs(v), v, x);
  }
  return t.entry(label, tol);
}

inline ResidualEntry vector_residual(const std::string& label, const VectorField& residual, const std::vector<Point>& pts,
                              double tol) {
  auto compiled = compile_all(residual.components(), pts.front().chart());
  WorstTracker t;
  for (const auto& x : pts) {
    auto [worst, value] = max_component(compiled, x);
    t.update(worst, value, x);
  }
  return t.entry(label, tol);
}

}  // namespace unitfree::detail
