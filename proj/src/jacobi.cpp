#include "unitfree/jacobi.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "detail.hpp"
#include "unitfree/error.hpp"

namespace unitfree {

using namespace detail;

// ---------------------------------------------------------------------------
// VectorField

VectorField::VectorField(Chart chart, std::vector<Expr> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
  if (components_.size() != chart_.dim()) {
    throw ChartMismatch("vector field has " + std::to_string(components_.size()) + " components on a chart of dimension " +
                        std::to_string(chart_.dim()));
  }
  for (const auto& c : components_) require_chart(c, chart_);
}

VectorField VectorField::zero(const Chart& chart) { return VectorField(chart, std::vector<Expr>(chart.dim())); }

VectorField VectorField::coordinate(const Chart& chart, std::size_t i) {
  std::vector<Expr> comps(chart.dim());
  comps.at(i) = 1.0;
  return VectorField(chart, std::move(comps));
}

Expr VectorField::apply(const Expr& f) const {
  require_chart(f, chart_);
  Expr sum = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (components_[i].is_constant(0.0)) continue;
    sum = sum + components_[i] * diff(f, chart_.coord(i));
  }
  return sum;
}

VectorField VectorField::operator+(const VectorField& other) const {
  require_same_chart(chart_, other.chart_, "vector field sum");
  std::vector<Expr> out(components_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = components_[i] + other.components_[i];
  return VectorField(chart_, std::move(out));
}

VectorField VectorField::operator-(const VectorField& other) const {
  require_same_chart(chart_, other.chart_, "vector field difference");
  std::vector<Expr> out(components_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = components_[i] - other.components_[i];
  return VectorField(chart_, std::move(out));
}

VectorField VectorField::scaled(const Expr& factor) const {
  std::vector<Expr> out(components_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = factor * components_[i];
  return VectorField(chart_, std::move(out));
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  require_same_chart(x.chart(), y.chart(), "lie bracket");
  std::vector<Expr> out(x.chart().dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.apply(y[i]) - y.apply(x[i]);
  return VectorField(x.chart(), std::move(out));
}

// ---------------------------------------------------------------------------
// BivectorField

BivectorField::BivectorField(Chart chart)
    : chart_(std::move(chart)), upper_(chart_.dim() * (chart_.dim() - 1) / 2) {}

std::size_t BivectorField::slot(std::size_t i, std::size_t j) const {
  // i < j; row-major strict upper triangle.
  std::size_t n = chart_.dim();
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

Expr BivectorField::at(std::size_t i, std::size_t j) const {
  std::size_t n = chart_.dim();
  if (i >= n || j >= n) throw std::out_of_range("bivector index out of range");
  if (i == j) return 0.0;
  if (i < j) return upper_[slot(i, j)];
  return -upper_[slot(j, i)];
}

BivectorField BivectorField::with(std::size_t i, std::size_t j, Expr value) const {
  std::size_t n = chart_.dim();
  if (i >= n || j >= n) throw std::out_of_range("bivector index out of range");
  if (i == j) throw std::invalid_argument("diagonal components of a bivector are zero");
  require_chart(value, chart_);
  BivectorField out = *this;
  if (i < j) {
    out.upper_[slot(i, j)] = std::move(value);
  } else {
    out.upper_[slot(j, i)] = -value;
  }
  return out;
}

Expr BivectorField::pair(const Expr& f, const Expr& g) const {
  std::size_t n = chart_.dim();
  std::vector<Expr> df(n), dg(n);
  for (std::size_t i = 0; i < n; ++i) {
    df[i] = diff(f, chart_.coord(i));
    dg[i] = diff(g, chart_.coord(i));
  }
  Expr sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Expr& c = upper_[slot(i, j)];
      if (c.is_constant(0.0)) continue;
      Expr cross = df[i] * dg[j] - df[j] * dg[i];
      if (cross.is_constant(0.0)) continue;
      sum = sum + c * cross;
    }
  }
  return sum;
}

BivectorField BivectorField::scaled(const Expr& factor) const {
  BivectorField out = *this;
  for (auto& c : out.upper_) c = factor * c;
  return out;
}

// ---------------------------------------------------------------------------
// Derivations

Expr Derivation::apply(const Expr& g) const { return x.apply(g) + f0 * g; }

Derivation derivation_bracket(const Derivation& a, const Derivation& b) {
  return Derivation(lie_bracket(a.x, b.x), a.x.apply(b.f0) - b.x.apply(a.f0));
}

// ---------------------------------------------------------------------------
// Lichnerowicz structures

LichnerowiczStructure::LichnerowiczStructure(BivectorField pi, VectorField r) : pi_(std::move(pi)), r_(std::move(r)) {
  require_same_chart(pi_.chart(), r_.chart(), "Lichnerowicz structure");
}

LichnerowiczStructure LichnerowiczStructure::opposite() const {
  return LichnerowiczStructure(pi_.scaled(-1.0), r_.scaled(-1.0));
}

Expr bracket(const LichnerowiczStructure& l, const Expr& f, const Expr& g) {
  require_chart(f, l.chart());
  require_chart(g, l.chart());
  return l.pi().pair(f, g) + f * l.r().apply(g) - g * l.r().apply(f);
}

VectorField sharp(const LichnerowiczStructure& l, const Expr& f) {
  require_chart(f, l.chart());
  const Chart& chart = l.chart();
  std::size_t n = chart.dim();
  std::vector<Expr> df(n);
  for (std::size_t j = 0; j < n; ++j) df[j] = diff(f, chart.coord(j));
  std::vector<Expr> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Expr sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || df[j].is_constant(0.0)) continue;
      sum = sum + df[j] * l.pi().at(j, i);
    }
    out[i] = sum;
  }
  return VectorField(chart, std::move(out));
}

VectorField hamiltonian_vector_field(const LichnerowiczStructure& l, const Expr& f) {
  return l.r().scaled(f) + sharp(l, f);
}

Derivation hamiltonian_derivation(const LichnerowiczStructure& l, const Expr& f) {
  return Derivation(hamiltonian_vector_field(l, f), -l.r().apply(f));
}

Expr jacobiator_expr(const LichnerowiczStructure& l, const Expr& f, const Expr& g, const Expr& h) {
  return bracket(l, bracket(l, f, g), h) + bracket(l, bracket(l, g, h), f) + bracket(l, bracket(l, h, f), g);
}

double jacobiator(const LichnerowiczStructure& l, const Expr& f, const Expr& g, const Expr& h,
                  const std::vector<Point>& pts) {
  require_points(pts, l.chart());
  CompiledExpr j(jacobiator_expr(l, f, g, h), l.chart());
  double worst = 0.0;
  for (const auto& x : pts) worst = std::max(worst, std::abs(j(x)));
  return worst;
}

CheckReport integrability_check(const LichnerowiczStructure& l, const std::vector<Point>& pts, double tol) {
  require_points(pts, l.chart());
  const Chart& chart = l.chart();
  std::vector<Expr> family{Expr(1.0)};
  std::vector<std::string> names{"1"};
  for (const auto& c : chart.coords()) {
    family.push_back(Expr::var(c));
    names.push_back(c);
  }
  CheckReport report;
  report.name = "integrability";
  report.tol = tol;
  report.points = pts.size();
  for (std::size_t a = 0; a < family.size(); ++a) {
    for (std::size_t b = a + 1; b < family.size(); ++b) {
      for (std::size_t c = b + 1; c < family.size(); ++c) {
        Expr j = jacobiator_expr(l, family[a], family[b], family[c]);
        report.add(scalar_residual("(" + names[a] + ", " + names[b] + ", " + names[c] + ")", j, pts, tol));
      }
    }
  }
  return report;
}

CheckReport nondegeneracy_check(const LichnerowiczStructure& l, const std::vector<Point>& pts, double tol) {
  require_points(pts, l.chart());
  const std::size_t n = l.chart().dim();
  std::vector<Expr> entries;
  entries.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) entries.push_back(l.r()[i] * l.r()[j] + l.pi().at(i, j));
  }
  auto compiled = compile_all(entries, l.chart());
  double min_det = std::numeric_limits<double>::infinity();
  std::optional<Point> where;
  double signed_det = 0.0;
  Eigen::MatrixXd m(n, n);
  for (const auto& x : pts) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m(i, j) = compiled[i * n + j](x);
    }
    double det = m.partialPivLu().determinant();
    if (!where || std::abs(det) < min_det) {
      min_det = std::abs(det);
      signed_det = det;
      where = x;
    }
  }
  CheckReport report;
  report.name = "nondegeneracy";
  report.tol = tol;
  report.points = pts.size();
  report.pass = min_det >= tol;
  report.worst = min_det;
  report.witness = where;
  report.witness_label = "det(R R^T + pi)";
  report.witness_value = signed_det;
  report.figures["min_abs_det"] = min_det;
  return report;
}

LichnerowiczStructure conformal_transform(const LichnerowiczStructure& l, const Expr& zc, const std::vector<Point>& pts,
                                          double tol) {
  require_chart(zc, l.chart());
  CompiledExpr z(zc, l.chart());
  for (const auto& x : pts) {
    if (std::abs(z(x)) <= tol) {
      throw ZeroConversionFactor("conversion factor '" + to_string(zc) + "' vanishes at " + to_string(x));
    }
  }
  return LichnerowiczStructure(l.pi().scaled(zc), l.r().scaled(zc) + sharp(l, zc));
}

CheckReport conformal_law_check(const LichnerowiczStructure& l, const Expr& zc,
                                const std::vector<std::pair<Expr, Expr>>& pairs, const std::vector<Point>& pts,
                                double tol) {
  require_points(pts, l.chart());
  LichnerowiczStructure transformed = conformal_transform(l, zc, pts, tol);
  CheckReport report;
  report.name = "conformal law";
  report.tol = tol;
  report.points = pts.size();
  for (const auto& [f, g] : pairs) {
    Expr lhs = bracket(transformed, f, g);
    Expr rhs = zc * bracket(l, f, g) + f * l.pi().pair(zc, g) - g * l.pi().pair(zc, f);
    report.add(scalar_residual("{" + to_string(f) + ", " + to_string(g) + "}'", lhs - rhs, pts, tol));
  }
  return report;
}

double coefficient_distance(const LichnerowiczStructure& a, const LichnerowiczStructure& b,
                            const std::vector<Point>& pts) {
  require_same_chart(a.chart(), b.chart(), "coefficient comparison");
  const std::size_t n = a.chart().dim();
  std::vector<Expr> diffs;
  for (std::size_t i = 0; i < n; ++i) {
    diffs.push_back(a.r()[i] - b.r()[i]);
    for (std::size_t j = i + 1; j < n; ++j) diffs.push_back(a.pi().at(i, j) - b.pi().at(i, j));
  }
  auto compiled = compile_all(diffs, a.chart());
  double worst = 0.0;
  for (const auto& x : pts) worst = std::max(worst, max_component(compiled, x).first);
  return worst;
}

bool poisson_unit_test(const LichnerowiczStructure& l, const std::vector<Point>& pts, double tol) {
  require_points(pts, l.chart());
  auto compiled = compile_all(l.r().components(), l.chart());
  for (const auto& x : pts) {
    if (max_component(compiled, x).first > tol) return false;
  }
  return true;
}

CheckReport symbol_squiggle_suite(const LichnerowiczStructure& l, const Expr& f, const Expr& g, const Expr& h,
                                  const std::vector<Point>& pts, double tol) {
  require_points(pts, l.chart());
  for (const auto* e : {&f, &g, &h}) require_chart(*e, l.chart());

  // Sections a = f u, b = g u, c = h u; test functions u1 = g, u2 = h, u3 = f.
  const Expr &sa = f, &sb = g, &sc = h;
  const Expr &u1 = g, &u2 = h, &u3 = f;
  auto X = [&](const Expr& s) { return hamiltonian_vector_field(l, s); };
  // Squiggle applied to a function: Lambda#(dF (x) s)[G] = s pi(dF, dG).
  auto squiggle = [&](const Expr& df, const Expr& s, const Expr& dg) { return s * l.pi().pair(df, dg); };

  CheckReport report;
  report.name = "symbol-squiggle";
  report.tol = tol;
  report.points = pts.size();

  VectorField id1 = X(u1 * sa) - X(sa).scaled(u1) - sharp(l, u1).scaled(sa);
  report.add(vector_residual("identity 1: X_{g f} = g X_f + f pi#(dg)", id1, pts, tol));

  Expr id2 = squiggle(u1, sa, u2) * sb + squiggle(u2, sb, u1) * sa;
  report.add(scalar_residual("identity 2: squiggle antisymmetry", id2, pts, tol));

  VectorField id3 = X(bracket(l, sa, sb)) - lie_bracket(X(sa), X(sb));
  report.add(vector_residual("identity 3: X_{f,g} = [X_f, X_g]", id3, pts, tol));

  VectorField id4 = lie_bracket(X(sa), sharp(l, u1).scaled(sb)) - sharp(l, X(sa).apply(u1)).scaled(sb) -
                    sharp(l, u1).scaled(bracket(l, sa, sb));
  report.add(vector_residual("identity 4: [X_f, Lambda#(dg (x) g)]", id4, pts, tol));

  // Cyclic identity; it holds as lhs + rhs = 0 for every Jacobi structure.
  Expr lhs5 = squiggle(u1, sa, squiggle(u2, sb, u3)) * sc + squiggle(u2, sb, squiggle(u3, sc, u1)) * sa +
              squiggle(u3, sc, squiggle(u1, sa, u2)) * sb;
  Expr rhs5 = X(sb).apply(u1) * squiggle(u2, sa, u3) * sc + X(sc).apply(u2) * squiggle(u3, sb, u1) * sa +
              X(sa).apply(u3) * squiggle(u1, sc, u2) * sb;
  report.add(scalar_residual("identity 5: cyclic squiggle", lhs5 + rhs5, pts, tol));
  return report;
}

CheckReport coisotropy_test(const LichnerowiczStructure& l, const std::vector<Expr>& constraints,
                            const std::vector<Point>& surface_pts, double tol) {
  require_points(surface_pts, l.chart());
  std::vector<CompiledExpr> phis;
  for (const auto& c : constraints) phis.emplace_back(c, l.chart());
  for (const auto& x : surface_pts) {
    for (std::size_t a = 0; a < phis.size(); ++a) {
      if (std::abs(phis[a](x)) > tol) {
        throw PointOffSurface("point " + to_string(x) + " violates constraint '" + to_string(constraints[a]) + "'");
      }
    }
  }
  CheckReport report;
  report.name = "coisotropy";
  report.tol = tol;
  report.points = surface_pts.size();
  CheckReport cross;
  cross.tol = tol;
  for (std::size_t a = 0; a < constraints.size(); ++a) {
    VectorField xa = hamiltonian_vector_field(l, constraints[a]);
    for (std::size_t b = 0; b < constraints.size(); ++b) {
      std::string pair = "{" + to_string(constraints[a]) + ", " + to_string(constraints[b]) + "}";
      report.add(scalar_residual("X_{" + to_string(constraints[a]) + "}[" + to_string(constraints[b]) + "]",
                                 xa.apply(constraints[b]), surface_pts, tol));
      cross.add(scalar_residual(pair, bracket(l, constraints[a], constraints[b]), surface_pts, tol));
    }
  }
  report.figures["bracket_cross_check_worst"] = cross.worst;
  report.figures["bracket_cross_check_pass"] = cross.pass ? 1.0 : 0.0;
  for (auto& e : cross.entries) {
    e.label = "bracket " + e.label;
    report.entries.push_back(std::move(e));
  }
  return report;
}

Expr pullback(const Expr& f, const Chart& target, const std::vector<Expr>& phi) {
  if (phi.size() != target.dim()) throw ChartMismatch("map has the wrong number of components for chart '" + target.name() + "'");
  require_chart(f, target);
  std::map<std::string, Expr> repl;
  for (std::size_t i = 0; i < phi.size(); ++i) repl.emplace(target.coord(i), phi[i]);
  return substitute(f, repl);
}

CheckReport jacobi_map_test(const LichnerowiczStructure& l1, const LichnerowiczStructure& l2,
                            const std::vector<Expr>& phi, const Expr& beta,
                            const std::vector<std::pair<Expr, Expr>>& test_pairs, const std::vector<Point>& pts,
                            double tol) {
  require_points(pts, l1.chart());
  for (const auto& c : phi) require_chart(c, l1.chart());
  require_chart(beta, l1.chart());
  CompiledExpr b(beta, l1.chart());
  for (const auto& x : pts) {
    if (std::abs(b(x)) <= tol) throw ZeroConversionFactor("conversion factor vanishes at " + to_string(x));
  }
  auto pull = [&](const Expr& f) { return pullback(f, l2.chart(), phi) / beta; };
  CheckReport report;
  report.name = "jacobi map";
  report.tol = tol;
  report.points = pts.size();
  for (const auto& [f, g] : test_pairs) {
    Expr lhs = pull(bracket(l2, f, g));
    Expr rhs = bracket(l1, pull(f), pull(g));
    report.add(scalar_residual("{" + to_string(f) + ", " + to_string(g) + "}", lhs - rhs, pts, tol));
  }
  return report;
}

std::vector<std::pair<Expr, Expr>> spanning_pairs(const Chart& chart) {
  std::vector<Expr> family{Expr(1.0)};
  for (const auto& c : chart.coords()) family.push_back(Expr::var(c));
  std::vector<std::pair<Expr, Expr>> out;
  for (std::size_t a = 0; a < family.size(); ++a) {
    for (std::size_t b = a + 1; b < family.size(); ++b) out.emplace_back(family[a], family[b]);
  }
  return out;
}

}  // namespace unitfree
