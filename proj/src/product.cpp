#include "unitfree/product.hpp"

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "detail.hpp"
#include "unitfree/error.hpp"
#include "unitfree/sampling.hpp"

namespace unitfree {

using namespace detail;

namespace {

std::map<std::string, std::string> rename_map(const Chart& chart, const std::vector<std::string>& names) {
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < chart.dim(); ++i) out.emplace(chart.coord(i), names[i]);
  return out;
}

/// Residuals grouped by label, in insertion order.
class ResidualSet {
 public:
  void add(const std::string& label, const Expr& residual) {
    auto it = index_.find(label);
    if (it == index_.end()) {
      index_.emplace(label, groups_.size());
      groups_.push_back({label, {residual}});
    } else {
      groups_[it->second].second.push_back(residual);
    }
  }

  void report_into(CheckReport& report, const std::vector<Point>& pts, double tol) const {
    for (const auto& [label, exprs] : groups_) {
      WorstTracker t;
      for (const auto& e : exprs) {
        CompiledExpr c(e, pts.front().chart());
        for (const auto& x : pts) {
          double v = static_cast<double>(c.extended(x));
          t.update(std::abs(v), v, x);
        }
      }
      report.add(t.entry(label, tol));
    }
  }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<std::pair<std::string, std::vector<Expr>>> groups_;
};

CheckReport new_report(const std::string& name, const std::vector<Point>& pts, double tol, std::uint64_t seed) {
  CheckReport r;
  r.name = name;
  r.tol = tol;
  r.points = pts.size();
  r.seed = seed;
  return r;
}

void require_region(const ProductSpace& ps, const std::vector<Point>& pts) {
  require_points(pts, ps.total);
  for (const auto& x : pts) {
    if (!(x[ps.b_name] > 0.0)) throw PointOutOfRegion("product point " + to_string(x) + " has b <= 0");
  }
}

/// Hamiltonian vector field action X_s[f] and squiggle s pi(df, dg) of one structure.
Expr symbol(const LichnerowiczStructure& l, const Expr& s, const Expr& f) {
  return hamiltonian_vector_field(l, s).apply(f);
}
Expr squiggle(const LichnerowiczStructure& l, const Expr& f, const Expr& s, const Expr& g) {
  return s * l.pi().pair(f, g);
}

}  // namespace

Expr ProductSpace::from_left(const Expr& f) const {
  require_chart(f, left.chart());
  return rename(f, rename_map(left.chart(), left_names));
}

Expr ProductSpace::from_right(const Expr& g) const {
  require_chart(g, right.chart());
  return rename(g, rename_map(right.chart(), right_names));
}

std::vector<Expr> ProductSpace::left_coords() const {
  std::vector<Expr> out;
  for (const auto& n : left_names) out.push_back(Expr::var(n));
  return out;
}

std::vector<Expr> ProductSpace::right_coords() const {
  std::vector<Expr> out;
  for (const auto& n : right_names) out.push_back(Expr::var(n));
  return out;
}

Expr ratio_function(const ProductSpace& ps, const Expr& f, const Expr& g, RatioOrientation orientation,
                    const std::vector<Point>& pts, double tol) {
  require_points(pts, ps.total);
  Expr num, den;
  if (orientation == RatioOrientation::LeftOverRight) {
    num = ps.from_left(f) * ps.b();
    den = ps.from_right(g);
  } else {
    num = ps.from_right(f);
    den = ps.from_left(g) * ps.b();
  }
  CompiledExpr d(den, ps.total);
  for (const auto& x : pts) {
    if (std::abs(d(x)) <= tol) throw ZeroDenominator("denominator '" + to_string(g) + "' vanishes at " + to_string(x));
  }
  return num / den;
}

ProductSpace build_product(const LichnerowiczStructure& l1, const LichnerowiczStructure& l2,
                           const ProductOptions& options) {
  for (const auto* l : {&l1, &l2}) {
    auto rep = integrability_check(*l, sample_points(l->chart(), kDefaultPoints, 0), kDefaultTol);
    if (!rep.pass)
      throw NonIntegrableInput("structure on '" + l->chart().name() + "' fails the Jacobi identity on " +
                               rep.witness_label);
  }

  const auto& c1 = l1.chart().coords();
  const auto& c2 = l2.chart().coords();
  std::set<std::string> shared(c1.begin(), c1.end());
  std::set<std::string> clash;
  for (const auto& n : c2) {
    if (shared.count(n)) clash.insert(n);
  }
  clash.insert("b");
  std::vector<std::string> left_names, right_names, all;
  for (const auto& n : c1) left_names.push_back(clash.count(n) ? n + "_1" : n);
  for (const auto& n : c2) right_names.push_back(clash.count(n) ? n + "_2" : n);
  all = left_names;
  all.insert(all.end(), right_names.begin(), right_names.end());
  all.push_back("b");
  Chart total(l1.chart().name() + "_x_" + l2.chart().name(), all);

  const std::size_t n1 = c1.size(), n2 = c2.size(), ib = n1 + n2;
  auto m1 = rename_map(l1.chart(), left_names);
  auto m2 = rename_map(l2.chart(), right_names);
  Expr b = Expr::var("b");

  BivectorField pi(total);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = i + 1; j < n1; ++j) pi = pi.with(i, j, rename(l1.pi().at(i, j), m1));
    pi = pi.with(i, ib, -b * rename(l1.r()[i], m1));
  }
  for (std::size_t i = 0; i < n2; ++i) {
    for (std::size_t j = i + 1; j < n2; ++j) pi = pi.with(n1 + i, n1 + j, b * rename(l2.pi().at(i, j), m2));
    if (!options.corrupt_yb) pi = pi.with(n1 + i, ib, pow(b, 2) * rename(l2.r()[i], m2));
  }
  std::vector<Expr> r(total.dim());
  for (std::size_t i = 0; i < n1; ++i) r[i] = rename(l1.r()[i], m1);

  ProductSpace ps{l1, l2, total, LichnerowiczStructure(pi, VectorField(total, r)), left_names, right_names, "b"};
  if (options.validate) {
    auto rep = verify_product(ps, product_points(ps, 50, 0), 1e-8);
    if (!rep.pass) throw InvalidProduct("product coefficients fail '" + rep.witness_label + "'");
  }
  return ps;
}

std::vector<Point> product_points(const ProductSpace& ps, std::size_t count, std::uint64_t seed) {
  SampleSpec spec;
  spec.seed = seed;
  spec.count = count;
  spec.box[ps.b_name] = {0.5, 2.0};
  return sample_points(ps.total, spec);
}

CheckReport verify_product(const ProductSpace& ps, const std::vector<Point>& pts, double tol, std::uint64_t seed) {
  require_region(ps, pts);
  const auto& l1 = ps.left;
  const auto& l2 = ps.right;
  const auto& st = ps.structure;
  std::mt19937_64 rng(seed);
  Expr u = ps.b();
  auto L = [&](const Expr& e) { return ps.from_left(e); };
  auto R = [&](const Expr& e) { return ps.from_right(e); };

  // In the trivialization sections of the product are functions on the total
  // chart: P1^* s1 = sigma1(x), P2^* s2 = sigma2(y)/b.
  auto sym12 = [&](const Expr& s, const Expr& f) { return symbol(st, s, f); };
  auto sq12 = [&](const Expr& f, const Expr& s, const Expr& g) { return squiggle(st, f, s, g); };

  ResidualSet set;
  constexpr int kTrials = 2;
  for (int trial = 0; trial < kTrials; ++trial) {
    Expr s1 = random_polynomial(l1.chart(), 2, rng), t1 = random_polynomial(l1.chart(), 2, rng);
    Expr s2 = random_polynomial(l2.chart(), 2, rng), t2 = random_polynomial(l2.chart(), 2, rng);
    Expr f1 = random_polynomial(l1.chart(), 2, rng), g1 = random_polynomial(l1.chart(), 2, rng);
    Expr f2 = random_polynomial(l2.chart(), 2, rng), g2 = random_polynomial(l2.chart(), 2, rng);
    Expr a = random_positive_polynomial(l1.chart(), rng), a2 = random_positive_polynomial(l1.chart(), rng);
    Expr c = random_positive_polynomial(l2.chart(), rng), c2 = random_positive_polynomial(l2.chart(), rng);

    Expr P1s1 = L(s1), P1t1 = L(t1);
    Expr P2s2 = R(s2) / u, P2t2 = R(t2) / u;
    // Ratios: a/c = a(x) b / c(y), c/a = c(y) / (a(x) b), s1/c and s2/a likewise.
    Expr a_c = L(a) * u / R(c), a2_c = L(a2) * u / R(c);
    Expr c_a = R(c) / (L(a) * u), c2_a = R(c2) / (L(a) * u);
    Expr s1_c = L(s1) * u / R(c), s2_a = R(s2) / (L(a) * u);

    set.add("{P1*s1, P1*t1} = P1*{s1, t1}", bracket(st, P1s1, P1t1) - L(bracket(l1, s1, t1)));
    set.add("{P2*s2, P2*t2} = P2*{s2, t2}", bracket(st, P2s2, P2t2) - R(bracket(l2, s2, t2)) / u);
    set.add("{P1*s1, P2*s2} = 0", bracket(st, P1s1, P2s2));

    set.add("X_{P1*s1}[p1*f1] = p1*X_{s1}[f1]", sym12(P1s1, L(f1)) - L(symbol(l1, s1, f1)));
    set.add("X_{P2*s2}[p2*f2] = p2*X_{s2}[f2]", sym12(P2s2, R(f2)) - R(symbol(l2, s2, f2)));
    set.add("X_{P1*s1}[p2*f2] = 0", sym12(P1s1, R(f2)));
    set.add("X_{P2*s2}[p1*f1] = 0", sym12(P2s2, L(f1)));

    set.add("X_{P1*s1}[a/c] = {s1, a}/c", sym12(P1s1, a_c) - L(bracket(l1, s1, a)) * u / R(c));
    set.add("X_{P2*s2}[c/a] = {s2, c}/a", sym12(P2s2, c_a) - R(bracket(l2, s2, c)) / (L(a) * u));
    set.add("L(d(a/c) x P1*s1)[a'/c] = ({a, a'}/c)(s1/c)",
            sq12(a_c, P1s1, a2_c) - L(bracket(l1, a, a2)) * u / R(c) * s1_c);
    set.add("L(d(c/a) x P2*s2)[c'/a] = ({c, c'}/a)(s2/a)",
            sq12(c_a, P2s2, c2_a) - R(bracket(l2, c, c2)) / (L(a) * u) * s2_a);

    set.add("L(dp1*f1 x P1*s1)[p1*g1] = p1*L1(df1 x s1)[g1]", sq12(L(f1), P1s1, L(g1)) - L(squiggle(l1, f1, s1, g1)));
    set.add("L(dp2*f2 x P2*s2)[p2*g2] = p2*L2(df2 x s2)[g2]", sq12(R(f2), P2s2, R(g2)) - R(squiggle(l2, f2, s2, g2)));
    set.add("L(dp1*f1 x P1*s1)[p2*g2] = 0", sq12(L(f1), P1s1, R(g2)));
    set.add("L(dp2*f2 x P2*s2)[p1*g1] = 0", sq12(R(f2), P2s2, L(g1)));

    set.add("E1 L(dp1*f1 x P1*s1)[a/c] = -X_a[f1] s1/c", sq12(L(f1), P1s1, a_c) + L(symbol(l1, a, f1)) * s1_c);
    set.add("E2 L(dp2*f2 x P2*s2)[c/a] = -X_c[f2] s2/a", sq12(R(f2), P2s2, c_a) + R(symbol(l2, c, f2)) * s2_a);
    set.add("E3 L(dp1*f1 x P2*s2)[c/a] = X_a[f1] (s2/a)(c/a)",
            sq12(L(f1), P2s2, c_a) - L(symbol(l1, a, f1)) * s2_a * c_a);
    set.add("E4 L(dp2*f2 x P1*s1)[a/c] = X_c[f2] (s1/c)(a/c)",
            sq12(R(f2), P1s1, a_c) - R(symbol(l2, c, f2)) * s1_c * a_c);
    set.add("E5 L(dp1*f1 x P2*s2)[p1*g1] = -L1(dg1 x a)[f1] s2/a",
            sq12(L(f1), P2s2, L(g1)) + L(squiggle(l1, g1, a, f1)) * s2_a);
    set.add("E6 L(dp2*f2 x P1*s1)[p2*g2] = -L2(dg2 x c)[f2] s1/c",
            sq12(R(f2), P1s1, R(g2)) + R(squiggle(l2, g2, c, f2)) * s1_c);
    // The last two are read both with an arbitrary function and with the
    // coefficient function of the section.
    set.add("E7 L(dp1*f1 x P2*s2)[p2*g2] = 0 (arbitrary g2)", sq12(L(f1), P2s2, R(g2)));
    set.add("E7 L(dp1*f1 x P2*s2)[p2*s2] = 0 (g2 = s2)", sq12(L(f1), P2s2, R(s2)));
    set.add("E8 L(dp2*f2 x P1*s1)[p1*g1] = 0 (arbitrary g1)", sq12(R(f2), P1s1, L(g1)));
    set.add("E8 L(dp2*f2 x P1*s1)[p1*s1] = 0 (g1 = s1)", sq12(R(f2), P1s1, L(s1)));
  }

  auto report = new_report("product identities", pts, tol, seed);
  set.report_into(report, pts, tol);
  return report;
}

CheckReport uniqueness_check(const ProductSpace& ps, const std::vector<Point>& pts, double tol, std::uint64_t seed) {
  require_region(ps, pts);
  const auto& l1 = ps.left;
  const auto& l2 = ps.right;
  const std::size_t n1 = ps.left_names.size(), n2 = ps.right_names.size(), dim = ps.total.dim(), ib = n1 + n2;
  Expr u = ps.b();
  auto L = [&](const Expr& e) { return ps.from_left(e); };
  auto R = [&](const Expr& e) { return ps.from_right(e); };

  // Actions of the symbol and squiggle of P1^* s (side 1) or P2^* s (side 2) on
  // the coordinate functions x, y and b = u1/u2, from the spanning-function rules.
  struct Rules {
    std::vector<Expr> x;                   // X_S[c_k]
    std::vector<std::vector<Expr>> lam;    // L(dc_k x S)[c_l]
    Expr section;                          // S as a function on the total chart
  };
  auto rules = [&](int side, const Expr& s) {
    Rules out{std::vector<Expr>(dim), std::vector<std::vector<Expr>>(dim, std::vector<Expr>(dim)), Expr()};
    if (side == 1) {
      Expr sig = L(s);
      out.section = sig;
      for (std::size_t i = 0; i < n1; ++i) {
        out.x[i] = L(symbol(l1, s, Expr::var(l1.chart().coord(i))));
        for (std::size_t j = 0; j < n1; ++j) out.lam[i][j] = sig * L(l1.pi().at(i, j));
        out.lam[i][ib] = -L(l1.r()[i]) * sig * u;
        out.lam[ib][i] = -out.lam[i][ib];
      }
      out.x[ib] = L(bracket(l1, s, Expr(1.0))) * u;
      for (std::size_t i = 0; i < n2; ++i) {
        for (std::size_t j = 0; j < n2; ++j) out.lam[n1 + i][n1 + j] = sig * u * R(l2.pi().at(i, j));
        out.lam[n1 + i][ib] = R(l2.r()[i]) * sig * pow(u, 2);
        out.lam[ib][n1 + i] = -out.lam[n1 + i][ib];
      }
    } else {
      Expr sig = R(s);
      out.section = sig / u;
      for (std::size_t i = 0; i < n2; ++i) {
        out.x[n1 + i] = R(symbol(l2, s, Expr::var(l2.chart().coord(i))));
        for (std::size_t j = 0; j < n2; ++j) out.lam[n1 + i][n1 + j] = sig * R(l2.pi().at(i, j));
        out.lam[n1 + i][ib] = R(l2.r()[i]) * sig * u;
        out.lam[ib][n1 + i] = -out.lam[n1 + i][ib];
      }
      out.x[ib] = -u * R(bracket(l2, s, Expr(1.0)));
      for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n1; ++j) out.lam[i][j] = sig / u * L(l1.pi().at(i, j));
        out.lam[i][ib] = -L(l1.r()[i]) * sig;
        out.lam[ib][i] = -out.lam[i][ib];
      }
    }
    return out;
  };
  auto act = [&](const Rules& r, const Expr& g) {
    Expr sum;
    for (std::size_t k = 0; k < dim; ++k) sum = sum + r.x[k] * diff(g, ps.total.coord(k));
    return sum;
  };
  auto lam = [&](const Rules& r, const Expr& f, const Expr& g) {
    Expr sum;
    for (std::size_t k = 0; k < dim; ++k) {
      Expr dk = diff(f, ps.total.coord(k));
      for (std::size_t l = 0; l < dim; ++l) sum = sum + dk * diff(g, ps.total.coord(l)) * r.lam[k][l];
    }
    return sum;
  };

  std::mt19937_64 rng(seed);
  ResidualSet set;
  for (int trial = 0; trial < 2; ++trial) {
    for (auto [si, ti] : {std::pair{1, 1}, std::pair{2, 2}, std::pair{1, 2}}) {
      const auto& cs = si == 1 ? l1.chart() : l2.chart();
      const auto& ct = ti == 1 ? l1.chart() : l2.chart();
      Expr s = random_polynomial(cs, 2, rng), t = random_polynomial(ct, 2, rng);
      Expr F = random_polynomial(ps.total, 2, rng), G = random_polynomial(ps.total, 2, rng);
      Rules rs = rules(si, s), rt = rules(ti, t);
      Expr st_bracket;
      if (si == 1 && ti == 1) st_bracket = L(bracket(l1, s, t));
      if (si == 2 && ti == 2) st_bracket = R(bracket(l2, s, t)) / u;
      // {F S, G T} = F G {S, T} + F X_S[G] T - G X_T[F] S + L(dF x S)[G] T
      Expr expansion = F * G * st_bracket + F * act(rs, G) * rt.section - G * act(rt, F) * rs.section +
                       lam(rs, F, G) * rt.section;
      Expr direct = bracket(ps.structure, F * rs.section, G * rt.section);
      std::string label = "{F P" + std::to_string(si) + "*s, G P" + std::to_string(ti) + "*t}";
      set.add(label, direct - expansion);
    }
  }
  auto report = new_report("product uniqueness", pts, tol, seed);
  set.report_into(report, pts, tol);
  return report;
}

CheckReport projection_check(const ProductSpace& ps, const std::vector<Point>& pts, double tol, std::uint64_t seed) {
  require_region(ps, pts);
  std::mt19937_64 rng(seed);
  auto pairs_for = [&](const Chart& chart) {
    auto pairs = spanning_pairs(chart);
    for (int k = 0; k < 5; ++k) pairs.emplace_back(random_polynomial(chart, 2, rng), random_polynomial(chart, 2, rng));
    return pairs;
  };
  auto report = new_report("projections", pts, tol, seed);
  auto p1 = jacobi_map_test(ps.structure, ps.left, ps.left_coords(), Expr(1.0), pairs_for(ps.left.chart()), pts, tol);
  auto p2 = jacobi_map_test(ps.structure, ps.right, ps.right_coords(), ps.b(), pairs_for(ps.right.chart()), pts, tol);
  for (auto e : p1.entries) {
    e.label = "P1 " + e.label;
    report.add(e);
  }
  for (auto e : p2.entries) {
    e.label = "P2 " + e.label;
    report.add(e);
  }
  return report;
}

CheckReport symmetry_check(const ProductSpace& ps12, const ProductSpace& ps21, const std::vector<Point>& pts,
                           double tol, std::uint64_t seed) {
  require_region(ps12, pts);
  if (!(ps12.left.chart() == ps21.right.chart()) || !(ps12.right.chart() == ps21.left.chart()))
    throw ChartMismatch("symmetry_check needs products of the same two structures in opposite order");
  // (x, y, b) -> (y, x, 1/b), written as ps21 coordinates in terms of ps12 ones.
  std::vector<Expr> phi;
  for (const auto& n : ps12.right_names) phi.push_back(Expr::var(n));
  for (const auto& n : ps12.left_names) phi.push_back(Expr::var(n));
  phi.push_back(Expr(1.0) / ps12.b());
  std::mt19937_64 rng(seed);
  auto pairs = spanning_pairs(ps21.total);
  for (int k = 0; k < 5; ++k) pairs.emplace_back(random_polynomial(ps21.total, 2, rng), random_polynomial(ps21.total, 2, rng));
  auto report = jacobi_map_test(ps12.structure, ps21.structure, phi, ps12.b(), pairs, pts, tol);
  report.name = "product symmetry";
  report.seed = seed;
  return report;
}

std::vector<Point> graph_points(const ProductSpace& ps, const Factor& factor, std::size_t count, std::uint64_t seed) {
  require_same_chart(factor.source, ps.left.chart(), "graph_points source");
  require_same_chart(factor.target, ps.right.chart(), "graph_points target");
  auto phi = compile_all(factor.phi, factor.source);
  CompiledExpr beta(factor.beta, factor.source);
  std::vector<Point> out;
  for (const auto& x : sample_points(factor.source, count, seed)) {
    std::vector<double> v(x.values().begin(), x.values().end());
    for (const auto& c : phi) v.push_back(c(x));
    double bv = beta(x);
    if (!(bv > 0.0)) throw PointOutOfRegion("conversion factor is not positive at " + to_string(x));
    v.push_back(bv);
    out.emplace_back(ps.total, v);
  }
  return out;
}

std::vector<Expr> lgraph_generators(const ProductSpace& ps, const Factor& factor, const std::vector<Expr>& extra) {
  require_same_chart(factor.source, ps.left.chart(), "lgraph source");
  require_same_chart(factor.target, ps.right.chart(), "lgraph target");
  std::vector<Expr> fs{Expr(1.0)};
  for (const auto& c : factor.target.coords()) fs.push_back(Expr::var(c));
  fs.insert(fs.end(), extra.begin(), extra.end());
  std::vector<Expr> out;
  for (const auto& f : fs) out.push_back(ps.from_left(factor_pullback(factor, f)) - ps.from_right(f) / ps.b());
  return out;
}

CheckReport lgraph_coisotropy_test(const ProductSpace& ps, const Factor& factor, const std::vector<Point>& graph_pts,
                                   double tol, std::uint64_t seed) {
  require_region(ps, graph_pts);
  std::mt19937_64 rng(seed);
  std::vector<Expr> extra;
  for (int k = 0; k < 2; ++k) extra.push_back(random_polynomial(factor.target, 2, rng));
  auto report = coisotropy_test(ps.structure, lgraph_generators(ps, factor, extra), graph_pts, tol);
  report.name = "lgraph coisotropy";
  report.seed = seed;
  return report;
}

}  // namespace unitfree
