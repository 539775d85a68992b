#include "unitfree/contact.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "detail.hpp"
#include "unitfree/error.hpp"
#include "unitfree/sampling.hpp"

namespace unitfree {

using namespace detail;

namespace {

std::string momentum_name(const std::string& q) {
  if (q == "q") return "p";
  if (q.size() > 1 && q[0] == 'q' && q.find_first_not_of("0123456789", 1) == std::string::npos) return "p" + q.substr(1);
  return "p_" + q;
}

std::map<std::string, Expr> coordinate_map(const Chart& chart, const std::vector<Expr>& values) {
  std::map<std::string, Expr> out;
  for (std::size_t i = 0; i < chart.dim(); ++i) out.emplace(chart.coord(i), values[i]);
  return out;
}

/// Screens beta for zeros on the sampling box: a small value or a sign change
/// between samples (beta is continuous on the box) both count.
void require_nonvanishing(const Factor& b, double tol = 1e-9) {
  CompiledExpr beta(b.beta, b.source);
  bool positive = false, negative = false;
  for (const auto& x : sample_points(b.source, kDefaultPoints, 0)) {
    double v;
    try {
      v = beta(x);
    } catch (const EvalError&) {
      continue;
    }
    if (std::abs(v) <= tol) throw ZeroConversionFactor("conversion factor '" + to_string(b.beta) + "' vanishes at " + to_string(x));
    (v > 0 ? positive : negative) = true;
  }
  if (positive && negative) throw ZeroConversionFactor("conversion factor '" + to_string(b.beta) + "' changes sign");
}

const std::vector<Expr>& require_inverse(const Factor& b) {
  if (!b.phi_inv) throw MissingInverse("factor " + b.source.name() + " -> " + b.target.name() + " has no inverse");
  return *b.phi_inv;
}

}  // namespace

ContactSpace build_contact(const Chart& base) {
  std::vector<std::string> names = base.coords();
  for (const auto& q : base.coords()) names.push_back(momentum_name(q));
  names.push_back("z");
  Chart total(base.name() + "_contact", names);

  const std::size_t n = base.dim();
  const std::size_t iz = 2 * n;
  BivectorField pi(total);
  std::vector<Expr> r(total.dim());
  std::vector<Expr> theta(total.dim());
  for (std::size_t i = 0; i < n; ++i) {
    Expr p = Expr::var(total.coord(n + i));
    pi = pi.with(n + i, i, 1.0).with(n + i, iz, p);
    theta[i] = -p;
  }
  r[iz] = -1.0;
  theta[iz] = 1.0;
  ContactSpace cs{base, total, LichnerowiczStructure(pi, VectorField(total, r)), theta};

  auto pts = sample_points(total, kDefaultPoints, 0);
  if (!integrability_check(cs.structure, pts, kDefaultTol).pass) throw std::logic_error("contact pair is not integrable");
  if (!nondegeneracy_check(cs.structure, pts, kDefaultTol).pass) throw std::logic_error("contact pair is degenerate");
  for (std::size_t i = 0; i < total.dim(); ++i) {
    if (theta_kernel_residual(cs, Expr::var(total.coord(i)), pts) > 1e-12)
      throw std::logic_error("contact form does not annihilate the image of pi");
  }
  return cs;
}

double theta_kernel_residual(const ContactSpace& cs, const Expr& f, const std::vector<Point>& pts) {
  require_points(pts, cs.total);
  auto v = sharp(cs.structure, f);
  Expr pairing;
  for (std::size_t i = 0; i < cs.total.dim(); ++i) pairing = pairing + cs.theta[i] * v[i];
  CompiledExpr c(pairing, cs.total);
  double worst = 0.0;
  for (const auto& x : pts) worst = std::max(worst, std::abs(static_cast<double>(c.extended(x))));
  return worst;
}

Expr lift_observable(const ContactSpace& cs, const Expr& s) {
  require_chart(s, cs.base);
  return s;
}

Expr lift_derivation(const ContactSpace& cs, const Derivation& a) {
  require_same_chart(a.chart(), cs.base, "lift_derivation");
  Expr out = Expr::var(cs.z()) * a.f0;
  for (std::size_t i = 0; i < cs.n(); ++i) out = out + Expr::var(cs.p(i)) * a.x[i];
  return out;
}

Factor::Factor(Chart source_, Chart target_, std::vector<Expr> phi_, std::optional<std::vector<Expr>> phi_inv_,
               Expr beta_)
    : source(std::move(source_)),
      target(std::move(target_)),
      phi(std::move(phi_)),
      phi_inv(std::move(phi_inv_)),
      beta(std::move(beta_)) {
  if (phi.size() != target.dim()) throw ChartMismatch("factor map needs one component per target coordinate");
  for (const auto& e : phi) require_chart(e, source);
  require_chart(beta, source);
  if (phi_inv) {
    if (phi_inv->size() != source.dim()) throw ChartMismatch("factor inverse needs one component per source coordinate");
    for (const auto& e : *phi_inv) require_chart(e, target);
  }
}

Factor compose(const Factor& b, const Factor& f) {
  require_same_chart(f.target, b.source, "compose");
  std::vector<Expr> phi = compose_maps(b.phi, f.target, f.phi);
  std::optional<std::vector<Expr>> inv;
  if (b.phi_inv && f.phi_inv) inv = compose_maps(*f.phi_inv, b.source, *b.phi_inv);
  Expr beta = f.beta * pullback(b.beta, f.target, f.phi);
  return Factor(f.source, b.target, phi, inv, beta);
}

CheckReport check_inverse(const Factor& b, const std::vector<Point>& source_pts, double tol) {
  const auto& inv = require_inverse(b);
  require_points(source_pts, b.source);
  CheckReport report;
  report.name = "factor inverse";
  report.tol = tol;
  report.points = source_pts.size();

  auto phi = compile_all(b.phi, b.source);
  auto round = compile_all(compose_maps(inv, b.target, b.phi), b.source);
  std::vector<Point> images;
  WorstTracker there;
  for (const auto& x : source_pts) {
    std::vector<double> y;
    for (const auto& c : phi) y.push_back(c(x));
    images.emplace_back(b.target, y);
    for (std::size_t i = 0; i < round.size(); ++i) {
      double d = round[i](x) - x[i];
      there.update(std::abs(d), d, x);
    }
  }
  report.add(there.entry("phi_inv o phi - id", tol));

  auto back = compile_all(compose_maps(b.phi, b.source, inv), b.target);
  WorstTracker home;
  for (const auto& y : images) {
    for (std::size_t i = 0; i < back.size(); ++i) {
      double d = back[i](y) - y[i];
      home.update(std::abs(d), d, y);
    }
  }
  report.add(home.entry("phi o phi_inv - id", tol));
  return report;
}

Expr factor_pullback(const Factor& b, const Expr& s) { return pullback(s, b.target, b.phi) / b.beta; }

JetLift jet_lift(const ContactSpace& cs2, const ContactSpace& cs1, const Factor& b) {
  require_same_chart(b.source, cs1.base, "jet_lift source");
  require_same_chart(b.target, cs2.base, "jet_lift target");
  const auto& inv = require_inverse(b);
  require_nonvanishing(b);

  // Everything defined on Q1 is read at q1 = phi^-1(q2).
  auto at_q1 = coordinate_map(b.source, inv);
  auto on_q1 = [&](const Expr& e) { return substitute(e, at_q1); };

  const std::size_t n1 = cs1.n();
  Expr z2 = Expr::var(cs2.z());
  Expr beta = on_q1(b.beta);
  std::vector<Expr> out(cs1.total.dim());
  for (std::size_t j = 0; j < n1; ++j) {
    out[j] = inv[j];
    Expr sum;
    for (std::size_t i = 0; i < cs2.n(); ++i) sum = sum + on_q1(diff(b.phi[i], b.source.coord(j))) * Expr::var(cs2.p(i));
    out[n1 + j] = sum / beta - z2 * on_q1(diff(b.beta, b.source.coord(j))) / pow(beta, 2);
  }
  out[2 * n1] = z2 / beta;
  return JetLift{out, Expr(1.0) / beta};
}

std::vector<Expr> compose_maps(const std::vector<Expr>& outer, const Chart& inner_target,
                               const std::vector<Expr>& inner) {
  std::vector<Expr> out;
  out.reserve(outer.size());
  for (const auto& e : outer) out.push_back(pullback(e, inner_target, inner));
  return out;
}

Derivation der_pushforward(const Factor& b, const Derivation& a) {
  require_same_chart(a.chart(), b.source, "der_pushforward");
  const auto& inv = require_inverse(b);
  require_nonvanishing(b);
  auto at_q1 = coordinate_map(b.source, inv);

  std::vector<Expr> x(b.target.dim());
  for (std::size_t i = 0; i < b.target.dim(); ++i) {
    Expr sum;
    for (std::size_t j = 0; j < b.source.dim(); ++j) sum = sum + diff(b.phi[i], b.source.coord(j)) * a.x[j];
    x[i] = substitute(sum, at_q1);
  }
  Expr f = a.f0 + b.beta * a.x.apply(Expr(1.0) / b.beta);
  return Derivation(VectorField(b.target, x), substitute(f, at_q1));
}

}  // namespace unitfree
