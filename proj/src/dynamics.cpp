#include "unitfree/dynamics.hpp"

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>
#include <algorithm>
#include <cmath>
#include <random>

#include "detail.hpp"
#include "unitfree/error.hpp"
#include "unitfree/sampling.hpp"

namespace unitfree {

using namespace detail;
namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;

struct System {
  std::vector<CompiledExpr> rhs;
  void operator()(const State& x, State& dxdt, double /*t*/) const {
    for (std::size_t i = 0; i < rhs.size(); ++i) dxdt[i] = rhs[i](x);
  }
};

/// d/dt of samples f on times t by three-point Lagrange differences.
std::vector<double> three_point_derivative(const std::vector<double>& t, const std::vector<double>& f) {
  const std::size_t n = t.size();
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t c = std::clamp<std::size_t>(k, 1, n - 2);  // centre of the stencil
    double h1 = t[c] - t[c - 1], h2 = t[c + 1] - t[c];
    double fm = f[c - 1], f0 = f[c], fp = f[c + 1];
    if (k == c) {
      d[k] = -h2 / (h1 * (h1 + h2)) * fm + (h2 - h1) / (h1 * h2) * f0 + h1 / (h2 * (h1 + h2)) * fp;
    } else if (k < c) {
      d[k] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * fm + (h1 + h2) / (h1 * h2) * f0 - h1 / (h2 * (h1 + h2)) * fp;
    } else {
      d[k] = h2 / (h1 * (h1 + h2)) * fm - (h1 + h2) / (h1 * h2) * f0 + (2 * h2 + h1) / (h2 * (h1 + h2)) * fp;
    }
  }
  return d;
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "rk4") return Method::Rk4;
  if (name == "rk45") return Method::Rk45;
  throw ConfigError("unknown integration method '" + name + "' (expected rk4 or rk45)");
}

std::string to_string(Method m) { return m == Method::Rk4 ? "rk4" : "rk45"; }

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (max_steps == 0) throw ConfigError("max_steps must be positive");
}

Trajectory integrate(const VectorField& field, const Point& x0, const IntegratorConfig& cfg) {
  cfg.validate();
  require_same_chart(x0.chart(), field.chart(), "initial point");
  const Chart& chart = field.chart();
  System sys{compile_all(field.components(), chart)};
  State x(x0.values().begin(), x0.values().end());

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  auto record = [&](double t) {
    if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); }))
      throw StepFailure("state is no longer finite at t = " + std::to_string(t));
    traj.times.push_back(t);
    traj.states.emplace_back(chart, x);
  };

  if (cfg.method == Method::Rk4) {
    odeint::runge_kutta4<State> stepper;
    double t = 0.0;
    for (std::size_t k = 0; t < cfg.t_end; ++k) {
      if (k >= cfg.max_steps) throw StepFailure("rk4 exceeded max_steps");
      double next = std::min(static_cast<double>(k + 1) * cfg.dt, cfg.t_end);
      // A remainder below a millionth of a step is absorbed into the last full step.
      if (cfg.t_end - next < 1e-6 * cfg.dt) next = cfg.t_end;
      stepper.do_step(sys, x, t, next - t);
      t = next;
      record(t);
    }
    return traj;
  }

  auto stepper = odeint::make_controlled(cfg.abs_tol, cfg.rel_tol, odeint::runge_kutta_dopri5<State>());
  double t = 0.0, dt = cfg.dt;
  for (std::size_t attempts = 0; t < cfg.t_end; ++attempts) {
    if (attempts >= cfg.max_steps) throw StepFailure("rk45 could not reach t_end within max_steps");
    bool last = dt >= cfg.t_end - t;
    double step = last ? cfg.t_end - t : dt;
    // try_step advances t and proposes the next step on success, shrinks it on failure.
    if (stepper.try_step(sys, x, t, step) == odeint::success) {
      if (last) t = cfg.t_end;
      record(t);
    }
    dt = step;
    if (t < cfg.t_end && !(dt > 1e-14 * std::max(1.0, cfg.t_end)))
      throw StepFailure("rk45 step size underflow at t = " + std::to_string(t));
  }
  return traj;
}

Trajectory hamilton_flow(const LichnerowiczStructure& l, const Expr& h, const Point& x0, const IntegratorConfig& cfg) {
  require_chart(h, l.chart());
  auto traj = integrate(hamiltonian_vector_field(l, h), x0, cfg);
  CompiledExpr hc(h, l.chart());
  for (const auto& x : traj.states) traj.h_values.push_back(hc(x));
  if (traj.states.size() >= 3) traj.residuals = conservation_residuals(l, h, traj);
  return traj;
}

std::vector<double> conservation_residuals(const LichnerowiczStructure& l, const Expr& h, const Trajectory& traj) {
  if (traj.states.size() < 3) throw TooFewSamples("conservation diagnostics need at least three samples");
  CompiledExpr hc(h, l.chart());
  CompiledExpr rh(l.r().apply(h), l.chart());
  std::vector<double> hv;
  for (const auto& x : traj.states) hv.push_back(hc(x));
  auto dh = three_point_derivative(traj.times, hv);
  std::vector<double> out;
  for (std::size_t k = 0; k < hv.size(); ++k) out.push_back(std::abs(dh[k] - hv[k] * rh(traj.states[k])));
  return out;
}

double conservation_diagnostics(const LichnerowiczStructure& l, const Expr& h, const Trajectory& traj) {
  auto r = conservation_residuals(l, h, traj);
  return *std::max_element(r.begin(), r.end());
}

Expr newtonian_energy(const ContactSpace& cs, const std::vector<std::vector<Expr>>& g_inv, const Expr& v,
                      double kappa) {
  const std::size_t n = cs.n();
  if (g_inv.size() != n) throw ConfigError("inverse metric must be " + std::to_string(n) + "x" + std::to_string(n));
  for (const auto& row : g_inv) {
    if (row.size() != n) throw ConfigError("inverse metric must be square");
    for (const auto& e : row) require_chart(e, cs.base);
  }
  require_chart(v, cs.base);

  std::vector<std::vector<CompiledExpr>> g;
  for (const auto& row : g_inv) g.push_back(compile_all(row, cs.base));
  for (const auto& x : sample_points(cs.base, kDefaultPoints, 0)) {
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m(i, j) = g[i][j](x);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (std::abs(m(i, j) - m(j, i)) > 1e-12 * (1.0 + std::abs(m(i, j))))
          throw NonSymmetricMetric("inverse metric is not symmetric at " + to_string(x));
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw NonPositiveDefinite("inverse metric is not positive definite at " + to_string(x));
  }

  Expr kinetic;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      kinetic = kinetic + g_inv[i][j] * Expr::var(cs.p(i)) * Expr::var(cs.p(j));
  }
  return Expr(0.5) * kinetic + v + Expr(kappa) * Expr::var(cs.z());
}

Expr combined_energy(const ProductSpace& ps, const Expr& h1, const Expr& h2) {
  return ps.from_left(h1) + ps.from_right(h2) / ps.b();
}

CheckReport additivity_demo(const ProductSpace& ps, const Expr& h1, const Expr& h2, double tol, std::uint64_t seed) {
  Expr H = combined_energy(ps, h1, h2);
  auto pts = product_points(ps, kDefaultPoints, seed);
  std::mt19937_64 rng(seed);
  CheckReport report;
  report.name = "energy additivity";
  report.tol = tol;
  report.points = pts.size();
  report.seed = seed;

  Expr L1h = ps.from_left(h1);
  std::vector<Expr> gs, fs;
  for (const auto& c : ps.right.chart().coords()) gs.push_back(Expr::var(c));
  for (const auto& c : ps.left.chart().coords()) fs.push_back(Expr::var(c));
  gs.push_back(random_polynomial(ps.right.chart(), 2, rng));
  fs.push_back(random_polynomial(ps.left.chart(), 2, rng));

  WorstTracker decouple, left, right;
  auto track = [&](WorstTracker& t, const Expr& e) {
    CompiledExpr c(e, ps.total);
    for (const auto& x : pts) {
      double v = static_cast<double>(c.extended(x));
      t.update(std::abs(v), v, x);
    }
  };
  for (const auto& g : gs) {
    track(decouple, bracket(ps.structure, L1h, ps.from_right(g) / ps.b()));
    track(right, bracket(ps.structure, H, ps.from_right(g) / ps.b()) - ps.from_right(bracket(ps.right, h2, g)) / ps.b());
  }
  for (const auto& f : fs) track(left, bracket(ps.structure, H, ps.from_left(f)) - ps.from_left(bracket(ps.left, h1, f)));
  report.add(decouple.entry("{P1*h1, P2*g} = 0", tol));
  report.add(left.entry("{H, P1*f} = P1*{h1, f}", tol));
  report.add(right.entry("{H, P2*g} = P2*{h2, g}", tol));
  WorstTracker self;
  track(self, bracket(ps.structure, H, H));
  report.add(self.entry("{H, H} = 0", tol));
  return report;
}

}  // namespace unitfree
