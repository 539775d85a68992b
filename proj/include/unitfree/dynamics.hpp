#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "unitfree/chart.hpp"
#include "unitfree/contact.hpp"
#include "unitfree/expr.hpp"
#include "unitfree/jacobi.hpp"
#include "unitfree/product.hpp"
#include "unitfree/report.hpp"

namespace unitfree {

enum class Method { Rk4, Rk45 };

Method parse_method(const std::string& name);
std::string to_string(Method m);

struct IntegratorConfig {
  Method method = Method::Rk4;
  /// Fixed step for rk4, initial step for rk45.
  double dt = 1e-3;
  double t_end = 1.0;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_steps = 10'000'000;

  /// Throws ConfigError unless dt, t_end and the tolerances are positive.
  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Point> states;
  /// Filled by hamilton_flow; empty for plain integrate().
  std::vector<double> h_values;
  std::vector<double> residuals;
};

/// Integrates x' = X(x) from x0. rk4 samples t_k = k dt with the last step
/// clamped to t_end; rk45 records every accepted step. Throws StepFailure when
/// max_steps is exceeded, the adaptive step underflows or the state blows up.
Trajectory integrate(const VectorField& field, const Point& x0, const IntegratorConfig& cfg);

/// Flow of X_h = h R + pi(dh, .) with h values and conservation residuals filled in.
Trajectory hamilton_flow(const LichnerowiczStructure& l, const Expr& h, const Point& x0, const IntegratorConfig& cfg);

/// |dh/dt - h R[h]| per sample, dh/dt from three-point differences on the
/// (possibly non-uniform) time grid. Throws TooFewSamples below three states.
std::vector<double> conservation_residuals(const LichnerowiczStructure& l, const Expr& h, const Trajectory& traj);

/// max of conservation_residuals.
double conservation_diagnostics(const LichnerowiczStructure& l, const Expr& h, const Trajectory& traj);

/// 1/2 sum g^{ij}(q) p_i p_j + V(q) + kappa z on the contact space. The inverse
/// metric is checked for symmetry and positive definiteness at sample points
/// (NonSymmetricMetric, NonPositiveDefinite).
Expr newtonian_energy(const ContactSpace& cs, const std::vector<std::vector<Expr>>& g_inv, const Expr& v,
                      double kappa);

/// H = p1^* h1 + (p2^* h2)/b on a product of two contact spaces, with the
/// decoupling relations checked at 100 product points.
CheckReport additivity_demo(const ProductSpace& ps, const Expr& h1, const Expr& h2, double tol = 1e-9,
                            std::uint64_t seed = 0);

/// The combined energy used by additivity_demo.
Expr combined_energy(const ProductSpace& ps, const Expr& h1, const Expr& h2);

}  // namespace unitfree
