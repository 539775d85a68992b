#pragma once

#include <optional>
#include <string>
#include <vector>

#include "unitfree/chart.hpp"
#include "unitfree/expr.hpp"
#include "unitfree/jacobi.hpp"
#include "unitfree/report.hpp"

namespace unitfree {

/// Canonical contact phase space over a base chart, in adapted coordinates
/// (q^1..q^n, p_1..p_n, z). The conversion coordinate z tracks the choice of unit.
///
/// Momentum names: "q" -> "p", "q<k>" -> "p<k>", anything else x -> "p_x".
struct ContactSpace {
  Chart base;
  Chart total;
  LichnerowiczStructure structure;
  /// Components of the contact form dz - sum p_i dq^i on the total chart.
  std::vector<Expr> theta;

  std::size_t n() const noexcept { return base.dim(); }
  const std::string& q(std::size_t i) const { return total.coord(i); }
  const std::string& p(std::size_t i) const { return total.coord(n() + i); }
  const std::string& z() const { return total.coord(2 * n()); }
};

/// Builds the space with pi = sum_i d/dp_i ^ (d/dq^i + p_i d/dz), R = -d/dz, and
/// verifies integrability, nondegeneracy and ker(theta) at 100 random points.
ContactSpace build_contact(const Chart& base);

/// max |theta(pi#(df))| over the points.
double theta_kernel_residual(const ContactSpace& cs, const Expr& f, const std::vector<Point>& pts);

/// The base observable s read on the total chart.
Expr lift_observable(const ContactSpace& cs, const Expr& s);

/// Fibre-wise linear function l_a = sum_i p_i X^i(q) + z f0(q) of a base derivation.
Expr lift_derivation(const ContactSpace& cs, const Derivation& a);

/// Factor between trivial line bundles over source and target charts:
/// B^* s = (1/beta) phi^* s.
struct Factor {
  Chart source;
  Chart target;
  /// Target coordinates as functions of source coordinates.
  std::vector<Expr> phi;
  /// Source coordinates as functions of target coordinates.
  std::optional<std::vector<Expr>> phi_inv;
  /// Conversion factor on the source chart.
  Expr beta;

  Factor(Chart source, Chart target, std::vector<Expr> phi, std::optional<std::vector<Expr>> phi_inv, Expr beta);
};

/// b o f for f: Q0 -> Q1 and b: Q1 -> Q2.
Factor compose(const Factor& b, const Factor& f);

/// phi_inv o phi = id on source points and phi o phi_inv = id on their images.
CheckReport check_inverse(const Factor& b, const std::vector<Point>& source_pts, double tol);

/// Pull-back of a section along a factor: (1/beta) phi^* s.
Expr factor_pullback(const Factor& b, const Expr& s);

struct JetLift {
  /// Total-1 coordinates as functions of total-2 coordinates.
  std::vector<Expr> components;
  /// Conversion factor on total 2 making the map a Jacobi map: 1/beta(phi^-1(q2)).
  Expr conversion;
};

/// Jet lift total2 -> total1 of a factor from cs1.base to cs2.base.
JetLift jet_lift(const ContactSpace& cs2, const ContactSpace& cs1, const Factor& b);

/// outer o inner, where outer is written in inner_target coordinates.
std::vector<Expr> compose_maps(const std::vector<Expr>& outer, const Chart& inner_target,
                               const std::vector<Expr>& inner);

/// (phi, beta)_*(X + f) = phi_* X + (f + beta X[1/beta]) o phi^-1, on the target chart.
Derivation der_pushforward(const Factor& b, const Derivation& a);

}  // namespace unitfree
