#pragma once

#include <utility>
#include <vector>

#include "unitfree/chart.hpp"
#include "unitfree/expr.hpp"
#include "unitfree/report.hpp"

namespace unitfree {

class VectorField {
 public:
  VectorField(Chart chart, std::vector<Expr> components);

  static VectorField zero(const Chart& chart);
  /// The coordinate field d/dx^i.
  static VectorField coordinate(const Chart& chart, std::size_t i);

  const Chart& chart() const noexcept { return chart_; }
  const std::vector<Expr>& components() const noexcept { return components_; }
  const Expr& operator[](std::size_t i) const { return components_.at(i); }

  /// Directional derivative X[f].
  Expr apply(const Expr& f) const;

  VectorField operator+(const VectorField& other) const;
  VectorField operator-(const VectorField& other) const;
  VectorField scaled(const Expr& factor) const;

 private:
  Chart chart_;
  std::vector<Expr> components_;
};

/// Commutator [X, Y] of vector fields.
VectorField lie_bracket(const VectorField& x, const VectorField& y);

/// Antisymmetric bivector field; only the strict upper triangle is stored.
class BivectorField {
 public:
  /// The zero bivector.
  explicit BivectorField(Chart chart);

  const Chart& chart() const noexcept { return chart_; }

  /// Full component access: at(j, i) == -at(i, j) and at(i, i) == 0.
  Expr at(std::size_t i, std::size_t j) const;

  /// Copy with component (i, j) replaced; setting (j, i) stores the negated value.
  BivectorField with(std::size_t i, std::size_t j, Expr value) const;

  /// pi(df, dg) = sum_{i,j} pi^{ij} d_i f d_j g.
  Expr pair(const Expr& f, const Expr& g) const;

  BivectorField scaled(const Expr& factor) const;

 private:
  std::size_t slot(std::size_t i, std::size_t j) const;

  Chart chart_;
  std::vector<Expr> upper_;
};

/// A derivation of the trivial line bundle, split as (vector field, endomorphism part).
struct Derivation {
  VectorField x;
  Expr f0;

  Derivation(VectorField x, Expr f0) : x(std::move(x)), f0(std::move(f0)) {}

  const Chart& chart() const noexcept { return x.chart(); }
  /// a[g] = X[g] + f0 g.
  Expr apply(const Expr& g) const;
};

/// [X + f, Y + g] = [X, Y] + (X[g] - Y[f]).
Derivation derivation_bracket(const Derivation& a, const Derivation& b);

/// A Jacobi structure written in one fixed unit: bivector pi and vector field R,
/// with bracket {f, g} = pi(df, dg) + f R[g] - g R[f].
///
/// Hamiltonian vector fields follow X_f[g] = {f, g} + g R[f], so
/// X_f = f R + pi(df, .).
class LichnerowiczStructure {
 public:
  LichnerowiczStructure(BivectorField pi, VectorField r);

  const Chart& chart() const noexcept { return pi_.chart(); }
  const BivectorField& pi() const noexcept { return pi_; }
  const VectorField& r() const noexcept { return r_; }

  /// The structure with negated bracket (-pi, -R).
  LichnerowiczStructure opposite() const;

 private:
  BivectorField pi_;
  VectorField r_;
};

Expr bracket(const LichnerowiczStructure& l, const Expr& f, const Expr& g);

/// pi(df, .): the contraction of pi with df in its first slot.
VectorField sharp(const LichnerowiczStructure& l, const Expr& f);

VectorField hamiltonian_vector_field(const LichnerowiczStructure& l, const Expr& f);

/// D_f = {f, -}, split as (X_f, -R[f]).
Derivation hamiltonian_derivation(const LichnerowiczStructure& l, const Expr& f);

/// Cyclic sum {{f,g},h} + {{g,h},f} + {{h,f},g} as an expression.
Expr jacobiator_expr(const LichnerowiczStructure& l, const Expr& f, const Expr& g, const Expr& h);

/// max |J| over the points.
double jacobiator(const LichnerowiczStructure& l, const Expr& f, const Expr& g, const Expr& h,
                  const std::vector<Point>& pts);

/// Jacobiator on every triple of {1, x^1, ..., x^n}. The Jacobiator is first
/// order in each slot, so this family detects any failure of the Jacobi identity.
CheckReport integrability_check(const LichnerowiczStructure& l, const std::vector<Point>& pts, double tol);

/// |det(R R^T + pi)| >= tol at every point.
CheckReport nondegeneracy_check(const LichnerowiczStructure& l, const std::vector<Point>& pts, double tol);

/// Structure in the unit u' = zc u: (zc pi, zc R + pi(d zc, .)). Throws
/// ZeroConversionFactor if |zc| <= tol at any of the points.
LichnerowiczStructure conformal_transform(const LichnerowiczStructure& l, const Expr& zc,
                                          const std::vector<Point>& pts, double tol = 1e-9);

/// Two-sided check of {f,g}_{u'} = zc {f,g}_u + f pi(dzc, dg) - g pi(dzc, df) for each pair.
CheckReport conformal_law_check(const LichnerowiczStructure& l, const Expr& zc,
                                const std::vector<std::pair<Expr, Expr>>& pairs, const std::vector<Point>& pts,
                                double tol);

/// max over points and components of |pi_a - pi_b| and |R_a - R_b|.
double coefficient_distance(const LichnerowiczStructure& a, const LichnerowiczStructure& b,
                            const std::vector<Point>& pts);

bool poisson_unit_test(const LichnerowiczStructure& l, const std::vector<Point>& pts, double tol);

/// The five symbol/squiggle identities for the sections f u, g u, h u (and the
/// functions g, h, f), each side evaluated independently.
CheckReport symbol_squiggle_suite(const LichnerowiczStructure& l, const Expr& f, const Expr& g, const Expr& h,
                                  const std::vector<Point>& pts, double tol);

/// Coisotropy of {constraints = 0}: X_{phi_a}[phi_b] vanishes on the surface for
/// all generator pairs. The bracket {phi_a, phi_b} is reported as a cross-check.
/// Throws PointOffSurface if a point violates a constraint by more than tol.
CheckReport coisotropy_test(const LichnerowiczStructure& l, const std::vector<Expr>& constraints,
                            const std::vector<Point>& surface_pts, double tol);

/// Pull-back of f along phi: f with target coordinates replaced by phi's components.
Expr pullback(const Expr& f, const Chart& target, const std::vector<Expr>& phi);

/// Bracket preservation of the pull-back B^* s = (1/beta) phi^* s for each test pair.
CheckReport jacobi_map_test(const LichnerowiczStructure& l1, const LichnerowiczStructure& l2,
                            const std::vector<Expr>& phi, const Expr& beta,
                            const std::vector<std::pair<Expr, Expr>>& test_pairs, const std::vector<Point>& pts,
                            double tol);

/// All unordered pairs from {1, x^1, ..., x^n}.
std::vector<std::pair<Expr, Expr>> spanning_pairs(const Chart& chart);

}  // namespace unitfree
