#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unitfree/chart.hpp"
#include "unitfree/contact.hpp"
#include "unitfree/expr.hpp"
#include "unitfree/jacobi.hpp"
#include "unitfree/report.hpp"

namespace unitfree {

/// Product of two trivialized Jacobi structures on x ++ y ++ [b], b > 0, written
/// in the unit u = P1^* u1, so that P2^* u2 = u / b.
///
/// Coordinates shared by both sides get the suffixes _1 and _2; a side
/// coordinate called "b" is renamed the same way.
struct ProductSpace {
  LichnerowiczStructure left;
  LichnerowiczStructure right;
  Chart total;
  LichnerowiczStructure structure;
  std::vector<std::string> left_names;
  std::vector<std::string> right_names;
  std::string b_name;

  /// p1^* f: a left-chart expression read on the total chart.
  Expr from_left(const Expr& f) const;
  /// p2^* g: a right-chart expression read on the total chart.
  Expr from_right(const Expr& g) const;
  Expr b() const { return Expr::var(b_name); }
  std::vector<Expr> left_coords() const;
  std::vector<Expr> right_coords() const;
};

enum class RatioOrientation { LeftOverRight, RightOverLeft };

/// Ratio of a section f on one side by a nonvanishing section g on the other:
/// f(x) b / g(y) (left over right) or f(y) / (g(x) b) (right over left).
/// Throws ZeroDenominator if g vanishes at one of the (total chart) points.
Expr ratio_function(const ProductSpace& ps, const Expr& f, const Expr& g, RatioOrientation orientation,
                    const std::vector<Point>& pts, double tol = 1e-9);

struct ProductOptions {
  /// Negative control: drop the pi^{y b} block.
  bool corrupt_yb = false;
  /// Run verify_product on 50 points before returning; throws InvalidProduct on failure.
  bool validate = true;
};

/// pi12 = pi1 (xx) + b pi2 (yy), pi12^{y_j b} = b^2 R2^j, pi12^{x_i b} = -b R1^i; R12 = (R1, 0, 0).
/// Throws NonIntegrableInput if either side fails integrability_check.
ProductSpace build_product(const LichnerowiczStructure& l1, const LichnerowiczStructure& l2,
                           const ProductOptions& options = {});

/// Seeded points with side coordinates in [-2, 2] and b in [0.5, 2].
std::vector<Point> product_points(const ProductSpace& ps, std::size_t count, std::uint64_t seed);

/// Defining bracket relations, symbol actions on pulled-back functions and ratio
/// functions, and the squiggle identities, each side assembled independently.
/// Throws EmptySampleSet, PointOutOfRegion (b <= 0).
CheckReport verify_product(const ProductSpace& ps, const std::vector<Point>& pts, double tol, std::uint64_t seed = 0);

/// Brackets of F (P_i^* s) and G (P_j^* t) from the coefficients against their
/// expansion built only from the actions on spanning functions.
CheckReport uniqueness_check(const ProductSpace& ps, const std::vector<Point>& pts, double tol,
                             std::uint64_t seed = 0);

/// Both projections are Jacobi maps: P1 with conversion 1, P2 with conversion b.
CheckReport projection_check(const ProductSpace& ps, const std::vector<Point>& pts, double tol,
                             std::uint64_t seed = 0);

/// (x, y, b) -> (y, x, 1/b) with conversion b is a Jacobi map from ps12 to ps21.
CheckReport symmetry_check(const ProductSpace& ps12, const ProductSpace& ps21, const std::vector<Point>& pts,
                           double tol, std::uint64_t seed = 0);

/// Points of the trivialized lgraph y = phi(x), b = beta(x). Throws PointOutOfRegion
/// if beta <= 0 at a sampled x.
std::vector<Point> graph_points(const ProductSpace& ps, const Factor& factor, std::size_t count, std::uint64_t seed);

/// Vanishing functions p1^*(phi^* f / beta) - (p2^* f) / b of the lgraph, for f in
/// {1, y coordinates} and the extra functions given.
std::vector<Expr> lgraph_generators(const ProductSpace& ps, const Factor& factor, const std::vector<Expr>& extra = {});

/// Coisotropy of the lgraph of a factor in L1 x opposite(L2).
CheckReport lgraph_coisotropy_test(const ProductSpace& ps, const Factor& factor, const std::vector<Point>& graph_pts,
                                   double tol, std::uint64_t seed = 0);

}  // namespace unitfree
