#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "unitfree/chart.hpp"
#include "unitfree/expr.hpp"

namespace unitfree {

inline constexpr double kDefaultTol = 1e-9;
inline constexpr std::size_t kDefaultPoints = 100;
inline constexpr double kDefaultBoxLow = -2.0;
inline constexpr double kDefaultBoxHigh = 2.0;

/// Seeded uniform sampling in a box; coordinates without an explicit range use [-2, 2].
struct SampleSpec {
  std::uint64_t seed = 0;
  std::size_t count = kDefaultPoints;
  std::map<std::string, std::pair<double, double>> box;
};

std::vector<Point> sample_points(const Chart& chart, const SampleSpec& spec);
std::vector<Point> sample_points(const Chart& chart, std::size_t count, std::uint64_t seed);

/// Random polynomial in the chart coordinates: every monomial of total degree
/// <= `degree` with a coefficient uniform in [-1, 1].
Expr random_polynomial(const Chart& chart, int degree, std::mt19937_64& rng);

/// 1 + l1^2 + l2^2 for random affine l1, l2: a polynomial that is >= 1 everywhere.
Expr random_positive_polynomial(const Chart& chart, std::mt19937_64& rng);

}  // namespace unitfree
