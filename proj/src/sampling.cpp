#include "unitfree/sampling.hpp"

#include <functional>

#include "unitfree/error.hpp"

namespace unitfree {

std::vector<Point> sample_points(const Chart& chart, const SampleSpec& spec) {
  for (const auto& [name, range] : spec.box) {
    if (!chart.contains(name)) throw ConfigError("sample box names unknown coordinate '" + name + "'");
    if (!(range.first < range.second)) throw ConfigError("empty sample range for '" + name + "'");
  }
  std::mt19937_64 rng(spec.seed);
  std::vector<std::uniform_real_distribution<double>> dists;
  for (const auto& c : chart.coords()) {
    auto it = spec.box.find(c);
    auto [lo, hi] = it == spec.box.end() ? std::pair{kDefaultBoxLow, kDefaultBoxHigh} : it->second;
    dists.emplace_back(lo, hi);
  }
  std::vector<Point> out;
  out.reserve(spec.count);
  for (std::size_t k = 0; k < spec.count; ++k) {
    std::vector<double> v(chart.dim());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = dists[i](rng);
    out.emplace_back(chart, std::move(v));
  }
  return out;
}

std::vector<Point> sample_points(const Chart& chart, std::size_t count, std::uint64_t seed) {
  return sample_points(chart, SampleSpec{seed, count, {}});
}

Expr random_polynomial(const Chart& chart, int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  Expr sum = 0.0;
  std::vector<int> powers(chart.dim(), 0);
  // Enumerate exponent vectors with total degree <= degree in a fixed order.
  std::function<void(std::size_t, int)> visit = [&](std::size_t i, int budget) {
    if (i == powers.size()) {
      Expr term = coeff(rng);
      for (std::size_t k = 0; k < powers.size(); ++k) term = term * pow(Expr::var(chart.coord(k)), powers[k]);
      sum = sum + term;
      return;
    }
    for (int d = 0; d <= budget; ++d) {
      powers[i] = d;
      visit(i + 1, budget - d);
    }
    powers[i] = 0;
  };
  visit(0, degree);
  return sum;
}

Expr random_positive_polynomial(const Chart& chart, std::mt19937_64& rng) {
  Expr l1 = random_polynomial(chart, 1, rng);
  Expr l2 = random_polynomial(chart, 1, rng);
  return Expr(1.0) + pow(l1, 2) + pow(l2, 2);
}

}  // namespace unitfree
