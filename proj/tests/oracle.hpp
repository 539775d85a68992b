#pragma once

// Numeric oracles for tests. Nothing here touches the symbolic engine: fields,
// coefficients and observables are plain callables and every derivative is a
// centered finite difference.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Fn = std::function<double(const Vec&)>;

inline double partial(const Fn& f, const Vec& x, std::size_t i, double h) {
  Vec xp = x, xm = x;
  xp[i] += h;
  xm[i] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

/// Lichnerowicz pair given by coefficient callables.
struct Structure {
  std::size_t dim;
  std::function<double(std::size_t, std::size_t, const Vec&)> pi;  // full antisymmetric components
  std::function<double(std::size_t, const Vec&)> r;
};

/// {f, g} = pi(df, dg) + f R[g] - g R[f] with finite-difference differentials.
inline Fn bracket(const Structure& s, Fn f, Fn g, double h = 1e-4) {
  return [s, f = std::move(f), g = std::move(g), h](const Vec& x) {
    Vec df(s.dim), dg(s.dim);
    for (std::size_t i = 0; i < s.dim; ++i) {
      df[i] = partial(f, x, i, h);
      dg[i] = partial(g, x, i, h);
    }
    double sum = 0.0;
    double rf = 0.0, rg = 0.0;
    for (std::size_t i = 0; i < s.dim; ++i) {
      for (std::size_t j = 0; j < s.dim; ++j) sum += s.pi(i, j, x) * df[i] * dg[j];
      rf += s.r(i, x) * df[i];
      rg += s.r(i, x) * dg[i];
    }
    return sum + f(x) * rg - g(x) * rf;
  };
}

/// Hamiltonian vector field X_f[g] = {f, g} + g R[f], componentwise X_f[x^i].
inline Vec hamiltonian_field(const Structure& s, const Fn& f, const Vec& x, double h = 1e-5) {
  Vec out(s.dim);
  for (std::size_t i = 0; i < s.dim; ++i) {
    Fn xi = [i](const Vec& y) { return y[i]; };
    Vec rdf(s.dim);
    double rf = 0.0;
    for (std::size_t k = 0; k < s.dim; ++k) rf += s.r(k, x) * partial(f, x, k, h);
    out[i] = bracket(s, f, xi, h)(x) + x[i] * rf;
  }
  return out;
}

/// Classical RK4 on y' = rhs(y) with a fixed step; used as an independent reference integrator.
inline Vec rk4(const std::function<Vec(const Vec&)>& rhs, Vec y, double t_end, double dt) {
  std::size_t steps = static_cast<std::size_t>(t_end / dt + 0.5);
  double h = t_end / static_cast<double>(steps);
  auto axpy = [](const Vec& a, double s, const Vec& b) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
    return out;
  };
  for (std::size_t k = 0; k < steps; ++k) {
    Vec k1 = rhs(y);
    Vec k2 = rhs(axpy(y, h / 2, k1));
    Vec k3 = rhs(axpy(y, h / 2, k2));
    Vec k4 = rhs(axpy(y, h, k3));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return y;
}

}  // namespace oracle
