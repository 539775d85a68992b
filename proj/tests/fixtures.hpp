#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "oracle.hpp"
#include "unitfree/contact.hpp"
#include "unitfree/jacobi.hpp"

namespace fixtures {

using namespace unitfree;

inline LichnerowiczStructure make_structure(const Chart& chart,
                                            const std::vector<std::tuple<std::size_t, std::size_t, std::string>>& pi,
                                            const std::vector<std::string>& r) {
  BivectorField b(chart);
  for (const auto& [i, j, text] : pi) b = b.with(i, j, parse(text));
  std::vector<Expr> comps;
  for (const auto& text : r) comps.push_back(parse(text));
  return LichnerowiczStructure(b, VectorField(chart, comps));
}

inline const Chart& qpz() {
  static const Chart chart("contact3", {"q", "p", "z"});
  return chart;
}

/// Standard contact pair on (q, p, z): pi = dp ^ (dq + p dz), R = -dz.
inline LichnerowiczStructure contact3() { return make_structure(qpz(), {{0, 1, "-1"}, {1, 2, "p"}}, {"0", "0", "-1"}); }

/// Symplectic plane pi = dq ^ dp, R = 0.
inline LichnerowiczStructure poisson_plane() {
  return make_structure(Chart("poisson2", {"q", "p"}), {{0, 1, "1"}}, {"0", "0"});
}

/// pi = dx ^ dy, R = w dw: fails the Jacobi identity with J(x, y, w) = -w.
inline LichnerowiczStructure nonintegrable() {
  return make_structure(Chart("nonintegrable", {"x", "y", "w"}), {{0, 1, "1"}}, {"0", "0", "w"});
}

/// Hand-written numeric twin of contact3() for oracle checks.
inline oracle::Structure contact3_oracle() {
  oracle::Structure s;
  s.dim = 3;
  s.pi = [](std::size_t i, std::size_t j, const oracle::Vec& x) {
    // pi(dq, dp) = -1, pi(dp, dz) = p.
    double m[3][3] = {{0, -1, 0}, {1, 0, x[1]}, {0, -x[1], 0}};
    return m[i][j];
  };
  s.r = [](std::size_t i, const oracle::Vec&) { return i == 2 ? -1.0 : 0.0; };
  return s;
}

inline oracle::Structure nonintegrable_oracle() {
  oracle::Structure s;
  s.dim = 3;
  s.pi = [](std::size_t i, std::size_t j, const oracle::Vec&) {
    if (i == 0 && j == 1) return 1.0;
    if (i == 1 && j == 0) return -1.0;
    return 0.0;
  };
  s.r = [](std::size_t i, const oracle::Vec& x) { return i == 2 ? x[2] : 0.0; };
  return s;
}

// Bases and the two factors F: Q0 -> Q1, B: Q1 -> Q2 used for the jet-lift checks.
inline const Chart base1("Q", {"q"});
inline const Chart base_q("Q1", {"q1", "q2"});
inline const Chart base_y("Q2", {"y1", "y2"});
inline const Chart base_w("Q0", {"w1", "w2"});

/// phi(q1, q2) = (q1 + q2^2, q2), beta = 1.5 + q1^2.
inline Factor shear_factor() {
  return Factor(base_q, base_y, {parse("q1 + q2^2"), parse("q2")}, std::vector<Expr>{parse("y1 - y2^2"), parse("y2")},
                parse("1.5 + q1^2"));
}

/// phi(w1, w2) = (2*w1 - w2, w2 + 1), beta = 2 + sin(w2).
inline Factor affine_factor() {
  return Factor(base_w, base_q, {parse("2*w1 - w2"), parse("w2 + 1")},
                std::vector<Expr>{parse("(q1 + q2 - 1)/2"), parse("q2 - 1")}, parse("2 + sin(w2)"));
}

inline oracle::Vec values(const Point& p) { return oracle::Vec(p.values().begin(), p.values().end()); }

}  // namespace fixtures
