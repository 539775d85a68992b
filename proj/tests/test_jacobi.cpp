#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "unitfree/error.hpp"
#include "unitfree/sampling.hpp"

using namespace unitfree;
using namespace fixtures;

namespace {

double max_abs_over(const Expr& e, const std::vector<Point>& pts) {
  CompiledExpr c(e, pts.front().chart());
  double worst = 0.0;
  for (const auto& x : pts) worst = std::max(worst, std::abs(c(x)));
  return worst;
}

double field_distance(const VectorField& a, const VectorField& b, const std::vector<Point>& pts) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.components().size(); ++i) worst = std::max(worst, max_abs_over(a[i] - b[i], pts));
  return worst;
}

}  // namespace

TEST_CASE("bracket on the standard contact pair") {
  auto l = contact3();
  CHECK(simplify(bracket(l, parse("q"), parse("p"))) == Expr(-1.0));
  CHECK(simplify(bracket(l, parse("z"), parse("q"))) == parse("q"));
  auto pts = sample_points(l.chart(), 100, 1);
  CHECK(max_abs_over(bracket(l, parse("q*z + p^2"), parse("q*z + p^2")), pts) == 0.0);
  CHECK_THROWS_AS(bracket(l, parse("w"), parse("q")), ChartMismatch);

  // Finite-difference oracle for brackets of nonlinear observables.
  auto num = contact3_oracle();
  Expr f = parse("q^2*z + sin(p)");
  Expr g = parse("exp(z)*p + q");
  oracle::Fn fn = [&](const oracle::Vec& x) { return CompiledExpr(f, l.chart())(x); };
  oracle::Fn gn = [&](const oracle::Vec& x) { return CompiledExpr(g, l.chart())(x); };
  CompiledExpr sym(bracket(l, f, g), l.chart());
  for (const auto& x : sample_points(l.chart(), 20, 2)) {
    CHECK(sym(x) == doctest::Approx(oracle::bracket(num, fn, gn)(values(x))).epsilon(1e-6));
  }
}

TEST_CASE("hamiltonian vector fields reproduce the unit-free Hamilton equations") {
  auto l = contact3();
  Expr h = parse("q^2*p + z*p^3 - sin(z)*q");
  auto xh = hamiltonian_vector_field(l, h);
  CompiledExpr hn(h, l.chart());
  oracle::Fn hf = [&](const oracle::Vec& x) { return hn(x); };
  for (const auto& x : sample_points(l.chart(), 50, 3)) {
    auto v = values(x);
    double hq = oracle::partial(hf, v, 0, 1e-5), hp = oracle::partial(hf, v, 1, 1e-5), hz = oracle::partial(hf, v, 2, 1e-5);
    CHECK(eval(xh[0], x) == doctest::Approx(hp).epsilon(1e-7));
    CHECK(eval(xh[1], x) == doctest::Approx(-hq - v[1] * hz).epsilon(1e-7));
    CHECK(eval(xh[2], x) == doctest::Approx(v[1] * hp - hn(x)).epsilon(1e-7));
    // Same field from the defining relation X_h[g] = {h, g} + g R[h].
    auto ref = oracle::hamiltonian_field(contact3_oracle(), hf, v);
    for (std::size_t i = 0; i < 3; ++i) CHECK(eval(xh[i], x) == doctest::Approx(ref[i]).epsilon(1e-6));
  }

  auto x1 = hamiltonian_vector_field(l, Expr(1.0));
  for (std::size_t i = 0; i < 3; ++i) CHECK(simplify(x1[i]) == simplify(l.r()[i]));
  auto xz = hamiltonian_vector_field(l, parse("z"));
  CHECK(simplify(xz[0]) == Expr(0.0));
  CHECK(simplify(xz[1]) == parse("-p"));
  CHECK(simplify(xz[2]) == parse("-z"));
  auto xq = hamiltonian_vector_field(l, parse("q"));
  CHECK(simplify(xq[1]) == Expr(-1.0));
  CHECK(simplify(xq[2]) == parse("-q"));
}

TEST_CASE("property: X_f[g] = {f, g} + g R[f] and antisymmetry") {
  std::mt19937_64 rng(21);
  for (const auto& l : {contact3(), nonintegrable()}) {
    auto pts = sample_points(l.chart(), 100, 4);
    for (int trial = 0; trial < 10; ++trial) {
      Expr f = random_polynomial(l.chart(), 2, rng);
      Expr g = random_polynomial(l.chart(), 2, rng);
      Expr lhs = hamiltonian_vector_field(l, f).apply(g);
      Expr rhs = bracket(l, f, g) + g * l.r().apply(f);
      CHECK(max_abs_over(lhs - rhs, pts) <= 1e-9);
      CHECK(max_abs_over(bracket(l, f, g) + bracket(l, g, f), pts) <= 1e-12);
    }
  }
}

TEST_CASE("property: hamiltonian vector fields are R-linear") {
  std::mt19937_64 rng(22);
  auto l = contact3();
  auto pts = sample_points(l.chart(), 100, 5);
  for (int trial = 0; trial < 10; ++trial) {
    Expr f = random_polynomial(l.chart(), 3, rng);
    Expr g = random_polynomial(l.chart(), 3, rng);
    double a = 1.75, b = -0.5;
    auto lhs = hamiltonian_vector_field(l, Expr(a) * f + Expr(b) * g);
    auto rhs = hamiltonian_vector_field(l, f).scaled(a) + hamiltonian_vector_field(l, g).scaled(b);
    CHECK(field_distance(lhs, rhs, pts) <= 1e-12);
  }
}

TEST_CASE("hamiltonian derivations") {
  auto l = contact3();
  auto d1 = hamiltonian_derivation(l, Expr(1.0));
  CHECK(simplify(d1.f0) == Expr(0.0));
  auto dz = hamiltonian_derivation(l, parse("z"));
  CHECK(simplify(dz.f0) == Expr(1.0));
  CHECK(simplify(dz.x[1]) == parse("-p"));

  auto poisson = poisson_plane();
  auto dp = hamiltonian_derivation(poisson, parse("q^2*p"));
  CHECK(simplify(dp.f0) == Expr(0.0));
  auto pts2 = sample_points(poisson.chart(), 20, 6);
  CHECK(field_distance(dp.x, sharp(poisson, parse("q^2*p")), pts2) == 0.0);

  std::mt19937_64 rng(23);
  auto pts = sample_points(l.chart(), 100, 7);
  for (int trial = 0; trial < 5; ++trial) {
    Expr f = random_polynomial(l.chart(), 2, rng);
    Expr g = random_polynomial(l.chart(), 2, rng);
    CHECK(max_abs_over(hamiltonian_derivation(l, f).apply(g) - bracket(l, f, g), pts) <= 1e-9);
  }
}

TEST_CASE("jacobiator values") {
  auto l = contact3();
  auto pts = sample_points(l.chart(), 100, 8);
  CHECK(jacobiator(l, parse("q"), parse("p"), parse("z"), pts) <= 1e-12);

  auto bad = nonintegrable();
  Point at(bad.chart(), std::vector<double>{1.0, 1.0, 2.0});
  CHECK(jacobiator(bad, parse("x"), parse("y"), parse("w"), {at}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(simplify(jacobiator_expr(bad, parse("x"), parse("y"), parse("w"))) != Expr(0.0));
  // Nested finite differences of the coefficient callables give J = -w independently.
  auto num = nonintegrable_oracle();
  oracle::Fn fx = [](const oracle::Vec& x) { return x[0]; };
  oracle::Fn fy = [](const oracle::Vec& x) { return x[1]; };
  oracle::Fn fw = [](const oracle::Vec& x) { return x[2]; };
  oracle::Vec v{1.0, 1.0, 2.0};
  double j = oracle::bracket(num, oracle::bracket(num, fx, fy, 1e-4), fw, 1e-3)(v) +
             oracle::bracket(num, oracle::bracket(num, fy, fw, 1e-4), fx, 1e-3)(v) +
             oracle::bracket(num, oracle::bracket(num, fw, fx, 1e-4), fy, 1e-3)(v);
  CHECK(j == doctest::Approx(-2.0).epsilon(1e-4));

  auto poisson = poisson_plane();
  auto pp = sample_points(poisson.chart(), 10, 9);
  CHECK(jacobiator(poisson, parse("q"), parse("p"), parse("q"), pp) == 0.0);
  CHECK(jacobiator(poisson, Expr(1.0), parse("p"), parse("q"), pp) == 0.0);
  CHECK_THROWS_AS(jacobiator(l, parse("q"), parse("p"), parse("z"), {}), EmptySampleSet);
}

TEST_CASE("integrability check") {
  auto l = contact3();
  auto pts = sample_points(l.chart(), 100, 0);
  auto ok = integrability_check(l, pts, 1e-9);
  CHECK(ok.pass);
  CHECK(ok.worst <= 1e-12);
  CHECK(ok.entries.size() == 4);  // C(4, 3) triples from {1, q, p, z}

  auto bad = nonintegrable();
  auto rep = integrability_check(bad, sample_points(bad.chart(), 100, 0), 1e-9);
  CHECK_FALSE(rep.pass);
  CHECK(rep.witness_label == "(x, y, w)");
  REQUIRE(rep.witness.has_value());
  CHECK(rep.worst == doctest::Approx(std::abs((*rep.witness)["w"])).epsilon(1e-12));
  CHECK(rep.witness_value == doctest::Approx(-(*rep.witness)["w"]).epsilon(1e-12));

  auto poisson = poisson_plane();
  CHECK(integrability_check(poisson, sample_points(poisson.chart(), 10, 0), 1e-9).pass);
  CHECK_THROWS_AS(integrability_check(l, {}, 1e-9), EmptySampleSet);
}

TEST_CASE("nondegeneracy check") {
  auto l = contact3();
  auto rep = nondegeneracy_check(l, sample_points(l.chart(), 100, 0), 1e-9);
  CHECK(rep.pass);
  CHECK(rep.figures.at("min_abs_det") == doctest::Approx(1.0).epsilon(1e-12));

  auto poisson = poisson_plane();
  auto prep = nondegeneracy_check(poisson, sample_points(poisson.chart(), 10, 0), 1e-9);
  CHECK(prep.pass);
  CHECK(prep.witness_value == doctest::Approx(1.0));

  auto zero = make_structure(Chart("z", {"a", "b"}), {}, {"0", "0"});
  auto zrep = nondegeneracy_check(zero, sample_points(zero.chart(), 10, 0), 1e-9);
  CHECK_FALSE(zrep.pass);
  CHECK(zrep.figures.at("min_abs_det") == 0.0);
}

TEST_CASE("conformal transformations") {
  auto l = contact3();
  auto pts = sample_points(l.chart(), 100, 10);
  CHECK(coefficient_distance(conformal_transform(l, Expr(1.0), pts), l, pts) == 0.0);

  auto scaled = conformal_transform(l, Expr(3.0), pts);
  auto expected = LichnerowiczStructure(l.pi().scaled(3.0), l.r().scaled(3.0));
  CHECK(coefficient_distance(scaled, expected, pts) == 0.0);

  auto poisson = poisson_plane();
  auto region = sample_points(poisson.chart(), SampleSpec{11, 50, {{"q", {0.5, 2.0}}}});
  auto t = conformal_transform(poisson, parse("q"), region);
  CHECK(simplify(t.r()[0]) == Expr(0.0));
  CHECK(simplify(t.r()[1]) == Expr(1.0));
  CHECK(simplify(t.pi().at(0, 1)) == parse("q"));
  CHECK_FALSE(poisson_unit_test(t, region, 1e-9));

  std::mt19937_64 rng(31);
  std::vector<std::pair<Expr, Expr>> pairs;
  for (int k = 0; k < 20; ++k) pairs.emplace_back(random_polynomial(l.chart(), 2, rng), random_polynomial(l.chart(), 2, rng));
  Expr zc = parse("2 + sin(q) + p^2");
  CHECK(conformal_law_check(l, zc, pairs, pts, 1e-9).pass);

  // Composition and round trip.
  Expr zc2 = parse("1.5 + cos(z)*q^2");
  auto twice = conformal_transform(conformal_transform(l, zc, pts), zc2, pts);
  auto once = conformal_transform(l, zc * zc2, pts);
  CHECK(coefficient_distance(twice, once, pts) <= 1e-10);
  auto back = conformal_transform(conformal_transform(l, zc, pts), Expr(1.0) / zc, pts);
  CHECK(coefficient_distance(back, l, pts) <= 1e-10);

  Point origin(l.chart(), std::vector<double>{0.0, 0.0, 0.0});
  CHECK_THROWS_AS(conformal_transform(l, parse("q"), {origin}), ZeroConversionFactor);
}

TEST_CASE("poisson unit test") {
  auto poisson = poisson_plane();
  CHECK(poisson_unit_test(poisson, sample_points(poisson.chart(), 10, 0), 1e-9));
  auto l = contact3();
  CHECK_FALSE(poisson_unit_test(l, sample_points(l.chart(), 10, 0), 1e-9));
}

TEST_CASE("symbol-squiggle identities") {
  auto l = contact3();
  auto pts = sample_points(l.chart(), 50, 12);
  auto rep = symbol_squiggle_suite(l, parse("q"), parse("p"), parse("z"), pts, 1e-9);
  CHECK(rep.pass);
  CHECK(rep.entries.size() == 5);

  std::mt19937_64 rng(41);
  auto cubic = [&] { return random_polynomial(l.chart(), 3, rng); };
  auto rrep = symbol_squiggle_suite(l, cubic(), cubic(), cubic(), sample_points(l.chart(), 100, 13), 1e-9);
  CHECK(rrep.pass);

  Expr f = cubic();
  auto same = symbol_squiggle_suite(l, f, f, cubic(), pts, 1e-9);
  CHECK(same.entries[2].worst <= 1e-12);

  auto bad = nonintegrable();
  auto brep = symbol_squiggle_suite(bad, parse("x"), parse("y"), parse("w"), sample_points(bad.chart(), 50, 14), 1e-9);
  CHECK_FALSE(brep.pass);
  CHECK_FALSE(brep.entries[2].pass);
  CHECK(brep.entries[2].worst > 0.1);
}

TEST_CASE("coisotropy test") {
  auto l = contact3();
  std::vector<Point> on_z0, on_origin;
  for (const auto& x : sample_points(l.chart(), 50, 15)) {
    on_z0.emplace_back(l.chart(), std::vector<double>{x[0], x[1], 0.0});
    on_origin.emplace_back(l.chart(), std::vector<double>{0.0, 0.0, x[2]});
  }
  CHECK(coisotropy_test(l, {parse("z")}, on_z0, 1e-9).pass);

  auto rep = coisotropy_test(l, {parse("q"), parse("p")}, on_origin, 1e-9);
  CHECK_FALSE(rep.pass);
  CHECK(rep.witness_label == "X_{q}[p]");
  CHECK(std::abs(rep.witness_value - -1.0) <= 1e-12);
  CHECK(std::abs(rep.worst - 1.0) <= 1e-12);
  CHECK(rep.figures.at("bracket_cross_check_pass") == 0.0);

  auto pw = make_structure(Chart("pw", {"q", "p", "w"}), {{0, 1, "1"}}, {"0", "0", "0"});
  std::vector<Point> on_w0;
  for (const auto& x : sample_points(pw.chart(), 20, 16)) on_w0.emplace_back(pw.chart(), std::vector<double>{x[0], x[1], 0.0});
  CHECK(coisotropy_test(pw, {parse("w")}, on_w0, 1e-9).pass);

  CHECK_THROWS_AS(coisotropy_test(l, {parse("z")}, sample_points(l.chart(), 5, 17), 1e-9), PointOffSurface);
}

TEST_CASE("jacobi map test") {
  auto l = contact3();
  auto pts = sample_points(l.chart(), 50, 18);
  std::vector<Expr> identity{parse("q"), parse("p"), parse("z")};
  CHECK(jacobi_map_test(l, l, identity, Expr(1.0), spanning_pairs(l.chart()), pts, 1e-9).pass);

  auto other = make_structure(qpz(), {{0, 1, "-2"}, {1, 2, "p"}}, {"0", "0", "-1"});
  auto rep = jacobi_map_test(l, other, identity, Expr(1.0), {{parse("q"), parse("p")}}, pts, 1e-9);
  CHECK_FALSE(rep.pass);
  CHECK(rep.worst == doctest::Approx(1.0));  // |pi2(dq,dp) - pi1(dq,dp)|

  Point origin(l.chart(), std::vector<double>{0.0, 0.0, 0.0});
  CHECK_THROWS_AS(jacobi_map_test(l, l, identity, parse("q"), spanning_pairs(l.chart()), {origin}, 1e-9),
                  ZeroConversionFactor);
  CHECK_THROWS_AS(jacobi_map_test(l, l, identity, parse("w"), spanning_pairs(l.chart()), pts, 1e-9), ChartMismatch);
}

TEST_CASE("bivector storage is antisymmetric") {
  auto l = contact3();
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(l.pi().at(i, i) == Expr(0.0));
    for (std::size_t j = 0; j < 3; ++j) CHECK(simplify(l.pi().at(i, j) + l.pi().at(j, i)) == Expr(0.0));
  }
  auto b = BivectorField(qpz()).with(2, 0, parse("q"));
  CHECK(simplify(b.at(0, 2)) == parse("-q"));
  CHECK_THROWS(BivectorField(qpz()).with(1, 1, Expr(1.0)));
}
