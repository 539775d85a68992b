import math
import os
from pathlib import Path

import pytest

import unitfree as uf

DATA = Path(os.environ.get("UNITFREE_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def test_expr_roundtrip():
    e = uf.parse("p^2/2 + q^2/2")
    assert e.diff("q").eval({"q": 3.0}) == pytest.approx(3.0)
    assert uf.Expr("sin(z)*b").eval({"z": 0.5, "b": 2.0}) == pytest.approx(2 * math.sin(0.5))
    with pytest.raises(uf.SyntaxError):
        uf.parse("(q")
    with pytest.raises(uf.UnitfreeError):
        uf.parse("foo(q)")


def test_contact_bracket():
    c = uf.contact_system(["q"])
    assert c.coords == ["q", "p", "z"]
    assert uf.bracket(c, "q", "p") == uf.parse("-1").simplify()
    assert uf.bracket(c, "z", "q") == uf.parse("q")
    xz = uf.hamiltonian_vector_field(c, "z")
    assert [str(x) for x in xz] == ["0", "-p", "-z"]


def test_checks_on_bundled_systems():
    good = uf.load_system(DATA / "systems" / "contact3.json")
    assert uf.integrability(good)["passed"]
    assert uf.symbol_squiggle(good)["passed"]
    assert uf.nondegeneracy(good)["figures"]["min_abs_det"] == pytest.approx(1.0)

    bad = uf.load_system(DATA / "systems" / "nonintegrable.json")
    rep = uf.integrability(bad)
    assert not rep["passed"]
    # J(x, y, w) = -w
    assert rep["witness_value"] == pytest.approx(-rep["witness"]["w"], abs=1e-12)

    with pytest.raises(uf.ConfigError):
        uf.load_system(DATA / "systems" / "missing.json")


def test_coisotropy():
    c = uf.load_system(DATA / "systems" / "contact3.json")
    assert uf.coisotropy(c, ["z"], [[0.1, 0.2, 0.0], [1.0, -1.0, 0.0]])["passed"]
    rep = uf.coisotropy(c, ["q", "p"], [[0.0, 0.0, 0.5]])
    assert not rep["passed"]
    assert rep["witness_value"] == -1.0
    with pytest.raises(uf.PointOffSurface):
        uf.coisotropy(c, ["q"], [[0.5, 0.0, 0.0]])


def test_product():
    c = uf.load_system(DATA / "systems" / "contact3.json")
    rep = uf.product(c, c, points=20)
    assert rep["passed"]
    assert rep["coords"][-1] == "b"
    assert not uf.product(c, c, points=20, corrupt=True)["passed"]


def test_flow_oscillator():
    c = uf.load_system(DATA / "systems" / "contact3.json")
    run = uf.flow(c, "oscillator", [1.0, 0.0, 0.0], dt=1e-3, t_end=2 * math.pi)
    q, p, z = run["states"][-1]
    t = run["t"][-1]
    assert t == 2 * math.pi
    assert abs(q - math.cos(t)) <= 1e-6
    assert abs(p + math.sin(t)) <= 1e-6
    assert abs(z + math.sin(2 * t) / 4) <= 1e-6
    assert max(run["residual"]) <= 1e-6

    damped = uf.flow(c, "(q^2 + p^2)/2 + 0.5*z", [1.0, 0.0, 0.0], t_end=10.0)
    assert damped["h"][-1] == pytest.approx(0.5 * math.exp(-5.0), abs=1e-5)

    with pytest.raises(uf.ConfigError):
        uf.flow(c, "oscillator", [1.0, 0.0, 0.0], method="euler")
    with pytest.raises(uf.StepFailure):
        uf.flow(c, "z^2", [0.0, 0.0, -1.0], t_end=2.0)
