import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from qcholder.errors import InputError
from qcholder.geometry import (
    INF,
    Annulus,
    ball_volume,
    chordal_diameter,
    chordal_distance,
    complement_ball_chordal_diameter,
    gamma_half_integer,
    ring_modulus,
    sphere_area,
    sphere_quadrature,
)

coords = st.floats(-50, 50, allow_nan=False)


def test_chordal_examples():
    assert chordal_distance((0.3, 0.4), (0.3, 0.4)) == 0.0
    assert chordal_distance((0.0, 0.0), INF) == 1.0
    assert chordal_distance(INF, (0.0, 0.0)) == 1.0
    assert chordal_distance((1.0, 0.0), (-1.0, 0.0)) == pytest.approx(1.0, abs=1e-15)
    assert chordal_distance(INF, INF) == 0.0
    assert chordal_distance((3.0, 4.0), INF) == pytest.approx(1 / math.sqrt(26))


def test_chordal_dimension_mismatch():
    with pytest.raises(InputError):
        chordal_distance((1.0, 0.0), (1.0, 0.0, 0.0))


def test_chordal_diameter():
    assert chordal_diameter([(0.2, 0.1)]) == 0.0
    assert chordal_diameter([(0.0, 0.0), INF]) == 1.0
    assert chordal_diameter([(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0)]) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(InputError):
        chordal_diameter([])


@settings(max_examples=300, deadline=None)
@given(st.lists(coords, min_size=9, max_size=9), st.sampled_from([2, 3]))
def test_chordal_triangle_inequality(v, n):
    x, y, z = (np.array(v[3 * i : 3 * i + n]) for i in range(3))
    assert chordal_distance(x, z) <= chordal_distance(x, y) + chordal_distance(y, z) + 1e-12
    assert chordal_distance(x, y) == chordal_distance(y, x)
    assert 0.0 <= chordal_distance(x, y) <= 1.0 + 1e-15


def test_chordal_triangle_inequality_bulk():
    rng = np.random.default_rng(1)
    for n in (2, 3):
        pts = rng.standard_normal((3 * 5000, n)) * rng.lognormal(0, 2, (3 * 5000, 1))
        for i in range(5000):
            x, y, z = pts[3 * i : 3 * i + 3]
            assert chordal_distance(x, z) <= chordal_distance(x, y) + chordal_distance(y, z) + 1e-12


@pytest.mark.parametrize("r0", [1.0, 2.0])
def test_chordal_lower_bound_in_ball(r0):
    rng = np.random.default_rng(7)
    for n in (2, 3):
        g = rng.standard_normal((4000, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        pts = g * (r0 * rng.random((4000, 1)) ** (1 / n))
        for x, y in zip(pts[::2], pts[1::2]):
            assert chordal_distance(x, y) >= np.linalg.norm(x - y) / (1 + r0 * r0)


def test_complement_diameter():
    assert complement_ball_chordal_diameter(0.5) == 1.0
    assert complement_ball_chordal_diameter(1.0) == 1.0
    # antipodal points on S(0, 2) against a brute-force search including INF
    r0 = 2.0
    t = np.linspace(0, 2 * np.pi, 721)
    pts = [r0 * np.array([math.cos(a), math.sin(a)]) for a in t[:-1:4]] + [INF]
    assert chordal_diameter(pts) == pytest.approx(complement_ball_chordal_diameter(r0), rel=1e-12)
    assert complement_ball_chordal_diameter(2.0) == pytest.approx(0.8)


def test_gamma_and_areas():
    for x in (0.5, 1, 1.5, 2, 2.5, 3, 5.5, 7):
        assert gamma_half_integer(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-14)
    with pytest.raises(InputError):
        gamma_half_integer(0.3)
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert ball_volume(2) == pytest.approx(math.pi)
    assert ball_volume(3) == pytest.approx(4 * math.pi / 3)
    for n in range(2, 9):
        assert sphere_area(n) == pytest.approx(float(2 * mpmath.pi ** (mpmath.mpf(n) / 2) / mpmath.gamma(mpmath.mpf(n) / 2)), rel=1e-14)


def test_sphere_quadrature_examples():
    q = sphere_quadrature(2, 0, 1.0, 360)
    assert q.nodes.shape == (360, 2)
    assert np.allclose(q.weights, 2 * math.pi / 360)
    q = sphere_quadrature(3, 0, 2.0, 24)
    assert q.weights.sum() == pytest.approx(16 * math.pi, rel=1e-9)
    q = sphere_quadrature(2, (1.0, 1.0), 0.5, 4)
    expected = {(1.5, 1.0), (1.0, 1.5), (0.5, 1.0), (1.0, 0.5)}
    assert {tuple(p) for p in q.nodes.tolist()} == expected
    with pytest.raises(InputError):
        sphere_quadrature(2, 0, 0.0, 8)


@pytest.mark.parametrize("n,res", [(2, 64), (3, 16), (4, 512), (5, 512)])
def test_sphere_quadrature_invariants(n, res):
    x0 = np.linspace(0.1, 0.5, n)
    r = 0.7
    q = sphere_quadrature(n, x0, r, res, seed=3)
    d = np.linalg.norm(q.nodes - x0, axis=1)
    assert np.all(np.abs(d - r) <= 1e-12 * r)
    assert np.all(q.weights >= 0)
    assert q.integrate(np.ones(len(q.nodes))) == pytest.approx(sphere_area(n) * r ** (n - 1), rel=1e-9)
    for k in range(n):
        assert abs(q.integrate(q.nodes[:, k] - x0[k])) <= 1e-9
    again = sphere_quadrature(n, x0, r, res, seed=3)
    assert np.array_equal(q.nodes, again.nodes)


def _modulus_oracle(n, r1, r2, cells=80):
    """Minimise sum w_i rho_i^n subject to sum rho_i dr = 1 over radial densities."""
    edges = np.geomspace(r1, r2, cells + 1)
    dr = np.diff(edges)
    # exact cell measure of the shell: omega * ∫ r^{n-1} dr
    mass = sphere_area(n) * (edges[1:] ** n - edges[:-1] ** n) / n
    x0 = np.full(cells, 1.0 / (r2 - r1))
    res = minimize(
        lambda rho: float(np.sum(mass * np.abs(rho) ** n)),
        x0,
        jac=lambda rho: n * mass * np.abs(rho) ** (n - 1) * np.sign(rho),
        constraints=[{"type": "eq", "fun": lambda rho: float(rho @ dr) - 1.0, "jac": lambda rho: dr}],
        method="SLSQP",
        options={"ftol": 1e-14, "maxiter": 500},
    )
    return res.fun


@pytest.mark.parametrize("n,expected", [(2, 2 * math.pi), (3, 4 * math.pi)])
def test_ring_modulus_examples(n, expected):
    assert ring_modulus(n, 1.0, math.e) == pytest.approx(expected, rel=1e-15)
    assert _modulus_oracle(n, 1.0, math.e) == pytest.approx(expected, rel=2e-3)


def test_ring_modulus_oracle_other_ring():
    assert _modulus_oracle(2, 0.1, 0.5) == pytest.approx(ring_modulus(2, 0.1, 0.5), rel=2e-3)


@given(st.floats(1e-3, 1e3), st.floats(1.01, 100), st.floats(1e-3, 1e3), st.integers(2, 6))
def test_ring_modulus_scale_invariance(r, k, lam, n):
    assert ring_modulus(n, r, r * k) == pytest.approx(ring_modulus(n, lam * r, lam * r * k), rel=1e-12)


@given(st.floats(1.01, 50), st.floats(1.01, 50))
def test_ring_modulus_decreasing(k1, k2):
    if k1 < k2:
        assert ring_modulus(2, 1.0, k1) > ring_modulus(2, 1.0, k2) > 0


def test_ring_modulus_errors():
    with pytest.raises(InputError):
        ring_modulus(2, 1.0, 1.0)
    with pytest.raises(InputError):
        Annulus((0.0, 0.0), 2.0, 1.0)
    a = Annulus((0.0, 0.0), 1.0, 2.0)
    assert a.contains((1.5, 0.0)) and not a.contains((0.5, 0.0))
