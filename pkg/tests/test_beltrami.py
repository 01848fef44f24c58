import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcholder.beltrami import (
    BeltramiCoefficient,
    PlanarMap,
    annulus_mass_bound,
    coefficient_of_map,
    inversion_weight_max,
    jacobian,
    max_dilatation,
    parse_mu_spec,
    parse_planar_map_spec,
    planar_identity,
    planar_radial_stretch,
    planar_scale,
    reflect_coefficient,
    reflect_map,
    reflected_mass_bound,
    wirtinger_derivatives,
)
from qcholder.errors import DomainError, FieldSpecError, InputError, Refusal
from qcholder.quadrature import lens_area


def _random_points(rng, k, lo, hi):
    return rng.uniform(lo, hi, k) * np.exp(1j * rng.uniform(0, 2 * np.pi, k))


def test_max_dilatation():
    assert max_dilatation(0) == 1.0
    assert max_dilatation(1 / 3) == pytest.approx(2.0)
    assert max_dilatation(1j / 3) == pytest.approx(2.0)
    assert max_dilatation(1.0) == math.inf
    assert max_dilatation(1.5) == math.inf
    assert np.array_equal(max_dilatation(np.array([0.0, 1.0])), [1.0, math.inf])


def test_wirtinger_examples():
    fz, fzb = wirtinger_derivatives(planar_identity(), 0.3 + 0.2j)
    assert fz == pytest.approx(1.0, abs=1e-9) and abs(fzb) < 1e-9
    fz, fzb = wirtinger_derivatives(parse_planar_map_spec("conj"), 0.3 + 0.2j)
    assert abs(fz) < 1e-9 and fzb == pytest.approx(1.0, abs=1e-9)
    fz, fzb = wirtinger_derivatives(planar_radial_stretch(0.5), 0.25)
    assert fz == pytest.approx(1.5, abs=1e-8) and fzb == pytest.approx(-0.5, abs=1e-8)
    with pytest.raises(InputError):
        wirtinger_derivatives(planar_identity(), 0.1, h=0.0)
    bounded = PlanarMap(lambda z: z, domain_radius=1.0)
    with pytest.raises(DomainError):
        wirtinger_derivatives(bounded, 1.0 - 1e-8)


def test_wirtinger_warns_on_rough_map():
    rough = PlanarMap(lambda z: np.abs(z.real) + 0j)
    with pytest.warns(RuntimeWarning):
        wirtinger_derivatives(rough, 1e-7, h=1e-6)


def test_coefficient_and_jacobian_examples():
    assert coefficient_of_map(planar_identity(), 0.2 - 0.1j) == 0
    assert abs(coefficient_of_map(planar_scale(2.0), 0.2 - 0.1j)) < 1e-9
    assert jacobian(planar_identity(), 0.4j) == pytest.approx(1.0, abs=1e-9)
    assert jacobian(planar_scale(2.0), 0.4j) == pytest.approx(4.0, abs=1e-8)
    assert jacobian(planar_radial_stretch(0.5), 0.25) == pytest.approx(2.0, abs=1e-8)
    assert coefficient_of_map(PlanarMap(lambda z: np.conj(z) * 0 + 1.0), 0.3) == 0


@pytest.mark.parametrize("a", [0.25, 0.5, 0.75])
def test_radial_coefficient_closed_form(a):
    rng = np.random.default_rng(int(a * 100))
    f = planar_radial_stretch(a)
    for z in _random_points(rng, 100, 0.1, 0.9):
        mu = coefficient_of_map(f, z, 1e-6)
        assert abs(mu - (a - 1) / (1 + a) * z / np.conj(z)) < 1e-6
        assert max_dilatation(mu) == pytest.approx(1 / a, rel=1e-5)
        assert jacobian(f, z) > 0


def test_coefficient_families():
    mu = parse_mu_spec("mu-const 0.1 -0.2")
    assert mu(0.3) == pytest.approx(0.1 - 0.2j)
    mu = parse_mu_spec("mu-radial 0.5")
    assert abs(mu(0.3 + 0.4j)) == pytest.approx(1 / 3)
    assert mu.K(0.0) == pytest.approx(2.0)
    with pytest.raises(FieldSpecError):
        parse_mu_spec("mu-const 1 0")
    with pytest.raises(FieldSpecError) as exc:
        parse_mu_spec("mu-radial a=2")
    assert exc.value.position == 12
    with pytest.raises(InputError):
        BeltramiCoefficient(lambda z: 1.2 * np.ones(z.shape))
    with pytest.raises(FieldSpecError):
        parse_planar_map_spec("twist")


def test_mu_grid(tmp_path):
    p = tmp_path / "mu.csv"
    rows = [f"{x},{y},{0.1 * x},{0.0}" for x in (-1.0, 0.0, 1.0) for y in (-1.0, 0.0, 1.0)]
    p.write_text("x1,x2,re,im\n" + "\n".join(rows) + "\n")
    mu = parse_mu_spec(f"mu-grid {p}")
    assert mu(0.5 + 0.2j) == pytest.approx(0.05)


def test_reflect_coefficient_examples():
    zero = BeltramiCoefficient.constant(0)
    assert reflect_coefficient(zero, 2.0) == 0
    c = 0.2 + 0.3j
    assert reflect_coefficient(BeltramiCoefficient.constant(c), 2.0) == pytest.approx(np.conj(c))
    with pytest.raises(InputError):
        reflect_coefficient(zero, 0.5)


@pytest.mark.parametrize("mu", [BeltramiCoefficient.constant(0.3 - 0.4j), BeltramiCoefficient.radial(0.3)])
def test_reflected_dilatation_identity(mu):
    rng = np.random.default_rng(9)
    z = _random_points(rng, 1000, 1.0 + 1e-9, 10.0)
    assert np.allclose(np.abs(reflect_coefficient(mu, z)), np.abs(mu(1 / np.conj(z))), rtol=1e-14, atol=0)
    assert np.allclose(mu.reflected_K(z), mu.K(1 / np.conj(z)), rtol=1e-12, atol=0)


def test_reflect_map_examples():
    F = reflect_map(planar_identity())
    z = np.array([0.3 + 0.1j, 2.0 - 1.0j, 5j])
    assert np.allclose(F(z), z, rtol=1e-15)
    assert reflect_map(planar_radial_stretch(0.5))(4.0) == pytest.approx(2.0, rel=1e-15)
    with pytest.raises(InputError):
        reflect_map(planar_scale(2.0))


@pytest.mark.parametrize("a", [0.25, 0.5, 0.75])
def test_reflection_invariants(a):
    F = reflect_map(planar_radial_stretch(a))
    inv = F.check_invariants(samples=100)
    assert inv["ok"] and inv["boundary_jump"] < 1e-6
    mu = BeltramiCoefficient.radial(a)
    rng = np.random.default_rng(4)
    for z in _random_points(rng, 20, 1.2, 5.0):
        assert abs(coefficient_of_map(F, z) - reflect_coefficient(mu, z)) < 1e-6


@pytest.mark.parametrize("eps,expected", [(0.1, 1 / 0.81), (0.49, 1 / 0.2601), (0.05, 1 / 0.9025)])
def test_inversion_weight(eps, expected):
    w = inversion_weight_max(eps, np.exp(0.9j))
    assert abs(w.sampled_max - expected) < 1e-9 and w.bound == pytest.approx(expected)
    assert w.sampled_max < 4 and w.sampled_max**2 < 16
    assert math.remainder(w.argmax_angle - (0.9 + math.pi), 2 * math.pi) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(InputError):
        inversion_weight_max(0.5)


def test_inversion_weight_small_eps():
    assert inversion_weight_max(1e-9).sampled_max == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2, 0.45])
def test_factor17_identity_coefficient(eps):
    zero = BeltramiCoefficient.constant(0)
    m = reflected_mass_bound(zero, 1.0, eps)
    assert m.lhs == pytest.approx(math.pi * eps * eps, rel=1e-12)
    assert m.rhs == pytest.approx(17 * lens_area(eps), rel=1e-12)
    assert m.holds


def test_factor17_limit_ratio():
    m = reflected_mass_bound(BeltramiCoefficient.constant(0.2j), 1j, 1e-4)
    assert m.ratio == pytest.approx(2 / 17, rel=1e-3)


def test_degenerate_refused():
    # |mu| = 1 on a small patch at the boundary point 1, missed by the construction samples
    mu = BeltramiCoefficient(lambda z: np.where(np.abs(z - 1) < 0.015, 1.0, 0.0).astype(complex), "patch")
    with pytest.raises(Refusal):
        reflected_mass_bound(mu, 1.0, 0.1)
    with pytest.raises(Refusal):
        annulus_mass_bound(mu, 2.0)
    assert reflected_mass_bound(mu, -1.0, 0.1).holds


def test_annulus_mass_examples():
    zero = BeltramiCoefficient.constant(0)
    for R in (1.5, 2.0):
        m = annulus_mass_bound(zero, R)
        assert m.lhs == pytest.approx(math.pi * (R * R - 1), rel=1e-6)
        assert m.rhs == pytest.approx(math.pi * R**4, rel=1e-6)
    m = annulus_mass_bound(BeltramiCoefficient.radial(0.5), 2.0)
    assert m.lhs == pytest.approx(6 * math.pi, rel=1e-9) and m.rhs == pytest.approx(32 * math.pi, rel=1e-9)
    assert annulus_mass_bound(zero, 1.0 + 1e-9).lhs < 1e-7
    with pytest.raises(InputError):
        annulus_mass_bound(zero, 1.0)


@given(st.floats(0.01, 0.99), st.floats(-3.2, 3.2))
def test_jacobian_positive_for_stretch(a, t):
    z = 0.5 * complex(math.cos(t), math.sin(t))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        assert jacobian(planar_radial_stretch(a), z) > 0
