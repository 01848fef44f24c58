import math

import numpy as np
import pytest

from qcholder.beltrami import BeltramiCoefficient
from qcholder.certificates import (
    ball_mean_certificate,
    cor3_certificate,
    holder_certificate_interior,
)
from qcholder.errors import DegenerateFitError, InputError, UnsupportedMapError
from qcholder.fields import BenchmarkMap, ScalarField, identity_map, parse_field_spec, radial_stretch
from qcholder.harness import (
    AnnulusRegion,
    BallRegion,
    LensRegion,
    check_certificate,
    empirical_holder_exponent,
    extremal_eta,
    oracle_integral,
    sample_directions,
    verify_ring_inequality,
)
from qcholder.quadrature import disk_polar_integral, lens_integral


def test_directions():
    assert sample_directions(2).shape == (64, 2)
    d3 = sample_directions(3)
    assert d3.shape == (256, 3) and np.allclose(np.linalg.norm(d3, axis=1), 1.0)
    assert np.array_equal(sample_directions(5, seed=1), sample_directions(5, seed=1))


def test_exponent_examples():
    fit = empirical_holder_exponent(identity_map())
    assert abs(fit.slope - 1) < 1e-9 and abs(fit.intercept) < 1e-9
    for a in (0.1, 0.25, 0.5, 0.75, 1.0):
        for n in (2, 3):
            assert abs(empirical_holder_exponent(radial_stretch(a, n)).slope - a) < 1e-3
    fit = empirical_holder_exponent(identity_map(), x0=(0.3, -0.2))
    assert abs(fit.slope - 1) < 1e-9


def test_exponent_errors():
    const = BenchmarkMap(2, "grid", func=lambda x: np.zeros_like(x))
    with pytest.raises(DegenerateFitError):
        empirical_holder_exponent(const)
    with pytest.raises(InputError):
        empirical_holder_exponent(identity_map(), radii=[0.1, 0.01])


def test_ring_examples():
    r1, r2 = 0.1, 0.5
    res = verify_ring_inequality(identity_map(), parse_field_spec("const 1"), r1, r2)
    assert res.lhs == pytest.approx(2 * math.pi / math.log(5), rel=1e-12)
    assert res.rhs == pytest.approx(res.lhs, rel=1e-9) and res.holds
    for a in (0.25, 0.5):
        q = parse_field_spec(f"const {1 / a}")
        res = verify_ring_inequality(radial_stretch(a), q, r1, r2)
        assert res.lhs == pytest.approx(2 * math.pi / (a * math.log(5)), rel=1e-12)
        assert res.equality_gap < 1e-6
        eta = extremal_eta(r1, r2)
        scaled = verify_ring_inequality(radial_stretch(a), q, r1, r2, lambda r: 2 * eta(r))
        assert scaled.rhs == pytest.approx(4 * res.rhs, rel=1e-9)
        assert scaled.lhs == res.lhs and scaled.lhs < scaled.rhs


def test_ring_n3():
    a = 0.5
    res = verify_ring_inequality(radial_stretch(a, 3), parse_field_spec("const 4 n=3"), 0.1, 0.5)
    assert res.equality_gap < 1e-6


def test_ring_errors():
    q = parse_field_spec("const 1")
    with pytest.raises(UnsupportedMapError):
        verify_ring_inequality(BenchmarkMap(2, "grid", func=lambda x: x), q, 0.1, 0.5)
    with pytest.raises(InputError):
        verify_ring_inequality(identity_map(), q, 0.1, 0.5, lambda r: 0.5 * extremal_eta(0.1, 0.5)(r))
    with pytest.raises(UnsupportedMapError):
        verify_ring_inequality(identity_map(), q, 0.1, 0.5, x0=(0.1, 0.0))


def test_oracle_examples():
    one = parse_field_spec("const 1")
    est = oracle_integral(one, BallRegion((0.0, 0.0), 1.0), 100_000, seed=0)
    assert abs(est.value - math.pi) < 3 * est.stderr
    est = oracle_integral(parse_field_spec("power 1"), BallRegion((0.0, 0.0), 1.0), 100_000, seed=1)
    assert abs(est.value - 2 * math.pi / 3) < 3 * est.stderr
    est = oracle_integral(parse_field_spec("power -2"), AnnulusRegion((0.0, 0.0), 0.1, 1.0), 400_000, seed=2)
    assert abs(est.value - 2 * math.pi * math.log(10)) < 3 * est.stderr


def test_oracle_determinism_and_errors():
    q = parse_field_spec("power 1")
    a = oracle_integral(q, BallRegion((0.0, 0.0), 1.0), 5000, seed=7)
    b = oracle_integral(q, BallRegion((0.0, 0.0), 1.0), 5000, seed=7)
    assert a == b
    with pytest.raises(InputError):
        oracle_integral(q, BallRegion((0.0, 0.0), 1.0), 999)
    with pytest.raises(InputError):
        oracle_integral(q, AnnulusRegion((0.0, 0.0), 0.5, 0.5))
    with pytest.raises(InputError):
        oracle_integral(q, LensRegion(1.0, 0.0))


@pytest.mark.parametrize("a", [0.25, 0.5, 1.0])
def test_beltrami_integrals_against_oracle(a):
    mu = BeltramiCoefficient.radial(a) if a < 1 else BeltramiCoefficient.constant(0.3)
    Kin = ScalarField.from_function(2, lambda x: mu.K(x[..., 0] + 1j * x[..., 1]))

    def Kout(x):
        z = x[..., 0] + 1j * x[..., 1]
        out = np.ones(z.shape)
        m = np.abs(z) > 1
        out[m] = mu.reflected_K(z[m])
        return out

    zeta = np.exp(0.3j)
    for eps in (0.1, 0.3):
        inner = lens_integral(mu.K, zeta, eps, True)
        outer = lens_integral(mu.reflected_K, zeta, eps, False)
        assert oracle_integral(Kin, LensRegion(zeta, eps, True), 300_000, 5).agrees(inner)
        assert oracle_integral(Kout, LensRegion(zeta, eps, False), 300_000, 6).agrees(outer)
    ann = disk_polar_integral(mu.reflected_K, 1.0, 2.0)
    assert oracle_integral(Kout, AnnulusRegion((0.0, 0.0), 1.0, 2.0), 300_000, 8).agrees(ann)


@pytest.mark.parametrize("a", [0.1, 0.25, 0.5, 0.75, 1.0])
def test_certificate_consistency(a):
    f = radial_stretch(a)
    q = parse_field_spec(f"const {1 / a}")
    measured = empirical_holder_exponent(f).slope
    certs = [holder_certificate_interior(q, 0, a, 0.5)]
    certs.append(ball_mean_certificate(q, 0, 1 / a, 1.0, 0.25))
    certs.append(cor3_certificate(1.0, 2 * math.pi / a, 0.5, q, (0.0, 0.0)))
    for c in certs:
        assert c.exponent <= measured + 1e-9
        chk = check_certificate(f, c)
        assert chk.ok, (c.source, chk)
