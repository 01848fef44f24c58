import math

import numpy as np
import pytest

from qcholder.errors import DomainError, FieldSpecError, GridFormatError
from qcholder.fields import (
    eval_map,
    identity_map,
    load_grid_field,
    load_grid_map,
    parse_field_spec,
    parse_map_spec,
    radial_stretch,
)


def _write(path, header, rows):
    path.write_text(header + "\n" + "\n".join(",".join(str(v) for v in r) for r in rows) + "\n")
    return path


def test_spec_examples():
    q = parse_field_spec("const 1.0")
    assert q.value((0.3, 0.2)) == 1.0
    q = parse_field_spec("power p=2 center=0,0")
    assert q.value((0.3, 0.4)) == pytest.approx(0.25)
    q = parse_field_spec("radial-K K=4")
    assert q.value((5.0, -1.0)) == 4.0


def test_other_families():
    q = parse_field_spec("log-power 1 2")
    x = (0.1, 0.0)
    assert q.value(x) == pytest.approx(0.1 * math.log(10) ** 2)
    assert q.domain_radius == 1.0
    q = parse_field_spec("fmo-spike c=3 rho=0.5")
    assert q.value((0.1, 0.1)) == 4.0 and q.value((0.6, 0.0)) == 1.0
    q = parse_field_spec("power -1 n=3")
    assert q.n == 3 and q.value((0.0, 0.0, 0.0)) == math.inf
    q = parse_field_spec("const 2 center=1,1,1")
    assert q.n == 3


@pytest.mark.parametrize(
    "text,pos",
    [
        ("blob 1", 0),
        ("const x", 6),
        ("power p=2 zz=3", 10),
        ("const", 5),
        ("const 1 2", 8),
        ("power p=", 8),
        ("power 2 center=0,a", 17),
        ("const -1", 6),
    ],
)
def test_spec_errors_carry_position(text, pos):
    with pytest.raises(FieldSpecError) as exc:
        parse_field_spec(text)
    assert exc.value.position == pos


def test_grid_constant_and_roundtrip(tmp_path):
    rows = [(x, y, 3.0) for x in (0.0, 0.5, 1.0) for y in (0.0, 0.5, 1.0)]
    q = load_grid_field(_write(tmp_path / "g.csv", "x1,x2,q", rows))
    assert q.value((0.37, 0.81)) == 3.0
    rng = np.random.default_rng(0)
    rows = [(x, y, float(v)) for (x, y), v in zip([(x, y) for x in (0, 1, 2) for y in (0, 1)], rng.random(6))]
    q = load_grid_field(_write(tmp_path / "h.csv", "x1,x2,q", rows))
    for x, y, v in rows:
        assert q.value((x, y)) == v


def test_grid_bilinear_center(tmp_path):
    rows = [(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 4)]
    q = parse_field_spec(f"grid {_write(tmp_path / 'c.csv', 'x1,x2,q', rows)} mode=multilinear")
    assert q.value((0.5, 0.5)) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        q.value((2.0, 0.5))


@pytest.mark.parametrize(
    "header,rows,row",
    [
        ("x1,x2,q", [(0, 0, 1), (0, 1, -1), (1, 0, 1), (1, 1, 1)], 2),
        ("x1,x2,q", [(0, 0, 1), (0, 1, 1), (1, 0, 1)], 4),
        ("x1,x2,q", [(0, 0, 1), (0, 1), (1, 0, 1), (1, 1, 1)], 2),
        ("x1,x2,q", [(0, 0, 1), (0, 1, "nan"), (1, 0, 1), (1, 1, 1)], 2),
        ("x,y,q", [(0, 0, 1)], 0),
    ],
)
def test_grid_format_errors(tmp_path, header, rows, row):
    with pytest.raises(GridFormatError) as exc:
        load_grid_field(_write(tmp_path / "bad.csv", header, rows))
    assert exc.value.row == row


def test_benchmark_maps():
    assert np.array_equal(eval_map(identity_map(), (0.3, 0.4)), np.array([0.3, 0.4]))
    f = radial_stretch(0.5)
    assert np.allclose(f((1.0, 0.0)), (1.0, 0.0))
    assert np.allclose(f((0.25, 0.0)), (0.5, 0.0), rtol=0, atol=1e-15)
    assert np.array_equal(f((0.0, 0.0)), np.zeros(2))
    assert identity_map().exact_dilatation == 1.0
    assert radial_stretch(0.5).exact_dilatation == 2.0
    assert radial_stretch(0.5, 3).exact_dilatation == 4.0


def test_radial_stretch_properties():
    rng = np.random.default_rng(5)
    x = rng.uniform(-2, 2, (1000, 2))
    assert np.array_equal(radial_stretch(1.0)(x), identity_map()(x))
    for a in (0.1, 0.5, 0.9):
        y = radial_stretch(a)(x)
        r = np.linalg.norm(x, axis=1)
        assert np.allclose(np.linalg.norm(y, axis=1), r**a, rtol=1e-12, atol=0)
        other = radial_stretch(a)(x[::-1])
        assert np.all(np.linalg.norm(y - other, axis=1)[: 500] > 0)


def test_map_specs(tmp_path):
    assert parse_map_spec("identity").kind == "identity"
    assert parse_map_spec("radial:0.25").a == 0.25
    with pytest.raises(FieldSpecError):
        parse_map_spec("radial:abc")
    with pytest.raises(FieldSpecError):
        parse_map_spec("spiral")
    rows = [(x, y, 2 * x, 2 * y) for x in (0.0, 1.0) for y in (0.0, 1.0)]
    f = load_grid_map(_write(tmp_path / "m.csv", "x1,x2,y1,y2", rows))
    assert np.allclose(f((0.5, 0.25)), (1.0, 0.5))
