import math

import numpy as np
import pytest

from qcholder.doubling import DoublingFunction, check_doubling, parse_doubling_spec
from qcholder.errors import FieldSpecError, InputError


def test_examples():
    r = check_doubling(DoublingFunction("power", alpha=1, gamma=2))
    assert r.holds and r.worst_ratio == pytest.approx(2.0)
    assert check_doubling(parse_doubling_spec("log gamma=2 T=2")).holds
    r = check_doubling(DoublingFunction("power", alpha=2, gamma=2))
    assert not r.holds and r.worst_ratio == pytest.approx(4.0)


def test_mixed_families():
    phi = parse_doubling_spec("power+log 0.5 2 gamma=3 T=2")
    assert phi(math.e) == pytest.approx(math.sqrt(math.e) + 1.0)
    assert check_doubling(phi).holds
    phi = parse_doubling_spec("power*log 1 1 gamma=4 T=2")
    assert check_doubling(phi).holds
    assert parse_doubling_spec("const").unit()(7.0) == 1.0


def test_table(tmp_path):
    p = tmp_path / "w.csv"
    p.write_text("t,phi\n1,1\n10,2\n100,3\n")
    phi = parse_doubling_spec(f"table {p} gamma=2")
    assert phi(10.0) == pytest.approx(2.0)
    assert phi(1e5) == 3.0
    assert check_doubling(phi).nondecreasing


def test_errors():
    with pytest.raises(InputError):
        check_doubling(DoublingFunction.unit(), samples=8)
    with pytest.raises(InputError):
        DoublingFunction("power", alpha=1)(np.array([0.5]))
    with pytest.raises(FieldSpecError):
        parse_doubling_spec("log gamma=-1")
    with pytest.raises(FieldSpecError):
        parse_doubling_spec("exp 1")
