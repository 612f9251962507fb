import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dualmark.errors import InvalidInput
from dualmark.metrics import ber, format_db, multilevel_ber, snr

bitseq = st.lists(st.integers(0, 1), min_size=1, max_size=64)


def test_ber_examples():
    assert ber([1, 0, 1, 0, 1, 0, 1], [1, 0, 1, 0, 1, 0, 0]).ber == pytest.approx(1 / 7)
    r = ber([1, 1, 0], [1, 1, 0])
    assert (r.ber, r.errors, r.size) == (0.0, 0, 3)


@given(bitseq)
def test_ber_complement_is_one(bits):
    assert ber(bits, [1 - b for b in bits]).ber == 1.0


@given(bitseq, st.data())
def test_ber_symmetric_and_triangle(a, data):
    n = len(a)
    b = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    c = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    assert ber(a, b).ber == ber(b, a).ber
    assert ber(a, c).ber <= ber(a, b).ber + ber(b, c).ber + 1e-12


def test_ber_bad_inputs():
    with pytest.raises(InvalidInput):
        ber([1, 0], [1])
    with pytest.raises(InvalidInput):
        ber([], [])


def test_multilevel_ber_mean():
    r = multilevel_ber(ber([1, 0], [1, 1]), ber([1] * 4, [1] * 4))
    assert r.ber == pytest.approx(0.25)
    assert r.per_watermark == (0.5, 0.0)
    with pytest.raises(InvalidInput):
        multilevel_ber()


def test_snr_examples():
    x = np.array([1.0, -2.0, 3.0])
    assert snr(x, x) == math.inf
    assert snr(x, np.zeros(3)) == pytest.approx(0.0, abs=1e-9)
    assert snr(x, 1.1 * x) == pytest.approx(20.0, abs=1e-9)


def test_snr_formula_oracle():
    rng = np.random.default_rng(1)
    x, n = rng.standard_normal(500), 0.01 * rng.standard_normal(500)
    expected = 10 * math.log10(sum(v * v for v in x) / sum(v * v for v in n))
    assert snr(x, x + n) == pytest.approx(expected, abs=1e-9)


@given(st.floats(1e-3, 1e3))
def test_snr_scale_invariant(g):
    rng = np.random.default_rng(2)
    x = rng.standard_normal(64)
    y = x + 0.1 * rng.standard_normal(64)
    assert snr(g * x, g * y) == pytest.approx(snr(x, y), abs=1e-9)


def test_snr_bad_inputs():
    with pytest.raises(InvalidInput):
        snr(np.zeros(4), np.ones(4))
    with pytest.raises(InvalidInput):
        snr(np.ones(4), np.ones(3))


def test_format_db():
    assert format_db(math.inf) == "inf"
    assert format_db(39.54321) == "39.5432"
