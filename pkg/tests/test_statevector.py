import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qaoa_matching.statevector import (
    CapExceeded,
    NotNormalized,
    StateVector,
    ZeroNorm,
    distribution,
    ket,
    norm2,
    normalize,
    parse_ket,
    prepare_initial,
    sample,
    support,
)


def test_ket_prints_first_edge_leftmost():
    assert ket(0b0101, 4) == "1010"
    assert parse_ket("1010") == 0b0101


def test_prepare_empty():
    sv = prepare_initial("empty", 4)
    assert sv.amps[0] == 1 and np.count_nonzero(sv.amps) == 1


def test_prepare_w1():
    sv = prepare_initial("w1", 3)
    assert np.allclose(sv.amps[[1, 2, 4]], 1 / np.sqrt(3))
    assert np.count_nonzero(sv.amps) == 3
    assert prepare_initial("w1", 1).amps[1] == 1


@pytest.mark.parametrize("m", [0, 25])
def test_prepare_cap(m):
    with pytest.raises(CapExceeded):
        prepare_initial("empty", m)


def test_norm_and_normalize():
    assert norm2(prepare_initial("w1", 5)) == pytest.approx(1.0, abs=1e-15)
    out = normalize(StateVector(1, [1, 1]))
    assert np.allclose(out.amps, [2**-0.5, 2**-0.5])
    with pytest.raises(ZeroNorm):
        normalize(StateVector(2, np.zeros(4)))


def test_distribution_and_support():
    assert distribution(prepare_initial("empty", 4)).as_dict() == {0: 1.0}
    d = distribution(prepare_initial("w1", 3))
    assert d.as_dict() == pytest.approx({1: 1 / 3, 2: 1 / 3, 4: 1 / 3})
    assert support(prepare_initial("w1", 3), 1e-9) == {1, 2, 4}
    with pytest.raises(NotNormalized):
        distribution(StateVector(1, [1, 1]))


def test_sample_examples():
    delta = distribution(prepare_initial("empty", 2))
    assert sample(delta, 100, 7) == {0: 100}
    d = distribution(prepare_initial("w1", 2))
    assert sample(d, 1000, 3) == sample(d, 1000, 3)
    counts = sample(d, 100_000, 11)
    sigma = np.sqrt(100_000 * 0.25)
    assert all(abs(counts[z] - 50_000) < 5 * sigma for z in (1, 2))


def _random_sv(seed, m):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    return normalize(StateVector(m, a))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_distribution_sums_to_one(seed, m):
    assert distribution(_random_sv(seed, m)).probs.sum() == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-6, 0.5), st.floats(1e-6, 0.5))
def test_support_monotone_in_threshold(seed, a, b):
    a, b = sorted((a, b))
    sv = _random_sv(seed, 4)
    assert support(sv, b) <= support(sv, a)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_sampling_converges(m):
    d = distribution(_random_sv(100 + m, m))
    counts = sample(d, 1_000_000, 2024)
    emp = np.zeros_like(d.probs)
    for z, c in counts.items():
        emp[z] = c / 1_000_000
    assert 0.5 * np.abs(emp - d.probs).sum() < 0.01


def test_csv_dump_roundtrip():
    sv = _random_sv(1, 3)
    back = StateVector.from_csv(sv.to_csv(), 3)
    assert np.array_equal(back.amps, sv.amps)
    assert sv.to_csv().splitlines()[0] == "basis_state_binary,re,im"
