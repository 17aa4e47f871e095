"""Tests for ionsim.quantum_core."""

import math

import numpy as np
import pytest

from ionsim.errors import (
    DimensionError,
    ModelInputError,
    RangeError,
    TruncationError,
    TruncationWarning,
)
from ionsim.quantum_core import (
    DensityMatrix,
    QuantumState,
    SPIN_DOWN,
    SPIN_UP,
    apply_unitary,
    detection_false_negative,
    index_of,
    make_state,
    overlap,
    populations,
    state_csv,
)


def random_unitary(dim, seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ---------------------------------------------------------------------------
# constructors


def test_fock_ground_state():
    st = make_state("fock", n_max=5)
    assert st.amplitude(SPIN_DOWN, 0) == 1.0
    assert st.norm() == pytest.approx(1.0, abs=1e-15)
    assert st.amplitude(SPIN_UP, 0) == 0.0


def test_fock_indexing_convention():
    # down block first, then up; n runs fastest
    assert index_of(SPIN_DOWN, 3, 5) == 3
    assert index_of(SPIN_UP, 0, 5) == 6
    assert index_of(1, 2, 5) == 8
    with pytest.raises(RangeError):
        index_of(SPIN_DOWN, 6, 5)
    with pytest.raises(ModelInputError):
        index_of("sideways", 0, 5)


def test_coherent_state_is_poissonian():
    st = make_state("coherent", n_max=20, alpha=1.0)
    p = populations(st)
    total = sum(p.values())
    assert abs(total - 1.0) < 1e-10
    for n in range(10):
        expect = math.exp(-1.0) / math.factorial(n)
        assert p[(SPIN_DOWN, n)] == pytest.approx(expect, rel=1e-9)
    assert all(p[(SPIN_UP, n)] == 0.0 for n in range(21))


def test_coherent_phase_convention():
    st = make_state("coherent", n_max=20, alpha=1j)
    # amplitude of |n> carries alpha^n: pure imaginary alpha gives i^n phases
    c0 = st.amplitude(SPIN_DOWN, 0)
    c1 = st.amplitude(SPIN_DOWN, 1)
    assert c0.imag == pytest.approx(0.0, abs=1e-15)
    assert c1 == pytest.approx(1j * c0, rel=1e-12)


def test_coherent_tail_guard():
    with pytest.raises(TruncationError):
        make_state("coherent", n_max=10, alpha=5.0)
    make_state("coherent", n_max=60, alpha=5.0)  # generous space is fine


def test_coherent_zero_alpha():
    st = make_state("coherent", n_max=5, alpha=0.0)
    assert st.amplitude(SPIN_DOWN, 0) == 1.0


def test_thermal_ground_population():
    dm = make_state("thermal", n_max=60, nbar=0.1)
    assert isinstance(dm, DensityMatrix)
    p = populations(dm)
    assert p[0] == pytest.approx(1.0 / 1.1, rel=1e-9)
    assert dm.trace() == pytest.approx(1.0, abs=1e-12)


def test_thermal_mean_occupation():
    for nbar in (0.1, 0.5, 1.0, 2.0):
        dm = make_state("thermal", n_max=60, nbar=nbar)
        assert abs(dm.mean_n() / nbar - 1.0) <= 1e-9


def test_thermal_tail_guard_and_zero():
    with pytest.raises(TruncationError):
        make_state("thermal", n_max=10, nbar=5.0)
    dm = make_state("thermal", n_max=5, nbar=0.0)
    assert populations(dm)[0] == 1.0


def test_unknown_kind():
    with pytest.raises(ModelInputError):
        make_state("squeezed", n_max=5)


# ---------------------------------------------------------------------------
# unitary application


def test_identity_leaves_state_unchanged():
    st = make_state("coherent", n_max=20, alpha=0.5)
    out = apply_unitary(st, np.eye(st.dim))
    assert np.allclose(out.amplitudes, st.amplitudes, atol=0)


def test_random_unitary_preserves_norm_and_populations_sum():
    st = make_state("fock", n_max=8, n=2)
    # keep the action away from the truncation edge
    U = np.eye(st.dim, dtype=complex)
    blk = random_unitary(6, seed=3)
    U[:6, :6] = blk
    out = apply_unitary(st, U)
    assert abs(out.norm() - 1.0) <= 1e-12
    assert abs(sum(populations(out).values()) - 1.0) <= 1e-12


def test_truncation_warning_and_strict_error():
    st = make_state("fock", n_max=5)
    N = st.n_max + 1
    P = np.eye(st.dim)
    # swap (down,0) with (down,n_max)
    P[[0, N - 1]] = P[[N - 1, 0]]
    with pytest.warns(TruncationWarning):
        apply_unitary(st, P)
    with pytest.raises(TruncationError):
        apply_unitary(st, P, strict=True)


def test_non_unitary_rejected():
    st = make_state("fock", n_max=3)
    with pytest.raises(ModelInputError):
        apply_unitary(st, 0.5 * np.eye(st.dim))


def test_shape_mismatch_rejected():
    st = make_state("fock", n_max=3)
    with pytest.raises(DimensionError):
        apply_unitary(st, np.eye(5))


def test_unitary_on_density_matrix():
    dm = make_state("thermal", n_max=20, nbar=0.5)
    U = random_unitary(5, seed=11)
    full = np.eye(21, dtype=complex)
    full[:5, :5] = U
    out = apply_unitary(dm, full)
    assert out.trace() == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(out.rho - out.rho.conj().T)) <= 1e-12


# ---------------------------------------------------------------------------
# overlaps and populations


def test_overlap_properties():
    a = make_state("coherent", n_max=25, alpha=0.8)
    b = make_state("coherent", n_max=25, alpha=-0.3 + 0.4j)
    assert overlap(a, a) == pytest.approx(1.0, abs=1e-12)
    assert overlap(a, b) == pytest.approx(np.conj(overlap(b, a)), abs=1e-14)
    # coherent-state overlap magnitude: exp(-|a-b|^2/2)
    expect = math.exp(-abs(0.8 - (-0.3 + 0.4j)) ** 2 / 2.0)
    assert abs(overlap(a, b)) == pytest.approx(expect, rel=1e-9)


def test_overlap_dimension_mismatch():
    a = make_state("fock", n_max=3)
    b = make_state("fock", n_max=4)
    with pytest.raises(DimensionError):
        overlap(a, b)


# ---------------------------------------------------------------------------
# detection


def test_detection_false_negative_values():
    assert detection_false_negative(0.0) == 1.0
    assert detection_false_negative(10.0) == pytest.approx(4.54e-5, rel=1e-3)
    assert abs(detection_false_negative(10.0) / 4.5e-5 - 1.0) < 0.01
    v = detection_false_negative(100.0)
    assert v == pytest.approx(3.72e-44, rel=1e-2)
    assert abs(v / 4e-44 - 1.0) < 0.10
    with pytest.raises(RangeError):
        detection_false_negative(-1.0)


# ---------------------------------------------------------------------------
# CSV dump


def test_state_csv_roundtrip():
    st = make_state("coherent", n_max=6, alpha=0.5j)
    text = state_csv(st)
    lines = text.strip().split("\n")
    assert lines[0] == "index,spin,n,re,im"
    assert len(lines) == 1 + st.dim
    rebuilt = np.zeros(st.dim, dtype=complex)
    for row in lines[1:]:
        idx, spin, n, re, im = row.split(",")
        rebuilt[int(idx)] = float(re) + 1j * float(im)
    assert np.allclose(rebuilt, st.amplitudes, atol=1e-16)


def test_density_csv_shape():
    dm = make_state("thermal", n_max=4, nbar=0.01)
    lines = state_csv(dm).strip().split("\n")
    assert lines[0] == "row,col,re,im"
    assert len(lines) == 1 + 5 * 6 // 2


# ---------------------------------------------------------------------------
# DensityMatrix validation


def test_density_matrix_validation():
    with pytest.raises(ModelInputError):
        DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]), 1)  # not Hermitian
    with pytest.raises(ModelInputError):
        DensityMatrix(np.diag([0.6, 0.6]), 1)  # trace 1.2
    with pytest.raises(ModelInputError):
        DensityMatrix(np.diag([1.5, -0.5]), 1)  # negative eigenvalue
    with pytest.raises(DimensionError):
        DensityMatrix(np.eye(3), 1)
