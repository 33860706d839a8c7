import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ionmodes.errors import InvalidDimensionError
from ionmodes.hilbert import (
    Dims,
    OperatorMatrix,
    Qubit,
    StateVector,
    embed,
    identity,
    inner,
    make_annihilation,
    make_exchange_generator,
    make_number,
    sigma_x,
)
from ionmodes.states import CoherentParams, make_coherent, make_fock, make_motional_fock


def test_annihilation_smallest():
    assert make_annihilation(1).entries() == [(0, 1, 1.0 + 0j)]


def test_annihilation_entry():
    a = make_annihilation(4).to_dense()
    assert a[2, 3] == pytest.approx(math.sqrt(3))
    assert np.count_nonzero(a) == 4


def test_number_operator_diagonal_is_exact():
    # a^dag a formed by explicit dense transpose-conjugate product
    a = make_annihilation(6).to_dense()
    num = a.conj().T @ a
    np.testing.assert_allclose(np.diag(num).real, np.arange(7), rtol=2.3e-16, atol=0)
    assert np.count_nonzero(num - np.diag(np.diag(num))) == 0
    np.testing.assert_array_equal(np.diag(make_number(6).to_dense()).real, np.arange(7))


@pytest.mark.parametrize("bad", [0, -1, 1.5])
def test_invalid_n_max(bad):
    with pytest.raises(InvalidDimensionError):
        make_annihilation(bad)
    with pytest.raises(InvalidDimensionError):
        Dims(bad)


def test_flat_index_bijection():
    dims = Dims(3)
    seen = set()
    for idx in range(dims.total):
        b = dims.unflatten(idx)
        assert b.flat(dims) == idx
        assert idx == int(b.q) * 16 + b.m * 4 + b.n
        seen.add(b)
    assert len(seen) == dims.total == 2 * 4 * 4


def _apply_K(n_max, m, n):
    dims = Dims(n_max)
    K = make_exchange_generator(n_max)
    return (K @ make_motional_fock(m, n, dims)).tensor()


def test_exchange_generator_examples():
    assert np.all(_apply_K(3, 0, 0) == 0)
    out = _apply_K(3, 0, 1)
    expected = np.zeros((4, 4))
    expected[1, 0] = 1
    np.testing.assert_allclose(out, expected)
    out = _apply_K(3, 1, 1)
    expected = np.zeros((4, 4))
    expected[2, 0] = expected[0, 2] = math.sqrt(2)
    np.testing.assert_allclose(out, expected, atol=1e-15)


def test_exchange_generator_drops_components_past_cutoff():
    out = _apply_K(2, 1, 2)  # would reach |0,3> and |2,1>
    expected = np.zeros((3, 3))
    expected[2, 1] = 2.0
    np.testing.assert_allclose(out, expected, atol=1e-15)


@pytest.mark.parametrize("n_max", [1, 3, 8])
def test_exchange_generator_hermitian(n_max):
    K = make_exchange_generator(n_max)
    diff = np.abs(K.to_dense() - K.dag().to_dense()).max()
    assert diff <= 1e-15


@pytest.mark.parametrize("n_max", [2, 5])
def test_exchange_generator_conserves_excitation(n_max):
    dims = Dims(n_max)
    K = make_exchange_generator(n_max).to_dense()
    num = make_number(n_max).to_dense()
    eye = np.eye(n_max + 1)
    Ntot = np.kron(num, eye) + np.kron(eye, num)
    keep = dims.total_excitation() <= n_max
    comm = (K @ Ntot - Ntot @ K)[np.ix_(keep, keep)]
    assert np.abs(comm).max() == 0.0


def test_entries_sorted():
    entries = make_exchange_generator(3).entries()
    assert entries == sorted(entries, key=lambda e: (e[0], e[1]))


def test_embed_identity():
    dims = Dims(3)
    lifted = embed(identity(dims.N), "modeA", dims).to_dense()
    np.testing.assert_array_equal(lifted, np.eye(dims.total))


def test_embed_sigma_x_flips_qubit():
    dims = Dims(3)
    out = embed(sigma_x(), "qubit", dims) @ make_fock("down", 2, 1, dims)
    assert inner(make_fock("up", 2, 1, dims), out) == pytest.approx(1)


def test_embed_exchange_generator():
    dims = Dims(3)
    out = embed(make_exchange_generator(3), "modesAB", dims) @ make_fock("down", 0, 1, dims)
    np.testing.assert_allclose(out.amps, make_fock("down", 1, 0, dims).amps)


def test_embed_mode_slots_act_on_right_factor():
    dims = Dims(3)
    a = make_annihilation(3)
    on_a = embed(a, "modeA", dims) @ make_fock("up", 2, 1, dims)
    on_b = embed(a, "modeB", dims) @ make_fock("up", 2, 1, dims)
    assert on_a.amplitude(1, 1, "up") == pytest.approx(math.sqrt(2))
    assert on_b.amplitude(2, 0, "up") == pytest.approx(1)


def test_embed_dimension_mismatch():
    dims = Dims(3)
    with pytest.raises(InvalidDimensionError):
        embed(make_annihilation(4), "modeA", dims)
    with pytest.raises(InvalidDimensionError):
        embed(sigma_x(), "qubit", dims, space="modes")


def test_inner_basics():
    dims = Dims(2)
    psi = StateVector(dims, np.arange(dims.total) * (1 + 0.5j)).normalize()
    val = inner(psi, psi)
    assert val.imag == 0 and val.real == pytest.approx(1)
    assert inner(make_motional_fock(0, 0, dims), make_motional_fock(1, 0, dims)) == 0
    with pytest.raises(InvalidDimensionError):
        inner(make_motional_fock(0, 0, dims), make_fock("down", 0, 0, dims))


def test_coherent_overlap_matches_direct_sum():
    alpha, beta = 0.7 + 0.2j, -0.4j
    dims = Dims(30)
    u, _ = make_coherent(CoherentParams(alpha, beta), None, dims)
    v, _ = make_coherent(CoherentParams(-alpha, -beta), None, dims)
    # direct summation: sum_m (|alpha|^2 (-1))^m / m!
    direct = 1.0
    for x in (alpha, beta):
        direct *= math.exp(-abs(x) ** 2) * math.fsum((-abs(x) ** 2) ** m / math.factorial(m) for m in range(60))
    analytic = math.exp(-2 * abs(alpha) ** 2 - 2 * abs(beta) ** 2)
    assert direct == pytest.approx(analytic, abs=1e-14)
    assert inner(u, v) == pytest.approx(analytic, abs=1e-12)


def test_state_vector_is_read_only():
    psi = make_fock(Qubit.DOWN, 0, 0, Dims(1))
    with pytest.raises(ValueError):
        psi.amps[0] = 2


def test_operator_matrix_arithmetic():
    sx = sigma_x()
    assert isinstance(sx + identity(2), OperatorMatrix)
    np.testing.assert_array_equal((sx @ sx).to_dense(), np.eye(2))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10_000))
def test_hermiticity_property(n_max, seed):
    K = make_exchange_generator(n_max).to_dense()
    rng = np.random.default_rng(seed)
    v = rng.normal(size=K.shape[0]) + 1j * rng.normal(size=K.shape[0])
    w = rng.normal(size=K.shape[0]) + 1j * rng.normal(size=K.shape[0])
    assert np.vdot(v, K @ w) == pytest.approx(np.vdot(K @ v, w), abs=1e-12)
