import math

import numpy as np
import pytest

from ptlattice import Boundary, HoppingSet, ModelSpec, build_hamiltonian, eig, frobenius_norm
from conftest import flux_ring, gain_chain


def _ring(L):
    return build_hamiltonian(
        ModelSpec(L=L, boundary=Boundary.PERIODIC, hoppings=HoppingSet(terms=((1, 1.0 + 0j),)))
    )


def _chain(L):
    return build_hamiltonian(
        ModelSpec(L=L, boundary=Boundary.OPEN, hoppings=HoppingSet(terms=((1, 1.0 + 0j),)))
    )


def test_pauli_x():
    spec = eig(np.array([[0, 1], [1, 0]], complex))
    assert np.allclose(spec.eigenvalues, [-1.0, 1.0], atol=1e-12)


def test_ring_of_four():
    vals = eig(_ring(4)).eigenvalues
    assert np.allclose(np.sort(vals.real), [-2, 0, 0, 2], atol=1e-12)
    assert np.max(np.abs(vals.imag)) < 1e-12


def test_open_chain_of_three():
    vals = eig(_chain(3)).eigenvalues
    assert np.allclose(np.sort(vals.real), [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-12)


def test_frobenius_examples():
    assert frobenius_norm(np.zeros((4, 4), complex)) == 0.0
    assert frobenius_norm(np.eye(3, dtype=complex)) == pytest.approx(math.sqrt(3))
    assert frobenius_norm(_ring(4)) == pytest.approx(math.sqrt(8))


def test_trace_invariant():
    rng = np.random.default_rng(3)
    H = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    vals = eig(H).eigenvalues
    assert np.sum(vals) == pytest.approx(np.trace(H), abs=1e-10)


def test_hermitian_input_gives_real_eigenvalues():
    rng = np.random.default_rng(5)
    A = rng.normal(size=(20, 20)) + 1j * rng.normal(size=(20, 20))
    H = A + A.conj().T
    vals = eig(H).eigenvalues
    assert np.max(np.abs(vals.imag)) <= 1e-10 * frobenius_norm(H)


def test_pt_spectrum_conjugate_pairs():
    H = build_hamiltonian(flux_ring(30, 0.4, 1.2, phi=math.pi / 2))
    vals = eig(H).eigenvalues
    dist = np.abs(vals[:, None] - np.conj(vals)[None, :])
    assert np.max(dist.min(axis=1)) < 1e-8 * frobenius_norm(H)


def test_deterministic():
    H = build_hamiltonian(gain_chain(40, g=1.5))
    s1 = eig(H)
    s2 = eig(H)
    assert np.array_equal(s1.eigenvalues, s2.eigenvalues)
    assert np.array_equal(s1.eigenvectors, s2.eigenvectors)


def test_sorted_by_real_then_imag():
    H = build_hamiltonian(flux_ring(16, 0.3, 1.0))
    vals = eig(H).eigenvalues
    keys = list(zip(np.round(vals.real, 12), np.round(vals.imag, 12)))
    assert keys == sorted(keys)


def test_vectors_are_normalized_eigenvectors():
    H = build_hamiltonian(gain_chain(15, g=1.5))
    spec = eig(H)
    for k in range(spec.dimension):
        v = spec.vector(k)
        assert np.linalg.norm(v) == pytest.approx(1.0)
        resid = np.linalg.norm(H @ v - spec.eigenvalues[k] * v)
        assert resid < 1e-10 * frobenius_norm(H)


def test_rejects_non_square():
    from ptlattice import EigensolverError

    with pytest.raises((EigensolverError, ValueError)):
        eig(np.zeros((3, 4), complex))
