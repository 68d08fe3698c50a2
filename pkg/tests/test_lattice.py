import math

import numpy as np
import pytest

from ptlattice import (
    Boundary,
    HoppingSet,
    ModelSpec,
    PerturbationTerm,
    apply_gauge_transform,
    build_hamiltonian,
    eig,
    is_pt_symmetric,
)
from conftest import flux_ring, gain_chain, nnn_chain


def test_two_site_chain():
    spec = ModelSpec(
        L=3, boundary=Boundary.OPEN, hoppings=HoppingSet(terms=((1, 1.0 + 0j),))
    )
    H = build_hamiltonian(spec)
    assert np.array_equal(H, np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], complex))


def test_single_gain_entry():
    spec = ModelSpec(
        L=3,
        boundary=Boundary.OPEN,
        hoppings=HoppingSet(terms=((1, 1.0 + 0j),)),
        perturbations=(PerturbationTerm(1, 1, 2j),),
    )
    H = build_hamiltonian(spec)
    expected = np.array([[2j, 1, 0], [1, 0, 1], [0, 1, 0]], complex)
    assert np.array_equal(H, expected)


def test_periodic_flux_phases():
    spec = ModelSpec(
        L=4,
        boundary=Boundary.PERIODIC,
        hoppings=HoppingSet(terms=((1, 1.0 + 0j),)),
        flux_theta=math.pi / 8,
    )
    H = build_hamiltonian(spec)
    ph = np.exp(1j * math.pi / 8)
    assert H[0, 1] == pytest.approx(ph)
    assert H[1, 0] == pytest.approx(np.conj(ph))
    assert H[3, 0] == pytest.approx(ph)
    assert H[0, 3] == pytest.approx(np.conj(ph))


def test_open_boundary_has_no_wrap():
    spec = ModelSpec(
        L=6, boundary=Boundary.OPEN, hoppings=HoppingSet(terms=((1, 1.0 + 0j),))
    )
    H = build_hamiltonian(spec)
    assert H[5, 0] == 0 and H[0, 5] == 0


def test_hermitian_without_perturbations():
    spec = nnn_chain(20, 1.0, 0.5, 0.0)
    spec = ModelSpec(L=20, boundary=Boundary.OPEN, hoppings=spec.hoppings)
    H = build_hamiltonian(spec)
    assert np.max(np.abs(H - H.conj().T)) == 0


def test_linear_in_perturbations():
    base = gain_chain(10, g=0.0)
    h0 = build_hamiltonian(ModelSpec(L=10, boundary=Boundary.OPEN, hoppings=base.hoppings))
    extra = (PerturbationTerm(1, 1, 1j), PerturbationTerm(10, 10, -1j))
    h2 = build_hamiltonian(
        ModelSpec(L=10, boundary=Boundary.OPEN, hoppings=base.hoppings, perturbations=extra)
    )
    diff = h2 - h0
    assert diff[0, 0] == 1j and diff[9, 9] == -1j
    assert np.count_nonzero(diff) == 2


def test_rejects_short_chain():
    with pytest.raises(ValueError):
        ModelSpec(
            L=4,
            boundary=Boundary.OPEN,
            hoppings=HoppingSet(terms=((1, 1.0 + 0j), (2, 0.5 + 0j))),
        )


def test_rejects_site_out_of_range():
    with pytest.raises(ValueError):
        ModelSpec(
            L=5,
            boundary=Boundary.OPEN,
            hoppings=HoppingSet(terms=((1, 1.0 + 0j),)),
            perturbations=(PerturbationTerm(6, 1, 1j),),
        )


def test_hopping_set_validation():
    with pytest.raises(ValueError):
        HoppingSet(terms=((1, 0j),))
    with pytest.raises(ValueError):
        HoppingSet(terms=((1, 1.0 + 0j), (1, 2.0 + 0j)))
    with pytest.raises(ValueError):
        HoppingSet(terms=((0, 1.0 + 0j),))


def test_gauge_transform_identity_at_zero_flux():
    spec = flux_ring(10, 0.0, 0.5)
    assert apply_gauge_transform(spec) is spec


def test_gauge_transform_wrap_phase():
    spec = ModelSpec(
        L=6,
        boundary=Boundary.PERIODIC,
        hoppings=HoppingSet(terms=((1, 1.0 + 0j),)),
        flux_theta=math.pi / 6,
    )
    H = build_hamiltonian(apply_gauge_transform(spec))
    # bulk bonds bare
    assert H[0, 1] == pytest.approx(1.0)
    # wrap bond carries the whole flux e^{i theta L} = e^{i pi}
    assert H[5, 0] == pytest.approx(np.exp(1j * math.pi))


def test_gauge_transform_preserves_spectrum():
    rng = np.random.default_rng(7)
    theta = float(rng.uniform(0, 2 * math.pi))
    spec = flux_ring(20, theta, 0.7, phi=0.9)
    e1 = eig(build_hamiltonian(spec)).eigenvalues
    e2 = eig(build_hamiltonian(apply_gauge_transform(spec))).eigenvalues
    dist = np.abs(e1[:, None] - e2[None, :])
    assert np.max(dist.min(axis=1)) < 1e-10
    assert np.max(dist.min(axis=0)) < 1e-10


def test_gauge_transform_rejects_open():
    with pytest.raises(ValueError):
        apply_gauge_transform(gain_chain(10))


def test_pt_symmetry_cases():
    assert not is_pt_symmetric(gain_chain(10, g=1.0))
    assert is_pt_symmetric(nnn_chain(10, 1.0, 0.5, 0.8))
    assert is_pt_symmetric(flux_ring(10, 0.1, 0.5, phi=0.7))


def test_json_round_trip():
    spec = flux_ring(12, 0.05, 0.3, phi=1.1)
    again = ModelSpec.from_json(spec.to_json())
    assert again == spec


def test_flux_stored_mod_2pi():
    spec = ModelSpec(
        L=8,
        boundary=Boundary.PERIODIC,
        hoppings=HoppingSet(terms=((1, 1.0 + 0j),)),
        flux_theta=2 * math.pi + 0.25,
    )
    assert spec.flux_theta == pytest.approx(0.25)
