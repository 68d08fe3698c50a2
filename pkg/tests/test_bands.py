import math

import numpy as np
import pytest

from ptlattice import (
    HoppingSet,
    band_energy,
    criterion_check,
    equal_energy_points,
    pt_breaking_window,
)
from conftest import nnn_chain


NN = HoppingSet(terms=((1, 1.0 + 0j),))


def _nnn(t2):
    return HoppingSet(terms=((1, 1.0 + 0j), (2, complex(t2))))


def test_band_energy_examples():
    assert band_energy(NN, 0.0) == pytest.approx(2.0)
    assert band_energy(NN, math.pi) == pytest.approx(-2.0)
    assert band_energy(NN, math.pi / 2) == pytest.approx(0.0, abs=1e-12)
    h = _nnn(0.5)
    assert band_energy(h, 0.0) == pytest.approx(2.0 + 1.0)
    assert band_energy(h, math.pi) == pytest.approx(-2.0 + 1.0)


def test_equal_energy_points_nearest_neighbor():
    ks = equal_energy_points(NN, 0.0)
    assert len(ks) == 2
    assert np.allclose(sorted(ks), [math.pi / 2, 3 * math.pi / 2], atol=1e-9)


def test_equal_energy_points_four_solutions():
    # for t2 = 0.5 the band is non-monotonic and epsilon = -1.2 is hit 4 times
    ks = equal_energy_points(_nnn(0.5), -1.2)
    assert len(ks) == 4
    for k in ks:
        assert band_energy(_nnn(0.5), k) == pytest.approx(-1.2, abs=1e-9)


def test_equal_energy_points_outside_band():
    assert equal_energy_points(NN, 5.0) == []


def test_window_empty_for_small_t2():
    for t2 in (0.05, 0.1, 0.2):
        win = pt_breaking_window(_nnn(t2))
        assert win.intervals == ()


def test_window_for_large_t2():
    win = pt_breaking_window(_nnn(0.5))
    assert len(win.intervals) == 1
    lo, hi = win.intervals[0]
    assert lo == pytest.approx(-1.5, abs=1e-9)
    assert hi == pytest.approx(-1.0, abs=1e-9)
    assert win.multiplicity[0] >= 4


def test_window_degenerate_at_quarter():
    # t2 = 0.25 is the marginal value: the extra extremum just appears
    win = pt_breaking_window(_nnn(0.25))
    if win.intervals:
        lo, hi = win.intervals[0]
        assert hi - lo < 1e-6


def test_equal_energy_counts_even():
    h = _nnn(0.5)
    for eps in np.linspace(-1.4, 2.9, 17):
        ks = equal_energy_points(h, eps)
        assert len(ks) % 2 == 0


def test_criterion_check_real_inside_window():
    report = criterion_check(nnn_chain(100, 1.0, 0.5, 0.8))
    lo, hi = report.window.intervals[0]
    assert (lo, hi) == pytest.approx((-1.5, -1.0), abs=1e-9)
    assert report.violations == ()
    assert report.complex_energies_inside


def test_criterion_check_no_window_no_complex():
    report = criterion_check(nnn_chain(100, 1.0, 0.1, 1.5))
    assert report.window.intervals == ()
    assert report.violations == ()
    assert report.complex_energies_inside


def test_criterion_check_rejects_periodic():
    from conftest import flux_ring

    with pytest.raises(ValueError):
        criterion_check(flux_ring(20, 0.3, 0.5))


def test_report_json_round_trip():
    import json

    report = criterion_check(nnn_chain(60, 1.0, 0.5, 0.8))
    blob = json.loads(report.to_json())
    assert "window" in blob and "violations" in blob
