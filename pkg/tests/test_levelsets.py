import numpy as np
import pytest

from screwon_lab.conserved import ConservedSet
from screwon_lab.elliptic import chi
from screwon_lab.levelsets import (FIGURE_FIXTURES, classify, cmin, hill_topology, pole_fibre,
                                   sweep)

Q = ConservedSet.from_cmsh


def test_cmin():
    assert cmin(2.0, 0.0, 0.5) == pytest.approx(-4.0)
    assert cmin(1.0, 1.0, 1.0) == pytest.approx(-0.5)
    with pytest.raises(ValueError):
        cmin(0.0, 1.0, 1.0)


def test_below_cmin_is_empty():
    c = cmin(1.0, 1.0, 1.0) - 0.01
    q = Q(c, 0.3, 1.0, 1.0)
    us = np.linspace(-1, 1, 2001)
    # brute-force oracle: chi < 0 everywhere on the sphere band
    assert np.all(chi(us, q, 1) < 0)
    assert classify(q, 1, 1).tag == "Empty"


def test_torus_interior_latitudes():
    rep = classify(Q(3, 1, 1, 2), 1, 1)
    assert rep.tag == "Torus2"
    lo, hi = rep.latitude_interval
    assert -1 < lo < hi < 1


def test_horn_and_circle():
    assert classify(Q(1.5, -1, 1, 1), 1, 1).tag == "HornTorus"
    rep = classify(Q(17 / 8, -0.5, 1, 2), 1, 1)
    assert rep.tag == "Circle"
    assert rep.latitude_interval[0] == pytest.approx(0, abs=1e-7)


@pytest.mark.parametrize("name", sorted(FIGURE_FIXTURES))
def test_figure_fixtures(name):
    (c, m, s, h), tag = FIGURE_FIXTURES[name]
    assert classify(Q(c, m, s, h), 1, 1).tag == tag


def test_pole_fibres():
    assert pole_fibre(Q(1.5, -1, 1, 1), 1, 1, "N") == "Point"
    assert pole_fibre(Q(2.0, -1, 1, 1), 1, 1, "N") == "Circle"
    assert pole_fibre(Q(2.0, -1, 1, 0.3), 1, 1, "N") is None
    with pytest.raises(ValueError):
        pole_fibre(Q(2.0, -1, 1, 1), 1, 1, "E")


def test_hill_negative_regime():
    rep = hill_topology(0.0, 1.2, 10.0, 1.0)
    assert (rep.hill_topology, rep.level_topology) == ("B4", "S3")


def test_hill_positive_regime():
    rep = hill_topology(1.0, 1.0, 1.55, 1.0)
    assert rep.critical_energies["E_ring"] == pytest.approx(1.5)
    gap = rep.critical_energies["E_sad"] - rep.critical_energies["E_ring"]
    assert gap == pytest.approx(0.125)
    assert rep.level_topology == "S2xS1"
    assert hill_topology(1.0, 1.0, 1.0, 1.0).hill_topology == "Empty"


def test_sweep_keeps_order():
    pts = [(3, 1, 1, 2), (-5, 0, 1, 0), (1.5, -1, 1, 1)]
    out = sweep(pts, 1.0, 1.0)
    assert [r["tag"] for r in out] == ["Torus2", "Empty", "HornTorus"]
    assert out[0]["c"] == 3


def test_k_zero_rejected():
    with pytest.raises(ValueError):
        classify(Q(3, 1, 1, 2), 1, 0)
