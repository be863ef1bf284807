import numpy as np
import pytest

from screwon_lab.core_types import (DarbouxState, ModelParams, PhaseState, from_darboux,
                                    random_state, to_darboux)

P = ModelParams()


def test_vacuum_darboux():
    d = to_darboux(PhaseState([0, 0, 0], [0, 0, 0]), 0.7, P)
    assert np.allclose(d.R, [0, 0, 0.7])
    assert np.allclose(d.P, [0, 0, 1])


def test_sigma2_point_darboux():
    d = to_darboux(PhaseState([0, 0, -1], [0, 0, 0]), 0.0, P)
    assert d.m == 1.0
    assert d.P[2] == pytest.approx(1.0)
    assert d.R[0] == 0 and d.R[1] == 0


def test_from_darboux_vacuum():
    x = from_darboux(DarbouxState([0, 0, 0], [0, 0, 1]), P)
    assert x.S[2] == pytest.approx(0.0)
    assert x.L[2] == 0.0


def test_round_trip():
    rng = np.random.default_rng(1)
    params = ModelParams(k=1.7, lam=0.6)
    worst = 0.0
    for _ in range(1000):
        x = random_state(rng)
        y = from_darboux(to_darboux(x, 0.0, params), params)
        worst = max(worst, np.abs(x.as_vector() - y.as_vector()).max())
    assert worst < 1e-12


def test_bad_params():
    with pytest.raises(ValueError):
        ModelParams(lam=0.0)
    with pytest.raises(ValueError):
        ModelParams(k=float("nan"))
    with pytest.raises(ValueError):
        to_darboux(PhaseState([0, 0, 0], [0, 0, 0]), 0.0, ModelParams(k=0.0))


def test_nonfinite_state_rejected():
    with pytest.raises(ValueError):
        PhaseState([np.inf, 0, 0], [0, 0, 0])
