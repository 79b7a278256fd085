import numpy as np
import pytest

from qlgs import IntegrationError, Params, ShotTag, make_grid, shoot_ivp
from qlgs.shooting import BACKEND

import oracles

P121 = Params(1, 2.0, 1.0)


def test_backend_reported():
    assert BACKEND in ("cython", "python")


def test_backends_agree_when_both_present():
    try:
        from qlgs import _shoot_cy
    except ImportError:
        pytest.skip("compiled kernel not built")
    from qlgs import _shoot_py

    n = 2000
    args = (2.2, 2, 2.0, 1.0, 0.01, n, True, 2.2e-5, 1e-12, 100)
    u_c = np.empty(n + 1)
    v_c = np.empty(n + 1)
    s_c = _shoot_cy.integrate(*args, u_c, v_c)
    u_p = np.empty(n + 1)
    v_p = np.empty(n + 1)
    s_p = _shoot_py.integrate(*args, u_p, v_p)
    assert s_c == s_p
    stop = s_c[1]
    assert np.allclose(u_c[: stop + 1], u_p[: stop + 1], rtol=1e-12, atol=1e-14)


class TestClassification:
    def test_below_rest_turns_immediately(self):
        # u''(0) > 0 below the rest amplitude, so u' > 0 at once
        grid = make_grid(1, 15.0, 1501)
        outcome, _ = shoot_ivp(0.5, P121, grid)
        assert outcome.tag is ShotTag.UNDERSHOOT
        assert outcome.turning_radius is not None
        assert outcome.turning_radius < 0.5

    def test_rest_amplitude_stagnates(self):
        grid = make_grid(1, 15.0, 1501)
        outcome, (u, du) = shoot_ivp(P121.rest_amplitude, P121, grid)
        assert outcome.tag is ShotTag.UNDERSHOOT
        assert np.allclose(u.values[: outcome.stop_index + 1], 1.0, atol=1e-13)

    def test_large_amplitude_overshoots(self):
        # independent check first: the adaptive integrator sees a zero crossing
        assert oracles.classify_ivp(10.0, 1, 2.0, 1.0, 15.0) == "overshoot"
        grid = make_grid(1, 15.0, 3001)
        outcome, (u, du) = shoot_ivp(10.0, P121, grid)
        assert outcome.tag is ShotTag.OVERSHOOT
        assert u.values[outcome.stop_index] < 0.0

    def test_outcomes_match_adaptive_oracle(self):
        grid = make_grid(2, 15.0, 3001)
        params = Params(2, 2.0, 1.0)
        for amp in (1.3, 1.8, 2.5, 4.0):
            expected = oracles.classify_ivp(amp, 2, 2.0, 1.0, 15.0)
            got, _ = shoot_ivp(amp, params, grid)
            if expected != "neither":
                assert got.tag.value == expected, f"amplitude {amp}"

    def test_converged_tag_near_critical(self):
        grid = make_grid(1, 15.0, 3001)
        outcome, (u, du) = shoot_ivp(1.5, P121, grid)
        assert outcome.tag is ShotTag.CONVERGED
        assert u.values[-1] < 1.5e-5
        assert du.values[-1] < 0.0


class TestFailures:
    def test_nonpositive_amplitude(self):
        grid = make_grid(1, 15.0, 1501)
        with pytest.raises(ValueError):
            shoot_ivp(0.0, P121, grid)
        with pytest.raises(ValueError):
            shoot_ivp(-1.0, P121, grid)

    def test_overflow_is_distinct_failure(self):
        grid = make_grid(1, 15.0, 1501)
        with pytest.raises(IntegrationError):
            shoot_ivp(1e160, P121, grid)


def test_trajectory_held_past_stop():
    grid = make_grid(1, 15.0, 1501)
    outcome, (u, du) = shoot_ivp(10.0, P121, grid)
    stop = outcome.stop_index
    assert stop < grid.nodes - 1
    assert np.all(u.values[stop:] == u.values[stop])
