import numpy as np
import pytest

from noneqcp.units import (
    bose_occupation, coth_thermal, ev_to_rad_s, joule_to_microkelvin, k_B, microkelvin_to_joule, rad_s_to_ev,
)


def test_ev_round_trip():
    assert rad_s_to_ev(ev_to_rad_s(9.0)) == pytest.approx(9.0, rel=1e-15)
    assert ev_to_rad_s(1.0) == pytest.approx(1.519267447e15, rel=1e-9)


def test_microkelvin():
    assert joule_to_microkelvin(k_B * 1e-6) == pytest.approx(1.0)
    assert microkelvin_to_joule(joule_to_microkelvin(3.3e-29)) == pytest.approx(3.3e-29)


def test_coth_limits():
    assert coth_thermal(2.4e15, 0.0) == 1.0
    assert coth_thermal(2.4e15, 300.0) == 1.0  # clipped, no overflow
    w, T = 1e10, 300.0
    x = 1.0545718176461565e-34 * w / (2 * k_B * T)
    assert coth_thermal(w, T) == pytest.approx(1 / np.tanh(x), rel=1e-12)


def test_bose():
    assert bose_occupation(1e13, 0.0) == 0.0
    n = bose_occupation(1e13, 300.0)
    assert float(coth_thermal(1e13, 300.0)) == pytest.approx(2 * n + 1, rel=1e-12)
