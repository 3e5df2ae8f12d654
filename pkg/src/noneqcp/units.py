"""Physical constants and unit conversions (SI throughout)."""
import numpy as np
from scipy.constants import c, e, epsilon_0, hbar, k as k_B

__all__ = [
    "c", "hbar", "k_B", "epsilon_0", "FOUR_PI_EPS0",
    "ev_to_rad_s", "rad_s_to_ev", "joule_to_microkelvin", "microkelvin_to_joule",
    "coth_thermal", "bose_occupation",
]

FOUR_PI_EPS0 = 4 * np.pi * epsilon_0


def ev_to_rad_s(energy_ev):
    return energy_ev * e / hbar


def rad_s_to_ev(omega):
    return omega * hbar / e


def joule_to_microkelvin(energy):
    return energy / k_B * 1e6


def microkelvin_to_joule(temp_uk):
    return temp_uk * 1e-6 * k_B


def coth_thermal(omega, temperature):
    """coth(hbar*omega / 2 k_B T), the symmetrized thermal weight.

    Returns ``sign(omega)`` at T = 0. Large arguments are clipped to 1
    instead of overflowing.
    """
    omega = np.asarray(omega, dtype=float)
    if temperature <= 0:
        return np.sign(omega)
    x = hbar * omega / (2 * k_B * temperature)
    with np.errstate(divide="ignore", over="ignore"):
        out = np.where(np.abs(x) > 40, np.sign(x), 1.0 / np.tanh(x))
    return out


def bose_occupation(omega, temperature):
    """Mean thermal photon number of a mode at frequency ``omega``."""
    if temperature <= 0:
        return np.zeros_like(np.asarray(omega, dtype=float))
    x = hbar * np.asarray(omega, dtype=float) / (k_B * temperature)
    return 1.0 / np.expm1(x)
