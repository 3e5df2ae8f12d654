"""Atomic polarizability models.

All polarizabilities returned here are in SI units (C m^2 / V) unless the
function name says otherwise.  Divide by ``FOUR_PI_EPS0`` to get the volume
polarizability in m^3.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, PoleError
from .units import FOUR_PI_EPS0, hbar, k_B


@dataclass(frozen=True)
class Transition:
    """Ground-to-excited dipole transition."""

    frequency: float
    dipole: float
    linewidth: float = 0.0

    def __post_init__(self):
        if not self.frequency > 0:
            raise DomainError(f"transition frequency must be positive, got {self.frequency}")
        if not self.dipole > 0:
            raise DomainError(f"dipole matrix element must be positive, got {self.dipole}")
        if self.linewidth < 0:
            raise DomainError(f"linewidth must be >= 0, got {self.linewidth}")
        if self.linewidth > 1e-3 * self.frequency:
            warnings.warn(
                f"linewidth {self.linewidth:.3e} rad/s is not small compared with "
                f"the transition frequency {self.frequency:.3e} rad/s",
                stacklevel=2,
            )


@dataclass(frozen=True)
class TwoLevelAtom:
    """Isotropic two-level atom.

    Parameters
    ----------
    transition_frequency : float
        omega_a in rad/s.
    static_polarizability : float
        Ground-state static polarizability in SI units (C m^2 / V).
    temperature : float
        Internal temperature of the atom in K (0 allowed).
    """

    transition_frequency: float
    static_polarizability: float
    temperature: float = 0.0

    def __post_init__(self):
        if not self.transition_frequency > 0:
            raise DomainError("transition frequency must be positive")
        if not self.static_polarizability > 0:
            raise DomainError("static polarizability must be positive")
        if self.temperature < 0:
            raise DomainError("temperature must be >= 0")

    @classmethod
    def from_volume(cls, transition_frequency, volume_polarizability, temperature=0.0):
        """Build from alpha / (4 pi eps0) given in m^3."""
        return cls(transition_frequency, volume_polarizability * FOUR_PI_EPS0, temperature)

    def at_temperature(self, temperature):
        return TwoLevelAtom(self.transition_frequency, self.static_polarizability, temperature)

    @property
    def thermal_static(self):
        return thermal_static(self)

    def polarizability_imag(self, xi):
        """alpha(i xi), real and positive."""
        wa2 = self.transition_frequency**2
        return self.thermal_static * wa2 / (wa2 + np.asarray(xi, dtype=float) ** 2)

    def polarizability(self, omega):
        """Principal-value part at real (or complex) omega, SI units."""
        wa2 = self.transition_frequency**2
        z = np.asarray(omega, dtype=complex)
        out = self.thermal_static * wa2 / (wa2 - z * z)
        return out if out.ndim else complex(out)

    def min_detuning(self, omega):
        return np.inf if omega != self.transition_frequency else 0.0


# Two-level reduction used for the heat-imbalance study
RB_TWO_LEVEL_FREQUENCY = 2.4e15
RB_TWO_LEVEL_VOLUME_POLARIZABILITY = 46e-30


def rubidium_two_level(temperature=0.0):
    return TwoLevelAtom.from_volume(
        RB_TWO_LEVEL_FREQUENCY, RB_TWO_LEVEL_VOLUME_POLARIZABILITY, temperature
    )


@dataclass(frozen=True)
class PolarizabilityValue:
    """Real-frequency polarizability split into a principal-value part and a delta weight.

    The full value is ``smooth_part + 1j * resonance_weight * delta(omega - omega_a)``.
    """

    smooth_part: complex
    resonance_weight: float = 0.0

    def __post_init__(self):
        if self.resonance_weight < 0:
            raise DomainError("resonance weight must be >= 0")


def thermal_static(atom: TwoLevelAtom) -> float:
    """tanh(hbar omega_a / 2 k_B T_a) alpha_g(0)."""
    if atom.temperature == 0:
        return atom.static_polarizability
    x = hbar * atom.transition_frequency / (2 * k_B * atom.temperature)
    return float(np.tanh(x)) * atom.static_polarizability


def two_level_polarizability(atom: TwoLevelAtom, omega) -> PolarizabilityValue:
    """Principal-value polarizability and resonance weight at real ``omega`` >= 0."""
    omega = float(omega)
    if omega < 0:
        raise DomainError("omega must be >= 0")
    wa = atom.transition_frequency
    if omega == wa:
        raise PoleError("two-level polarizability evaluated on resonance", location=omega)
    a0 = thermal_static(atom)
    return PolarizabilityValue(
        smooth_part=complex(a0 * wa**2 / (wa**2 - omega**2)),
        resonance_weight=0.5 * np.pi * wa * a0,
    )


def _level_alpha(level_frequencies, dipoles, omega, linewidths=None):
    """Isotropic alpha^(n)(omega) for every level n, shape (N, ...)."""
    wn = np.asarray(level_frequencies, dtype=float)
    d = np.asarray(dipoles, dtype=float)
    w_mn = wn[None, :] - wn[:, None]  # [n, m] = omega_m - omega_n
    gam = np.zeros_like(d) if linewidths is None else np.asarray(linewidths, dtype=float)
    omega = np.asarray(omega, dtype=complex)
    out = np.zeros((wn.size,) + omega.shape, dtype=complex)
    for n in range(wn.size):
        for m in range(wn.size):
            if m == n or d[n, m] == 0:
                continue
            z = omega + 1j * gam[n, m]
            out[n] += w_mn[n, m] * d[n, m] ** 2 / (w_mn[n, m] ** 2 - z * z)
    return 2.0 / (3.0 * hbar) * out


def multilevel_thermal_polarizability(
    level_frequencies: Sequence[float],
    dipoles,
    temperature: float,
    omega,
    linewidths=None,
):
    """Boltzmann-weighted isotropic polarizability of a multi-level atom.

    Parameters
    ----------
    level_frequencies : sequence of float
        Level energies divided by hbar (rad/s).
    dipoles : array_like, shape (N, N)
        Symmetric matrix of dipole matrix-element magnitudes |d_mn| (C m).
    temperature : float
        Atomic temperature in K.
    omega : complex or array
        Frequency (may be complex, e.g. ``1j * xi``).
    linewidths : array_like, shape (N, N), optional
        Damping added as omega -> omega + i gamma_mn.
    """
    wn = np.asarray(level_frequencies, dtype=float)
    if wn.size == 0:
        raise DomainError("empty level set")
    d = np.asarray(dipoles, dtype=float)
    if d.shape != (wn.size, wn.size):
        raise DomainError("dipole matrix shape does not match the level set")
    if temperature < 0:
        raise DomainError("temperature must be >= 0")
    e = wn - wn.min()
    if temperature == 0:
        weights = (e == 0).astype(float)
    else:
        weights = np.exp(-hbar * e / (k_B * temperature))
    z = weights.sum()
    if not np.isfinite(z) or z <= 0:
        raise DomainError("partition function is not finite")
    alpha = _level_alpha(wn, d, omega, linewidths)
    out = np.tensordot(weights / z, alpha, axes=1)
    return out if np.ndim(out) else complex(out)


@dataclass(frozen=True)
class MultiLineAtom:
    """Ground-state atom with several dipole lines, thermal excitation neglected."""

    transitions: tuple

    def __post_init__(self):
        if len(self.transitions) == 0:
            raise DomainError("at least one transition required")
        object.__setattr__(self, "transitions", tuple(self.transitions))

    def polarizability(self, omega):
        """Complex SI polarizability at (possibly complex) frequency omega."""
        z = np.asarray(omega, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for tr in self.transitions:
            zz = z + 1j * tr.linewidth
            out += tr.frequency * tr.dipole**2 / (tr.frequency**2 - zz * zz)
        out *= 2.0 / (3.0 * hbar)
        return out if out.ndim else complex(out)

    def polarizability_imag(self, xi):
        """alpha(i xi), real and positive for xi >= 0."""
        return np.real(self.polarizability(1j * np.asarray(xi, dtype=float)))

    @property
    def static_polarizability(self):
        return float(np.real(self.polarizability(0.0)))

    def min_detuning(self, omega):
        """Smallest |omega - omega_i| in units of the corresponding linewidth."""
        return min(
            abs(omega - tr.frequency) / tr.linewidth if tr.linewidth > 0 else np.inf
            for tr in self.transitions
        )


RB_D1 = Transition(23.6943e14, 25.377e-30, 36.1283e6)
RB_D2 = Transition(24.1419e14, 35.842e-30, 38.1201e6)
RUBIDIUM = MultiLineAtom((RB_D1, RB_D2))


def rb_polarizability(omega):
    """Two-line rubidium polarizability alpha / (4 pi eps0) in m^3."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError("omega must be >= 0")
    out = RUBIDIUM.polarizability(omega) / FOUR_PI_EPS0
    return out if np.ndim(out) else complex(out)


def rb_polarizability_si(omega):
    return rb_polarizability(omega) * FOUR_PI_EPS0
