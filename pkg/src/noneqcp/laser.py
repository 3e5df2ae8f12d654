"""Laser-driven evanescent contributions in the Kretschmann geometry.

A beam travels in the glass, hits the glass/metal film/vacuum stack beyond
total internal reflection and leaves an evanescent field in the vacuum.  Its
coherent population adds to the equilibrium Casimir-Polder energy:

    U_oe = U(T) + U_laser.

Beam power and waist are in-glass values.  The in-glass intensity is
I = P / (2 pi w^2).  Polarizations are TM.  Only Re alpha enters.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import DomainError
from .materials import LayerStack, kappa, multilayer_t_str, tir_angle
from .spectral import k_sp
from .units import FOUR_PI_EPS0, c

# below this detuning (in linewidths) the far-off-resonance treatment fails
MIN_DETUNING_LINEWIDTHS = 100.0
# beams whose frequencies differ by more than this are time-averaged by the CLI
AVERAGING_THRESHOLD = 1e9


@dataclass(frozen=True)
class LaserBeam:
    """Plane-wave laser mode inside the glass.

    Parameters
    ----------
    omega : float
        Angular frequency (rad/s).
    theta : float
        Incidence angle at the glass/metal interface (rad).
    power, waist : float
        In-glass power (W) and waist (m).
    phase : float
        Coherent-state phase zeta (rad).
    direction : int
        +1 or -1, sign of the in-plane wavevector along x.
    """

    omega: float
    theta: float
    power: float
    waist: float
    phase: float = 0.0
    direction: int = 1

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError("laser frequency must be positive")
        if not 0 < self.theta < math.pi / 2:
            raise DomainError("incidence angle must lie in (0, pi/2)")
        if self.power < 0 or not self.waist > 0:
            raise DomainError("power must be >= 0 and waist > 0")
        if self.direction not in (1, -1):
            raise DomainError("direction must be +1 or -1")

    def with_(self, **changes):
        from dataclasses import replace
        return replace(self, **changes)


@dataclass(frozen=True)
class CoherentModeState:
    """Coherent amplitude |beta| e^{i zeta} on top of a thermal occupation nu."""

    amplitude: float
    phase: float = 0.0
    thermal_occupation: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0 or self.thermal_occupation < 0:
            raise DomainError("amplitude and thermal occupation must be >= 0")

    @property
    def beta(self):
        return self.amplitude * np.exp(1j * self.phase)


def _glass_index(glass, omega):
    return float(np.real(glass.refractive_index(omega)))


def k_parallel(beam: LaserBeam, glass):
    """In-plane wavevector n_gl omega sin(theta) / c."""
    return _glass_index(glass, beam.omega) * beam.omega * math.sin(beam.theta) / c


def plasmon_matching_angle(omega, stack: LayerStack):
    """Incidence angle where the in-plane wavevector equals the bare metal/vacuum k_sp."""
    n = _glass_index(stack.glass, omega)
    s = c * k_sp(omega, stack.film.plasma_frequency) / (n * omega)
    if s >= 1:
        raise DomainError("plasmon wavevector lies outside the glass light cone")
    return math.asin(s)


def transmission_intensity(stack: LayerStack, omega, theta):
    """|t_str|^2 (electric-field convention) at incidence angle theta."""
    n = _glass_index(stack.glass, omega)
    k = n * omega * np.sin(theta) / c
    return np.abs(multilayer_t_str(stack, omega, k, field="E")) ** 2


def resonance_angle(stack: LayerStack, omega, span_deg=3.0):
    """Angle maximizing |t_str|^2 beyond the TIR angle (rad)."""
    th_t = tir_angle(stack.glass, omega)
    grid = th_t + np.radians(np.linspace(1e-4, span_deg, 601))
    vals = transmission_intensity(stack, omega, grid)
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = optimize.minimize_scalar(lambda t: -transmission_intensity(stack, omega, t),
                                   bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    return float(res.x)


def _real_alpha_volume(atom, omega):
    """Re alpha(omega) / (4 pi eps0) in m^3, refusing near-resonant frequencies."""
    if atom.min_detuning(omega) < MIN_DETUNING_LINEWIDTHS:
        raise DomainError(
            f"laser frequency {omega:.6e} rad/s lies within {MIN_DETUNING_LINEWIDTHS:g} linewidths "
            "of an atomic line"
        )
    alpha = complex(atom.polarizability(omega))
    if abs(alpha.imag) > 1e-3 * abs(alpha.real):
        warnings.warn(f"Im alpha / Re alpha = {alpha.imag / alpha.real:.2e} is not negligible", stacklevel=3)
    return alpha.real / FOUR_PI_EPS0


def _beam_terms(beam: LaserBeam, stack: LayerStack, atom):
    """(n_gl, Re alpha/4 pi eps0, t_str, kappa, k) for one beam."""
    glass = stack.glass
    n = _glass_index(glass, beam.omega)
    if beam.theta <= tir_angle(glass, beam.omega):
        warnings.warn("incidence angle is not beyond total internal reflection", stacklevel=3)
        raise DomainError("beam is not evanescent in the vacuum (theta <= theta_T)")
    k = n * beam.omega * math.sin(beam.theta) / c
    kap = float(np.real(kappa(beam.omega, k)))
    t = complex(multilayer_t_str(stack, beam.omega, k, field="E"))
    a = _real_alpha_volume(atom, beam.omega)
    return n, a, t, kap, k


def one_laser_potential(beam: LaserBeam, stack: LayerStack, atom, L):
    """-(2P/(c n w^2)) (Re alpha / 4 pi eps0) |t_str|^2 exp(-2 kappa L), in J."""
    L = np.asarray(L, dtype=float)
    if np.any(L < 0):
        raise DomainError("L must be >= 0")
    n, a, t, kap, _ = _beam_terms(beam, stack, atom)
    out = -2 * beam.power / (c * n * beam.waist**2) * a * abs(t) ** 2 * np.exp(-2 * kap * L)
    return out if out.ndim else float(out)


def polarization_overlap(beam1: LaserBeam, beam2: LaserBeam):
    """e1 . e2 for TM unit vectors e = -sin(theta) z + cos(theta) s x in the glass."""
    return (math.sin(beam1.theta) * math.sin(beam2.theta)
            + beam1.direction * beam2.direction * math.cos(beam1.theta) * math.cos(beam2.theta))


def two_laser_potential(beam1: LaserBeam, beam2: LaserBeam, stack: LayerStack, atom, x, L, t=0.0,
                        time_averaged=False):
    """Two coherent beams: both one-laser terms plus their interference term (J).

    The interference term oscillates at omega1 - omega2.  With
    ``time_averaged=True`` it is dropped unless the two frequencies coincide.
    """
    x = np.asarray(x, dtype=float)
    L = np.asarray(L, dtype=float)
    if np.any(L < 0):
        raise DomainError("L must be >= 0")
    n1, a1, t1, kap1, k1 = _beam_terms(beam1, stack, atom)
    n2, a2, t2, kap2, k2 = _beam_terms(beam2, stack, atom)
    single = (-2 * beam1.power / (c * n1 * beam1.waist**2) * a1 * abs(t1) ** 2 * np.exp(-2 * kap1 * L)
              - 2 * beam2.power / (c * n2 * beam2.waist**2) * a2 * abs(t2) ** 2 * np.exp(-2 * kap2 * L))
    if time_averaged and beam1.omega != beam2.omega:
        out = single + 0 * x
        return out if out.ndim else float(out)
    phi1 = np.angle(t1) + beam1.direction * k1 * x
    phi2 = np.angle(t2) + beam2.direction * k2 * x
    dphase = phi1 - phi2 + beam1.phase - beam2.phase - (beam1.omega - beam2.omega) * t
    cross = (-2 * math.sqrt(beam1.power * beam2.power)
             / (c * math.sqrt(n1 * n2) * beam1.waist * beam2.waist)
             * (a1 + a2) * abs(t1 * t2) * np.exp(-(kap1 + kap2) * L)
             * polarization_overlap(beam1, beam2) * np.cos(dphase))
    out = single + cross
    return out if out.ndim else float(out)


def counterprop_lattice(beam: LaserBeam, stack: LayerStack, atom, x, L, phase_difference=0.0):
    """Standing plasmonic lattice from two identical counter-propagating beams (J).

    -(4P/(c n w^2)) (Re alpha/4 pi eps0) |t|^2 exp(-2 kappa L)
        x [1 - cos(2 theta) cos(2 k x + phase_difference)]
    """
    x = np.asarray(x, dtype=float)
    L = np.asarray(L, dtype=float)
    if np.any(L < 0):
        raise DomainError("L must be >= 0")
    n, a, t, kap, k = _beam_terms(beam, stack, atom)
    env = -4 * beam.power / (c * n * beam.waist**2) * a * abs(t) ** 2 * np.exp(-2 * kap * L)
    out = env * (1 - math.cos(2 * beam.theta) * np.cos(2 * k * x + phase_difference))
    return out if out.ndim else float(out)


def lattice_period(beam: LaserBeam, glass):
    """pi / k, the x-period of the counter-propagating lattice (m)."""
    return math.pi / k_parallel(beam, glass)


def verify_thermal_decoupling(beta, nu, nodes=40):
    """Moments <n + 1/2> and <a^2> of a coherent state displaced thermal state.

    The combined P-function is the convolution of a delta at ``beta`` with the
    thermal Gaussian exp(-|a|^2/nu)/(pi nu), i.e. a Gaussian centred at beta.
    The two moments are integrated over the complex plane with a tensor
    Gauss-Hermite rule in (Re a, Im a).
    """
    beta = complex(beta)
    if nu < 0:
        raise DomainError("thermal occupation must be >= 0")
    if nu == 0:
        return abs(beta) ** 2 + 0.5, beta**2
    u, w = np.polynomial.hermite.hermgauss(nodes)
    uu, vv = np.meshgrid(u, u, indexing="ij")
    ww = np.outer(w, w) / np.pi
    alpha = beta + math.sqrt(nu) * (uu + 1j * vv)
    n_half = float(np.sum(ww * (np.abs(alpha) ** 2 + 0.5)))
    a2 = complex(np.sum(ww * alpha**2))
    return n_half, a2
