"""Dielectric response, wavevector branches and Fresnel coefficients.

Conventions
-----------
The surface lies in the plane z = 0 with vacuum (and the atom) on the side
z > 0.  A plane wave with in-plane wavevector ``k`` decays or propagates as
``exp(-kappa z)``, where

    kappa = sqrt(k**2 - eps * omega**2 / c**2)

is taken on the branch with ``Re kappa >= 0`` and, for a purely propagating
wave (``Re kappa == 0``), ``Im kappa <= 0``.  With ``exp(-i omega t)`` time
dependence this is the outgoing (retarded) choice.

TM coefficients follow the magnetic-field convention

    r_ij = (eps_j kappa_i - eps_i kappa_j) / (eps_j kappa_i + eps_i kappa_j)
    t_ij = 2 eps_j kappa_i / (eps_j kappa_i + eps_i kappa_j) = 1 + r_ij

The electric-field amplitude ratio differs by n_i / n_j; pass ``field="E"``
where the electric field itself is needed (dipole potentials).
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DomainError, PoleError, TabulationError
from .units import c, ev_to_rad_s

DATA_DIR_ENV = "NONEQCP_DATA_DIR"
SAPPHIRE_FILE = "sapphire_ordinary.txt"

# relative size of |denominator| treated as an exact pole
_POLE_RTOL = 1e-13


@dataclass(frozen=True)
class DrudeMetal:
    """Drude permittivity eps = 1 - Omega_P**2 / (omega (omega + i Gamma))."""

    plasma_frequency: float
    relaxation_rate: float = 0.0

    def __post_init__(self):
        if not self.plasma_frequency > 0:
            raise DomainError(f"plasma frequency must be positive, got {self.plasma_frequency}")
        if self.relaxation_rate < 0:
            raise DomainError(f"relaxation rate must be >= 0, got {self.relaxation_rate}")

    @classmethod
    def from_ev(cls, plasma_ev, relaxation_ev=0.0):
        return cls(ev_to_rad_s(plasma_ev), ev_to_rad_s(relaxation_ev))

    @property
    def surface_plasmon_frequency(self):
        """Asymptotic (large-k) surface-plasmon frequency Omega_P / sqrt(2)."""
        return self.plasma_frequency / np.sqrt(2.0)

    @property
    def plasma_wavelength(self):
        return 2 * np.pi * c / self.plasma_frequency

    def lossless(self):
        return DrudeMetal(self.plasma_frequency, 0.0)

    def permittivity(self, omega):
        return drude_permittivity(omega, self)

    def permittivity_complex(self, omega):
        """Analytic continuation to complex ``omega`` (upper half-plane)."""
        omega = np.asarray(omega, dtype=complex)
        return 1 - self.plasma_frequency**2 / (omega * (omega + 1j * self.relaxation_rate))

    def permittivity_imag(self, xi):
        """eps(i xi), real and > 1 for xi > 0. Returns inf at xi = 0."""
        xi = np.asarray(xi, dtype=float)
        with np.errstate(divide="ignore"):
            return 1 + self.plasma_frequency**2 / (xi * (xi + self.relaxation_rate))


GOLD = DrudeMetal.from_ev(9.0, 0.035)


@dataclass(frozen=True)
class ConstantDielectric:
    """Nondispersive medium with real permittivity ``eps`` (= n**2)."""

    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise DomainError(f"constant permittivity must be positive, got {self.eps}")

    @property
    def refractive_index(self):
        return float(np.sqrt(self.eps))

    def permittivity(self, omega):
        out = np.full(np.shape(omega), self.eps, dtype=complex)
        return out if out.ndim else complex(out)

    def permittivity_complex(self, omega):
        return np.full(np.shape(omega), self.eps, dtype=complex)

    def permittivity_imag(self, xi):
        return np.full(np.shape(xi), self.eps, dtype=float) if np.ndim(xi) else float(self.eps)


def drude_permittivity(omega, metal: DrudeMetal):
    """Complex Drude permittivity at real positive frequency ``omega`` (rad/s)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise DomainError("Drude permittivity requires omega > 0")
    out = 1 - metal.plasma_frequency**2 / (omega * (omega + 1j * metal.relaxation_rate))
    return out if out.ndim else complex(out)


@dataclass(frozen=True, eq=False)
class TabulatedDielectric:
    """Permittivity sampled on a frequency grid, linearly interpolated.

    Real and imaginary parts are interpolated independently.  Queries outside
    the grid raise :class:`TabulationError`; nothing is extrapolated.
    """

    omega: np.ndarray
    eps: np.ndarray
    name: str = "tabulated"
    interpolation: str = "linear"
    static_permittivity: float | None = field(default=None)

    def __post_init__(self):
        w = np.array(self.omega, dtype=float)
        eps = np.array(self.eps, dtype=complex)
        if w.ndim != 1 or w.shape != eps.shape:
            raise DomainError("frequency grid and permittivity samples must be 1-D and equal length")
        if w.size < 2:
            raise DomainError("need at least two tabulated points")
        if np.any(np.diff(w) <= 0):
            raise DomainError("frequency grid must be strictly increasing")
        if np.any(eps.imag < 0):
            raise DomainError("Im eps < 0 in table: medium is not passive")
        if self.interpolation != "linear":
            raise DomainError(f"unsupported interpolation rule {self.interpolation!r}")
        w.setflags(write=False)
        eps.setflags(write=False)
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "eps", eps)

    @classmethod
    def from_file(cls, path, name=None):
        """Read three whitespace-separated columns: omega [rad/s], Re eps, Im eps."""
        path = Path(path)
        data = np.loadtxt(path, comments="#", ndmin=2)
        if data.shape[1] != 3:
            raise DomainError(f"{path}: expected 3 columns, found {data.shape[1]}")
        return cls(data[:, 0], data[:, 1] + 1j * data[:, 2], name=name or path.stem)

    @property
    def omega_range(self):
        return float(self.omega[0]), float(self.omega[-1])

    def permittivity(self, omega):
        w = np.asarray(omega, dtype=float)
        lo, hi = self.omega_range
        if np.any(w < lo) or np.any(w > hi):
            raise TabulationError(
                f"{self.name}: omega outside tabulated range [{lo:.4e}, {hi:.4e}] rad/s"
            )
        out = np.interp(w, self.omega, self.eps.real) + 1j * np.interp(w, self.omega, self.eps.imag)
        return out if out.ndim else complex(out)

    def refractive_index(self, omega):
        n = np.sqrt(self.permittivity(omega))
        return n if np.ndim(n) else complex(n)

    def permittivity_imag(self, xi):
        """Constant stand-in for eps(i xi).

        The table only covers a narrow optical window, so on the imaginary
        axis the medium is treated as nondispersive with its low-frequency
        tabulated value (or ``static_permittivity`` when given).
        """
        value = self.static_permittivity
        if value is None:
            value = float(self.eps[0].real)
        return np.full(np.shape(xi), value, dtype=float) if np.ndim(xi) else value


def data_path(filename):
    """Locate a bundled data file, honouring the NONEQCP_DATA_DIR override."""
    override = os.environ.get(DATA_DIR_ENV)
    if override:
        return Path(override) / filename
    return Path(str(resources.files("noneqcp").joinpath("data", filename)))


def load_sapphire(path=None):
    return TabulatedDielectric.from_file(path or data_path(SAPPHIRE_FILE), name="sapphire")


@dataclass(frozen=True, eq=False)
class LayerStack:
    """Glass half-space / metal film of thickness ``film_thickness`` / vacuum."""

    glass: TabulatedDielectric
    film: DrudeMetal
    film_thickness: float

    def __post_init__(self):
        if not self.film_thickness > 0:
            raise DomainError(f"film thickness must be positive, got {self.film_thickness}")


def _as_output(x):
    return x if np.ndim(x) else complex(x)


def kappa(omega, k, eps=1.0):
    """Out-of-plane decay constant sqrt(k**2 - eps omega**2 / c**2).

    Branch: Re >= 0, and Im <= 0 when the real part vanishes.
    """
    omega = np.asarray(omega, dtype=float)
    k = np.asarray(k, dtype=float)
    if np.any(omega <= 0):
        raise DomainError("kappa requires omega > 0")
    if np.any(k < 0):
        raise DomainError("kappa requires k >= 0")
    return _as_output(_kappa(omega, k, eps))


def _kappa(omega, k, eps):
    q = np.sqrt(np.asarray(k * k - eps * omega * omega / c**2, dtype=complex))
    return np.where((q.real == 0) & (q.imag > 0), -q, q)


def _check_pole(den, scale, what):
    den = np.asarray(den)
    bad = np.abs(den) <= _POLE_RTOL * np.asarray(scale)
    if np.any(bad):
        raise PoleError(f"{what}: exact pole of the reflection amplitude")


def fresnel(omega, k, eps, polarization="TM"):
    """Reflection amplitude of the vacuum / medium interface seen from vacuum."""
    omega = np.asarray(omega, dtype=float)
    k = np.asarray(k, dtype=float)
    if np.any(omega <= 0) or np.any(k < 0):
        raise DomainError("fresnel requires omega > 0 and k >= 0")
    kv = _kappa(omega, k, 1.0)
    km = _kappa(omega, k, eps)
    pol = polarization.upper()
    if pol == "TE":
        num, den = kv - km, kv + km
        scale = np.abs(kv) + np.abs(km)
    elif pol == "TM":
        num, den = eps * kv - km, eps * kv + km
        scale = np.abs(eps * kv) + np.abs(km)
    else:
        raise ValueError(f"polarization must be 'TE' or 'TM', got {polarization!r}")
    _check_pole(den, scale, f"r_{pol}")
    return _as_output(num / den)


def _interface_tm(eps_i, kap_i, eps_j, kap_j):
    den = eps_j * kap_i + eps_i * kap_j
    _check_pole(den, np.abs(eps_j * kap_i) + np.abs(eps_i * kap_j), "TM interface")
    r = (eps_j * kap_i - eps_i * kap_j) / den
    t = 2 * eps_j * kap_i / den
    return r, t


def fresnel_interface_r(omega, k, eps_from, eps_to):
    """TM reflection amplitude for a wave in medium ``eps_from`` hitting ``eps_to``."""
    ki = _kappa(omega, k, eps_from)
    kj = _kappa(omega, k, eps_to)
    return _as_output(_interface_tm(eps_from, ki, eps_to, kj)[0])


def fresnel_interface_t(omega, k, eps_from, eps_to, polarization="TM", field="H"):
    """TM transmission amplitude between two half-spaces.

    ``field="H"`` gives the magnetic-field ratio 2 eps_j kappa_i / D, which is
    1 + r.  ``field="E"`` multiplies by n_from / n_to (electric-field ratio).
    """
    if polarization.upper() != "TM":
        raise ValueError("only TM transmission is implemented")
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0) or np.any(np.asarray(k) < 0):
        raise DomainError("fresnel_interface_t requires omega > 0 and k >= 0")
    ki = _kappa(omega, k, eps_from)
    kj = _kappa(omega, k, eps_to)
    t = _interface_tm(eps_from, ki, eps_to, kj)[1]
    if field == "E":
        t = t * np.sqrt(complex(eps_from)) / np.sqrt(complex(eps_to))
    elif field != "H":
        raise ValueError(f"field must be 'H' or 'E', got {field!r}")
    return _as_output(t)


def multilayer_t_str(stack: LayerStack, omega, k, field="H"):
    """TM transmission of glass / film / vacuum for a wave incident from the glass.

    t_str = t_gf t_fv exp(-kappa_f d) / (1 + r_gf r_fv exp(-2 kappa_f d))
    """
    omega = np.asarray(omega, dtype=float)
    k = np.asarray(k, dtype=float)
    if np.any(omega <= 0) or np.any(k < 0):
        raise DomainError("multilayer_t_str requires omega > 0 and k >= 0")
    eps_g = stack.glass.permittivity(omega)
    n_g = np.sqrt(eps_g)
    if np.any(k > n_g.real * omega / c * (1 + 1e-12)):
        raise DomainError("k exceeds the glass light cone: no incident wave in the glass")
    eps_f = drude_permittivity(omega, stack.film)
    kg = _kappa(omega, k, eps_g)
    kf = _kappa(omega, k, eps_f)
    kv = _kappa(omega, k, 1.0)
    r_gf, t_gf = _interface_tm(eps_g, kg, eps_f, kf)
    r_fv, t_fv = _interface_tm(eps_f, kf, 1.0, kv)
    # exp(-2 kappa_f d) underflows harmlessly for opaque films
    phase = np.exp(-kf * stack.film_thickness)
    t = t_gf * t_fv * phase / (1 + r_gf * r_fv * phase * phase)
    if field == "E":
        t = t * n_g
    elif field != "H":
        raise ValueError(f"field must be 'H' or 'E', got {field!r}")
    return _as_output(t)


def tir_angle(glass: TabulatedDielectric, omega):
    """Total-internal-reflection angle arcsin(1/n) of the bare glass/vacuum interface (rad)."""
    n = np.real(glass.refractive_index(omega))
    if np.any(n <= 1):
        raise DomainError("glass index <= 1: no total internal reflection")
    out = np.arcsin(1.0 / n)
    return out if np.ndim(out) else float(out)
