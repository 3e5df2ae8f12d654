"""Surface-plasmon branch of a lossless Drude half-space.

Dispersion, inverse dispersion, pole residues of the Green-trace integrand,
and the plasmon-branch field and atom energies with the plasmon population
held at its own temperature.  Everything here uses Gamma = 0; a lossy metal
is accepted and its relaxation rate ignored.

Notation: x = c k / Omega_P and s(k) = sqrt(x^4 + 1/4).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .atom import TwoLevelAtom, thermal_static
from .errors import ConvergenceError, DomainError
from .materials import DrudeMetal, fresnel
from .units import FOUR_PI_EPS0, c, coth_thermal, hbar


@dataclass(frozen=True)
class PlasmonPoint:
    k: float
    omega: float
    residue: float


@dataclass(frozen=True)
class ImbalanceConfig:
    """Ambient temperature and the separate plasmon-branch temperature (K)."""

    temperature: float
    plasmon_temperature: float

    def __post_init__(self):
        if self.temperature < 0 or self.plasmon_temperature < 0:
            raise DomainError("temperatures must be >= 0")


def _plasma(metal_or_wp):
    if isinstance(metal_or_wp, DrudeMetal):
        return metal_or_wp.plasma_frequency
    return float(metal_or_wp)


def omega_sp(k, plasma_frequency):
    """Lossless surface-plasmon frequency at in-plane wavevector k."""
    wp = _plasma(plasma_frequency)
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise DomainError("k must be >= 0")
    out = wp * np.sqrt(_sp_fraction((c * k / wp) ** 2))
    return out if out.ndim else float(out)


def _sp_fraction(x2):
    """x^2 + 1/2 - sqrt(x^4 + 1/4), stable for all x."""
    s = np.sqrt(x2 * x2 + 0.25)
    # small x: x^2 - x^4/(s + 1/2); large x: 1/2 - (1/4)/(x^2 + s)
    return np.where(x2 < 1, x2 * (1 - x2 / (s + 0.5)), 0.5 - 0.25 / (x2 + s))


def k_sp(omega, plasma_frequency):
    """Inverse dispersion (omega/c) sqrt((w^2 - Wp^2)/(2 w^2 - Wp^2)), 0 < w < Omega_sp."""
    wp = _plasma(plasma_frequency)
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0) or np.any(w >= wp / math.sqrt(2)):
        raise DomainError("k_sp requires 0 < omega < Omega_P / sqrt(2): no bound plasmon")
    out = w / c * np.sqrt((w * w - wp * wp) / (2 * w * w - wp * wp))
    return out if out.ndim else float(out)


def _dk_domega(u, wp):
    d = 2 * u * u - wp * wp
    s = (u * u - wp * wp) / d
    ds = 2 * u * wp * wp / (d * d)
    rs = np.sqrt(s)
    return (rs + u * ds / (2 * rs)) / c


def omega_pm(k, plasma_frequency):
    """(omega_-, omega_+) = Omega_P sqrt(s -+ 1/2).

    omega_-^2 = c^2 k^2 - omega_sp^2, so omega_- / c is the vacuum decay
    constant of the plasmon field; omega_+^2 - omega_-^2 = Omega_P^2.
    """
    wp = _plasma(plasma_frequency)
    k = np.asarray(k, dtype=float)
    x2 = (c * k / wp) ** 2
    s = np.sqrt(x2 * x2 + 0.25)
    # s - 1/2 = x^4 / (s + 1/2)
    w_minus = wp * np.sqrt(x2 * x2 / (s + 0.5))
    w_plus = wp * np.sqrt(s + 0.5)
    if w_minus.ndim == 0:
        return float(w_minus), float(w_plus)
    return w_minus, w_plus


def mode_integrand_Fk(L, omega, k, plasma_frequency):
    """Trace of the Green-tensor k-integrand for the lossless metal (complex)."""
    if not L > 0:
        raise DomainError("L must be positive")
    wp = _plasma(plasma_frequency)
    eps = 1.0 if wp == 0 else 1 - wp**2 / omega**2
    kap = np.sqrt(complex(k * k - omega * omega / c**2))
    if kap.real == 0 and kap.imag > 0:
        kap = -kap
    r_tm = fresnel(omega, k, eps, "TM")
    r_te = fresnel(omega, k, eps, "TE")
    return k * kap / FOUR_PI_EPS0 * (
        omega**2 / (c**2 * kap**2) * r_te + (1 + k**2 / kap**2) * r_tm
    ) * np.exp(-2 * kap * L)


def mode_numerator(L, omega, k, plasma_frequency):
    """Numerator of the TM part of the integrand written as a ratio."""
    wp = _plasma(plasma_frequency)
    a = np.sqrt(complex(c * c * k * k - omega * omega))
    b = np.sqrt(complex(c * c * k * k - omega * omega + wp * wp))
    return k * (2 * c * c * k * k - omega**2) * np.exp(-2 * L * a / c) * (
        (omega**2 - wp**2) * a - omega**2 * b
    )


def mode_denominator(L, omega, k, plasma_frequency):
    """Denominator matching :func:`mode_numerator`; vanishes on the plasmon branch."""
    wp = _plasma(plasma_frequency)
    a = np.sqrt(complex(c * c * k * k - omega * omega))
    b = np.sqrt(complex(c * c * k * k - omega * omega + wp * wp))
    return FOUR_PI_EPS0 * c * a * ((omega**2 - wp**2) * a + omega**2 * b)


def residue(L, k, plasma_frequency):
    """Residue of the Green-trace integrand at omega = omega_sp(k); always negative."""
    wp = _plasma(plasma_frequency)
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0) or not L > 0:
        raise DomainError("residue requires k > 0 and L > 0")
    x2 = (c * k / wp) ** 2
    s = np.sqrt(x2 * x2 + 0.25)
    w_minus, w_plus = omega_pm(k, wp)
    w_sp = omega_sp(k, wp)
    x5 = x2 * x2 * np.sqrt(x2)
    out = -wp**3 / (FOUR_PI_EPS0 * c**2) * (w_plus - w_minus) / w_sp * x5 * np.exp(-2 * L * w_minus / c) / s
    return out if np.ndim(out) else float(out)


def plasmon_point(L, k, plasma_frequency):
    return PlasmonPoint(float(k), omega_sp(k, plasma_frequency), residue(L, k, plasma_frequency))


# ---------------------------------------------------------------------------
# principal-value k integrals


@dataclass(frozen=True)
class PlasmonQuadrature:
    """Accuracy knobs for the plasmon-branch k integrals.

    ``window`` is the half-width of the pole-subtraction region in
    u = omega_sp(k), as a fraction of the distance from the atomic
    frequency to the nearest end of the branch (0 or Omega_sp).
    """

    rtol: float = 1e-10
    cutoff_scale: float = 1.0
    window: float = 0.5
    limit: int = 1000

    def refined(self):
        return PlasmonQuadrature(self.rtol / 2, 2 * self.cutoff_scale, self.window, 2 * self.limit)


DEFAULT_PLASMON_QUAD = PlasmonQuadrature()


def _k_max(L, wp, quad):
    return max(25.0 / L, 20.0 * wp / c) * quad.cutoff_scale


def _pv_branch_integral(L, wp, weight, wa, quad, diagnostics=None):
    """P int_0^kmax dk weight(u) R_k / (wa^2 - u^2), u = omega_sp(k).

    Inside a window around the pole the variable is changed to u, the
    numerator's pole value is subtracted, and the subtracted part
    g(wa)/(wa^2 - u^2) is integrated in closed form.
    """
    k_max = _k_max(L, wp, quad)
    kw = dict(epsrel=quad.rtol, epsabs=0, limit=quad.limit)

    def f_k(k):
        u = omega_sp(k, wp)
        return weight(u) * residue(L, k, wp) / (wa * wa - u * u)

    w_sp = wp / math.sqrt(2)
    u_top = omega_sp(k_max, wp)
    if not wa < u_top:
        # no pole on the integration range
        pts = [k_sp(wa, wp)] if wa < w_sp else None
        val, err = integrate.quad(f_k, 0, k_max, points=pts, **kw)
        if diagnostics is not None:
            diagnostics.update(pole=None, k_max=k_max, error=err)
        return val

    half = quad.window * min(wa, u_top - wa)
    u1, u2 = wa - half, wa + half
    k1, k2 = k_sp(u1, wp), k_sp(u2, wp)

    def g(u):
        k = k_sp(u, wp)
        return weight(u) * residue(L, k, wp) * _dk_domega(u, wp)

    g0 = g(wa)

    def f_u(u):
        d = wa * wa - u * u
        if d == 0:
            return 0.0
        return (g(u) - g0) / d

    inner, e_in = integrate.quad(f_u, u1, u2, points=[wa], **kw)
    # int du / (wa^2 - u^2) = (1/2wa) ln|(wa+u)/(wa-u)|
    analytic = g0 / (2 * wa) * (math.log((wa + u2) / (u2 - wa)) - math.log((wa + u1) / (wa - u1)))
    lo, e_lo = integrate.quad(f_k, 0, k1, **kw)
    hi, e_hi = integrate.quad(f_k, k2, k_max, **kw)
    total = lo + inner + analytic + hi
    err = e_lo + e_in + e_hi
    if diagnostics is not None:
        diagnostics.update(pole=k_sp(wa, wp), window=(u1, u2), k_max=k_max,
                           pieces=(lo, inner, analytic, hi), error=err)
    if not np.isfinite(total) or err > 100 * quad.rtol * (abs(lo) + abs(inner) + abs(analytic) + abs(hi)):
        raise ConvergenceError("plasmon-branch integral did not converge",
                               {"L": L, "error": err, "value": total})
    return total


def plasmonic_Uf(L, T_sp, atom: TwoLevelAtom, metal, quad: PlasmonQuadrature = DEFAULT_PLASMON_QUAD,
                 diagnostics=None):
    """Field energy carried by the plasmon branch populated at temperature T_sp (J)."""
    if not L > 0:
        raise DomainError("L must be positive")
    wp = _plasma(metal)
    wa = atom.transition_frequency

    def weight(u):
        return float(coth_thermal(u, T_sp)) * wa

    val = _pv_branch_integral(L, wp, weight, wa, quad, diagnostics)
    return 0.5 * hbar * wa * thermal_static(atom) * val


def plasmonic_Ua(L, T_a, atom: TwoLevelAtom, metal, quad: PlasmonQuadrature = DEFAULT_PLASMON_QUAD,
                 diagnostics=None):
    """Atom energy associated with the plasmon branch at atomic temperature T_a (J)."""
    if not L > 0:
        raise DomainError("L must be positive")
    wp = _plasma(metal)
    wa = atom.transition_frequency
    a = TwoLevelAtom(wa, atom.static_polarizability, T_a)
    val = _pv_branch_integral(L, wp, lambda u: u, wa, quad, diagnostics)
    return -0.5 * hbar * wa * thermal_static(a) * float(coth_thermal(wa, T_a)) * val


def imbalanced_total(L, cfg: ImbalanceConfig, atom: TwoLevelAtom, metal: DrudeMetal,
                     quad=None, plasmon_quad: PlasmonQuadrature = DEFAULT_PLASMON_QUAD):
    """U_oe = U(T) - U_f,sp(T) + U_f,sp(T_sp).

    U(T) is the full equilibrium energy over ``metal`` (lossy if Gamma > 0);
    the plasmon swap always uses the lossless branch.
    """
    from .potentials import DEFAULT_QUAD, equilibrium_U

    T, T_sp = cfg.temperature, cfg.plasmon_temperature
    U = equilibrium_U(L, T, atom, metal, quad or DEFAULT_QUAD)
    if T_sp == T:
        return U
    return U - plasmonic_Uf(L, T, atom, metal, plasmon_quad) + plasmonic_Uf(L, T_sp, atom, metal, plasmon_quad)
