"""Scattered Green tensor trace, equilibrium Casimir-Polder energy and its
field/atom decomposition.

Only the trace of the reflected Green tensor enters (isotropic atoms):

    Tr G(L, w) = 1/(4 pi eps0) int_0^inf dk k kappa
                 [(1 + k^2/kappa^2) r_TM + w^2/(c^2 kappa^2) r_TE] exp(-2 kappa L)

On the imaginary axis (w = i xi, q = xi/c) the substitution k dk = kappa dkappa
gives the positive integral

    Tr G(L, i xi) = 1/(4 pi eps0) int_q^inf dkappa
                    [(2 kappa^2 - q^2) r_TM - q^2 r_TE] exp(-2 kappa L).

Energies are in joules.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from .atom import TwoLevelAtom, thermal_static
from .errors import ConvergenceError, DomainError, PoleError
from .materials import ConstantDielectric, DrudeMetal, LayerStack, TabulatedDielectric
from .units import FOUR_PI_EPS0, c, coth_thermal, hbar, k_B


@dataclass(frozen=True)
class QuadratureOptions:
    """Accuracy knobs shared by every integral in this module.

    ``cutoff_scale`` multiplies every finite integration cutoff and
    ``laguerre_nodes`` sets the fixed rule used for the fast inner
    imaginary-axis integral.
    """

    rtol: float = 1e-8
    cutoff_scale: float = 1.0
    limit: int = 2000
    laguerre_nodes: int = 96

    def refined(self):
        """Tolerances halved and cutoffs doubled."""
        return replace(
            self,
            rtol=self.rtol / 2,
            cutoff_scale=2 * self.cutoff_scale,
            limit=2 * self.limit,
            laguerre_nodes=int(1.5 * self.laguerre_nodes),
        )


DEFAULT_QUAD = QuadratureOptions()


@dataclass(frozen=True)
class GreenTrace:
    value: complex
    axis: str  # "real" or "imaginary"


@dataclass(frozen=True)
class EnergySplit:
    """U = U_f + U_a with U_f = U/2 + Delta and U_a = U/2 - Delta."""

    total: float
    delta: float

    @property
    def field(self):
        return self.total / 2 + self.delta

    @property
    def atom(self):
        return self.total / 2 - self.delta


def _check_L(L):
    if not L > 0:
        raise DomainError(f"distance must be positive, got {L}")


# ---------------------------------------------------------------------------
# imaginary axis


def _imag_axis_reflection(medium, xi, kap):
    """(r_TM, r_TE) on the imaginary axis, broadcast over xi and kappa."""
    q2 = (xi / c) ** 2
    if isinstance(medium, LayerStack):
        rv_tm, rv_te, kf = _half_space_imag(medium.film, xi, kap, q2, return_kappa=True)
        eps_f = medium.film.permittivity_imag(xi)
        eps_g = medium.glass.permittivity_imag(xi)
        kg = np.sqrt(kap**2 + (eps_g - 1) * q2)
        with np.errstate(invalid="ignore"):
            # eps_f is infinite at xi = 0; the film is then a perfect TM mirror
            ratio = np.where(np.isinf(eps_f), 0.0, eps_g / eps_f)
        rf_tm = (kf * ratio - kg) / (kf * ratio + kg)
        rf_te = (kf - kg) / (kf + kg)
        e = np.exp(-2 * kf * medium.film_thickness)
        r_tm = (rv_tm + rf_tm * e) / (1 + rv_tm * rf_tm * e)
        r_te = (rv_te + rf_te * e) / (1 + rv_te * rf_te * e)
        return r_tm, r_te
    return _half_space_imag(medium, xi, kap, q2)


def _half_space_imag(medium, xi, kap, q2, return_kappa=False):
    if isinstance(medium, DrudeMetal):
        wp2, gam = medium.plasma_frequency**2, medium.relaxation_rate
        s = xi * (xi + gam)
        inv_eps = s / (s + wp2)
        with np.errstate(invalid="ignore", divide="ignore"):
            frac = np.where(xi + gam > 0, xi / (xi + gam), 1.0)
        p2 = wp2 * frac / c**2  # (eps - 1) q^2, finite at xi = 0
    elif isinstance(medium, (ConstantDielectric, TabulatedDielectric)):
        eps = medium.permittivity_imag(xi)
        inv_eps = 1.0 / eps
        p2 = (eps - 1) * q2
    else:
        raise TypeError(f"unsupported medium {type(medium).__name__}")
    km = np.sqrt(kap**2 + p2)
    r_tm = (kap - km * inv_eps) / (kap + km * inv_eps)
    r_te = (kap - km) / (kap + km)
    if return_kappa:
        return r_tm, r_te, km
    return r_tm, r_te


def _trace_imag_integrand(medium, xi, kap):
    r_tm, r_te = _imag_axis_reflection(medium, xi, kap)
    q2 = (xi / c) ** 2
    return (2 * kap**2 - q2) * r_tm - q2 * r_te


def green_trace_imag(L, xi, medium, quad: QuadratureOptions = DEFAULT_QUAD):
    """Tr G(L, i xi) by adaptive quadrature (reference route).

    Returns a real number in units of 1/(eps0 m^3).
    """
    _check_L(L)
    if xi < 0:
        raise DomainError("xi must be >= 0")
    q = xi / c
    scale = 1.0 / (2 * L)

    def f(t):
        return float(_trace_imag_integrand(medium, xi, q + t * scale)) * math.exp(-t)

    val, err = integrate.quad(f, 0, np.inf, epsrel=quad.rtol, epsabs=0, limit=quad.limit)
    if not np.isfinite(val) or abs(err) > 10 * quad.rtol * abs(val) + 1e-300:
        raise ConvergenceError(
            "imaginary-axis Green trace did not converge", {"L": L, "xi": xi, "estimate": val, "error": err}
        )
    return val * scale * math.exp(-2 * q * L) / FOUR_PI_EPS0


_LAGUERRE_CACHE: dict = {}


def _laguerre(n):
    if n not in _LAGUERRE_CACHE:
        _LAGUERRE_CACHE[n] = np.polynomial.laguerre.laggauss(n)
    return _LAGUERRE_CACHE[n]


def green_trace_imag_fast(L, xi, medium, quad: QuadratureOptions = DEFAULT_QUAD):
    """Vectorized Tr G(L, i xi) on a fixed Gauss-Laguerre rule in 2 kappa L.

    Accepts an array of ``xi``; agrees with :func:`green_trace_imag` to
    better than 1e-9 relative for Drude metals at 1 nm < L < 100 um.
    """
    _check_L(L)
    xi = np.asarray(xi, dtype=float)
    t, w = _laguerre(quad.laguerre_nodes)
    xx = xi[..., None]
    q = xx / c
    kap = q + t / (2 * L)
    vals = _trace_imag_integrand(medium, xx, kap) @ w
    return vals * np.exp(-2 * xi / c * L) / (2 * L) / FOUR_PI_EPS0


def _characteristic_scales(L, atom, medium):
    scales = [c / (2 * L)]
    if isinstance(atom, TwoLevelAtom):
        scales.append(atom.transition_frequency)
    else:
        scales.extend(tr.frequency for tr in atom.transitions)
    metal = medium.film if isinstance(medium, LayerStack) else medium
    if isinstance(metal, DrudeMetal):
        scales.append(metal.surface_plasmon_frequency)
        if metal.relaxation_rate > 0:
            scales.append(metal.relaxation_rate)
    return sorted(scales)


def _xi_integrand(L, atom, medium, quad):
    def f(xi):
        return float(atom.polarizability_imag(xi) * green_trace_imag_fast(L, xi, medium, quad))
    return f


def equilibrium_U_T0(L, atom, medium, quad: QuadratureOptions = DEFAULT_QUAD):
    """Zero-temperature Casimir-Polder energy -hbar/2pi int dxi alpha(i xi) Tr G(i xi)."""
    _check_L(L)
    scales = _characteristic_scales(L, atom, medium)
    f = _xi_integrand(L, atom, medium, quad)
    xi_c = 10 * max(scales) * quad.cutoff_scale
    pts = [s for s in scales if s < xi_c]
    head, e1 = integrate.quad(f, 0, xi_c, points=pts, epsrel=quad.rtol, epsabs=0, limit=quad.limit)
    tail, e2 = integrate.quad(f, xi_c, np.inf, epsrel=quad.rtol, epsabs=0.01 * quad.rtol * abs(head),
                              limit=quad.limit)
    total = head + tail
    if abs(e1) + abs(e2) > 10 * quad.rtol * abs(total):
        raise ConvergenceError("xi integral did not converge", {"L": L, "error": e1 + e2, "value": total})
    return -hbar / (2 * np.pi) * total


def equilibrium_U_finiteT(L, T, atom, medium, quad: QuadratureOptions = DEFAULT_QUAD, max_terms=200_000):
    """Matsubara sum -k_B T sum'_n alpha(i xi_n) Tr G(i xi_n), n = 0 term halved.

    The sum is carried out explicitly up to xi_N = 50 x (largest material
    scale); the remainder is added as an Euler-Maclaurin integral tail.  When
    the Matsubara spacing is so fine that the trapezoid error (spacing /
    smallest scale)^2 lies below ``quad.rtol``, the continuum (T = 0) integral
    is returned instead.
    """
    _check_L(L)
    if T < 0:
        raise DomainError("temperature must be >= 0")
    if T == 0:
        return equilibrium_U_T0(L, atom, medium, quad)
    h = 2 * np.pi * k_B * T / hbar
    scales = _characteristic_scales(L, atom, medium)
    if (h / min(scales)) ** 2 < quad.rtol:
        return equilibrium_U_T0(L, atom, medium, quad)
    xi_max = 50 * max(scales) * quad.cutoff_scale
    n_max = int(np.ceil(xi_max / h))
    if n_max > max_terms:
        raise ConvergenceError(
            "Matsubara sum needs too many terms", {"T": T, "L": L, "terms": n_max, "max_terms": max_terms}
        )
    total = 0.0
    block = 512
    for start in range(0, n_max + 1, block):
        n = np.arange(start, min(start + block, n_max + 1))
        xi = n * h
        vals = atom.polarizability_imag(xi) * green_trace_imag_fast(L, xi, medium, quad)
        if start == 0:
            vals[0] *= 0.5
        total += vals.sum()
    # remainder sum_{n > N} f(xi_n) ~ (1/h) int_{xi_N}^inf f - f(xi_N)/2
    f = _xi_integrand(L, atom, medium, quad)
    xi_n = n_max * h
    tail, _ = integrate.quad(f, xi_n, np.inf, epsrel=quad.rtol, epsabs=0.01 * quad.rtol * h * abs(total),
                             limit=quad.limit)
    total += tail / h - 0.5 * f(xi_n)
    return -k_B * T * total


def equilibrium_U(L, T, atom, medium, quad: QuadratureOptions = DEFAULT_QUAD):
    return equilibrium_U_finiteT(L, T, atom, medium, quad) if T > 0 else equilibrium_U_T0(L, atom, medium, quad)


# ---------------------------------------------------------------------------
# real axis


def _eps_scalar(medium, omega):
    if isinstance(medium, DrudeMetal):
        return 1 - medium.plasma_frequency**2 / (omega * (omega + 1j * medium.relaxation_rate))
    if isinstance(medium, ConstantDielectric):
        return complex(medium.eps)
    raise TypeError(f"real-frequency Green trace needs a half-space medium, got {type(medium).__name__}")


def _branch(z):
    s = cmath.sqrt(z)
    if s.real == 0 and s.imag > 0:
        s = -s
    return s


def _evanescent_part(L, omega, eps, quad):
    q0sq = (omega / c) ** 2
    a = (1 - eps) * q0sq
    scale = 1.0 / (2 * L)

    def f(t):
        kap = t * scale
        km = _branch(kap * kap + a)
        r_tm = (eps * kap - km) / (eps * kap + km)
        r_te = (kap - km) / (kap + km)
        return ((2 * kap * kap + q0sq) * r_tm + q0sq * r_te) * math.exp(-t)

    t_end = 80.0 * quad.cutoff_scale
    pts = []
    if eps.real < -1:
        t_sp = 2 * L * math.sqrt(q0sq / (-(1 + eps.real)))
        if t_sp < t_end:
            pts.append(t_sp)
    if eps.real > 1:
        t_b = 2 * L * math.sqrt((eps.real - 1) * q0sq)
        if t_b < t_end:
            pts.append(t_b)
    v1, e1 = integrate.quad(f, 0, t_end, points=pts or None, epsrel=quad.rtol, epsabs=0,
                            limit=quad.limit, complex_func=True)
    v2, e2 = integrate.quad(f, t_end, np.inf, epsrel=quad.rtol, epsabs=0.01 * quad.rtol * abs(v1),
                            limit=quad.limit, complex_func=True)
    return (v1 + v2) * scale


def _propagating_part(L, omega, eps, quad):
    q0 = omega / c
    q0sq = q0 * q0

    def g(q):
        kap = -1j * q
        km = _branch(q0sq * (1 - eps) - q * q)
        r_tm = (eps * kap - km) / (eps * kap + km)
        r_te = (kap - km) / (kap + km)
        return (q0sq - 2 * q * q) * r_tm + q0sq * r_te

    edges = [0.0, q0]
    if 0 < eps.real < 1:
        edges.insert(1, q0 * math.sqrt(1 - eps.real))
    total = 0j
    for a, b in zip(edges[:-1], edges[1:]):
        kw = dict(epsrel=quad.rtol, epsabs=0, limit=quad.limit, complex_func=True)
        if 2 * L * (b - a) > 4 * np.pi:
            cos_part, _ = integrate.quad(g, a, b, weight="cos", wvar=2 * L, **kw)
            sin_part, _ = integrate.quad(g, a, b, weight="sin", wvar=2 * L, **kw)
            total += cos_part + 1j * sin_part
        else:
            val, _ = integrate.quad(lambda q: g(q) * cmath.exp(2j * q * L), a, b, **kw)
            total += val
    return 1j * total


def green_trace_real(L, omega, medium, quad: QuadratureOptions = DEFAULT_QUAD):
    """Complex Tr G(L, omega) at real omega > 0 (half-space media only).

    The k-integral is split at the light line.  Evanescent waves (k > w/c) are
    integrated in kappa; propagating waves (k < w/c) in q = sqrt(w^2/c^2 - k^2)
    with the oscillating factor exp(2 i q L) handled by a Fourier-weighted rule.
    A lossless metal has a real plasmon pole below Omega_sp and is rejected.
    """
    _check_L(L)
    if not omega > 0:
        raise DomainError("omega must be > 0")
    eps = complex(_eps_scalar(medium, omega))
    if eps.imag == 0 and eps.real < -1:
        raise PoleError("lossless medium: plasmon pole on the real k axis", location=omega)
    total = _evanescent_part(L, omega, eps, quad) + _propagating_part(L, omega, eps, quad)
    return complex(total) / FOUR_PI_EPS0


def green_trace_complex(L, omega, medium, quad: QuadratureOptions = DEFAULT_QUAD):
    """Tr G(L, omega) for complex omega with Re, Im > 0, integrated along real k."""
    _check_L(L)
    omega = complex(omega)
    eps = complex(medium.permittivity_complex(omega)) if not isinstance(medium, ConstantDielectric) \
        else complex(medium.eps)
    w2 = (omega / c) ** 2
    k0 = omega.real / c

    def f(k):
        kap = cmath.sqrt(k * k - w2)
        km = cmath.sqrt(k * k - eps * w2)
        r_tm = (eps * kap - km) / (eps * kap + km)
        r_te = (kap - km) / (kap + km)
        return k * (kap * r_tm + k * k / kap * r_tm + w2 / kap * r_te) * cmath.exp(-2 * kap * L)

    kw = dict(epsrel=quad.rtol, epsabs=0, limit=quad.limit, complex_func=True)
    v1, _ = integrate.quad(f, 0, k0, **kw)
    k_end = k0 + 80.0 * quad.cutoff_scale / (2 * L)
    v2, _ = integrate.quad(f, k0, k_end, **kw)
    v3, _ = integrate.quad(f, k_end, np.inf, **dict(kw, epsabs=0.01 * quad.rtol * abs(v1 + v2)))
    return (v1 + v2 + v3) / FOUR_PI_EPS0


# ---------------------------------------------------------------------------
# field / atom decomposition


def atom_term(L, atom: TwoLevelAtom, medium, quad: QuadratureOptions = DEFAULT_QUAD):
    """U_a = -(hbar omega_a / 4) alpha_g(0) Re Tr G(omega_a).

    Independent of both temperatures: coth(hbar w_a / 2 k T_a) cancels the
    tanh in the thermal polarizability.
    """
    g = green_trace_real(L, atom.transition_frequency, medium, quad)
    return -0.25 * hbar * atom.transition_frequency * atom.static_polarizability * g.real


def _metal_scales(medium):
    if isinstance(medium, DrudeMetal):
        return [medium.surface_plasmon_frequency, medium.plasma_frequency]
    return []


def field_term_real_axis(L, T_f, atom: TwoLevelAtom, medium, quad: QuadratureOptions = DEFAULT_QUAD,
                         diagnostics=None):
    """U_f = -(hbar/2pi) alpha^(Ta)(0) P int_0^inf dw coth(hbar w/2kT_f) w_a^2/(w_a^2-w^2) Im Tr G(w).

    The principal value at w_a uses a Cauchy-weighted rule on a window
    around the pole.  The integral is taken along the real axis up to
    W = 2 max(w_a, Omega_P) x cutoff_scale; the remainder from W to infinity
    is evaluated on the vertical ray w = W + i y, where the integrand is
    analytic and decays exponentially, because on the real axis Im Tr G
    keeps oscillating with an amplitude that decays only algebraically.
    """
    _check_L(L)
    wa = atom.transition_frequency
    a0 = thermal_static(atom)
    scales = _metal_scales(medium)
    W = 2 * max([wa] + scales) * quad.cutoff_scale

    def im_g(w):
        return green_trace_real(L, w, medium, quad).imag

    def weight(w):
        return float(coth_thermal(w, T_f)) * wa * wa

    near = [s for s in scales if abs(s - wa) > 0]
    gap = min([wa] + [abs(s - wa) for s in near])
    h = 0.5 * gap
    kw = dict(epsrel=quad.rtol, epsabs=0, limit=quad.limit)

    def regular(w):
        return weight(w) * im_g(w) / (wa * wa - w * w)

    pts_lo = [s for s in scales if s < wa - h]
    pts_hi = [s for s in scales if wa + h < s < W]
    # the 1/(w_a^2 - w^2) pole is written as -1/((w - w_a)(w + w_a)) for the Cauchy rule
    pv, e_pv = integrate.quad(lambda w: -weight(w) * im_g(w) / (w + wa), wa - h, wa + h,
                              weight="cauchy", wvar=wa, **kw)
    lo, e_lo = integrate.quad(regular, 0, wa - h, points=pts_lo or None, **kw)
    hi, e_hi = integrate.quad(regular, wa + h, W, points=pts_hi or None, **kw)

    def ray(y):
        w = complex(W, y)
        if T_f > 0:
            x = hbar * w / (2 * k_B * T_f)
            ct = 1 / cmath.tanh(x) if abs(x.real) < 40 else 1.0
        else:
            ct = 1.0
        val = ct * wa * wa / (wa * wa - w * w) * green_trace_complex(L, w, medium, quad)
        return (1j * val).imag

    # the ray integrand falls off like exp(-2 y L / c)
    y_end = 40 * c / (2 * L) * quad.cutoff_scale
    t1, e1 = integrate.quad(ray, 0, y_end, **kw)
    t2, e2 = integrate.quad(ray, y_end, np.inf, **dict(kw, epsabs=0.01 * quad.rtol * abs(t1)))
    tail, e_tail = t1 + t2, e1 + e2
    total = lo + pv + hi + tail
    if diagnostics is not None:
        diagnostics.update(window=h, cutoff=W, pieces=(lo, pv, hi, tail),
                           errors=(e_lo, e_pv, e_hi, e_tail))
    return -hbar / (2 * np.pi) * a0 * total


def delta_rotated(L, atom: TwoLevelAtom, medium, T=0.0, quad: QuadratureOptions = DEFAULT_QUAD):
    """Delta = U/2 + (hbar alpha_g(0) omega_a / 4) Re Tr G(omega_a)."""
    if T != 0:
        warnings.warn("the rotated form is exact only at equilibrium; using U(T) with T_a = T_f = T",
                      stacklevel=2)
    U = equilibrium_U(L, T, atom, medium, quad)
    return U / 2 - atom_term(L, atom, medium, quad)


def delta_real_axis(L, T, atom: TwoLevelAtom, medium, quad: QuadratureOptions = DEFAULT_QUAD):
    """Delta = -hbar/4pi int dw coth Im Tr[alpha* G] evaluated on the real axis.

    Splitting alpha* into its principal part and its delta weight gives
    Delta = (U_f - U_a)/2 with both terms at the same temperature.
    """
    return 0.5 * (field_term_real_axis(L, T, atom, medium, quad) - atom_term(L, atom, medium, quad))


def split_energies(L, T, atom: TwoLevelAtom, medium, quad: QuadratureOptions = DEFAULT_QUAD) -> EnergySplit:
    """Equilibrium U(T) with its field/atom decomposition (rotated route)."""
    U = equilibrium_U(L, T, atom, medium, quad)
    Ua = atom_term(L, atom, medium, quad)
    return EnergySplit(total=U, delta=U / 2 - Ua)


def nonretarded_split(L, T_f, T_a, atom: TwoLevelAtom, surface_plasmon_frequency=None,
                      refractive_index=None):
    """Near-field closed forms for (U_f, U_a).

    With ``surface_plasmon_frequency`` the surface is a lossless Drude metal.
    With ``refractive_index`` instead it is a nondispersive dielectric: the
    field term vanishes and the atom term carries r = (n^2-1)/(n^2+1).
    """
    _check_L(L)
    wa = atom.transition_frequency
    a_ta = thermal_static(replace(atom, temperature=T_a))
    pref = a_ta / (2 * FOUR_PI_EPS0 * L**3)
    coth_a = float(coth_thermal(wa, T_a))
    if refractive_index is not None:
        n2 = refractive_index**2
        return 0.0, -0.25 * hbar * wa * coth_a * (n2 - 1) / (n2 + 1) * pref
    ws = surface_plasmon_frequency
    if ws is None or not ws > 0:
        raise DomainError("need a positive surface-plasmon frequency or a refractive index")
    if ws == wa:
        raise PoleError("atomic frequency equals the surface-plasmon frequency", location=wa)
    coth_f = float(coth_thermal(ws, T_f))
    u_f = 0.25 * hbar * ws * coth_f * wa**2 / (ws**2 - wa**2) * pref
    u_a = -0.25 * hbar * wa * coth_a * ws**2 / (ws**2 - wa**2) * pref
    return u_f, u_a
