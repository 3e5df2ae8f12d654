"""Total out-of-equilibrium potentials and their features.

A :class:`PotentialConfig` fixes the ambient temperature, the atom, the
Casimir-Polder medium, an optional plasmon-branch temperature and up to two
laser beams.  :func:`total_potential` adds the pieces, :func:`find_barrier`
and :func:`find_well` extract features from sampled curves, and the sweep
functions drive parameter scans.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import interpolate, optimize

from .errors import DomainError
from .laser import AVERAGING_THRESHOLD, LaserBeam, one_laser_potential, two_laser_potential
from .materials import LayerStack, tir_angle
from .potentials import DEFAULT_QUAD, QuadratureOptions, equilibrium_U
from .spectral import ImbalanceConfig, imbalanced_total

# feature searches start here; closer in the Casimir-Polder divergence dominates
L_MIN = 20e-9
# last grid point, used as the far-field reference for well depths
L_FAR = 5e-6
MIN_CURVE_POINTS = 50


@dataclass(frozen=True)
class PotentialConfig:
    """Everything that enters U_oe(L, x).

    ``medium`` is the body used for the equilibrium Casimir-Polder energy and
    ``stack`` the glass/film/vacuum structure the beams are sent through.
    ``time_averaged=None`` lets the beam detuning decide.
    """

    temperature: float
    atom: object
    medium: object
    stack: Optional[LayerStack] = None
    beams: tuple = ()
    plasmon_temperature: Optional[float] = None
    time: float = 0.0
    time_averaged: Optional[bool] = None
    include_casimir_polder: bool = True
    quad: QuadratureOptions = DEFAULT_QUAD

    def __post_init__(self):
        object.__setattr__(self, "beams", tuple(self.beams))
        if len(self.beams) > 2:
            raise DomainError("at most two laser beams are supported")
        if self.beams and self.stack is None:
            raise DomainError("laser beams need a layer stack")
        if self.temperature < 0:
            raise DomainError("temperature must be >= 0")

    def with_beam(self, index, **changes):
        beams = list(self.beams)
        beams[index] = replace(beams[index], **changes)
        return replace(self, beams=tuple(beams))


@dataclass(frozen=True)
class PotentialCurve:
    """U(L) sampled on a strictly increasing grid, optionally with its evaluator."""

    L: np.ndarray
    U: np.ndarray
    metadata: dict = field(default_factory=dict)
    evaluator: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        L = np.asarray(self.L, dtype=float)
        U = np.asarray(self.U, dtype=float)
        if L.ndim != 1 or L.shape != U.shape:
            raise DomainError("L and U must be 1-D arrays of equal length")
        if np.any(np.diff(L) <= 0):
            raise DomainError("L grid must be strictly increasing")
        if not np.all(np.isfinite(U)):
            raise DomainError("potential values must be finite")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "U", U)


@dataclass(frozen=True)
class Feature:
    L: float
    U: float


@dataclass(frozen=True)
class FeatureReport:
    """Barrier maximum and well minimum (with depth U(L_far) - U_min), either may be absent."""

    barrier: Optional[Feature] = None
    well: Optional[Feature] = None
    well_depth: float = 0.0

    def __post_init__(self):
        if self.barrier is not None and self.well is not None and not self.barrier.L < self.well.L:
            raise DomainError("barrier must lie closer to the surface than the well")


@dataclass
class PotentialMap:
    """Values on a 1-D or 2-D parameter grid; failed points hold NaN and an entry in ``errors``."""

    axes: tuple
    values: np.ndarray
    features: Optional[np.ndarray] = None
    errors: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# equilibrium profile


class EquilibriumProfile:
    """Cubic spline of log(-U) against log L for the equilibrium energy."""

    def __init__(self, temperature, atom, medium, L_range=(1e-8, 1e-5), points=121,
                 quad: QuadratureOptions = DEFAULT_QUAD):
        self.L_range = L_range
        grid = np.geomspace(L_range[0], L_range[1], points)
        U = np.array([equilibrium_U(L, temperature, atom, medium, quad) for L in grid])
        if np.any(U >= 0):
            raise DomainError("equilibrium energy is not attractive on the whole grid")
        self._spline = interpolate.CubicSpline(np.log(grid), np.log(-U))

    def __call__(self, L):
        L = np.asarray(L, dtype=float)
        if np.any(L < self.L_range[0] * (1 - 1e-12)) or np.any(L > self.L_range[1] * (1 + 1e-12)):
            raise DomainError("L outside the tabulated equilibrium range")
        out = -np.exp(self._spline(np.log(L)))
        return out if out.ndim else float(out)


@lru_cache(maxsize=32)
def equilibrium_profile(temperature, atom, medium, quad: QuadratureOptions = DEFAULT_QUAD):
    return EquilibriumProfile(temperature, atom, medium, quad=quad)


# ---------------------------------------------------------------------------


def laser_potential(L, config: PotentialConfig, x=0.0):
    """Sum of the configured laser terms at (x, L), J."""
    b = config.beams
    if not b:
        return np.zeros(np.broadcast(np.asarray(L), np.asarray(x)).shape) if np.ndim(L) or np.ndim(x) else 0.0
    if len(b) == 1:
        out = one_laser_potential(b[0], config.stack, config.atom, L)
        return out + 0 * np.asarray(x) if np.ndim(x) else out
    averaged = config.time_averaged
    if averaged is None:
        averaged = abs(b[0].omega - b[1].omega) > AVERAGING_THRESHOLD
    return two_laser_potential(b[0], b[1], config.stack, config.atom, x, L, t=config.time,
                               time_averaged=averaged)


def base_potential(L, config: PotentialConfig, exact=False):
    """Equilibrium energy, with the plasmon-branch swap when T_sp differs from T."""
    if not config.include_casimir_polder:
        return np.zeros(np.shape(L)) if np.ndim(L) else 0.0
    T, T_sp = config.temperature, config.plasmon_temperature
    if T_sp is not None and T_sp != T:
        cfg = ImbalanceConfig(T, T_sp)
        vals = [imbalanced_total(float(l), cfg, config.atom, config.medium, config.quad)
                for l in np.atleast_1d(L)]
        return np.array(vals) if np.ndim(L) else vals[0]
    if exact:
        vals = [equilibrium_U(float(l), T, config.atom, config.medium, config.quad) for l in np.atleast_1d(L)]
        return np.array(vals) if np.ndim(L) else vals[0]
    return equilibrium_profile(T, config.atom, config.medium, config.quad)(L)


def total_potential(L, config: PotentialConfig, x=0.0, exact=False):
    """U_oe(L, x) = equilibrium (or imbalanced) energy + laser terms, in J.

    With ``exact=False`` the equilibrium part comes from a cached spline
    (relative error ~1e-6); ``exact=True`` evaluates it directly.
    """
    L = np.asarray(L, dtype=float)
    if np.any(L <= 0):
        raise DomainError("L must be positive")
    out = base_potential(L, config, exact) + laser_potential(L, config, x)
    return out if np.ndim(out) else float(out)


def default_grid(points=120, L_min=L_MIN, L_far=L_FAR):
    return np.geomspace(L_min, L_far, points)


def potential_curve(config: PotentialConfig, L=None, x=0.0):
    L = default_grid() if L is None else np.asarray(L, dtype=float)
    return PotentialCurve(L, total_potential(L, config, x), {"config": config, "x": x},
                          evaluator=lambda l: float(total_potential(l, config, x)))


def _golden_refine(curve: PotentialCurve, i, sign):
    """Refine a grid extremum in log L; sign = +1 for a maximum, -1 for a minimum."""
    if curve.evaluator is None:
        return Feature(float(curve.L[i]), float(curve.U[i]))
    a, b, m = math.log(curve.L[i - 1]), math.log(curve.L[i + 1]), math.log(curve.L[i])
    f = lambda s: -sign * curve.evaluator(math.exp(s))
    try:
        s = optimize.golden(f, brack=(a, m, b), tol=1e-5)
    except ValueError:
        return Feature(float(curve.L[i]), float(curve.U[i]))
    s = min(max(s, a), b)
    val = curve.evaluator(math.exp(s))
    if sign * (val - curve.U[i]) < 0:
        return Feature(float(curve.L[i]), float(curve.U[i]))
    return Feature(math.exp(s), float(val))


def _search_window(curve):
    if curve.L.size < MIN_CURVE_POINTS:
        raise DomainError(f"feature search needs at least {MIN_CURVE_POINTS} grid points")
    start = int(np.searchsorted(curve.L, L_MIN * (1 - 1e-12)))
    return start


def find_barrier(curve: PotentialCurve) -> FeatureReport:
    """Global maximum of U(L) for L >= L_MIN, if positive and interior.

    Ties go to the smallest L.
    """
    start = _search_window(curve)
    U = curve.U[start:]
    i = start + int(np.argmax(U))
    if curve.U[i] <= 0 or i == start or i == curve.L.size - 1:
        return FeatureReport()
    return FeatureReport(barrier=_golden_refine(curve, i, +1))


def find_well(curve: PotentialCurve) -> FeatureReport:
    """Deepest interior local minimum lying beyond a local maximum.

    The depth is U(L_far) - U_min with L_far the last grid point; wells with
    non-positive depth are reported as absent.
    """
    start = _search_window(curve)
    U = curve.U
    n = U.size
    best = None
    seen_max = None
    for j in range(start + 1, n - 1):
        if U[j] >= U[j - 1] and U[j] > U[j + 1]:
            if seen_max is None or U[j] > U[seen_max]:
                seen_max = j
        elif U[j] < U[j - 1] and U[j] <= U[j + 1] and seen_max is not None:
            if best is None or U[j] < U[best]:
                best = j
    if best is None:
        return FeatureReport()
    well = _golden_refine(curve, best, -1)
    depth = float(U[-1] - well.U)
    if depth <= 0:
        return FeatureReport()
    # barrier: highest point between the search start and the well
    k = start + int(np.argmax(U[start:best]))
    barrier = _golden_refine(curve, k, +1) if start < k < best else None
    if barrier is not None and barrier.U <= well.U:
        barrier = None
    return FeatureReport(barrier=barrier, well=well, well_depth=depth)


def features(curve: PotentialCurve) -> FeatureReport:
    w = find_well(curve)
    if w.well is not None:
        return w
    return find_barrier(curve)


# ---------------------------------------------------------------------------
# sweeps

# axis names -> (beam index, field); offsets are measured from the TIR angle
_BEAM_AXES = {
    "theta_i": (0, "theta"), "theta_b": (0, "theta"), "theta_r": (1, "theta"),
    "theta1": (0, "theta"), "theta2": (1, "theta"),
    "offset_i": (0, "offset"), "offset_b": (0, "offset"), "offset_r": (1, "offset"),
    "offset1": (0, "offset"), "offset2": (1, "offset"),
    "P_b": (0, "power"), "P_r": (1, "power"), "power1": (0, "power"), "power2": (1, "power"),
    "omega_l": (0, "omega"), "omega1": (0, "omega"), "omega2": (1, "omega"),
    "phase1": (0, "phase"), "phase2": (1, "phase"),
}
POSITION_AXES = ("x", "L")


def apply_axis(config: PotentialConfig, name, value):
    """Return ``config`` with the swept parameter set (angles in rad)."""
    if name == "temperature":
        return replace(config, temperature=float(value))
    if name == "plasmon_temperature":
        return replace(config, plasmon_temperature=float(value))
    if name not in _BEAM_AXES:
        raise DomainError(f"unknown sweep axis {name!r}")
    idx, attr = _BEAM_AXES[name]
    if idx >= len(config.beams):
        raise DomainError(f"axis {name!r} needs beam {idx + 1}")
    if attr == "offset":
        beam = config.beams[idx]
        return config.with_beam(idx, theta=tir_angle(config.stack.glass, beam.omega) + float(value))
    return config.with_beam(idx, **{attr: float(value)})


def _evaluate_point(config, quantity, L_grid, x):
    curve = potential_curve(config, L_grid, x)
    if quantity == "barrier":
        rep = find_barrier(curve)
        return (rep.barrier.U if rep.barrier else 0.0), rep
    if quantity == "well":
        rep = find_well(curve)
        return rep.well_depth, rep
    raise DomainError(f"unknown quantity {quantity!r}")


def _run(points, fn, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, points))
    return [fn(p) for p in points]


def _safe(fn):
    def wrapped(p):
        try:
            return fn(p), None
        except (DomainError, ArithmeticError, RuntimeError) as exc:
            return None, f"{type(exc).__name__}: {exc}"
    return wrapped


def sweep_1d(axis: str, values: Sequence[float], config: PotentialConfig, quantity="barrier",
             L_grid=None, x=0.0, threads=1) -> PotentialMap:
    """Feature value (barrier height or well depth, J) along one parameter axis."""
    values = np.asarray(values, dtype=float)
    fn = _safe(lambda v: _evaluate_point(apply_axis(config, axis, v), quantity, L_grid, x))
    res = _run(list(values), fn, threads)
    out = np.full(values.size, np.nan)
    feats = np.empty(values.size, dtype=object)
    errors = {}
    for i, (r, err) in enumerate(res):
        if err is not None:
            errors[(i,)] = err
        else:
            out[i], feats[i] = r
    return PotentialMap(((axis, values),), out, feats, errors)


def sweep_2d(axis1, values1, axis2, values2, config: PotentialConfig, quantity="barrier",
             L_grid=None, x=0.0, threads=1) -> PotentialMap:
    """Feature map over two parameter axes, or U itself over the (x, L) plane.

    If both axes are positions ("x" and "L") the total potential is
    evaluated directly on the grid.
    """
    v1 = np.asarray(values1, dtype=float)
    v2 = np.asarray(values2, dtype=float)
    if {axis1, axis2} == set(POSITION_AXES):
        xs, Ls = (v1, v2) if axis1 == "x" else (v2, v1)
        X, LL = np.meshgrid(xs, Ls, indexing="ij")
        U = total_potential(LL, config, X)
        if axis1 != "x":
            U = U.T
        return PotentialMap(((axis1, v1), (axis2, v2)), np.asarray(U))
    pts = [(a, b) for a in v1 for b in v2]
    fn = _safe(lambda p: _evaluate_point(apply_axis(apply_axis(config, axis1, p[0]), axis2, p[1]),
                                         quantity, L_grid, x))
    res = _run(pts, fn, threads)
    out = np.full(len(pts), np.nan)
    feats = np.empty(len(pts), dtype=object)
    errors = {}
    for n, (r, err) in enumerate(res):
        if err is not None:
            errors[divmod(n, v2.size)] = err
        else:
            out[n], feats[n] = r
    return PotentialMap(((axis1, v1), (axis2, v2)), out.reshape(v1.size, v2.size),
                        feats.reshape(v1.size, v2.size), errors)
