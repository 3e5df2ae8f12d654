"""Command-line front end: ``noneqcp <subcommand> --config run.yaml``.

Exit codes: 0 ok, 2 configuration error, 3 numerical tolerance failure,
4 data-table or domain error.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from dataclasses import replace

import numpy as np

from . import config as cfgmod
from .atom import TwoLevelAtom
from .errors import ConfigError, ConvergenceError, DomainError, PoleError
from .landscape import PotentialConfig, sweep_1d, sweep_2d, total_potential
from .units import c, joule_to_microkelvin

log = logging.getLogger("noneqcp")

EXIT_OK, EXIT_CONFIG, EXIT_TOLERANCE, EXIT_DOMAIN = 0, 2, 3, 4
SUBCOMMANDS = ("dispersion", "split", "imbalance", "laser1", "laser2", "lattice", "verify")


class Table:
    """Column-oriented result with units carried in the column names."""

    def __init__(self, columns, rows, meta=None):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.meta = dict(meta or {})


def _fmt(v):
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    return f"{v:.12g}"


def render_csv(table: Table, run: cfgmod.RunConfig, command) -> str:
    buf = io.StringIO()
    buf.write(f"# noneqcp {command}\n")
    buf.write(f"# config_sha256: {run.digest}\n")
    buf.write(f"# config: {json.dumps(run.raw, sort_keys=True, separators=(',', ':'))}\n")
    for k in sorted(table.meta):
        buf.write(f"# {k}: {_fmt(table.meta[k])}\n")
    buf.write(",".join(table.columns) + "\n")
    for r in table.rows:
        buf.write(",".join(_fmt(v) for v in r) + "\n")
    return buf.getvalue()


def render_json(table: Table, run: cfgmod.RunConfig, command) -> str:
    def clean(v):
        if isinstance(v, str):
            return v
        v = float(v)
        return None if math.isnan(v) else float(_fmt(v))

    doc = {
        "command": command,
        "config_sha256": run.digest,
        "config": run.raw,
        "meta": {k: clean(v) for k, v in sorted(table.meta.items())},
        "columns": table.columns,
        "data": [[clean(v) for v in r] for r in table.rows],
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _energy_columns(name, unit_mode):
    if unit_mode == "J":
        return [f"{name}_J"]
    if unit_mode == "uK":
        return [f"{name}_uK"]
    return [f"{name}_J", f"{name}_uK"]


def _energy_values(value, unit_mode):
    if unit_mode == "J":
        return [value]
    if unit_mode == "uK":
        return [joule_to_microkelvin(value)]
    return [value, joule_to_microkelvin(value)]


def _axis(run, name, default):
    for a in run.axes:
        if a.name == name:
            return np.array(a.values)
    return default


def _two_level(run):
    if not isinstance(run.atom, TwoLevelAtom):
        raise ConfigError("this subcommand needs atom.model = two_level")
    return run.atom


# ---------------------------------------------------------------------------
# subcommands


def cmd_dispersion(run, threads):
    from .spectral import omega_sp, residue

    wp = run.metal.plasma_frequency
    k = _axis(run, "k", np.linspace(0.02, 10, 200) * wp / c)
    rows = [[kk, omega_sp(kk, wp), residue(run.L, kk, wp)] for kk in k]
    return Table(["k_rad_per_m", "omega_sp_rad_s", "residue_F_per_m_s"], rows, {"L_m": run.L})


def cmd_split(run, threads):
    from .potentials import atom_term, equilibrium_U

    atom = _two_level(run)
    L = _axis(run, "L", np.geomspace(10e-9, 10e-6, 40))
    T = run.temperature
    lam_p = run.metal.plasma_wavelength
    U0 = equilibrium_U(lam_p, T, atom, run.metal, run.quad)
    rows = []
    for l in L:
        U = equilibrium_U(l, T, atom, run.metal, run.quad)
        Ua = atom_term(l, atom, run.metal, run.quad)
        Uf = U - Ua
        rows.append([l, *_energy_values(U, run.energy_unit), *_energy_values(Uf, run.energy_unit),
                     *_energy_values(Ua, run.energy_unit), U / U0, Uf / U0, Ua / U0])
    cols = (["L_m"] + _energy_columns("U", run.energy_unit) + _energy_columns("U_f", run.energy_unit)
            + _energy_columns("U_a", run.energy_unit) + ["U_over_U0_1", "U_f_over_U0_1", "U_a_over_U0_1"])
    return Table(cols, rows, {"U0_J": U0, "L0_m": lam_p})


def cmd_imbalance(run, threads):
    from .spectral import ImbalanceConfig, imbalanced_total

    atom = _two_level(run)
    if run.metal.relaxation_rate > 0:
        log.warning("metal has Gamma > 0: U(T) uses it, the plasmon-branch swap uses the lossless dispersion")
    L = _axis(run, "L", np.geomspace(50e-9, 5e-6, 40))
    cols = ["L_m"]
    for tsp in run.plasmon_temperatures:
        cols += _energy_columns(f"U_oe_Tsp{tsp:g}K", run.energy_unit)
    rows = []
    for l in L:
        row = [l]
        for tsp in run.plasmon_temperatures:
            u = imbalanced_total(l, ImbalanceConfig(run.temperature, tsp), atom, run.metal, run.quad)
            row += _energy_values(u, run.energy_unit)
        rows.append(row)
    return Table(cols, rows, {"T_K": run.temperature})


def _potential_config(run, beams):
    return PotentialConfig(run.temperature, run.atom, run.metal, run.stack, tuple(beams),
                           time=run.time, time_averaged=run.time_averaged, quad=run.quad)


def _axis_value_out(axis, v):
    return math.degrees(v) if axis.is_angle else v


def _axis_column(axis):
    if axis.is_angle:
        return f"{axis.name}_deg"
    units = {"L": "m", "x": "m", "omega_l": "rad_s", "omega1": "rad_s", "omega2": "rad_s",
             "P_b": "W", "P_r": "W", "power1": "W", "power2": "W", "phase1": "rad", "phase2": "rad",
             "temperature": "K", "plasmon_temperature": "K"}
    return f"{axis.name}_{units.get(axis.name, '1')}"


def _laser_table(run, pcfg, threads):
    axes = run.axes
    if not axes:
        raise ConfigError("scan.axes is required for laser scans")
    names = [a.name for a in axes]
    if run.quantity == "potential" or "L" in names or "x" in names:
        # direct potential map
        if len(axes) == 1:
            a = axes[0]
            vals = np.array(a.values)
            if a.name == "L":
                U = total_potential(vals, pcfg, run.x)
            elif a.name == "x":
                U = total_potential(run.L, pcfg, vals)
            else:
                raise ConfigError("a one-axis potential scan must run over L or x")
            rows = [[_axis_value_out(a, v), *_energy_values(u, run.energy_unit)] for v, u in zip(vals, U)]
            return Table([_axis_column(a)] + _energy_columns("U_oe", run.energy_unit), rows)
        a1, a2 = axes
        if {a1.name, a2.name} == {"x", "L"}:
            m = sweep_2d(a1.name, a1.values, a2.name, a2.values, pcfg)
        else:
            pos, par = (a1, a2) if a1.name in ("x", "L") else (a2, a1)
            if par.name in ("x", "L"):
                raise ConfigError("axes must be (x, L) or one position plus one parameter")
            from .landscape import apply_axis
            data = np.empty((len(a1.values), len(a2.values)))
            for j, pv in enumerate(par.values):
                point_cfg = apply_axis(pcfg, par.name, pv)
                if pos.name == "L":
                    U = total_potential(np.array(pos.values), point_cfg, run.x)
                else:
                    U = total_potential(run.L, point_cfg, np.array(pos.values))
                if par is a1:
                    data[j, :] = U
                else:
                    data[:, j] = U
            from .landscape import PotentialMap
            m = PotentialMap(((a1.name, a1.values), (a2.name, a2.values)), data)
        rows = [[_axis_value_out(a1, v1), _axis_value_out(a2, v2), *_energy_values(m.values[i, j], run.energy_unit)]
                for i, v1 in enumerate(a1.values) for j, v2 in enumerate(a2.values)]
        return Table([_axis_column(a1), _axis_column(a2)] + _energy_columns("U_oe", run.energy_unit), rows)

    q = run.quantity
    label = "barrier_height" if q == "barrier" else "well_depth"
    if len(axes) == 1:
        a = axes[0]
        m = sweep_1d(a.name, a.values, pcfg, q, threads=threads)
        rows = []
        for i, v in enumerate(a.values):
            rep = m.features[i]
            feat = (rep.barrier if q == "barrier" else rep.well) if rep is not None else None
            rows.append([_axis_value_out(a, v), *_energy_values(m.values[i], run.energy_unit),
                         feat.L if feat else float("nan")])
        cols = [_axis_column(a)] + _energy_columns(label, run.energy_unit) + ["feature_L_m"]
    else:
        a1, a2 = axes
        m = sweep_2d(a1.name, a1.values, a2.name, a2.values, pcfg, q, threads=threads)
        rows = []
        for i, v1 in enumerate(a1.values):
            for j, v2 in enumerate(a2.values):
                rep = m.features[i, j]
                feat = (rep.barrier if q == "barrier" else rep.well) if rep is not None else None
                rows.append([_axis_value_out(a1, v1), _axis_value_out(a2, v2),
                             *_energy_values(m.values[i, j], run.energy_unit), feat.L if feat else float("nan")])
        cols = [_axis_column(a1), _axis_column(a2)] + _energy_columns(label, run.energy_unit) + ["feature_L_m"]
    for key, err in sorted(m.errors.items()):
        log.warning("point %s failed: %s", key, err)
    return Table(cols, rows, {"failed_points": float(len(m.errors))})


def cmd_laser1(run, threads):
    if len(run.beams) != 1:
        raise ConfigError("laser1 needs exactly one beam")
    return _laser_table(run, _potential_config(run, run.beams), threads)


def cmd_laser2(run, threads):
    if len(run.beams) != 2:
        raise ConfigError("laser2 needs exactly two beams")
    return _laser_table(run, _potential_config(run, run.beams), threads)


def cmd_lattice(run, threads):
    if len(run.beams) == 1:
        b = run.beams[0]
        beams = (b, replace(b, direction=-b.direction, phase=0.0))
    elif len(run.beams) == 2:
        beams = run.beams
        if beams[0].omega != beams[1].omega:
            raise ConfigError("lattice beams must share one frequency")
    else:
        raise ConfigError("lattice needs one beam (mirrored automatically) or two beams")
    if not run.axes:
        run = replace(run, axes=(cfgmod.Axis("x", tuple(np.linspace(0, 1.5e-6, 61))),
                                 cfgmod.Axis("L", tuple(np.geomspace(50e-9, 1e-6, 60)))))
    return _laser_table(run, _potential_config(run, beams), threads)


def cmd_verify(run, threads):
    """Fast oracle checks; raises ConvergenceError (exit 3) when any fails."""
    from .atom import rubidium_two_level
    from .laser import verify_thermal_decoupling
    from .materials import GOLD
    from .potentials import delta_real_axis, delta_rotated, nonretarded_split
    from .spectral import plasmonic_Ua, plasmonic_Uf

    rows = []
    metal = run.metal
    atom = rubidium_two_level(0.0)
    lam_p = metal.plasma_wavelength

    d_real = delta_real_axis(lam_p, 0.0, atom, metal, run.quad)
    d_rot = delta_rotated(lam_p, atom, metal, 0.0, run.quad)
    err = abs(d_real / d_rot - 1)
    rows.append(["delta_dual_route", err, 1e-4, "PASS" if err < 1e-4 else "FAIL"])

    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(10):
        amp, nu = rng.uniform(0, 3), rng.uniform(0, 3)
        beta = amp * np.exp(1j * rng.uniform(0, 2 * np.pi))
        n_half, a2 = verify_thermal_decoupling(beta, nu)
        worst = max(worst, abs(n_half - (amp**2 + nu + 0.5)), abs(a2 - beta**2))
    rows.append(["thermal_decoupling", worst, 1e-6, "PASS" if worst < 1e-6 else "FAIL"])

    L = lam_p / 100
    lossless = metal.lossless()
    uf_n, ua_n = nonretarded_split(L, 0.0, 0.0, atom, lossless.surface_plasmon_frequency)
    uf = plasmonic_Uf(L, 0.0, atom, lossless)
    ua = plasmonic_Ua(L, 0.0, atom, lossless)
    e_nf = max(abs(uf / uf_n - 1), abs(ua / ua_n - 1))
    rows.append(["plasmon_near_field", e_nf, 0.02, "PASS" if e_nf < 0.02 else "FAIL"])

    hot = rubidium_two_level(300.0)
    uf_r, ua_r = nonretarded_split(5e-9, 300.0, 300.0, hot, GOLD.surface_plasmon_frequency)
    e_ratio = abs(abs(uf_r / ua_r) - 0.25)
    rows.append(["nonretarded_ratio", e_ratio, 0.01, "PASS" if e_ratio < 0.01 else "FAIL"])

    table = Table(["check", "error_1", "tolerance_1", "status"], rows)
    for r in rows:
        print(f"{r[3]} {r[0]} error={r[1]:.3e} tol={r[2]:g}", file=sys.stderr)
    if any(r[3] == "FAIL" for r in rows):
        table.meta["failed"] = float(sum(r[3] == "FAIL" for r in rows))
    return table


COMMANDS = {
    "dispersion": cmd_dispersion, "split": cmd_split, "imbalance": cmd_imbalance,
    "laser1": cmd_laser1, "laser2": cmd_laser2, "lattice": cmd_lattice, "verify": cmd_verify,
}


def build_parser():
    p = argparse.ArgumentParser(prog="noneqcp", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=SUBCOMMANDS)
    p.add_argument("--config", help="YAML run configuration (defaults apply when omitted)")
    p.add_argument("--out", help="output file (default: output.path or stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="overrides output.format")
    p.add_argument("--threads", type=int, default=1, help="worker threads for parameter sweeps")
    p.add_argument("--verbose", "-v", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        raw = cfgmod.load_raw(args.config) if args.config else {}
        run = cfgmod.build(raw)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        log.info("running %s (config %s)", args.command, run.digest[:12])
        table = COMMANDS[args.command](run, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (DomainError, PoleError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    fmt = args.format or run.output_format
    text = (render_json if fmt == "json" else render_csv)(table, run, args.command)
    path = args.out or run.output_path
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
        log.info("wrote %s", path)
    else:
        sys.stdout.write(text)
    if args.command == "verify" and table.meta.get("failed"):
        return EXIT_TOLERANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
