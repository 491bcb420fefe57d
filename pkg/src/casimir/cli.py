"""Batch front end: parse a run configuration, sweep a solver, emit tables.

Subcommands ``plates``, ``sphere``, ``corrugation`` and ``onedim`` each read
a line-oriented ``key = value`` configuration with ``[section]`` headers
(sections: geometry, mirror1, mirror2, numerics), accept ``--set
section.key=value`` overrides, and write CSV or JSON sweep tables.

Unit suffixes: nm/um/m for lengths, K for temperatures, eV or rad/s for
frequencies (eV converted through hbar).  Exit codes: 0 success, 2
configuration error, 3 convergence failure (partial results are still
written), 4 I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .dielectric import (
    C_LIGHT,
    Drude,
    HBAR,
    Perfect,
    Plasma,
    gold_drude,
    gold_plasma,
    load_tabulated,
)
from .corrugation import PerfectReflectorKernel, pfa_ratio_curve, CorrugationSpec, lateral_force
from .matsubara import ConvergenceError, QuadratureSpec, thermal_sum_info
from .plates import PlateGeometry, _Integrand, casimir_pressure, free_energy_1d, lifshitz_free_energy
from .planesphere import (
    MultipoleTruncation,
    SphereGeometry,
    default_truncation,
    energy_force_gradient,
    casimir_force_sphere_fd,
    casimir_energy_sphere,
    pfa_reference,
)

_E_CHARGE = 1.602176634e-19

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4

GEOMETRIES = ("plates", "sphere", "corrugation", "onedim")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"config key '{key}': {message}")


def parse_quantity(key: str, text: str, dimension: str) -> float:
    """Parse '137nm', '300K', '9eV', '1.4e16rad/s' or a bare number."""
    s = text.strip()
    suffixes = {
        "length": (("nm", 1e-9), ("um", 1e-6), ("m", 1.0)),
        "temperature": (("K", 1.0),),
        "frequency": (("rad/s", 1.0), ("eV", _E_CHARGE / HBAR)),
        "plain": (),
    }
    for suffix, factor in suffixes.get(dimension, ()):
        if s.endswith(suffix):
            body = s[: -len(suffix)].strip()
            try:
                return float(body) * factor
            except ValueError:
                raise ConfigError(key, f"cannot parse number in {text!r}")
    try:
        return float(s)
    except ValueError:
        raise ConfigError(key, f"cannot parse {text!r} as a {dimension}")


def _positive(key, value):
    if not value > 0:
        raise ConfigError(key, "must be positive")
    return value


@dataclass
class RunConfig:
    """Validated sweep description for one geometry."""

    geometry: str
    mirror1: object
    mirror2: object
    temperature: float
    area: float
    sweep_variable: str
    grid: np.ndarray
    radius: float | None = None
    gap: float | None = None
    a1: float = 0.0
    a2: float = 0.0
    mismatch: float = 0.0
    r1: float = 0.0           # onedim constant amplitudes
    r2: float = 0.0
    spec: QuadratureSpec = field(default_factory=QuadratureSpec)
    ell_max: int | None = None
    nodes: int | None = None
    method: str = "analytic"
    raw: dict = field(default_factory=dict)


def _parse_sections(text: str):
    sections: dict[str, dict[str, str]] = {}
    current = None
    for lineno, line in enumerate(io.StringIO(text), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("[") and body.endswith("]"):
            current = body[1:-1].strip().lower()
            sections.setdefault(current, {})
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {body!r}")
        if current is None:
            raise ConfigError(f"line {lineno}", "key outside of any [section]")
        key, value = body.split("=", 1)
        sections[current][key.strip().lower()] = value.strip()
    return sections


def _build_mirror(section: dict, path: str):
    model = section.get("model", "perfect").lower()
    def freq(key, default=None):
        if key in section:
            return parse_quantity(f"{path}.{key}", section[key], "frequency")
        return default
    if model == "perfect":
        return Perfect()
    if model in ("gold_plasma", "gold"):
        return gold_plasma()
    if model == "gold_drude":
        return gold_drude()
    if model in ("plasma", "drude"):
        omega_p = freq("omega_p")
        if "lambda_p" in section:
            lam = _positive(f"{path}.lambda_p",
                            parse_quantity(f"{path}.lambda_p", section["lambda_p"], "length"))
            omega_p = 2.0 * math.pi * C_LIGHT / lam
        if omega_p is None:
            raise ConfigError(f"{path}.omega_p", "plasma/drude needs omega_p or lambda_p")
        if model == "plasma":
            return Plasma(omega_p=omega_p)
        gamma = freq("gamma")
        if gamma is None and "gamma_ratio" in section:
            gamma = omega_p * parse_quantity(f"{path}.gamma_ratio",
                                             section["gamma_ratio"], "plain")
        if gamma is None:
            raise ConfigError(f"{path}.gamma", "drude needs gamma or gamma_ratio")
        return Drude(omega_p=omega_p, gamma=gamma)
    if model == "tabulated":
        if "table" not in section:
            raise ConfigError(f"{path}.table", "tabulated model needs a data file")
        try:
            with open(section["table"], "rb") as fh:
                return load_tabulated(fh,
                                      omega_p=freq("omega_p", 0.0),
                                      gamma=freq("gamma", 0.0))
        except OSError as exc:
            raise ConfigError(f"{path}.table", f"cannot read file: {exc}")
    raise ConfigError(f"{path}.model", f"unknown mirror model {model!r}")


def _build_grid(geo: dict, kind: str):
    default_var = {"plates": "L", "sphere": "x", "corrugation": "kcL",
                   "onedim": "L"}[kind]
    var = geo.get("sweep", default_var)
    allowed = {"plates": ("L",), "sphere": ("x",), "corrugation": ("kcL",),
               "onedim": ("L",)}[kind]
    if var not in allowed:
        raise ConfigError("geometry.sweep", f"must be one of {allowed}")
    dim = "length" if var == "L" else "plain"
    if "sweep_values" in geo:
        vals = [parse_quantity("geometry.sweep_values", v, dim)
                for v in geo["sweep_values"].split(",") if v.strip()]
        grid = np.array(vals, dtype=float)
    else:
        missing = [k for k in ("sweep_start", "sweep_stop", "sweep_points")
                   if k not in geo]
        if missing:
            raise ConfigError(f"geometry.{missing[0]}", "required for a sweep")
        start = parse_quantity("geometry.sweep_start", geo["sweep_start"], dim)
        stop = parse_quantity("geometry.sweep_stop", geo["sweep_stop"], dim)
        npts = int(parse_quantity("geometry.sweep_points", geo["sweep_points"], "plain"))
        if npts < 1:
            raise ConfigError("geometry.sweep_points", "must be >= 1")
        spacing = geo.get("sweep_spacing", "log").lower()
        if spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError("geometry.sweep_start",
                                  "log spacing needs positive bounds")
            grid = np.geomspace(start, stop, npts)
        elif spacing == "linear":
            grid = np.linspace(start, stop, npts)
        else:
            raise ConfigError("geometry.sweep_spacing", "must be 'log' or 'linear'")
    if grid.size == 0:
        raise ConfigError("geometry.sweep", "grid is empty")
    if np.any(grid <= 0):
        raise ConfigError(f"geometry.{var}", "must be positive")
    if grid.size > 1 and not (np.all(np.diff(grid) > 0) or np.all(np.diff(grid) < 0)):
        raise ConfigError("geometry.sweep", "grid must be strictly monotone")
    return var, grid


_KNOWN_KEYS = {
    "geometry": {"type", "t", "a", "r", "l", "a1", "a2", "b", "sweep",
                 "sweep_start", "sweep_stop", "sweep_points", "sweep_spacing",
                 "sweep_values"},
    "mirror1": {"model", "omega_p", "lambda_p", "gamma", "gamma_ratio",
                "table", "r"},
    "mirror2": {"model", "omega_p", "lambda_p", "gamma", "gamma_ratio",
                "table", "r"},
    "numerics": {"rel_tol", "abs_floor", "max_subdivisions", "ell_max",
                 "nodes", "method"},
}


def parse_config(text: str, kind: str) -> RunConfig:
    """Parse and validate a configuration for subcommand `kind`."""
    if kind not in GEOMETRIES:
        raise ConfigError("geometry", f"unknown geometry {kind!r}")
    sec = _parse_sections(text)
    for section, keys in sec.items():
        if section not in _KNOWN_KEYS:
            raise ConfigError(section, "unknown section")
        for key in keys:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"{section}.{key}", "unknown key")
    geo = sec.get("geometry", {})
    if "type" in geo and geo["type"] != kind:
        raise ConfigError("geometry.type", f"config says {geo['type']!r}, "
                          f"subcommand says {kind!r}")

    T = parse_quantity("geometry.T", geo.get("t", "0"), "temperature")
    if T < 0:
        raise ConfigError("geometry.T", "must be >= 0")
    A = parse_quantity("geometry.A", geo.get("a", "1.0"), "plain")
    _positive("geometry.A", A)

    var, grid = _build_grid(geo, kind)

    num = sec.get("numerics", {})
    def plain(key, default):
        if key in num:
            return parse_quantity(f"numerics.{key}", num[key], "plain")
        return default
    try:
        spec = QuadratureSpec(
            rel_tol=plain("rel_tol", 1e-8),
            abs_floor=plain("abs_floor", 1e-35),
            max_subdivisions=int(plain("max_subdivisions", 200)))
    except ValueError as exc:
        raise ConfigError("numerics", str(exc))
    ell_max = num.get("ell_max")
    ell_max = int(parse_quantity("numerics.ell_max", ell_max, "plain")) if ell_max else None
    nodes = num.get("nodes")
    nodes = int(parse_quantity("numerics.nodes", nodes, "plain")) if nodes else None
    method = num.get("method", "analytic")
    if method not in ("analytic", "fd"):
        raise ConfigError("numerics.method", "must be 'analytic' or 'fd'")

    cfg = RunConfig(geometry=kind, mirror1=None, mirror2=None, temperature=T,
                    area=A, sweep_variable=var, grid=grid, spec=spec,
                    ell_max=ell_max, nodes=nodes, method=method, raw=sec)

    if kind == "onedim":
        for name in ("mirror1", "mirror2"):
            msec = sec.get(name, {})
            r = parse_quantity(f"{name}.r", msec.get("r", "1.0"), "plain")
            if abs(r) > 1.0:
                raise ConfigError(f"{name}.r", "|r| must be <= 1")
            setattr(cfg, "r1" if name == "mirror1" else "r2", r)
    else:
        cfg.mirror1 = _build_mirror(sec.get("mirror1", {}), "mirror1")
        if "mirror2" in sec:
            cfg.mirror2 = _build_mirror(sec["mirror2"], "mirror2")
        else:
            cfg.mirror2 = cfg.mirror1

    if kind == "sphere":
        if "r" not in geo:
            raise ConfigError("geometry.R", "sphere geometry needs a radius R")
        cfg.radius = _positive("geometry.R",
                               parse_quantity("geometry.R", geo["r"], "length"))
    if kind == "corrugation":
        if "l" not in geo:
            raise ConfigError("geometry.L", "corrugation geometry needs the mean gap L")
        cfg.gap = _positive("geometry.L", parse_quantity("geometry.L", geo["l"], "length"))
        cfg.a1 = parse_quantity("geometry.a1", geo.get("a1", "0"), "length")
        cfg.a2 = parse_quantity("geometry.a2", geo.get("a2", "0"), "length")
        cfg.mismatch = parse_quantity("geometry.b", geo.get("b", "0"), "length")
        if cfg.a1 < 0 or cfg.a2 < 0:
            raise ConfigError("geometry.a1", "amplitudes must be >= 0")
        if T > 0:
            raise ConfigError("geometry.T", "corrugation solver is zero-temperature")
    return cfg


# --- sweep drivers ----------------------------------------------------------

def _meta_thermal(f, T, spec):
    info = thermal_sum_info(f, T, spec)
    return info.value, {"m_max": info.terms, "tail_J": info.tail}


def _run_plates(cfg: RunConfig):
    records = []
    for L in cfg.grid:
        rec = {"L_m": float(L)}
        try:
            geom = PlateGeometry(L=float(L), A=cfg.area, T=cfg.temperature)
            meta = {}
            if cfg.temperature > 0:
                f = _Integrand(cfg.mirror1, cfg.mirror2, geom.L, "energy")
                value, meta = _meta_thermal(f, cfg.temperature, cfg.spec)
                energy = cfg.area * value
            else:
                energy = lifshitz_free_energy(cfg.mirror1, cfg.mirror2, geom, cfg.spec)
            pressure = casimir_pressure(cfg.mirror1, cfg.mirror2, geom, cfg.spec)
            rec.update(energy_J=energy, pressure_Pa=pressure,
                       m_max=meta.get("m_max"), tail_J=meta.get("tail_J"),
                       status="ok", error="")
        except ConvergenceError as exc:
            rec.update(energy_J=None, pressure_Pa=None, m_max=None, tail_J=None,
                       status="failed", error=str(exc))
        records.append(rec)
    return records


def _run_sphere(cfg: RunConfig):
    records = []
    for x in cfg.grid:
        rec = {"x": float(x)}
        try:
            geom = SphereGeometry(L=float(x) * cfg.radius, R=cfg.radius,
                                  T=cfg.temperature)
            trunc = (MultipoleTruncation(ell_max=cfg.ell_max)
                     if cfg.ell_max else default_truncation(geom.x))
            if cfg.method == "analytic":
                energy, force, gradient = energy_force_gradient(
                    geom, (cfg.mirror1, cfg.mirror2), trunc, cfg.spec, cfg.nodes)
            else:
                energy = casimir_energy_sphere(geom, (cfg.mirror1, cfg.mirror2),
                                               trunc, cfg.spec, cfg.nodes)
                force, gradient = casimir_force_sphere_fd(
                    geom, (cfg.mirror1, cfg.mirror2), trunc, cfg.spec, cfg.nodes)
            f_pfa, g_pfa = pfa_reference(geom, (cfg.mirror1, cfg.mirror2), cfg.spec)
            rec.update(L_m=geom.L, energy_J=energy, force_N=force,
                       gradient_N_per_m=gradient,
                       rho_F=abs(force) / f_pfa, rho_G=gradient / g_pfa,
                       ell_max=trunc.ell_max, status="ok", error="")
        except ConvergenceError as exc:
            rec.update(L_m=float(x) * cfg.radius, energy_J=None, force_N=None,
                       gradient_N_per_m=None, rho_F=None, rho_G=None,
                       ell_max=cfg.ell_max, status="failed", error=str(exc))
        records.append(rec)
    return records


def _run_corrugation(cfg: RunConfig):
    records = []
    kern = PerfectReflectorKernel()
    L = cfg.gap
    kcs = np.asarray(cfg.grid, dtype=float) / L
    try:
        samples = pfa_ratio_curve((cfg.mirror1, cfg.mirror2), L, kcs,
                                  (kern, kern), cfg.spec)
    except ConvergenceError as exc:
        return [{"kcL": float(v), "k_c_rad_per_m": float(v) / L, "G_C_J_per_m4": None,
                 "r_C": None, "F_lat_N": None, "status": "failed",
                 "error": str(exc)} for v in cfg.grid]
    for s in samples:
        cs = CorrugationSpec(a1=cfg.a1, a2=cfg.a2,
                             lambda_c=2.0 * math.pi / s.k_c if s.k_c > 0 else 1.0,
                             b=cfg.mismatch)
        flat = lateral_force(cs, s.G_C, cfg.area) if s.k_c > 0 else 0.0
        records.append({"kcL": s.k_c * L, "k_c_rad_per_m": s.k_c,
                        "G_C_J_per_m4": s.G_C, "r_C": s.r_C,
                        "F_lat_N": flat, "status": "ok", "error": ""})
    return records


def _run_onedim(cfg: RunConfig):
    records = []
    r1 = lambda xi: cfg.r1 * np.ones_like(np.asarray(xi, dtype=float))
    r2 = lambda xi: cfg.r2 * np.ones_like(np.asarray(xi, dtype=float))
    for L in cfg.grid:
        rec = {"L_m": float(L)}
        try:
            F = free_energy_1d(r1, r2, float(L), cfg.temperature, cfg.spec)
            rec.update(free_energy_J=F, status="ok", error="")
        except (ConvergenceError, ValueError) as exc:
            rec.update(free_energy_J=None, status="failed", error=str(exc))
        records.append(rec)
    return records


_RUNNERS = {"plates": _run_plates, "sphere": _run_sphere,
            "corrugation": _run_corrugation, "onedim": _run_onedim}

_COLUMNS = {
    "plates": ["L_m", "energy_J", "pressure_Pa", "m_max", "tail_J", "status", "error"],
    "sphere": ["x", "L_m", "energy_J", "force_N", "gradient_N_per_m",
               "rho_F", "rho_G", "ell_max", "status", "error"],
    "corrugation": ["kcL", "k_c_rad_per_m", "G_C_J_per_m4", "r_C", "F_lat_N",
                    "status", "error"],
    "onedim": ["L_m", "free_energy_J", "status", "error"],
}


def run(cfg: RunConfig):
    """Execute the sweep; returns (records, exit_status)."""
    records = _RUNNERS[cfg.geometry](cfg)
    failed = any(r.get("status") != "ok" for r in records)
    return records, (EXIT_CONVERGENCE if failed else EXIT_OK)


# --- output -----------------------------------------------------------------

def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _config_echo(cfg: RunConfig):
    echo = {}
    for section, keys in sorted(cfg.raw.items()):
        for k, v in sorted(keys.items()):
            echo[f"{section}.{k}"] = v
    return echo


def render_csv(cfg: RunConfig, records, timestamp: str) -> str:
    cols = _COLUMNS[cfg.geometry]
    lines = [f"# casimir {__version__} sweep",
             f"# generated_at = {timestamp}",
             f"# geometry = {cfg.geometry}"]
    for k, v in _config_echo(cfg).items():
        lines.append(f"# {k} = {v}")
    lines.append(",".join(cols))
    for rec in records:
        lines.append(",".join(_fmt(rec.get(c)) for c in cols))
    return "\n".join(lines) + "\n"


def render_json(cfg: RunConfig, records, timestamp: str) -> str:
    payload = {
        "meta": {"tool": "casimir", "version": __version__,
                 "generated_at": timestamp, "geometry": cfg.geometry},
        "config": _config_echo(cfg),
        "records": records,
    }
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


# --- entry point ------------------------------------------------------------

def _apply_overrides(text: str, overrides):
    """Append --set section.key=value pairs as config lines."""
    extra = []
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(item, "--set expects section.key=value")
        path, value = item.split("=", 1)
        if "." not in path:
            raise ConfigError(path, "--set expects section.key=value")
        section, key = path.split(".", 1)
        extra.append(f"[{section.strip()}]\n{key.strip()} = {value.strip()}")
    return text + "\n" + "\n".join(extra) + "\n"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="casimir",
        description="Casimir free energies, forces and gradients from the "
                    "scattering approach")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in GEOMETRIES:
        p = sub.add_parser(name, help=f"{name} sweep")
        p.add_argument("--config", required=True, help="configuration file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override section.key = value")
        p.add_argument("--output", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        text = _apply_overrides(text, args.set)
        cfg = parse_config(text, args.command)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    records, status = run(cfg)
    stamp = time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())
    renderer = render_csv if args.format == "csv" else render_json
    out = renderer(cfg, records, stamp)
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(out)
        else:
            sys.stdout.write(out)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return status


if __name__ == "__main__":
    sys.exit(main())
