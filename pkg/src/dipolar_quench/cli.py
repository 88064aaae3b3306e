"""Command-line driver: parameter grids in, CSV plus JSON metadata out.

Every command accepts either flags or a JSON document (``--config``).
Temperatures are always given in units of the initial ``m c_0**2``; quench
commands convert them to final-frame units internally.  ``A`` is
initial-frame, ``Atilde`` final-frame; quench commands accept either.

Exit codes: 0 success, 1 usage/validation error, 2 unstable spectrum,
3 integrator tolerance failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .correlations import (classify, g2_low_T_expansion,
                           g2_stationary_thermal, momentum_scan, time_series)
from .dispersion import (Frame, PhysicsParams, R_MAX, critical_A, find_roton,
                         spectrum, stability_margin, vacuum_correlation)
from .errors import InstabilityError, ToleranceError
from .quench import DEFAULT_TOL, QuenchProtocol, c2_of_tau, lab_time, scale_factor

COMMANDS = ("Dispersion", "Stationary", "Quench", "Envelope", "Critical", "Sweep")
QUENCH_COMMANDS = ("Quench", "Envelope")

EXIT_OK, EXIT_USAGE, EXIT_UNSTABLE, EXIT_TOLERANCE, EXIT_IO = 0, 1, 2, 3, 4

# key -> (type, default); None default means "not given"
KEYS = {
    "command": (str, None),
    "R": (float, None),
    "A": (float, None),
    "Atilde": (float, None),
    "T": (float, None),
    "ratio": (float, None),
    "rate": (float, None),
    "rate_over_omega_i": (float, None),
    "rate_ref_k": (float, 3.0),
    "kmin": (float, 0.01),
    "kmax": (float, 5.0),
    "nk": (int, 200),
    "spacing": (str, "linear"),
    "k": (float, None),
    "tau_min": (float, None),
    "tau_max": (float, None),
    "ntau": (int, 501),
    "tau_m": (float, None),
    "amin": (float, None),
    "amax": (float, None),
    "na": (int, 50),
    "tol": (float, DEFAULT_TOL),
    "classify_on": (str, "envelope"),
    "output": (str, None),
}

CSV_COLUMNS = {
    "Dispersion": ("k", "omega", "u", "v", "g2vac", "kernel"),
    "Stationary": ("k", "g2", "g2vac", "g2_lowT_check"),
    "Quench": ("tau", "c2_over_cf2", "omega", "alpha_abs2", "beta_abs2", "g2",
               "g2_normalized", "b", "t_lab"),
    "Envelope": ("k", "g2norm_at_tau_m", "lower", "upper", "class"),
    "Critical": ("R", "A_c"),
    "Sweep": ("A", "stable", "min_margin", "k_roton", "omega_roton"),
}


class ConfigError(ValueError):
    """Bad flag, unknown key or violated invariant."""


@dataclass(frozen=True)
class KGrid:
    k_min: float
    k_max: float
    n_points: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.k_min, self.k_max, self.n_points)
        return np.linspace(self.k_min, self.k_max, self.n_points)


@dataclass
class RunConfig:
    command: str
    params: Optional[PhysicsParams]
    protocol: Optional[QuenchProtocol]
    k_grid: KGrid
    tau_m: Optional[float]
    output: str
    tol: float
    options: dict = field(default_factory=dict)
    resolved: dict = field(default_factory=dict)


def _canonical_command(name: str) -> str:
    for c in COMMANDS:
        if c.lower() == str(name).lower():
            return c
    raise ConfigError(f"unknown command {name!r}; choose from {', '.join(COMMANDS)}")


def _coerce(doc: dict) -> dict:
    unknown = sorted(set(doc) - set(KEYS))
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    out = {}
    for key, (typ, default) in KEYS.items():
        val = doc.get(key)
        if val is None:
            out[key] = default
            continue
        try:
            if typ is int and isinstance(val, float) and not val.is_integer():
                raise ValueError
            out[key] = typ(val)
        except (TypeError, ValueError):
            raise ConfigError(f"key {key!r}: cannot interpret {val!r} as {typ.__name__}")
    return out


def _omega_at(k, params, f2):
    return float(spectrum(k, params, f2).omega)


def build_config(doc: dict) -> RunConfig:
    """Validate a flat key/value document and resolve it into a :class:`RunConfig`."""
    if "config" in doc and isinstance(doc["config"], dict):
        doc = doc["config"]  # a metadata sidecar fed back in
    if doc.get("command") is None:
        raise ConfigError("missing key 'command'")
    d = _coerce(doc)
    cmd = _canonical_command(d["command"])
    d["command"] = cmd
    errs = []

    def need(key, flag=None):
        if d[key] is None:
            errs.append(f"{cmd.lower()} requires --{(flag or key).replace('_', '-')}")

    need("R")
    if cmd in ("Dispersion", "Stationary"):
        need("A")
    if cmd == "Stationary":
        need("T")
    if cmd in QUENCH_COMMANDS:
        need("ratio")
        if d["A"] is None and d["Atilde"] is None:
            errs.append(f"{cmd.lower()} requires --A or --Atilde")
        if d["A"] is not None and d["Atilde"] is not None:
            errs.append("give only one of --A and --Atilde")
        if (d["rate"] is None) == (d["rate_over_omega_i"] is None):
            errs.append(f"{cmd.lower()} requires exactly one of --rate and --rate-over-omega-i")
    if cmd == "Quench":
        need("k")
    if cmd == "Envelope":
        need("tau_m")
    if cmd == "Sweep":
        need("amin")
        need("amax")

    if d["R"] is not None and not 0 <= d["R"] <= R_MAX * (1 + 1e-12):
        errs.append(f"R = {d['R']} outside [0, sqrt(pi/2) = {R_MAX:.10f}]")
    for key in ("A", "Atilde", "ratio", "rate", "rate_over_omega_i", "rate_ref_k", "tol",
                "k", "amin", "amax"):
        if d[key] is not None and not (math.isfinite(d[key]) and d[key] > 0):
            errs.append(f"{key} must be positive, got {d[key]}")
    if d["T"] is not None and not (math.isfinite(d["T"]) and d["T"] >= 0):
        errs.append(f"T must be nonnegative, got {d['T']}")
    if not d["kmin"] > 0:
        errs.append(f"kmin must be positive, got {d['kmin']}")
    if not d["kmax"] > d["kmin"]:
        errs.append("kmax must exceed kmin")
    if d["nk"] < 2:
        errs.append("nk must be at least 2")
    if d["ntau"] < 2:
        errs.append("ntau must be at least 2")
    if d["na"] < 2:
        errs.append("na must be at least 2")
    if d["spacing"] not in ("linear", "log"):
        errs.append(f"spacing must be 'linear' or 'log', got {d['spacing']!r}")
    if d["classify_on"] not in ("envelope", "tau_m"):
        errs.append(f"classify_on must be 'envelope' or 'tau_m', got {d['classify_on']!r}")
    if cmd == "Sweep" and d["amin"] is not None and d["amax"] is not None \
            and not d["amax"] > d["amin"]:
        errs.append("amax must exceed amin")
    if d["tau_min"] is not None and d["tau_max"] is not None \
            and not d["tau_max"] > d["tau_min"]:
        errs.append("tau_max must exceed tau_min")
    if errs:
        raise ConfigError("; ".join(errs))

    if d["output"] is None:
        d["output"] = cmd.lower()
    T0 = d["T"] if d["T"] is not None else 0.0
    resolved = {}
    params = protocol = None
    if cmd in QUENCH_COMMANDS:
        ratio = d["ratio"]
        At = d["Atilde"] if d["Atilde"] is not None else d["A"] / ratio
        try:
            params = PhysicsParams(R=d["R"], A=At, T=T0 * ratio, frame=Frame.FINAL)
        except ValueError as exc:
            raise ConfigError(str(exc))
        if d["rate"] is not None:
            rate = d["rate"]
        else:
            omega_ref = _omega_at(d["rate_ref_k"], params, ratio)
            rate = d["rate_over_omega_i"] * omega_ref
            resolved["omega_i_at_rate_ref_k"] = omega_ref
        protocol = QuenchProtocol(ratio, rate)
        for t in (d["tau_m"], d["tau_min"], d["tau_max"]):
            if t is not None:
                protocol = protocol.covering(t)
        resolved.update(rate=rate, Atilde=At, A_initial=At * ratio, T_final=T0 * ratio,
                        tau0=protocol.tau0, tau_end=protocol.tau_end)
    elif cmd in ("Dispersion", "Stationary"):
        try:
            params = PhysicsParams(R=d["R"], A=d["A"], T=T0, frame=Frame.INITIAL)
        except ValueError as exc:
            raise ConfigError(str(exc))

    grid = KGrid(d["kmin"], d["kmax"], d["nk"], d["spacing"])
    return RunConfig(cmd, params, protocol, grid, d["tau_m"], d["output"], d["tol"],
                     options=d, resolved=resolved)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dipolar-quench", description=__doc__.splitlines()[0],
                allow_abbrev=False)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--config", help="JSON configuration file (replaces all other flags)")
    sub = p.add_subparsers(dest="command")
    for cmd in COMMANDS:
        sp = sub.add_parser(cmd.lower(), help=f"{cmd} run", allow_abbrev=False)
        for key, (typ, _default) in KEYS.items():
            if key == "command":
                continue
            flag = "--" + key.replace("_", "-")
            sp.add_argument(flag, dest=key, type=typ, default=None)
    return p


def parse_config(argv) -> RunConfig:
    """Build a :class:`RunConfig` from command-line words, or from a JSON
    document when ``argv`` is a dict."""
    if isinstance(argv, dict):
        return build_config(argv)
    ns = make_parser().parse_args(list(argv))
    if ns.config:
        if ns.command:
            raise ConfigError("--config cannot be combined with a subcommand")
        try:
            doc = json.loads(Path(ns.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{ns.config}: invalid JSON ({exc})")
        if not isinstance(doc, dict):
            raise ConfigError(f"{ns.config}: top level must be an object")
        return build_config(doc)
    if not ns.command:
        raise ConfigError("a subcommand or --config is required")
    doc = {k: v for k, v in vars(ns).items() if k != "config" and v is not None}
    return build_config(doc)


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return format(float(x), ".14e")


def _rows_dispersion(cfg):
    ks = cfg.k_grid.values()
    mf = spectrum(ks, cfg.params)
    vac = vacuum_correlation(ks, cfg.params)
    return zip(ks, mf.omega, mf.u, mf.v, vac, mf.kernel)


def _rows_stationary(cfg):
    ks = cfg.k_grid.values()
    g2 = g2_stationary_thermal(ks, cfg.params)
    vac = vacuum_correlation(ks, cfg.params)
    if cfg.params.T > 0:
        check = g2_low_T_expansion(ks, cfg.params)
    else:
        check = np.full(ks.shape, np.nan)
    return zip(ks, g2, vac, check)


def _rows_quench(cfg):
    d = cfg.options
    proto = cfg.protocol
    lo = proto.tau0 if d["tau_min"] is None else d["tau_min"]
    hi = d["tau_max"] if d["tau_max"] is not None else max(proto.tau_end, cfg.tau_m or 0)
    taus = np.linspace(lo, hi, d["ntau"])
    series, mode = time_series(d["k"], cfg.params, proto, taus, cfg.tol)
    c2 = c2_of_tau(taus, proto)
    rows = []
    for i, tau in enumerate(taus):
        w = float(spectrum(d["k"], cfg.params, float(c2[i])).omega)
        rows.append((tau, c2[i], w, mode.trace.alpha_abs2[i], mode.trace.beta_abs2[i],
                     series.g2[i], series.g2_normalized[i],
                     scale_factor(tau, proto), lab_time(float(tau), proto)))
    cfg.resolved["drift"] = mode.drift
    return rows


def _rows_envelope(cfg):
    ks = cfg.k_grid.values()
    series, modes = momentum_scan(ks, cfg.params, cfg.protocol, cfg.tau_m, cfg.tol)
    basis = series.lower if cfg.options["classify_on"] == "envelope" else series.g2_normalized
    report = classify(ks, basis)
    cfg.resolved["max_drift"] = max(m.drift for m in modes)
    cfg.resolved["n_steerable"] = int(report.steerable.size)
    cfg.resolved["n_nonseparable"] = int(report.nonseparable.size)
    return [(k, g, lo, up, e.verdict.value) for k, g, lo, up, e in
            zip(ks, series.g2_normalized, series.lower, series.upper, report.entries)]


def _rows_critical(cfg):
    R = cfg.options["R"]
    ac = critical_A(R)
    cfg.resolved["A_c"] = ac
    print("A_c = none (stable for every A)" if ac is None else f"A_c = {ac:.10f}")
    return [(R, math.nan if ac is None else ac)]


def _rows_sweep(cfg):
    d = cfg.options
    rows = []
    for A in np.linspace(d["amin"], d["amax"], d["na"]):
        margin = stability_margin(A, d["R"])
        if margin < 0:
            rows.append((A, 0.0, margin, math.nan, math.nan))
            continue
        rot = find_roton(PhysicsParams(R=d["R"], A=A))
        if rot is None:
            rows.append((A, 1.0, margin, math.nan, math.nan))
        else:
            rows.append((A, 1.0, margin, rot.k, rot.omega))
    return rows


_RUNNERS = {
    "Dispersion": _rows_dispersion,
    "Stationary": _rows_stationary,
    "Quench": _rows_quench,
    "Envelope": _rows_envelope,
    "Critical": _rows_critical,
    "Sweep": _rows_sweep,
}


def write_csv(path: Path, columns, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def run(cfg: RunConfig) -> int:
    """Execute a configuration, writing ``<output>.csv`` and ``<output>.meta.json``."""
    started = _dt.datetime.now(_dt.timezone.utc)
    t0 = time.perf_counter()
    try:
        rows = list(_RUNNERS[cfg.command](cfg))
    except InstabilityError as exc:
        print(f"InstabilityError: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except ToleranceError as exc:
        print(f"ToleranceError: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    frame = Frame.FINAL if cfg.command in QUENCH_COMMANDS else Frame.INITIAL
    meta = {
        "config": {k: v for k, v in cfg.options.items() if v is not None},
        "resolved": cfg.resolved,
        "frame": frame.value,
        "temperature_units": "m c_0^2 (initial)",
        "columns": list(CSV_COLUMNS[cfg.command]),
        "version": __version__,
        "started_utc": started.isoformat(),
        "wall_clock_s": time.perf_counter() - t0,
    }
    prefix = Path(cfg.output)
    try:
        if prefix.parent != Path("."):
            prefix.parent.mkdir(parents=True, exist_ok=True)
        write_csv(prefix.with_name(prefix.name + ".csv"), CSV_COLUMNS[cfg.command], rows)
        prefix.with_name(prefix.name + ".meta.json").write_text(
            json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"ConfigError: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InstabilityError as exc:
        print(f"InstabilityError: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
