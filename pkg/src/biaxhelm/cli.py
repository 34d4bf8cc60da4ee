"""Command-line front end: ``biaxhelm eval|verify|table``.

Exit codes: 0 success, 1 usage or configuration error, 2 verification
failure, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .a2 import A2Params, A2Point, a2_auto
from .errors import BiaxError, ConfigError, NonConvergence
from .fundsol import HelmholtzParams, KernelSpec, as_point, geometry, q
from .series import SeriesOptions
from .suites import SUITE_NAMES, SuiteSettings, clean_floats, run_suites
from .verify import StencilConfig

OUT_DIR_ENV = "BIAXHELM_OUT_DIR"

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_NONCONV = 0, 1, 2, 3

DEFAULTS = {
    "alpha": 0.25, "beta": 0.25, "lam": 1.0, "dim": 3, "kernel": 1, "k_const": 1.0,
    "a2": None, "grid": None, "point": None, "x0": None, "direction": None,
    "radii": None, "rel_tol": 1e-12, "max_terms": 4000, "step": 1e-2, "order": 4,
    "richardson": 1, "format": "csv", "out": None, "seed": 0, "suite": "all",
    "samples": 3, "allow_partial": False,
}


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    command: str
    alpha: float
    beta: float
    lam: float
    dim: int
    kernel: int
    k_const: float
    a2: tuple[float, ...] | None
    grid: tuple[tuple[float, float, int], ...] | None
    point: tuple[tuple[float, ...], ...] | None
    x0: tuple[float, ...] | None
    direction: tuple[float, ...] | None
    radii: tuple[float, ...] | None
    rel_tol: float
    max_terms: int
    step: float
    order: int
    richardson: int
    format: str
    out: str | None
    seed: int
    suite: str
    samples: int
    allow_partial: bool

    def helmholtz(self) -> HelmholtzParams:
        return HelmholtzParams(self.alpha, self.beta, self.lam, self.dim)

    def series(self) -> SeriesOptions:
        return SeriesOptions(self.rel_tol, self.max_terms)

    def stencil(self) -> StencilConfig:
        return StencilConfig(self.step, self.order, self.richardson)

    def echo(self) -> dict:
        return clean_floats(asdict(self))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _floats(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    try:
        return tuple(float(v) for v in str(text).split(","))
    except ValueError as exc:
        raise ConfigError(f"cannot parse number list {text!r}") from exc


def _grid(text) -> tuple[tuple[float, float, int], ...]:
    axes = text if isinstance(text, (list, tuple)) else str(text).split(",")
    out = []
    for ax in axes:
        parts = ax if isinstance(ax, (list, tuple)) else str(ax).split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid axis {ax!r} must be min:max:count")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            raise ConfigError("grid counts must be >= 1")
        out.append((lo, hi, n))
    return tuple(out)


def _radii(text) -> tuple[float, ...]:
    """``lo:hi:n`` for log-spaced radii, otherwise an explicit list."""
    if isinstance(text, str) and ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"radii {text!r} must be lo:hi:count")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if lo <= 0 or hi <= 0 or n < 2:
            raise ConfigError("log-spaced radii need positive bounds and count >= 2")
        return tuple(np.logspace(math.log10(lo), math.log10(hi), n).tolist())
    return _floats(text)


_CONVERT = {
    "a2": _floats, "grid": _grid, "x0": _floats, "direction": _floats, "radii": _radii,
    "point": lambda v: tuple(_floats(p) for p in v),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biaxhelm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("eval", "evaluate kernels (or A2) at points or on a grid"),
        ("verify", "run verification suites and write a JSON report"),
        ("table", "radial profile of a kernel along a direction"),
    ):
        p = sub.add_parser(name, help=help_, argument_default=argparse.SUPPRESS)
        p.add_argument("--alpha", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--dim", type=int)
        p.add_argument("--kernel", type=int, choices=(1, 2, 3, 4))
        p.add_argument("--k-const", dest="k_const", type=float)
        p.add_argument("--a2", help="a,b1,b2,c1,c2: evaluate A2 itself at x,y,z points")
        p.add_argument("--grid", help="per-axis min:max:count, comma separated")
        p.add_argument("--point", action="append", help="comma-separated coordinates; repeatable")
        p.add_argument("--x0", help="source point")
        p.add_argument("--direction")
        p.add_argument("--radii", help="lo:hi:count (log spaced) or comma list")
        p.add_argument("--rel-tol", dest="rel_tol", type=float)
        p.add_argument("--max-terms", dest="max_terms", type=int)
        p.add_argument("--step", type=float)
        p.add_argument("--order", type=int, choices=(2, 4))
        p.add_argument("--richardson", type=int)
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--out", help=f"output path (default: ${OUT_DIR_ENV}/<command>.<format> or stdout)")
        p.add_argument("--seed", type=int)
        p.add_argument("--suite", choices=(*SUITE_NAMES, "all"))
        p.add_argument("--samples", type=int, help="draws per suite")
        p.add_argument("--allow-partial", dest="allow_partial", action="store_true")
        p.add_argument("--config", help="JSON config file; its values win over flags")
    return parser


def resolve_config(ns: argparse.Namespace, warn=None) -> RunConfig:
    warn = warn or (lambda msg: print(f"warning: {msg}", file=sys.stderr))
    flags = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
    merged = dict(DEFAULTS)
    file_vals: dict = {}
    path = getattr(ns, "config", None)
    if path:
        try:
            file_vals = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(file_vals, dict):
            raise ConfigError("config file must hold a JSON object")
        file_vals = {("lam" if k == "lambda" else k.replace("-", "_")): v for k, v in file_vals.items()}
        unknown = set(file_vals) - set(DEFAULTS) - {"command"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for k, v in flags.items():
        if k in file_vals and file_vals[k] != v:
            warn(f"--{k.replace('_', '-')} overridden by config file value {file_vals[k]!r}")
        merged[k] = v
    merged.update({k: v for k, v in file_vals.items() if k != "command"})
    for k, conv in _CONVERT.items():
        if merged[k] is not None:
            merged[k] = conv(merged[k])
    if merged["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {merged['format']!r}")
    if merged["suite"] not in (*SUITE_NAMES, "all"):
        raise ConfigError(f"unknown suite {merged['suite']!r}")
    if merged["samples"] < 1:
        raise ConfigError("samples must be >= 1")
    return RunConfig(command=ns.command, **merged)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render(rows: list[dict], header: list[str], fmt: str, echo: dict) -> str:
    if fmt == "json":
        return json.dumps(clean_floats({"config_echo": echo, "rows": rows}), sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(r[h]) for h in header])
    return buf.getvalue()


def _destination(cfg: RunConfig) -> Path | None:
    if cfg.out:
        return Path(cfg.out)
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        ext = "json" if cfg.command == "verify" else cfg.format
        return Path(env) / f"{cfg.command}.{ext}"
    return None


def emit(cfg: RunConfig, text: str) -> None:
    dest = _destination(cfg)
    if dest is None:
        sys.stdout.write(text)
        return
    dest.parent.mkdir(parents=True, exist_ok=True)
    dest.write_text(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _points(cfg: RunConfig, width: int) -> list[np.ndarray]:
    if cfg.point and cfg.grid:
        raise ConfigError("give either --point or --grid, not both")
    if cfg.point:
        pts = [np.asarray(p, dtype=float) for p in cfg.point]
    elif cfg.grid:
        axes = [np.linspace(lo, hi, n) for lo, hi, n in cfg.grid]
        pts = [np.array(c) for c in itertools.product(*axes)]
    else:
        raise ConfigError("eval needs --point or --grid")
    for p in pts:
        if p.size != width:
            raise ConfigError(f"point {p.tolist()} has {p.size} coordinates, expected {width}")
    return pts


def _status(res) -> str:
    return "ok" if res.converged else "not_converged"


def cmd_eval(cfg: RunConfig) -> int:
    rows, failure = [], EXIT_OK
    if cfg.a2 is not None:
        if len(cfg.a2) != 5:
            raise ConfigError("--a2 needs five parameters a,b1,b2,c1,c2")
        params = A2Params(*cfg.a2)
        header = ["x", "y", "z", "value", "err_estimate", "representation", "terms_used"]
        for pt in _points(cfg, 3):
            row = dict(zip(("x", "y", "z"), map(float, pt)))
            try:
                res = a2_auto(params, A2Point(*map(float, pt)), cfg.series())
            except BiaxError as exc:
                failure = max(failure, _fail(cfg, row, exc))
                rows.append(row)
                continue
            row.update(value=res.value, err_estimate=res.err_estimate,
                       representation=res.representation.value, terms_used=res.terms_used, status=_status(res))
            if not res.converged and not cfg.allow_partial:
                failure = max(failure, EXIT_NONCONV)
            rows.append(row)
    else:
        hp = cfg.helmholtz()
        if cfg.x0 is None:
            raise ConfigError("kernel evaluation needs --x0")
        x0 = as_point(cfg.x0, hp.p, name="x0")
        spec = KernelSpec(cfg.kernel, cfg.k_const)
        coords = [f"x{i + 1}" for i in range(hp.p)]
        header = coords + ["r2", "xi", "eta", "zeta", "P", "value", "err_estimate", "representation", "terms_used"]
        for pt in _points(cfg, hp.p):
            row = dict(zip(coords, map(float, pt)))
            try:
                g = geometry(pt, x0, hp)
                res = q(spec, pt, x0, hp, cfg.series())
            except BiaxError as exc:
                failure = max(failure, _fail(cfg, row, exc))
                rows.append(row)
                continue
            row.update(r2=g.r2, xi=g.xi, eta=g.eta, zeta=g.zeta, P=g.P, value=res.value,
                       err_estimate=res.err_estimate, representation=res.representation.value,
                       terms_used=res.terms_used, status=_status(res))
            if not res.converged and not cfg.allow_partial:
                failure = max(failure, EXIT_NONCONV)
            rows.append(row)
    if cfg.allow_partial:
        header = header + ["status"]
    for r in rows:
        for h in header:
            r.setdefault(h, math.nan if h not in ("representation", "status") else "")
    emit(cfg, render(rows, header, cfg.format, cfg.echo()))
    return failure


def _fail(cfg: RunConfig, row: dict, exc: BiaxError) -> int:
    if not cfg.allow_partial:
        code = EXIT_NONCONV if isinstance(exc, NonConvergence) else EXIT_CONFIG
        raise _Exit(code, f"{type(exc).__name__}: {exc}")
    row["status"] = f"{type(exc).__name__}: {exc}"
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    settings = SuiteSettings(
        cfg.helmholtz(), cfg.seed, cfg.samples, cfg.series(), cfg.stencil(),
        cfg.radii if cfg.radii is not None else SuiteSettings.radii,
    )
    suites = run_suites([cfg.suite], settings)
    report = {"config_echo": cfg.echo(), "suites": suites, "pass": all(s["pass"] for s in suites)}
    emit(cfg, json.dumps(clean_floats(report), sort_keys=True, indent=2) + "\n")
    return EXIT_OK if report["pass"] else EXIT_VERIFY


def cmd_table(cfg: RunConfig) -> int:
    hp = cfg.helmholtz()
    if cfg.x0 is None or cfg.direction is None:
        raise ConfigError("table needs --x0 and --direction")
    x0 = as_point(cfg.x0, hp.p, name="x0")
    d = np.asarray(cfg.direction, dtype=float)
    if d.size != hp.p:
        raise ConfigError(f"direction has {d.size} components, expected {hp.p}")
    norm = float(np.linalg.norm(d))
    if not norm > 0:
        raise ConfigError("direction must be nonzero")
    d = d / norm
    radii = cfg.radii if cfg.radii is not None else tuple(np.logspace(-4, 0, 9).tolist())
    spec = KernelSpec(cfg.kernel, cfg.k_const)
    header = ["r", "value", "compensated", "err_estimate", "representation", "terms_used"]
    rows, failure = [], EXIT_OK
    for r in radii:
        row = {"r": float(r)}
        try:
            res = q(spec, x0 + r * d, x0, hp, cfg.series())
        except BiaxError as exc:
            failure = max(failure, _fail(cfg, row, exc))
            rows.append(row)
            continue
        row.update(value=res.value, compensated=r ** (hp.p - 2) * res.value, err_estimate=res.err_estimate,
                   representation=res.representation.value, terms_used=res.terms_used, status=_status(res))
        if not res.converged and not cfg.allow_partial:
            failure = max(failure, EXIT_NONCONV)
        rows.append(row)
    if cfg.allow_partial:
        header = header + ["status"]
    for r in rows:
        for h in header:
            r.setdefault(h, math.nan if h not in ("representation", "status") else "")
    emit(cfg, render(rows, header, cfg.format, cfg.echo()))
    return failure


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "table": cmd_table}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = resolve_config(ns)
        return COMMANDS[cfg.command](cfg)
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, ValueError, BiaxError) as exc:
        code = EXIT_NONCONV if isinstance(exc, NonConvergence) else EXIT_CONFIG
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
