"""Command-line front end.

Usage::

    python -m fracflux <command> [--config params.json] [--seed 0] [--out DIR] [--n N]

Every command reads its parameters from an optional JSON object (missing
keys take defaults, unknown keys are rejected), writes CSV files into
``--out`` and starts each file with a provenance line::

    # command=<cmd>, params-hash=<sha256 prefix>, seed=<seed>, version=<ver>

Exit status: 0 success, 1 computational failure (including a failed check
in ``verify-all``), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np
from scipy.special import gamma

from . import __version__
from .evolution import EvolutionProblem, evolve, smoothing_probe
from .fracops import frac_integral
from .lattice import FracFluxError, Grid, GridFunction, l2_norm, read_csv
from .mittag import MLParams, SectorSpec, ml_eval
from .operator import (
    Coefficient,
    assemble_operator,
    numerical_range_sample,
    resolvent_bound_probe,
    write_matrix,
)
from .resolvent import ResolventProblem, resolvent_closed_form, resolvent_matrix, series_oracle
from .verify import verify_all

__all__ = ["ExperimentConfig", "UsageError", "run", "main", "COMMANDS"]


class UsageError(FracFluxError, ValueError):
    pass


# ---------------------------------------------------------------------------
# parameter schemas: name -> (default, coercion)


def _float(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError("expected a number")
    return float(v)


def _int(v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError("expected an integer")
    return int(v)


def _bool(v):
    if not isinstance(v, bool):
        raise TypeError("expected true or false")
    return v


def _str(v):
    if not isinstance(v, str):
        raise TypeError("expected a string")
    return v


def _choice(*opts):
    def f(v):
        if v not in opts:
            raise TypeError(f"expected one of {opts}")
        return v
    return f


def _int_list(v):
    if not isinstance(v, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in v):
        raise TypeError("expected a list of integers")
    return list(v)


def _float_list(v):
    if not isinstance(v, list):
        raise TypeError("expected a list of numbers")
    return [_float(i) for i in v]


SCHEMAS: dict[str, dict[str, tuple[Any, Callable]]] = {
    "ml-scan": {
        "nu": (1.5, _float),
        "mu": (1.0, _float),
        "half_angle": (None, _float),  # default pi * nu / 2
        "rmin": (0.1, _float),
        "rmax": (50.0, _float),
        "radii": (40, _int),
        "rays": (41, _int),
    },
    "resolve": {
        "lambda_re": (1.0, _float),
        "lambda_im": (0.0, _float),
        "alpha": (0.5, _float),
        "n": (1024, _int),
        "p": ("one", _str),
        "g": ("one", _str),
        "solver": ("closed", _choice("closed", "series", "matrix")),
        "terms": (60, _int),
    },
    "evolve": {
        "alpha": (0.5, _float),
        "n": (512, _int),
        "steps": (256, _int),
        "T": (1.0, _float),
        "p": ("one", _str),
        "u0": ("indicator:0,0.5", _str),
        "f": ("zero", _str),
        "snapshot_every": (32, _int),
    },
    "sector-probe": {
        "alpha": (0.5, _float),
        "n": (512, _int),
        "p": ("one", _str),
        "count": (1000, _int),
        "dump_matrix": (False, _bool),
    },
    "resolvent-norm": {
        "alpha": (0.5, _float),
        "n": (512, _int),
        "p": ("one", _str),
        "arg": (3.0 * math.pi / 4.0, _float),
        "rmin": (1.0, _float),
        "rmax": (1e4, _float),
        "count": (41, _int),
    },
    "verify-all": {
        "n": (1024, _int),
        "count": (500, _int),
        "alphas": ([0.3, 0.5, 0.7], _float_list),
    },
    "convergence": {
        "study": ("resolvent-lambda0", _choice("resolvent-lambda0", "frac-integral")),
        "n_list": ([128, 256, 512, 1024], _int_list),
        "alpha": (0.5, _float),
        "solver": ("series", _choice("closed", "series", "matrix")),
        "power": (2, _int),
    },
}
COMMANDS = tuple(SCHEMAS)


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    params: dict
    output_dir: Path
    seed: int = 0

    @classmethod
    def build(cls, command: str, raw: dict, output_dir, seed: int = 0, n: int | None = None):
        if command not in SCHEMAS:
            raise UsageError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
        raw = dict(raw)
        if "command" in raw and raw.pop("command") != command:
            raise UsageError("config 'command' field does not match the requested command")
        schema = SCHEMAS[command]
        unknown = sorted(set(raw) - set(schema))
        if unknown:
            raise UsageError(f"{command}: unknown parameter(s) {unknown}")
        params = {}
        for key, (default, coerce) in schema.items():
            if key not in raw:
                params[key] = default
                continue
            try:
                params[key] = coerce(raw[key])
            except TypeError as exc:
                raise UsageError(f"{command}: parameter {key!r}: {exc}") from None
        if n is not None:
            if "n" not in schema:
                raise UsageError(f"{command} has no grid size to override")
            params["n"] = n
        _validate(command, params)
        return cls(command, params, Path(output_dir), int(seed))

    @property
    def params_hash(self) -> str:
        blob = json.dumps(self.params, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def header(self) -> str:
        return (f"# command={self.command}, params-hash={self.params_hash}, "
                f"seed={self.seed}, version={__version__}\n")


def _validate(command: str, p: dict) -> None:
    if "n" in p and p["n"] < 4:
        raise UsageError(f"{command}: parameter 'n' must be >= 4")
    if "alpha" in p and not 0.0 < p["alpha"] < 1.0:
        raise UsageError(f"{command}: parameter 'alpha' must lie in (0, 1)")
    for key in ("steps", "count", "radii", "rays", "terms", "snapshot_every"):
        if key in p and p[key] < 1:
            raise UsageError(f"{command}: parameter {key!r} must be >= 1")
    if command == "evolve" and not p["T"] > 0:
        raise UsageError("evolve: parameter 'T' must be positive")
    if command == "convergence":
        ns = p["n_list"]
        if len(ns) < 3:
            raise UsageError("convergence: 'n_list' needs at least 3 entries")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise UsageError("convergence: 'n_list' must be strictly increasing")
        if ns[0] < 4:
            raise UsageError("convergence: grid sizes must be >= 4")
    if command in ("ml-scan", "resolvent-norm") and not 0 < p["rmin"] <= p["rmax"]:
        raise UsageError(f"{command}: need 0 < rmin <= rmax")


# ---------------------------------------------------------------------------
# input descriptors


def parse_coefficient(desc: str, grid: Grid) -> Coefficient:
    """``"one"``, ``"affine:a,b"`` (p = a + b x) or a CSV path."""
    if desc == "one":
        return Coefficient.constant(grid)
    if desc.startswith("affine:"):
        try:
            a, b = (float(t) for t in desc[7:].split(","))
        except ValueError:
            raise UsageError(f"bad coefficient descriptor {desc!r}") from None
        return Coefficient.affine(grid, a, b)
    return Coefficient.from_values(grid, _load(desc, grid).values.real, label=desc)


def parse_function(desc: str, grid: Grid) -> GridFunction:
    """``"zero"``, ``"one"``, ``"indicator:a,b"``, ``"poly:c0,c1,..."`` or a CSV path."""
    if desc == "zero":
        return grid.zeros()
    if desc == "one":
        return grid.constant(1.0)
    try:
        if desc.startswith("indicator:"):
            a, b = (float(t) for t in desc[10:].split(","))
            x = grid.nodes
            return GridFunction(grid, ((x >= a) & (x <= b)).astype(float))
        if desc.startswith("poly:"):
            c = [float(t) for t in desc[5:].split(",")]
            return GridFunction(grid, np.polynomial.polynomial.polyval(grid.nodes, c))
    except ValueError:
        raise UsageError(f"bad function descriptor {desc!r}") from None
    return _load(desc, grid)


def _load(path: str, grid: Grid) -> GridFunction:
    if not Path(path).is_file():
        raise UsageError(f"no such file or descriptor: {path!r}")
    u = read_csv(path)
    if u.grid != grid:
        raise UsageError(f"{path}: has n={u.grid.n}, run uses n={grid.n}")
    return u


# ---------------------------------------------------------------------------
# output


def _write(cfg: ExperimentConfig, name: str, header: list[str], rows) -> Path:
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.output_dir / name
    buf = io.StringIO()
    buf.write(cfg.header())
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    path.write_text(buf.getvalue())
    return path


def _fn_rows(u: GridFunction):
    return ((float(x), float(v.real), float(v.imag)) for x, v in zip(u.x, u.values))


# ---------------------------------------------------------------------------
# commands


def _ml_scan(cfg):
    p = cfg.params
    half = p["half_angle"] if p["half_angle"] is not None else math.pi * p["nu"] / 2.0
    sector = SectorSpec.logspaced(min(half, math.pi), p["rmin"], p["rmax"], p["radii"], p["rays"])
    pts = sector.points()
    vals = ml_eval(MLParams(p["nu"], p["mu"]), pts)
    mod = np.abs(vals)
    _write(cfg, "ml_scan.csv", ["re", "im", "abs_E"],
           zip(pts.real, pts.imag, mod))
    i = int(np.argmin(mod))
    print(f"min |E| = {mod[i]:.6g} at z = {pts[i]:.6g}")
    return 0


def _resolve(cfg):
    p = cfg.params
    grid = Grid(p["n"])
    prob = ResolventProblem(
        complex(p["lambda_re"], p["lambda_im"]), parse_function(p["g"], grid),
        p["alpha"], parse_coefficient(p["p"], grid),
    )
    if p["solver"] == "closed":
        u = resolvent_closed_form(prob)
    elif p["solver"] == "series":
        u = series_oracle(prob, p["terms"])
    else:
        u = resolvent_matrix(prob)
    _write(cfg, "solution.csv", ["x", "re", "im"], _fn_rows(u))
    print(f"u(0) = {complex(u.values[0]):.10g}")
    return 0


def _evolve(cfg):
    p = cfg.params
    grid = Grid(p["n"])
    f = None if p["f"] == "zero" else parse_function(p["f"], grid)
    prob = EvolutionProblem(parse_function(p["u0"], grid), p["alpha"], p["T"], p["steps"],
                            parse_coefficient(p["p"], grid), f)
    traj = evolve(prob)
    every = p["snapshot_every"]
    keep = sorted(set(range(0, len(traj), every)) | {len(traj) - 1})
    for k in keep:
        _write(cfg, f"snapshot_{k:06d}.csv", ["x", "re", "im"], _fn_rows(traj.states[k]))
    norms = traj.norms()
    tut = [t * l2_norm(d) for t, d in zip(traj.times, traj.derivatives)]
    _write(cfg, "summary.csv", ["t", "l2_norm", "t_ut_norm"], zip(traj.times, norms, tut))
    if norms[0] > 0:
        print(f"sup t|u_t|/|u0| = {smoothing_probe(traj)[0]:.6g}")
    return 0


def _sector_probe(cfg):
    p = cfg.params
    grid = Grid(p["n"])
    A = assemble_operator(p["alpha"], parse_coefficient(p["p"], grid), grid)
    rep = numerical_range_sample(A, p["count"], cfg.seed)
    if p["dump_matrix"]:
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        write_matrix(A, cfg.output_dir / "operator.csv")
    _write(cfg, "numerical_range.csv", ["re", "im", "ratio_re", "ratio_im"],
           zip(rep.samples.real, rep.samples.imag, rep.ratios.real, rep.ratios.imag))
    print(f"max |arg| = {rep.max_abs_arg:.6g} rad ({rep.angle_deg:.3f} deg), "
          f"c_alpha = {rep.c_alpha:.6g}, b_alpha = {rep.b_alpha:.6g}")
    return 0


def _resolvent_norm(cfg):
    p = cfg.params
    grid = Grid(p["n"])
    A = assemble_operator(p["alpha"], parse_coefficient(p["p"], grid), grid)
    mags = np.geomspace(p["rmin"], p["rmax"], p["count"])
    rows = resolvent_bound_probe(A, p["arg"], mags)
    _write(cfg, "resolvent_norm.csv", ["abs_lambda", "scaled_norm"], rows)
    vals = np.array([r[1] for r in rows])
    print(f"scaled norm range [{vals.min():.6g}, {vals.max():.6g}], spread {vals.max() / vals.min():.4g}")
    return 0


def _verify_all(cfg):
    p = cfg.params
    reports = verify_all(n=p["n"], seed=cfg.seed, alphas=tuple(p["alphas"]), count=p["count"])
    rows = [r.row() for r in reports]
    keys = list(rows[0])
    _write(cfg, "checks.csv", keys, ([r[k] for k in keys] for r in rows))
    failed = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} checks passed")
    for r in failed:
        print(f"FAILED {r.name} {r.params}: metric {r.metric:.3g} vs tol {r.tol:.3g}")
    return 1 if failed else 0


def convergence_errors(params: dict) -> list[tuple[int, float, float]]:
    """``(n, error, observed order)`` rows; the order is ``nan`` on the first row
    and wherever either error is at rounding level."""
    a = params["alpha"]
    errs = []
    for n in params["n_list"]:
        grid = Grid(n)
        if params["study"] == "resolvent-lambda0":
            prob = ResolventProblem(0.0, grid.constant(1.0), a)
            solve = {"closed": resolvent_closed_form, "series": series_oracle,
                     "matrix": resolvent_matrix}[params["solver"]]
            u = solve(prob)
            ref = grid.sample(lambda x: (1.0 - x ** (1.0 + a)) / gamma(a + 2.0))
        else:
            k = params["power"]
            if k < 0:
                raise UsageError("convergence: 'power' must be >= 0")
            u = frac_integral(grid.sample(lambda x: x**k), a)
            ref = grid.sample(lambda x: gamma(k + 1.0) / gamma(k + 1.0 + a) * x ** (k + a))
        errs.append((n, l2_norm(u - ref) / l2_norm(ref)))
    rows = []
    for i, (n, e) in enumerate(errs):
        order = math.nan
        if i > 0:
            n0, e0 = errs[i - 1]
            if min(e, e0) > 1e-13:
                order = math.log(e0 / e) / math.log(n / n0)
        rows.append((n, e, order))
    return rows


def _convergence(cfg):
    rows = convergence_errors(cfg.params)
    _write(cfg, "convergence.csv", ["n", "error", "order"], rows)
    for n, e, o in rows:
        print(f"n={n:6d}  error={e:.3e}  order={o:.3f}")
    return 0


_HANDLERS = {
    "ml-scan": _ml_scan,
    "resolve": _resolve,
    "evolve": _evolve,
    "sector-probe": _sector_probe,
    "resolvent-norm": _resolvent_norm,
    "verify-all": _verify_all,
    "convergence": _convergence,
}


def run(cfg: ExperimentConfig) -> int:
    """Execute a validated configuration; returns the exit status (0 or 1)."""
    np.random.seed(cfg.seed)  # nothing should rely on it; pinned for safety
    try:
        return _HANDLERS[cfg.command](cfg)
    except UsageError:
        raise
    except (FracFluxError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"error [{cfg.command}, {type(exc).__module__}]: {exc}", file=sys.stderr)
        return 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fracflux", description="Space-fractional diffusion experiments.")
    ap.add_argument("command", help=f"one of: {', '.join(COMMANDS)}")
    ap.add_argument("--config", type=Path, help="JSON object with command parameters")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("."), help="output directory")
    ap.add_argument("--n", type=int, help="override the grid size")
    return ap


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
        raw = {}
        if args.config is not None:
            try:
                raw = json.loads(args.config.read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read config {args.config}: {exc}") from None
            if not isinstance(raw, dict):
                raise UsageError("config must be a JSON object")
        cfg = ExperimentConfig.build(args.command, raw, args.out, args.seed, args.n)
        return run(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
