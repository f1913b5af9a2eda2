"""Command-line entry point: ``fracdiffusive {ml,frac,kernel,solve,sweep,report}``.

Configuration files (solve problems and sweep manifests) are TOML. Tabular
output is CSV whose first line is a ``#`` comment echoing the tool version and
every parameter, followed by a header row; floats are written with
``%.17g`` so repeated runs are byte-identical. Summaries are JSON.

Exit codes: 0 success, 1 sweep finished with failing scenarios, 2 invalid
input, 3 a ``solve`` run hit the blowup threshold.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (CASES, DecayScenario, ScenarioRun, critical_exponents, q_scaling_inverse,
                       run_scenario)
from .cauchy_solver import CauchyProblem, FixedForcing, solve_linear, solve_semilinear
from .errors import FracDiffusiveError
from .fractional_calculus import (FractionalOrder, TimeGrid, TimeSeries, caputo_derivative,
                                  rl_derivative, rl_integral)
from .spectral_kernels import (KERNEL_BETAS, Field, KernelSpec, SpatialGrid, build_kernel,
                               gradient_magnitude, kernel_lq_norm, profile_field)
from .special_functions import MLQuery, eval_ml, eval_ml_asymptotic, eval_ml_series

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["Manifest", "ManifestEntry", "run", "main", "WORKERS_ENV"]

WORKERS_ENV = "FRACDIFFUSIVE_MAX_WORKERS"

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_BLOWUP = 0, 1, 2, 3

log = logging.getLogger("fracdiffusive")


class ConfigError(ValueError):
    """Malformed command-line value or configuration file."""


# ------------------------------------------------------------------ output


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % v
    if v is None:
        return ""
    return str(v)


def _jsonable(obj):
    """Replace non-finite floats by strings so the JSON stays strict."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        obj = float(obj)
        return obj if math.isfinite(obj) else _fmt(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def format_csv(columns, rows, params: dict) -> str:
    """CSV text with the version/parameter comment line and a header row."""
    echo = json.dumps(_jsonable(params), sort_keys=True, separators=(",", ":"))
    lines = [f"# fracdiffusive {__version__} params: {echo}", ",".join(columns)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _emit(text: str, path: str | Path | None) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _write_json(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def _parse_q(v) -> float:
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "infinity"):
            return math.inf
        try:
            return float(v)
        except ValueError:
            raise ConfigError(f"not a norm exponent: {v!r}") from None
    return float(v)


def _q_list(text: str) -> list[float]:
    return [_parse_q(s) for s in text.split(",") if s.strip()]


# -------------------------------------------------------------------- ml


def _cmd_ml(args) -> int:
    xs = np.asarray(args.x, dtype=float)
    if np.any(xs < 0):
        raise ConfigError("--x values must be nonnegative (the argument is -x)")
    params = {"a": args.a, "beta": args.beta, "x": list(xs), "method": args.method,
              "rel_tol": args.rel_tol, "m": args.m}
    if args.decompose:
        rows = []
        for x in xs:
            d = eval_ml_asymptotic(MLQuery(args.a, args.beta, float(x), args.m, args.rel_tol))
            rows.append((x, d.oscillatory, d.algebraic, d.remainder, d.i1, d.i2, d.total))
        cols = ("x", "oscillatory", "algebraic", "remainder", "i1", "i2", "total")
        _emit(format_csv(cols, rows, params), args.output)
        return EXIT_OK
    if args.method == "series" or (args.method == "auto" and args.a <= 1.0):
        vals = eval_ml_series(args.a, args.beta, -xs)
    elif args.method == "asymptotic":
        vals = np.array([eval_ml_asymptotic(MLQuery(args.a, args.beta, float(x), args.m, args.rel_tol)).total
                         for x in xs])
    else:
        vals = eval_ml(args.a, args.beta, xs, args.rel_tol)
    vals = np.atleast_1d(vals)
    if xs.size == 1 and args.output is None:
        print(repr(float(vals[0])))
        return EXIT_OK
    _emit(format_csv(("x", "value"), zip(xs, vals), params), args.output)
    return EXIT_OK


# ------------------------------------------------------------------ frac


def _read_series(path: str) -> TimeSeries:
    try:
        with open(path, newline="") as fh:
            lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    except OSError as exc:
        raise ConfigError(str(exc)) from None
    rows = list(csv.reader(lines))
    if rows and not _numeric(rows[0][0]):
        rows = rows[1:]
    try:
        arr = np.array([[float(r[0]), float(r[1])] for r in rows])
    except (ValueError, IndexError):
        raise ConfigError(f"{path}: expected two numeric columns t,value") from None
    if arr.shape[0] < 2:
        raise ConfigError(f"{path}: need at least two samples")
    t, v = arr[:, 0], arr[:, 1]
    if abs(t[0]) > 1e-12:
        raise ConfigError(f"{path}: samples must start at t=0")
    h = float(t[-1] / (t.size - 1))
    if not h > 0 or np.any(np.abs(np.diff(t) - h) > 1e-9 * max(1.0, h)):
        raise ConfigError(f"{path}: samples must be uniformly spaced")
    return TimeSeries(TimeGrid(h, t.size - 1), v)


def _numeric(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def _cmd_frac(args) -> int:
    series = _read_series(args.input)
    if args.op == "integral":
        out = rl_integral(series, args.order)
    elif args.op == "caputo":
        out = caputo_derivative(series, args.order)
    else:
        out = rl_derivative(series, args.order)
    params = {"input": os.path.basename(args.input), "op": args.op, "order": args.order,
              "h": series.grid.h, "n_steps": series.grid.n_steps}
    if args.at:
        at = np.asarray(args.at, dtype=float)
        if np.any(at < 0) or np.any(at > series.grid.t_final + 1e-12):
            raise ConfigError("--at instants must lie inside the sampled interval")
        # piecewise-linear between nodes, consistent with the quadrature
        rows = zip(at, np.interp(at, out.times, out.values))
        params["at"] = list(at)
    else:
        rows = zip(out.times, out.values)
    _emit(format_csv(("t", args.op), rows, params), args.output)
    return EXIT_OK


# ---------------------------------------------------------------- kernel


def _beta_arg(text: str):
    if text in KERNEL_BETAS:
        return text
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"--beta must be a number or one of {KERNEL_BETAS}") from None


def _centre_line(grid: SpatialGrid, values: np.ndarray) -> np.ndarray:
    mid = grid.points_per_axis // 2
    return values[(slice(None),) + (mid,) * (grid.dim - 1)]


def _cmd_kernel(args) -> int:
    grid = SpatialGrid(args.dim, args.points, args.half_width)
    spec = KernelSpec(FractionalOrder(args.alpha), _beta_arg(args.beta), args.t,
                      args.laplacian_power, args.gradient)
    kern = build_kernel(spec, grid)
    params = {"alpha": args.alpha, "beta": args.beta, "t": args.t, "dim": args.dim,
              "points": args.points, "half_width": args.half_width, "gradient": args.gradient,
              "laplacian_power": args.laplacian_power}
    if args.gradient:
        mag = gradient_magnitude(kern)
        comps = [_centre_line(grid, c.values) for c in kern]
        cols = ["x"] + [f"d{j + 1}" for j in range(grid.dim)] + ["magnitude"]
        rows = zip(grid.axis, *comps, _centre_line(grid, mag.values))
        target = mag
    else:
        cols = ["x", "value"]
        rows = zip(grid.axis, _centre_line(grid, kern.values))
        target = kern
    if args.slice_output:
        _emit(format_csv(cols, rows, params), args.slice_output)
    qs = _q_list(args.norms)
    norm_rows = [(q, kernel_lq_norm(target, q)) for q in qs]
    _emit(format_csv(("q", "norm"), norm_rows, {**params, "norms": qs}), args.output)
    return EXIT_OK


# ----------------------------------------------------------------- solve


_PROFILE_KEYS = {"profile", "amplitude", "width", "wavenumber", "center"}


def _profile_from(table: dict, grid: SpatialGrid, where: str) -> Field:
    extra = set(table) - _PROFILE_KEYS - {"K", "eta"}
    if extra:
        raise ConfigError(f"[{where}] has unknown keys {sorted(extra)}")
    if "profile" not in table:
        raise ConfigError(f"[{where}] needs a profile (gaussian, bump or mode)")
    kw = {k: table[k] for k in _PROFILE_KEYS - {"profile"} if k in table}
    return profile_field(grid, table["profile"], **kw)


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise ConfigError(f"[{where}] is missing {key!r}")
    return table[key]


def _load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(str(exc)) from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _output_times(time_cfg: dict) -> np.ndarray:
    t_final = float(_require(time_cfg, "t_final", "time"))
    if "outputs" in time_cfg:
        out = np.asarray(time_cfg["outputs"], dtype=float)
    else:
        count = int(time_cfg.get("n_outputs", 11))
        if time_cfg.get("spacing", "linear") == "log":
            out = np.concatenate([[0.0], np.geomspace(t_final / 10 ** 3, t_final, count - 1)])
        else:
            out = np.linspace(0.0, t_final, count)
    if out.size == 0 or np.any(out < 0) or np.any(out > t_final + 1e-12):
        raise ConfigError("output instants must lie in [0, t_final]")
    return np.unique(out)


def build_problem(cfg: dict) -> tuple[CauchyProblem, dict]:
    """Problem and time settings from a parsed problem file."""
    known = {"alpha", "power", "laplacian_power", "grid", "u0", "u1", "forcing", "time"}
    extra = set(cfg) - known
    if extra:
        raise ConfigError(f"unknown top-level keys {sorted(extra)}")
    g = _require(cfg, "grid", "problem")
    grid = SpatialGrid(int(_require(g, "dim", "grid")), int(_require(g, "points", "grid")),
                       float(_require(g, "half_width", "grid")))
    u0 = _profile_from(_require(cfg, "u0", "problem"), grid, "u0")
    u1 = _profile_from(cfg["u1"], grid, "u1") if "u1" in cfg else None
    forcing = None
    if "forcing" in cfg:
        f = cfg["forcing"]
        forcing = FixedForcing.separable(_profile_from(f, grid, "forcing"), float(f.get("K", 1.0)),
                                         float(f.get("eta", 0.0)))
    problem = CauchyProblem(FractionalOrder(float(_require(cfg, "alpha", "problem"))), u0, u1, forcing,
                            cfg.get("power"), float(cfg.get("laplacian_power", 1.0)))
    return problem, _require(cfg, "time", "problem")


def _cmd_solve(args) -> int:
    cfg = _load_toml(args.problem)
    problem, time_cfg = build_problem(cfg)
    times = _output_times(time_cfg)
    step = float(time_cfg.get("step", 0.05))
    if problem.power is None:
        traj = solve_linear(problem, times, quad_step=step)
    else:
        grid = TimeGrid.covering(float(time_cfg["t_final"]), step)
        traj = solve_semilinear(problem, grid, time_cfg.get("blowup_threshold"), out_times=times)
    params = {"problem_file": os.path.basename(args.problem), **cfg}
    out = Path(args.output_dir)
    grid = problem.grid
    cols = ["x"] + ["u(t=%s)" % _fmt(t) for t in traj.times]
    lines = [_centre_line(grid, s.values) for s in traj.snapshots]
    _emit(format_csv(cols, zip(grid.axis, *lines), params), out / "snapshots.csv")
    norm_rows = [(t, kernel_lq_norm(s, 1), kernel_lq_norm(s, 2), kernel_lq_norm(s, math.inf))
                 for t, s in zip(traj.times, traj.snapshots)]
    _emit(format_csv(("t", "L1", "L2", "Linf"), norm_rows, params), out / "norms.csv")
    _write_json({"status": traj.status, "blowup_time": traj.blowup_time,
                 "last_time": float(traj.times[-1]) if len(traj.times) else None,
                 "version": __version__}, out / "solve.json")
    if traj.completed:
        print(f"completed: {len(traj.times)} instants written to {out}")
        return EXIT_OK
    print(f"blowup at t={traj.blowup_time:.6g}; partial output written to {out}")
    return EXIT_BLOWUP


# -------------------------------------------------------------- manifest


_SCENARIO_KEYS = {f.name for f in fields(DecayScenario)}
_RUN_KEYS = {f.name for f in fields(ScenarioRun)}


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    scenario: DecayScenario
    run: ScenarioRun


@dataclass(frozen=True)
class Manifest:
    """Scenario sweep description.

    TOML layout: top-level ``version = 1``, ``output_dir`` (relative to the
    manifest file), ``parallelism`` and an array of ``[[scenarios]]`` tables
    whose keys are the fields of :class:`DecayScenario` and
    :class:`ScenarioRun` plus a unique ``name``.
    """

    version: int
    scenarios: tuple[ManifestEntry, ...]
    output_dir: Path
    parallelism: int = 1

    def __post_init__(self):
        if self.version != 1:
            raise ConfigError(f"unsupported manifest version {self.version!r}")
        if not self.scenarios:
            raise ConfigError("manifest lists no scenarios")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        names = [e.name for e in self.scenarios]
        if len(set(names)) != len(names):
            raise ConfigError("scenario names must be unique")

    @classmethod
    def from_dict(cls, cfg: dict, base: Path) -> "Manifest":
        extra = set(cfg) - {"version", "scenarios", "output_dir", "parallelism"}
        if extra:
            raise ConfigError(f"unknown manifest keys {sorted(extra)}")
        entries = []
        for i, raw in enumerate(cfg.get("scenarios", [])):
            raw = dict(raw)
            name = str(raw.pop("name", f"scenario{i}"))
            unknown = set(raw) - _SCENARIO_KEYS - _RUN_KEYS
            if unknown:
                raise ConfigError(f"scenario {name!r}: unknown keys {sorted(unknown)}")
            for key in ("n", "alpha", "q", "case"):
                if key not in raw:
                    raise ConfigError(f"scenario {name!r} is missing {key!r}")
            if raw["case"] not in CASES:
                raise ConfigError(f"scenario {name!r}: case must be one of {CASES}")
            sc_kw = {k: raw[k] for k in _SCENARIO_KEYS if k in raw}
            sc_kw["q"] = _parse_q(sc_kw["q"])
            if "r" in sc_kw:
                sc_kw["r"] = _parse_q(sc_kw["r"])
            run = ScenarioRun(**{k: raw[k] for k in _RUN_KEYS if k in raw})
            if not run.tolerance > 0:
                raise ConfigError(f"scenario {name!r}: tolerance must be positive")
            entries.append(ManifestEntry(name, DecayScenario(**sc_kw), run))
        out = Path(cfg.get("output_dir", "results"))
        if not out.is_absolute():
            out = (base / out).resolve()
        return cls(int(cfg.get("version", 0)), tuple(entries), out, int(cfg.get("parallelism", 1)))

    @classmethod
    def load(cls, path: str | Path) -> "Manifest":
        path = Path(path)
        return cls.from_dict(_load_toml(str(path)), path.resolve().parent)


def worker_count(requested: int, n_jobs: int, cli_cap: int | None = None) -> int:
    """Workers actually used: the manifest value capped by the flag, the environment and the job count."""
    caps = [requested, n_jobs]
    if cli_cap is not None:
        caps.append(cli_cap)
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            caps.append(int(env))
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
    return max(1, min(caps))


def _execute(entry: ManifestEntry) -> dict:
    try:
        rep = run_scenario(entry.scenario, entry.run)
    except FracDiffusiveError as exc:
        summary = {**_scenario_echo(entry), "status": "error", "message": str(exc), "pass": False}
        return {"summary": summary, "times": [], "norms": []}
    summary = {"name": entry.name, **rep.summary(), "run": _run_echo(entry.run)}
    return {"summary": summary, "times": list(rep.times), "norms": list(rep.norms)}


def _scenario_echo(entry: ManifestEntry) -> dict:
    return {"name": entry.name, **asdict(entry.scenario), "run": _run_echo(entry.run)}


def _run_echo(run: ScenarioRun) -> dict:
    return asdict(run)


_RESULT_COLUMNS = ("name", "n", "alpha", "q", "case", "r", "eta", "delta", "fitted_exponent",
                   "theoretical_exponent", "tolerance", "fit_residual", "status", "pass")


def _cmd_sweep(args) -> int:
    manifest = Manifest.load(args.manifest)
    out = Path(args.output_dir) if args.output_dir else manifest.output_dir
    workers = worker_count(manifest.parallelism, len(manifest.scenarios), args.workers)
    if workers == 1:
        results = [_execute(e) for e in manifest.scenarios]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_execute, manifest.scenarios))

    echo = {"manifest": os.path.basename(args.manifest), "version": manifest.version,
            "scenarios": [_scenario_echo(e) for e in manifest.scenarios]}
    rows = []
    for entry, res in zip(manifest.scenarios, results):
        s = res["summary"]
        rows.append(tuple(s.get(c, math.nan) for c in _RESULT_COLUMNS))
        series_params = {"manifest": echo["manifest"], **_scenario_echo(entry)}
        _emit(format_csv(("t", "norm"), zip(res["times"], res["norms"]), series_params),
              out / "series" / f"{entry.name}.csv")
    _emit(format_csv(_RESULT_COLUMNS, rows, echo), out / "results.csv")
    passed = [bool(r["summary"]["pass"]) for r in results]
    summary = {"version": __version__, "manifest": echo["manifest"], "n_scenarios": len(results),
               "n_passed": sum(passed), "all_pass": all(passed),
               "scenarios": [r["summary"] for r in results]}
    _write_json(summary, out / "summary.json")
    for r in results:
        s = r["summary"]
        print(f"{'PASS' if s['pass'] else 'FAIL'} {s['name']}: fitted={_fmt(s.get('fitted_exponent'))} "
              f"theory={_fmt(s.get('theoretical_exponent'))} status={s['status']}")
    print(f"{sum(passed)}/{len(passed)} scenarios passed; results in {out}")
    return EXIT_OK if all(passed) else EXIT_FAILED


# ---------------------------------------------------------------- report


def _summary_table(summary: dict, style: str) -> str:
    cols = ("name", "case", "n", "alpha", "q", "fitted_exponent", "theoretical_exponent", "tolerance",
            "status", "pass")
    rows = []
    for s in summary["scenarios"]:
        row = []
        for c in cols:
            v = s.get(c, "")
            row.append("%.4f" % v if isinstance(v, float) and math.isfinite(v) else _fmt(v))
        rows.append(row)
    if style == "markdown":
        lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
        lines += ["| " + " | ".join(r) + " |" for r in rows]
    else:
        widths = [max(len(c), *(len(r[i]) for r in rows)) for i, c in enumerate(cols)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
        lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in rows]
    lines.append(f"{summary['n_passed']}/{summary['n_scenarios']} passed")
    return "\n".join(lines) + "\n"


def _cmd_report(args) -> int:
    if args.summary:
        try:
            summary = json.loads(Path(args.summary).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read summary: {exc}") from None
        if "scenarios" not in summary:
            raise ConfigError("summary file has no scenarios")
        _emit(_summary_table(summary, args.format), args.output)
        return EXIT_OK
    if args.exponents:
        rows = []
        for n in args.dims:
            for al in args.alphas:
                ce = critical_exponents(n, al)
                rows.append((n, al, ce.p_bar, ce.p_tilde, ce.p_hat, ce.p_memory_crit,
                             q_scaling_inverse(n, al), len(ce.ordering_violations()) == 0))
        cols = ("n", "alpha", "p_bar", "p_tilde", "p_hat", "p_memory", "p_q1", "ordered")
        _emit(format_csv(cols, rows, {"dims": args.dims, "alphas": args.alphas}), args.output)
        return EXIT_OK
    raise ConfigError("report needs --summary or --exponents")


# ------------------------------------------------------------------ parser


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracdiffusive", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"fracdiffusive {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ml", help="evaluate E_{a,beta}(-x)")
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--x", type=float, nargs="+", required=True, help="nonnegative x; the argument is -x")
    s.add_argument("--method", choices=("auto", "series", "asymptotic"), default="auto")
    s.add_argument("--m", type=int, default=None, help="asymptotic order (default: minimal)")
    s.add_argument("--rel-tol", type=float, default=1e-10)
    s.add_argument("--decompose", action="store_true", help="print the asymptotic parts as CSV")
    s.add_argument("--output", default=None)
    s.set_defaults(func=_cmd_ml)

    s = sub.add_parser("frac", help="fractional integral or derivative of sampled data")
    s.add_argument("--input", required=True, help="CSV with columns t,value on a uniform grid from t=0")
    s.add_argument("--op", choices=("integral", "caputo", "rl"), required=True)
    s.add_argument("--order", type=float, required=True)
    s.add_argument("--at", type=float, nargs="*", default=None, help="report only these instants")
    s.add_argument("--output", default=None)
    s.set_defaults(func=_cmd_frac)

    s = sub.add_parser("kernel", help="kernel slice and L^q norms")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--beta", default="1", help=f"number or one of {', '.join(KERNEL_BETAS)}")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--dim", type=int, default=1)
    s.add_argument("--points", type=int, default=1024)
    s.add_argument("--half-width", type=float, default=50.0)
    s.add_argument("--laplacian-power", type=float, default=1.0)
    s.add_argument("--gradient", action="store_true")
    s.add_argument("--norms", default="1,2,inf", help="comma-separated exponents")
    s.add_argument("--slice-output", default=None, help="CSV of the kernel along the first axis")
    s.add_argument("--output", default=None, help="norm table (default stdout)")
    s.set_defaults(func=_cmd_kernel)

    s = sub.add_parser("solve", help="solve a Cauchy problem from a TOML problem file")
    s.add_argument("--problem", required=True)
    s.add_argument("--output-dir", required=True)
    s.set_defaults(func=_cmd_solve)

    s = sub.add_parser("sweep", help="run the decay scenarios of a manifest")
    s.add_argument("--manifest", required=True)
    s.add_argument("--output-dir", default=None, help="override the manifest's output_dir")
    s.add_argument("--workers", type=_positive_int, default=None, help="cap on worker processes")
    s.set_defaults(func=_cmd_sweep)

    s = sub.add_parser("report", help="tabulate a sweep summary or the critical exponents")
    s.add_argument("--summary", default=None, help="summary.json written by sweep")
    s.add_argument("--format", choices=("text", "markdown"), default="text")
    s.add_argument("--exponents", action="store_true")
    s.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3])
    s.add_argument("--alphas", type=float, nargs="+", default=[0.25, 0.5, 0.75])
    s.add_argument("--output", default=None)
    s.set_defaults(func=_cmd_report)
    return p


def run(argv=None) -> int:
    """Parse ``argv`` and execute; returns the exit code instead of exiting."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ConfigError, FracDiffusiveError, ValueError, TypeError) as exc:
        print(f"fracdiffusive {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())
