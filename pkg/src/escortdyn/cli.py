"""Command-line front end: single runs, parameter sweeps, verification suite.

Runs are driven by a JSON config file, e.g.::

    {
      "escort": {"family": "power", "q": 2.0},
      "landscape": {"builtin": "rsp"},
      "x0": [0.5, 0.3, 0.2],
      "t_end": 100.0,
      "step": 0.001,
      "observe_every": 100,
      "refs": [0.3333333333333333, 0.3333333333333333, 0.3333333333333333],
      "seed": 0,
      "output": {"path": "out/run.csv", "format": "csv"}
    }

``run`` writes the trajectory (header ``t,x_1,...,x_n,escort_mean_fitness``
plus ``lyapunov`` and ``integral`` columns when refs are set) and prints a
summary JSON object to stdout. Exit codes: 0 completed, 2 bad config,
3 domain error or boundary exit at t = 0, 4 termination mid-run.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import Trajectory, integrate
from .errors import ConfigError, DomainError, EscortError
from .escorts import Constant, Escort, Exponential, Identity, Power, Scaled
from .landscapes import BUILTIN_LANDSCAPES, FitnessLandscape, builtin_landscape
from .simplex import SimplexPoint
from . import suite

EXIT_OK = 0
EXIT_SUITE_FAIL = 1
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_MIDRUN = 4

ESCORT_FAMILIES = ("identity", "scaled", "power", "constant", "exponential")
MONOTONE_TOL = 1e-10


@dataclass(frozen=True)
class RunConfig:
    """A validated run configuration (JSON round-trippable)."""

    escort: dict
    landscape: dict
    x0: tuple
    t_end: float
    step: float
    observe_every: int = 1
    refs: Optional[tuple] = None
    seed: int = 0
    output_path: str = "trajectory.csv"
    output_format: str = "csv"

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        try:
            return cls._from_dict(raw)
        except ConfigError:
            raise
        except (EscortError, ValueError, TypeError, KeyError) as err:
            raise ConfigError(f"invalid config: {err}") from None

    @classmethod
    def _from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = {"escort", "landscape", "x0", "t_end", "step", "observe_every", "refs", "seed", "output"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("escort", "landscape", "x0", "t_end", "step"):
            if key not in raw:
                raise ConfigError(f"config is missing {key!r}")

        escort = _norm_escort(raw["escort"])
        landscape = _norm_landscape(raw["landscape"])
        x0 = tuple(float(v) for v in raw["x0"])
        SimplexPoint(x0)  # validates
        t_end = float(raw["t_end"])
        step = float(raw["step"])
        if not (step > 0.0 and t_end >= step):
            raise ConfigError("need step > 0 and t_end >= step")
        observe_every = int(raw.get("observe_every", 1))
        if observe_every < 1:
            raise ConfigError("observe_every must be >= 1")
        refs = raw.get("refs")
        if refs is not None:
            refs = tuple(float(v) for v in refs)
            SimplexPoint(refs)
            if len(refs) != len(x0):
                raise ConfigError("refs must have the same length as x0")
        seed = int(raw.get("seed", 0))
        out = raw.get("output", {"path": "trajectory.csv", "format": "csv"})
        if not isinstance(out, dict) or "path" not in out:
            raise ConfigError("output must be an object with a 'path'")
        fmt = out.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"output format must be csv or json, got {fmt!r}")
        return cls(escort, landscape, x0, t_end, step, observe_every, refs, seed, out["path"], fmt)

    def to_dict(self) -> dict:
        return {
            "escort": dict(self.escort),
            "landscape": {
                k: ([list(row) for row in v] if k == "matrix" else v)
                for k, v in self.landscape.items()
            },
            "x0": list(self.x0),
            "t_end": self.t_end,
            "step": self.step,
            "observe_every": self.observe_every,
            "refs": None if self.refs is None else list(self.refs),
            "seed": self.seed,
            "output": {"path": self.output_path, "format": self.output_format},
        }

    def build_escort(self) -> Escort:
        fam = self.escort["family"]
        if fam == "identity":
            return Identity()
        if fam == "scaled":
            return Scaled(self.escort["beta"])
        if fam == "power":
            return Power(self.escort["q"])
        if fam == "constant":
            return Constant(self.escort.get("c", 1.0))
        return Exponential()

    def build_landscape(self) -> FitnessLandscape:
        if "builtin" in self.landscape:
            f = builtin_landscape(self.landscape["builtin"])
        else:
            A = np.array(self.landscape["matrix"], dtype=float)
            form = self.landscape.get("form", "linear")
            phi = self.build_escort()
            if form == "linear":
                f = FitnessLandscape.matrix_linear(A)
            elif form == "escort":
                f = FitnessLandscape.matrix_escort(A, phi)
            else:
                f = FitnessLandscape.matrix_escort_log(A, phi)
        try:
            f(np.full(len(self.x0), 1.0 / len(self.x0)))
        except EscortError as err:
            raise ConfigError(f"landscape incompatible with x0 of length {len(self.x0)}: {err}")
        return f


def _norm_escort(raw) -> dict:
    if not isinstance(raw, dict) or "family" not in raw:
        raise ConfigError("escort must be an object with a 'family'")
    fam = raw["family"]
    if fam not in ESCORT_FAMILIES:
        raise ConfigError(f"unknown escort family {fam!r} (have {ESCORT_FAMILIES})")
    out = {"family": fam}
    if fam == "scaled":
        if "beta" not in raw:
            raise ConfigError("scaled escort needs 'beta'")
        out["beta"] = float(raw["beta"])
        if out["beta"] <= 0:
            raise ConfigError("beta must be > 0")
    elif fam == "power":
        if "q" not in raw:
            raise ConfigError("power escort needs 'q'")
        out["q"] = float(raw["q"])
    elif fam == "constant":
        out["c"] = float(raw.get("c", 1.0))
        if out["c"] <= 0:
            raise ConfigError("c must be > 0")
    extra = set(raw) - set(out)
    if extra:
        raise ConfigError(f"unexpected escort keys: {sorted(extra)}")
    return out


def _norm_landscape(raw) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("landscape must be an object")
    if "builtin" in raw:
        name = raw["builtin"]
        if name not in BUILTIN_LANDSCAPES:
            raise ConfigError(f"unknown builtin landscape {name!r} (have {BUILTIN_LANDSCAPES})")
        if set(raw) - {"builtin"}:
            raise ConfigError("builtin landscapes take no other keys")
        return {"builtin": name}
    if "matrix" not in raw:
        raise ConfigError("landscape needs 'builtin' or 'matrix'")
    matrix = raw["matrix"]
    if matrix and not isinstance(matrix[0], (list, tuple)):
        n = math.isqrt(len(matrix))
        if n * n != len(matrix):
            raise ConfigError("flat matrix length must be a perfect square")
        matrix = [matrix[i * n : (i + 1) * n] for i in range(n)]
    rows = [tuple(float(v) for v in row) for row in matrix]
    if any(len(r) != len(rows) for r in rows):
        raise ConfigError("matrix must be square")
    form = raw.get("form", "linear")
    if form not in ("linear", "escort", "escort_log"):
        raise ConfigError(f"unknown landscape form {form!r}")
    if set(raw) - {"matrix", "form"}:
        raise ConfigError("landscape takes only 'matrix' and 'form'")
    return {"matrix": tuple(rows), "form": form}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _columns(traj: Trajectory) -> tuple[list[str], list[np.ndarray]]:
    names = ["t"] + [f"x_{i + 1}" for i in range(traj.n)] + ["escort_mean_fitness"]
    cols = [traj.times] + [traj.states[:, i] for i in range(traj.n)] + [traj.mean_fitness]
    if traj.lyapunov is not None:
        names.append("lyapunov")
        cols.append(traj.lyapunov)
    if traj.integral_of_motion is not None:
        names.append("integral")
        cols.append(traj.integral_of_motion)
    return names, cols

def write_trajectory(traj: Trajectory, path: str, fmt: str) -> None:
    """Write a trajectory as CSV or JSON with round-trippable floats."""
    names, cols = _columns(traj)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    if fmt == "csv":
        with open(path, "w") as fh:
            fh.write(",".join(names) + "\n")
            for i in range(len(traj)):
                fh.write(",".join(repr(float(c[i])) for c in cols) + "\n")
    else:
        rows = [[float(c[i]) for c in cols] for i in range(len(traj))]
        doc = {"columns": names, "rows": rows, "termination": traj.termination.kind}
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")


def _json_float(v):
    return None if v is None or not math.isfinite(v) else float(v)


def summarize(traj: Trajectory) -> dict:
    """The run summary printed to stdout as one JSON object."""
    prods = np.prod(traj.states, axis=1)
    drift_product = None
    if prods[0] != 0.0:
        drift_product = float(np.max(np.abs(prods - prods[0])) / abs(prods[0]))
    drift_integral = None
    lyap_monotone = None
    if traj.integral_of_motion is not None:
        iom = traj.integral_of_motion
        if np.all(np.isfinite(iom)) and iom[0] != 0.0:
            drift_integral = float(np.max(np.abs(iom - iom[0])) / abs(iom[0]))
    if traj.lyapunov is not None:
        lyap = traj.lyapunov
        finite = np.isfinite(lyap)
        lyap_monotone = bool(np.all(np.diff(lyap[finite]) <= MONOTONE_TOL))
    return {
        "status": traj.termination.kind,
        "t_final": float(traj.times[-1]),
        "x_final": [float(v) for v in traj.states[-1]],
        "drift_product": _json_float(drift_product),
        "drift_integral": _json_float(drift_integral),
        "lyapunov_monotone": lyap_monotone,
    }


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}")
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}")
    return RunConfig.from_dict(raw)


def _execute(config: RunConfig, out_path: Optional[str] = None) -> tuple[int, Optional[Trajectory]]:
    phi = config.build_escort()
    f = config.build_landscape()
    try:
        traj = integrate(
            phi,
            f,
            np.array(config.x0),
            config.t_end,
            config.step,
            observe_every=config.observe_every,
            ref=None if config.refs is None else np.array(config.refs),
        )
    except DomainError:
        return EXIT_DOMAIN, None
    write_trajectory(traj, out_path or config.output_path, config.output_format)
    term = traj.termination
    if term.ok:
        return EXIT_OK, traj
    if term.kind == "boundary_exit" and (term.time or 0.0) <= 0.0:
        return EXIT_DOMAIN, traj
    return EXIT_MIDRUN, traj


def cmd_run(args) -> int:
    try:
        config = _load_config(args.config)
        code, traj = _execute(config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    if traj is None:
        print("domain error: dynamic undefined at the initial state", file=sys.stderr)
        return code
    print(json.dumps(summarize(traj)))
    return code


def _sweep_value(config: RunConfig, param: str, value: float) -> RunConfig:
    escort = dict(config.escort)
    escort[param] = value
    root, ext = os.path.splitext(config.output_path)
    return RunConfig(
        escort=escort,
        landscape=config.landscape,
        x0=config.x0,
        t_end=config.t_end,
        step=config.step,
        observe_every=config.observe_every,
        refs=config.refs,
        seed=config.seed,
        output_path=f"{root}_{param}{value:g}{ext or '.csv'}",
        output_format=config.output_format,
    )


def cmd_sweep(args) -> int:
    try:
        config = _load_config(args.config)
        if args.param == "q" and config.escort["family"] != "power":
            raise ConfigError("sweeping q needs a power-family escort")
        if args.param == "beta" and config.escort["family"] != "scaled":
            raise ConfigError("sweeping beta needs a scaled-family escort")
        values = [float(v) for v in args.values.split(",") if v.strip() != ""]
        if not values:
            raise ConfigError("sweep needs at least one value")
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    # Identity-escort reference for the deviation column.
    ref_config = RunConfig(
        escort={"family": "identity"},
        landscape=config.landscape,
        x0=config.x0,
        t_end=config.t_end,
        step=config.step,
        observe_every=config.observe_every,
        refs=config.refs,
        seed=config.seed,
        output_path=config.output_path,
        output_format=config.output_format,
    )
    ref_code, ref_traj = _execute(ref_config, out_path=os.devnull)

    threads = os.environ.get("ESCORTDYN_THREADS")
    max_workers = int(threads) if threads else (os.cpu_count() or 1)
    max_workers = max(1, min(max_workers, len(values)))
    configs = [_sweep_value(config, args.param, v) for v in values]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        outcomes = list(pool.map(_execute, configs))

    runs = []
    worst = EXIT_OK
    for value, cfg, (code, traj) in zip(values, configs, outcomes):
        deviation = None
        if traj is not None and ref_traj is not None:
            m = min(len(traj.states), len(ref_traj.states))
            deviation = float(np.max(np.abs(traj.states[:m] - ref_traj.states[:m])))
        runs.append(
            {
                "value": value,
                "status": traj.termination.kind if traj is not None else "domain_error",
                "exit_code": code,
                "sup_deviation_from_identity": deviation,
                "output": cfg.output_path,
            }
        )
        worst = max(worst, code)
    print(json.dumps({"param": args.param, "runs": runs, "ok": worst == EXIT_OK}))
    return worst


def cmd_paper_suite(args) -> int:
    names = None
    if args.only:
        names = [n.strip() for n in args.only.split(",") if n.strip()]
        missing = [n for n in names if n not in suite.CRITERIA_BY_NAME]
        if missing:
            print(f"config error: unknown criteria {missing}", file=sys.stderr)
            return EXIT_CONFIG
    overrides = {}
    for item in args.override or []:
        name, _, value = item.partition("=")
        if name not in suite.CRITERIA_BY_NAME or not value:
            print(f"config error: bad override {item!r}", file=sys.stderr)
            return EXIT_CONFIG
        overrides[name] = float(value)
    results = suite.run_suite(names=names, overrides=overrides)
    print(suite.format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_SUITE_FAIL


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="escortdyn",
        description="Simulate escort replicator dynamics and verify their invariants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one configuration")
    p_run.add_argument("--config", required=True, help="path to a JSON run config")
    p_run.set_defaults(fn=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a grid of escort parameters")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--param", required=True, choices=("q", "beta"))
    p_sweep.add_argument("--values", required=True, help="comma-separated parameter values")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_suite = sub.add_parser("paper-suite", help="run the built-in verification suite")
    p_suite.add_argument("--only", help="comma-separated criterion names (default: all)")
    p_suite.add_argument(
        "--override",
        action="append",
        metavar="NAME=TOL",
        help="replace a criterion tolerance (test hook)",
    )
    p_suite.set_defaults(fn=cmd_paper_suite)

    args = parser.parse_args(argv)
    return args.fn(args)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
