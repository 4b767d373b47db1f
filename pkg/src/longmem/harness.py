"""Monte Carlo experiment runner, aggregation, and table emission.

A design is a grid of (T, d, phi) cells; every replication simulates one
series and runs every requested estimator task on it, so estimators are
compared on common data. Random streams are pure functions of
(master seed, cell index, replication, task), which makes runs
reproducible bit-for-bit at any worker count.
"""

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.stats import norm

from .arfima import ArfimaParams, simulate_gaussian
from .bootstrap import BootstrapConfig, bias_correct, iterate_bias_correct
from .estimators import EstimatorSpec, estimate
from .exceptions import InvalidDesignError, InvalidParameterError, LongmemError
from .streams import generator_at, substream

__all__ = [
    "EstimatorTask",
    "McDesign",
    "McCellResult",
    "run_design",
    "emit_tables",
    "read_results_csv",
    "parse_estimator_token",
    "load_design",
    "simulation_stream",
    "task_stream",
]

_Z975 = float(norm.ppf(0.975))

CSV_HEADER = [
    "T",
    "d",
    "phi",
    "estimator",
    "P",
    "correction",
    "K",
    "statistic",
    "value",
    "R_effective",
    "seed",
]


@dataclass(frozen=True)
class EstimatorTask:
    """One estimator column of the experiment.

    correction 'none' is the plain estimator, 'bba' applies the bootstrap
    bias adjustment K times, 'ssr' iterates under the stochastic stopping
    rules. ``hpd`` additionally records the bootstrap HPD interval.
    """

    family: str
    P: int
    correction: str = "none"
    K: int = 0
    hpd: bool = False

    def __post_init__(self):
        if self.correction not in ("none", "bba", "ssr"):
            raise InvalidParameterError("correction must be none, bba, or ssr")
        if self.correction == "bba" and self.K < 1:
            raise InvalidParameterError("bba requires K >= 1")

    @property
    def name(self):
        label = f"{self.family.upper()}({self.P})"
        if self.correction == "bba":
            label += f"-BBA({self.K})"
        elif self.correction == "ssr":
            label += "-SSR"
        if self.hpd:
            label += "+HPD"
        return label

    @property
    def needs_bootstrap(self):
        return self.hpd or self.correction != "none"


def parse_estimator_token(token):
    """Parse tokens like 'lpr0', 'splw2-ssr', 'lpr1-bba2-hpd'."""
    parts = token.strip().lower().split("-")
    head = parts[0]
    if head.startswith("lpr"):
        family, rest = "lpr", head[3:]
    elif head.startswith("splw"):
        family, rest = "splw", head[4:]
    else:
        raise InvalidParameterError(f"unknown estimator family in '{token}'")
    try:
        P = int(rest)
    except ValueError:
        raise InvalidParameterError(f"missing correction order in '{token}'") from None
    correction, K, hpd = "none", 0, False
    for part in parts[1:]:
        if part == "hpd":
            hpd = True
        elif part == "ssr":
            correction = "ssr"
        elif part.startswith("bba"):
            correction = "bba"
            try:
                K = int(part[3:])
            except ValueError:
                raise InvalidParameterError(f"bad BBA count in '{token}'") from None
        else:
            raise InvalidParameterError(f"unknown suffix '{part}' in '{token}'")
    return EstimatorTask(family=family, P=P, correction=correction, K=K, hpd=hpd)


@dataclass(frozen=True)
class McDesign:
    """Monte Carlo configuration grid."""

    T_values: tuple
    d_values: tuple
    phi_values: tuple
    R: int
    estimators: tuple
    B: int = 0
    mode: str = "parametric"
    law: str = "gaussian"
    dof: float = 5.0
    seed: int = 0
    bandwidth_exponent: float = 0.7
    max_iter: int = 10
    alpha_lower: float = 0.025
    alpha_upper: float = 0.025

    def __post_init__(self):
        object.__setattr__(self, "T_values", tuple(int(t) for t in self.T_values))
        object.__setattr__(self, "d_values", tuple(float(d) for d in self.d_values))
        object.__setattr__(
            self, "phi_values", tuple(float(p) for p in self.phi_values)
        )
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if self.R < 1:
            raise InvalidDesignError("need at least one replication")
        if not self.estimators:
            raise InvalidDesignError("need at least one estimator task")
        if any(t.needs_bootstrap for t in self.estimators) and self.B < 2:
            raise InvalidDesignError("bootstrap tasks require B >= 2")

    def cells(self):
        """(index, (T, d, phi)) pairs in lexicographic design order."""
        return list(
            enumerate(product(self.T_values, self.d_values, self.phi_values))
        )


@dataclass
class McCellResult:
    """Aggregates of one (cell, estimator task) pair."""

    T: int
    d: float
    phi: float
    task: EstimatorTask
    stats: dict
    R_effective: int
    seed: int
    wall_time: float = 0.0


def simulation_stream(seed, cell_index, r):
    """Stream feeding the simulated series of one replication."""
    return substream(seed, cell_index, r, 0)


def task_stream(seed, cell_index, r, task_index):
    """Stream feeding the bootstrap of one estimator task."""
    return substream(seed, cell_index, r, 1 + task_index)


def _always_continue(k, N, B, upsilon, P):
    return (-math.inf, -math.inf)


def _run_task(y, task, design, stream):
    spec = EstimatorSpec(task.family, task.P, design.bandwidth_exponent)
    base = estimate(y, spec)
    out = {
        "point": base.d_hat,
        "asym_half": _Z975 * base.asymptotic_sd,
        "hpd": None,
        "detstop": False,
    }
    if not task.needs_bootstrap:
        return out
    config = BootstrapConfig(
        B=design.B, innovation_mode=design.mode, rng_stream=stream
    )
    if task.correction == "none":
        outcome = bias_correct(
            y, spec, base.d_hat, config, design.alpha_lower, design.alpha_upper
        )
        out["hpd"] = outcome.hpd
    elif task.correction == "bba":
        trace = iterate_bias_correct(
            y,
            spec,
            config,
            max_iter=task.K,
            thresholds_fn=_always_continue,
            deterministic_window=None,
            alpha_lower=design.alpha_lower,
            alpha_upper=design.alpha_upper,
        )
        out["point"] = trace.final
        if task.hpd:
            out["hpd"] = trace.outcomes[0].hpd
    else:  # ssr
        trace = iterate_bias_correct(
            y,
            spec,
            config,
            max_iter=design.max_iter,
            alpha_lower=design.alpha_lower,
            alpha_upper=design.alpha_upper,
        )
        out["point"] = trace.final
        out["detstop"] = trace.stop_reason == "deterministic"
        if task.hpd:
            out["hpd"] = trace.outcomes[0].hpd
    return out


def _replication_worker(args):
    design, cell_index, cell, r = args
    T, d_true, phi = cell
    params = ArfimaParams(
        d=d_true, phi=phi, sigma2=1.0, law=design.law, dof=design.dof
    )
    y = simulate_gaussian(params, T, generator_at(design.seed, cell_index, r, 0))
    results = []
    for ti, task in enumerate(design.estimators):
        stream = task_stream(design.seed, cell_index, r, ti)
        try:
            results.append(_run_task(y, task, design, stream))
        except LongmemError as exc:
            results.append({"failed": str(exc)})
    return results


def _aggregate_cell(design, cell, reps, wall_time):
    T, d_true, phi = cell
    out = []
    for ti, task in enumerate(design.estimators):
        rows = [rep[ti] for rep in reps]
        ok = [row for row in rows if "failed" not in row]
        n_failed = len(rows) - len(ok)
        stats = {}
        if ok:
            pts = np.array([row["point"] for row in ok])
            err = pts - d_true
            stats["bias"] = float(err.mean())
            stats["mse"] = float(np.mean(err ** 2))
            halves = np.array([row["asym_half"] for row in ok])
            lo = pts - halves
            hi = pts + halves
            stats["asym_coverage"] = float(np.mean((lo <= d_true) & (d_true <= hi)))
            stats["asym_length"] = float(np.mean(2.0 * halves))
            if task.hpd:
                los = np.array([row["hpd"][0] for row in ok])
                his = np.array([row["hpd"][1] for row in ok])
                stats["hpd_coverage"] = float(
                    np.mean((los <= d_true) & (d_true <= his))
                )
                stats["hpd_length"] = float(np.mean(his - los))
            if task.correction == "ssr":
                keep = np.array([not row["detstop"] for row in ok])
                stats["n_detstop"] = float(len(ok) - int(keep.sum()))
                if keep.any():
                    sub = err[keep]
                    stats["bias_xdet"] = float(sub.mean())
                    stats["mse_xdet"] = float(np.mean(sub ** 2))
        stats["n_failed"] = float(n_failed)
        out.append(
            McCellResult(
                T=T,
                d=d_true,
                phi=phi,
                task=task,
                stats=stats,
                R_effective=len(ok),
                seed=design.seed,
                wall_time=wall_time,
            )
        )
    return out


def run_design(design, threads=1):
    """Run every cell of a design and aggregate per estimator task.

    Parameters
    ----------
    design : McDesign
    threads : int
        Worker processes; results are identical for any value.

    Returns
    -------
    list of McCellResult
        One entry per (cell, estimator task), in design order.
    """
    results = []
    for cell_index, cell in design.cells():
        jobs = [(design, cell_index, cell, r) for r in range(design.R)]
        start = time.perf_counter()
        if threads <= 1:
            reps = [_replication_worker(job) for job in jobs]
        else:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                reps = list(pool.map(_replication_worker, jobs))
        wall = time.perf_counter() - start
        results.extend(_aggregate_cell(design, cell, reps, wall))
    return results


_STAT_ORDER = [
    "bias",
    "mse",
    "hpd_coverage",
    "hpd_length",
    "asym_coverage",
    "asym_length",
    "bias_xdet",
    "mse_xdet",
    "n_detstop",
    "n_failed",
]


def _result_rows(results):
    for res in results:
        for stat in _STAT_ORDER:
            if stat not in res.stats:
                continue
            yield [
                repr(res.T),
                repr(res.d),
                repr(res.phi),
                res.task.family.upper(),
                repr(res.task.P),
                res.task.correction,
                repr(res.task.K),
                stat,
                repr(res.stats[stat]),
                repr(res.R_effective),
                repr(res.seed),
            ]


def emit_tables(results, fmt="csv", path=None):
    """Write aggregated results as CSV or as aligned text tables.

    CSV columns are exactly T,d,phi,estimator,P,correction,K,statistic,
    value,R_effective,seed, with full-precision float values so a
    re-ingested file reproduces the aggregates bit for bit.

    Parameters
    ----------
    results : list of McCellResult
    fmt : {'csv', 'aligned-text'}
    path : str
        Destination file.

    Returns
    -------
    str
        The path written.
    """
    if not results:
        raise InvalidParameterError("no results to emit")
    if fmt not in ("csv", "aligned-text"):
        raise InvalidParameterError("format must be 'csv' or 'aligned-text'")
    if path is None:
        raise InvalidParameterError("a destination path is required")
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            writer.writerows(_result_rows(results))
        return path
    with open(path, "w") as fh:
        fh.write(_aligned_text(results))
    return path


def _aligned_text(results):
    tasks = []
    for res in results:
        if res.task.name not in tasks:
            tasks.append(res.task.name)
    t_values = sorted({res.T for res in results})
    lines = []
    for stat in ("bias", "mse", "hpd_coverage", "hpd_length"):
        table = {
            (res.T, res.d, res.phi, res.task.name): res.stats[stat]
            for res in results
            if stat in res.stats
        }
        if not table:
            continue
        width = max(16, max(len(name) for name in tasks) + 2)
        for T in t_values:
            keys = sorted({(d, p) for (t, d, p, _) in table if t == T})
            if not keys:
                continue
            lines.append(f"{stat.upper()}  (T = {T})")
            header = f"{'d':>6} {'phi':>6}" + "".join(
                f"{name:>{width}}" for name in tasks
            )
            lines.append(header)
            for d, p in keys:
                cells = []
                for name in tasks:
                    val = table.get((T, d, p, name))
                    cells.append(f"{val:{width}.4f}" if val is not None else " " * width)
                lines.append(f"{d:6.2f} {p:6.2f}" + "".join(cells))
            lines.append("")
    return "\n".join(lines) + "\n"


def read_results_csv(path):
    """Read back a CSV written by :func:`emit_tables`.

    Returns a list of dicts with the same types as the in-memory rows
    (ints for T/P/K/R_effective/seed, floats for d/phi/value).
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise InvalidParameterError("unrecognized results header")
        for rec in reader:
            rows.append(
                {
                    "T": int(rec["T"]),
                    "d": float(rec["d"]),
                    "phi": float(rec["phi"]),
                    "estimator": rec["estimator"],
                    "P": int(rec["P"]),
                    "correction": rec["correction"],
                    "K": int(rec["K"]),
                    "statistic": rec["statistic"],
                    "value": float(rec["value"]),
                    "R_effective": int(rec["R_effective"]),
                    "seed": int(rec["seed"]),
                }
            )
    return rows


# ---------------------------------------------------------------------------
# Config-file front end (used by the command line)
# ---------------------------------------------------------------------------

_LIST_KEYS = {"T", "d", "phi", "estimators"}
_SCALAR_KEYS = {
    "R",
    "B",
    "mode",
    "law",
    "seed",
    "bandwidth_exp",
    "max_iter",
    "hpd_tails",
}


def load_design(path, default_seed=None):
    """Parse a key = value config file into an McDesign.

    Recognized keys: T, d, phi, R, B, estimators, mode, law, seed,
    bandwidth_exp, max_iter, hpd_tails. Lists are comma separated;
    '#' starts a comment.
    """
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameterError(
                    f"{path}:{lineno}: expected 'key = value'"
                )
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _LIST_KEYS | _SCALAR_KEYS:
                raise InvalidParameterError(f"{path}:{lineno}: unknown key '{key}'")
            values[key] = val.strip()
    for key in ("T", "d", "phi", "R", "estimators"):
        if key not in values:
            raise InvalidParameterError(f"config is missing required key '{key}'")

    def _floats(key):
        return tuple(float(tok) for tok in values[key].split(","))

    law = values.get("law", "gaussian")
    dof = 5.0
    if law.startswith("student-t"):
        if ":" in law:
            dof = float(law.split(":", 1)[1])
        law = "student-t"
    seed = values.get("seed")
    if seed is None:
        seed = default_seed if default_seed is not None else 0
    alpha_lower, alpha_upper = 0.025, 0.025
    if "hpd_tails" in values:
        parts = values["hpd_tails"].split(",")
        if len(parts) != 2:
            raise InvalidParameterError("hpd_tails needs two comma-separated masses")
        alpha_lower, alpha_upper = float(parts[0]), float(parts[1])
    tasks = tuple(
        parse_estimator_token(tok) for tok in values["estimators"].split(",")
    )
    return McDesign(
        T_values=tuple(int(float(t)) for t in values["T"].split(",")),
        d_values=_floats("d"),
        phi_values=_floats("phi"),
        R=int(values["R"]),
        estimators=tasks,
        B=int(values.get("B", 0)),
        mode=values.get("mode", "parametric"),
        law=law,
        dof=dof,
        seed=int(seed),
        bandwidth_exponent=float(values.get("bandwidth_exp", 0.7)),
        max_iter=int(values.get("max_iter", 10)),
        alpha_lower=alpha_lower,
        alpha_upper=alpha_upper,
    )
