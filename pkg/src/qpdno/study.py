"""
Convergence studies: for each algorithm and epsilon, one expansion to the
maximum order, then the summed Neumann data and its error against the
manufactured solution for every (summation, truncation order).
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, check
from .hops import PerturbationProblem, expand
from .lattice import LatticeSpec, ModeSet, smallest_divisor
from .mms import ManufacturedSolution, exact_traces, profile_library, relative_error
from .summation import sum_expansion

CSV_HEADER = ("algorithm", "summation", "epsilon", "order", "error_rel", "pole_flag", "min_divisor")


@dataclass(frozen=True)
class StudyRow:
    algorithm: str
    summation: str
    epsilon: float
    order: int
    error_rel: float
    pole_flag: bool
    min_divisor: float

    def as_csv(self):
        return [
            self.algorithm,
            self.summation,
            repr(float(self.epsilon)),
            str(self.order),
            "%.16e" % self.error_rel,
            "1" if self.pole_flag else "0",
            "%.16e" % self.min_divisor,
        ]


@dataclass
class Setup:
    """Objects shared by every cell of a study."""

    lattice: LatticeSpec
    modes: ModeSet
    profile: object
    solution: ManufacturedSolution
    min_divisor: float


def build_setup(cfg: ExperimentConfig) -> Setup:
    K = np.asarray(cfg.lattice.K, dtype=float)
    if K.ndim == 1:
        K = K[:, None]
    lattice = LatticeSpec(K, depth=cfg.lattice.depth)
    modes = ModeSet(tuple(int(n) for n in cfg.resolution.N_alpha))
    profile = profile_library(cfg.profile.name, lattice, modes, cfg.profile.parameters)
    # keep the profile exactly real so the traces and recursions stay real
    profile = type(profile).from_values(lattice, modes, profile.values.real)
    ms = ManufacturedSolution(
        lattice, cfg.solution.amplitude, tuple(cfg.solution.q), cfg.solution.symmetrize
    )
    kmin, _ = smallest_divisor(lattice, modes)
    return Setup(lattice, modes, profile, ms, float(kmin))


def problem_for(cfg: ExperimentConfig, setup: Setup, epsilon: float):
    """The perturbation problem and exact Neumann data at one epsilon."""
    xi, nu = exact_traces(setup.solution, setup.profile * epsilon)
    prob = PerturbationProblem(
        setup.profile, xi, cfg.order, cfg.resolution.a, int(cfg.resolution.N_y),
        noise_filter=cfg.noise_filter,
    )
    return prob, nu


def _pade_split(cfg, n):
    L = cfg.pade.get("L") if cfg.pade else None
    M = cfg.pade.get("M") if cfg.pade else None
    if L is None and M is None:
        return None, None
    # a fixed split applies only where it fits; lower orders use the default
    if (L or 0) + (M or 0) > n:
        return None, None
    return L, M


def rows_for_expansion(cfg, setup, expansion, nu_exact, algorithm, epsilon):
    """All study rows for one expansion (every summation and truncation)."""
    rows = []
    for method in cfg.summation:
        for n in range(cfg.order + 1):
            L, M = _pade_split(cfg, n) if method == "pade" else (None, None)
            with np.errstate(all="ignore"):
                approx, diag = sum_expansion(expansion, epsilon, method, L=L, M=M, order=n)
            err = relative_error(nu_exact, approx) if np.all(np.isfinite(approx.coeffs)) else math.inf
            if not math.isfinite(err):
                err = math.inf
            rows.append(StudyRow(algorithm, method, epsilon, n, err, diag.pole_flag, setup.min_divisor))
    return rows


def run_convergence_study(cfg: ExperimentConfig, threads: int = 1, return_expansions: bool = False):
    """Run the full (algorithm x epsilon x summation x order) study.

    Returns the list of StudyRow (sorted deterministically) and, when
    requested, a dict {(algorithm, epsilon): DnoExpansion}.
    """
    check(cfg)
    setup = build_setup(cfg)

    def cell(task):
        algorithm, epsilon = task
        prob, nu = problem_for(cfg, setup, epsilon)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            exp = expand(prob, algorithm)
        return task, exp, rows_for_expansion(cfg, setup, exp, nu, algorithm, epsilon)

    tasks = [(alg, eps) for alg in cfg.algorithms for eps in cfg.epsilon]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(cell, tasks))
    else:
        results = [cell(t) for t in tasks]
    rows = [r for _, _, rs in results for r in rs]
    if return_expansions:
        return rows, {t: e for t, e, _ in results}
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.as_csv())
    return buf.getvalue()


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        out = []
        for rec in reader:
            out.append(StudyRow(
                rec["algorithm"], rec["summation"], float(rec["epsilon"]), int(rec["order"]),
                float(rec["error_rel"]), rec["pole_flag"] == "1", float(rec["min_divisor"]),
            ))
        return out


def write_study(cfg: ExperimentConfig, out_dir, threads: int = 1, stem: str = "study"):
    """Run a study and write ``<stem>.csv`` plus ``<stem>.meta.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    rows = run_convergence_study(cfg, threads=threads)
    elapsed = time.perf_counter() - t0
    csv_path = out / f"{stem}.csv"
    csv_path.write_text(rows_to_csv(rows), encoding="utf-8")
    meta = {
        "config": cfg.to_dict(),
        "version": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "runtime_seconds": elapsed,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "rows": len(rows),
    }
    (out / f"{stem}.meta.json").write_text(json.dumps(meta, indent=2), encoding="utf-8")
    return csv_path, rows
