"""Coefficient ratio test for the 3D infinite-depth problem.

For each epsilon prints sup|nu_{n+1}| eps / sup|nu_n| per order and the
average over the last four orders (below 1 suggests convergence).
"""

import argparse
import warnings
from pathlib import Path

import numpy as np

from qpdno.config import load_with_overrides
from qpdno.fields import inverse
from qpdno.hops import expand
from qpdno.study import build_setup, problem_for

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("epsilon", nargs="*", type=float, default=[0.12, 0.16, 0.17, 0.22])
    ap.add_argument("--config", default=str(ROOT / "configs" / "study_3d_infinite.yaml"))
    ap.add_argument("--override", action="append", default=[])
    args = ap.parse_args()
    warnings.simplefilter("ignore")
    cfg = load_with_overrides(args.config, args.override)
    setup = build_setup(cfg)
    d = setup.modes.d
    for eps in args.epsilon:
        prob, _ = problem_for(cfg, setup, eps)
        sups = [np.max(np.abs(inverse(c.coeffs, d))) for c in expand(prob, "tfe").corrections]
        ratios = [sups[n + 1] * eps / sups[n] for n in range(len(sups) - 1)]
        tail = float(np.mean(ratios[-4:]))
        print(f"eps={eps:<5} ratios {' '.join(f'{x:.2f}' for x in ratios)}  last-4 mean {tail:.3f}")


if __name__ == "__main__":
    main()
