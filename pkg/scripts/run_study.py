"""Run the shipped convergence studies and write one CSV per config.

    python3 scripts/run_study.py                 # all three configs
    python3 scripts/run_study.py study_2d --threads 4
"""

import argparse
from pathlib import Path

from qpdno.config import load_with_overrides
from qpdno.study import write_study

ROOT = Path(__file__).resolve().parent.parent
NAMES = ("study_2d", "study_3d_infinite", "study_3d_finite")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", default=list(NAMES))
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default=str(ROOT / "results"))
    ap.add_argument("--override", action="append", default=[])
    args = ap.parse_args()
    for name in args.names:
        cfg = load_with_overrides(ROOT / "configs" / f"{name}.yaml", args.override)
        path, rows = write_study(cfg, Path(args.out) / name, threads=args.threads)
        best = {}
        for r in rows:
            key = (r.algorithm, r.summation, r.epsilon)
            best[key] = min(best.get(key, float("inf")), r.error_rel)
        print(path)
        for (alg, summ, eps), err in sorted(best.items()):
            print(f"  {alg:<11} {summ:<7} eps={eps:<5} min error {err:.2e}")


if __name__ == "__main__":
    main()
