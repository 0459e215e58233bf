"""Command-line front end: ``run``, ``dump`` and ``validate``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings
from pathlib import Path

from . import __version__
from .archive import write_archive
from .config import ConfigValidationError, check, load_with_overrides, validate
from .hops import expand

log = logging.getLogger("qpdno")


def _limit_threads(k):
    if k and k > 0:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(k))


def _load(args):
    return load_with_overrides(args.config, args.override)


def cmd_validate(args) -> int:
    cfg = _load(args)
    issues = validate(cfg)
    for issue in issues:
        print(issue)
    errors = [i for i in issues if i.severity == "error"]
    if errors:
        print(f"{len(errors)} error(s)", file=sys.stderr)
        return 2
    print("configuration ok" + (f" ({len(issues)} warning(s))" if issues else ""))
    return 0


def cmd_run(args) -> int:
    from .study import write_study

    cfg = _load(args)
    for w in check(cfg):
        log.warning("%s", w)
    out = Path(args.out or cfg.output)
    csv_path, rows = write_study(cfg, out, threads=args.threads, stem=args.stem)
    log.info("wrote %d rows to %s", len(rows), csv_path)
    print(csv_path)
    return 0


def cmd_dump(args) -> int:
    from .study import build_setup, problem_for

    cfg = _load(args)
    if args.algorithm not in cfg.algorithms:
        cfg.algorithms = [args.algorithm]
    check(cfg)
    setup = build_setup(cfg)
    out = Path(args.out or cfg.output)
    for eps in cfg.epsilon:
        prob, _ = problem_for(cfg, setup, eps)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            exp = expand(prob, args.algorithm)
        path = out / f"{args.algorithm}_eps{eps!r}.dat"
        write_archive(path, exp, {"epsilon": repr(eps)})
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="YAML experiment configuration")
    common.add_argument("--out", help="output directory (default: config 'output')")
    common.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="override a configuration key (dotted path; repeatable)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for the study loop and BLAS")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="qpdno", description=__doc__)
    p.add_argument("--version", action="version", version=f"qpdno {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="convergence study to CSV")
    r.add_argument("--stem", default="study", help="output file stem")
    r.set_defaults(func=cmd_run)
    d = sub.add_parser("dump", parents=[common], help="write coefficient archives")
    d.add_argument("--algorithm", required=True, choices=["oe-direct", "oe-adjoint", "fe", "tfe"])
    d.set_defaults(func=cmd_dump)
    v = sub.add_parser("validate", parents=[common], help="check a configuration")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    _limit_threads(args.threads)
    try:
        return args.func(args)
    except ConfigValidationError as exc:
        for issue in exc.issues:
            print(issue, file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
