import math
import warnings

import numpy as np
import pytest

from qpdno.fields import SurfaceField
from qpdno.hops import PerturbationProblem
from qpdno.lattice import LatticeSpec, ModeSet

SQRT2 = math.sqrt(2.0)

# criterion id -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE = {}


def record(cid, passed, detail=""):
    ACCEPTANCE[cid] = (bool(passed), detail)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[cid]
        terminalreporter.write_line(f"criterion {cid:>2}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def lattice2d():
    return LatticeSpec([[1.0], [SQRT2]])


@pytest.fixture(scope="session")
def modes16():
    return ModeSet((16, 16))


def pure_mode(lattice, modes, p, value=1.0):
    return SurfaceField.from_modes(lattice, modes, {tuple(p): value})


def random_real_field(lattice, modes, rng, n_modes=3, scale=0.3):
    """Real field built from a few low modes and their conjugates."""
    entries = {}
    for _ in range(n_modes):
        p = tuple(int(v) for v in rng.integers(-2, 3, size=modes.d))
        if not any(p):
            continue
        c = complex(rng.normal(), rng.normal()) * scale
        entries[p] = entries.get(p, 0) + c
        q = tuple(-v for v in p)
        entries[q] = entries.get(q, 0) + np.conj(c)
    if not entries:
        entries[(1,) + (0,) * (modes.d - 1)] = scale
        entries[(-1,) + (0,) * (modes.d - 1)] = scale
    return SurfaceField.from_modes(lattice, modes, entries)


def make_problem(f, xi, order, **kw):
    return PerturbationProblem(f, xi, order, **kw)


def quiet(fn, *args, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return fn(*args, **kw)
