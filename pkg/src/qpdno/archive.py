"""
Line-oriented archive of the corrections nu_n.

Each record is ``n p_1 ... p_d re im`` with the real and imaginary parts in
fixed scientific notation carrying 17 significant digits, which round-trips
IEEE doubles exactly. Only nonzero coefficients are written. Lines starting
with ``#`` are header comments.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .fields import SurfaceField


def format_records(stack: np.ndarray, modes) -> list:
    canon = modes.modes
    lines = []
    for n in range(stack.shape[0]):
        c = modes.to_canonical(stack[n])
        for i in np.flatnonzero(c):
            ps = " ".join(str(int(x)) for x in canon[i])
            lines.append(f"{n} {ps} {c[i].real:.16e} {c[i].imag:.16e}")
    return lines


def write_archive(path, expansion, header: dict | None = None) -> Path:
    """Write the expansion's coefficients; ``header`` entries become comments."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    modes = expansion.problem.modes
    head = {"algorithm": expansion.algorithm, "order": expansion.order,
            "N_alpha": " ".join(map(str, modes.N_alpha))}
    head.update(header or {})
    lines = [f"# {k}: {v}" for k, v in head.items()]
    lines.append("# columns: n " + " ".join(f"p_{m + 1}" for m in range(modes.d)) + " re im")
    lines += format_records(expansion.coefficient_stack(), modes)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_archive(path, modes, order: int | None = None):
    """Coefficient stack (N + 1, *N_alpha) and the header mapping."""
    header = {}
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if ":" in line:
                    k, v = line[1:].split(":", 1)
                    header[k.strip()] = v.strip()
                continue
            parts = line.split()
            if len(parts) != modes.d + 3:
                raise ValueError(f"malformed record: {line!r}")
            n = int(parts[0])
            p = tuple(int(x) for x in parts[1:1 + modes.d])
            records.append((n, p, complex(float(parts[-2]), float(parts[-1]))))
    N = order if order is not None else int(header.get("order", max((r[0] for r in records), default=0)))
    stack = np.zeros((N + 1, *modes.N_alpha), dtype=complex)
    for n, p, v in records:
        stack[(n, *modes.position(p))] = v
    return stack, header


def stack_to_fields(stack, lattice, modes):
    return tuple(SurfaceField(lattice, modes, c) for c in stack)
