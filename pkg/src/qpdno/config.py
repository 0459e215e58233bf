"""
Experiment configuration: a YAML key tree mapped onto dataclasses, with
exhaustive validation and dotted-key overrides.
"""

from __future__ import annotations

import copy
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

ALGORITHM_TAGS = ("oe-direct", "oe-adjoint", "fe", "tfe")
SUMMATION_TAGS = ("taylor", "pade")


@dataclass
class LatticeConfig:
    K: list
    depth: float = math.inf


@dataclass
class SolutionConfig:
    amplitude: complex = -3.0
    q: list = field(default_factory=lambda: [1, 1])
    symmetrize: bool = False


@dataclass
class ProfileConfig:
    name: str = "cos_sin_2d"
    parameters: dict = field(default_factory=dict)


@dataclass
class ResolutionConfig:
    N_alpha: list = field(default_factory=lambda: [64, 64])
    N_y: int = 16
    a: float = 0.1


@dataclass
class ExperimentConfig:
    lattice: LatticeConfig
    solution: SolutionConfig = field(default_factory=SolutionConfig)
    profile: ProfileConfig = field(default_factory=ProfileConfig)
    resolution: ResolutionConfig = field(default_factory=ResolutionConfig)
    epsilon: list = field(default_factory=lambda: [0.02])
    order: int = 16
    algorithms: list = field(default_factory=lambda: list(ALGORITHM_TAGS[1:]))
    summation: list = field(default_factory=lambda: list(SUMMATION_TAGS))
    pade: dict = field(default_factory=dict)
    noise_filter: float = 0.0
    output: str = "results"
    seed: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lattice"]["depth"] = _depth_out(self.lattice.depth)
        amp = complex(self.solution.amplitude)
        d["solution"]["amplitude"] = amp.real if amp.imag == 0 else [amp.real, amp.imag]
        return d


class ValidationIssue:
    """One named constraint violation (``field`` is the dotted config key)."""

    def __init__(self, code: str, field: str, message: str, severity: str = "error"):
        self.code = code
        self.field = field
        self.message = message
        self.severity = severity

    def __repr__(self):
        return f"{self.severity.upper()} [{self.code}] {self.field}: {self.message}"

    __str__ = __repr__


class ConfigValidationError(ValueError):
    """Raised with the complete list of violations."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("invalid configuration:\n  " + "\n  ".join(map(str, self.issues)))


def _depth_in(v):
    if v is None:
        return math.inf
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinite", "infinity", ".inf"):
        return math.inf
    return float(v)


def _depth_out(v):
    return "inf" if math.isinf(v) else v


def _amplitude_in(v):
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]) if len(v) > 1 else 0.0)
    return complex(v)


def from_dict(raw: dict) -> ExperimentConfig:
    """Build a config from a plain mapping (unknown keys are rejected)."""
    raw = copy.deepcopy(raw or {})
    issues = []
    known = set(ExperimentConfig.__dataclass_fields__)
    for key in raw:
        if key not in known:
            issues.append(ValidationIssue("unknown-key", key, "not a configuration key"))
    lat = raw.get("lattice") or {}
    if "K" not in lat:
        issues.append(ValidationIssue("missing-key", "lattice.K", "lattice matrix is required"))
    if issues:
        raise ConfigValidationError(issues)

    def build(cls, data, prefix):
        data = dict(data or {})
        extra = set(data) - set(cls.__dataclass_fields__)
        if extra:
            raise ConfigValidationError(
                [ValidationIssue("unknown-key", f"{prefix}.{k}", "not a configuration key") for k in sorted(extra)]
            )
        return cls(**data)

    lattice = build(LatticeConfig, lat, "lattice")
    lattice.depth = _depth_in(lattice.depth)
    solution = build(SolutionConfig, raw.get("solution"), "solution")
    solution.amplitude = _amplitude_in(solution.amplitude)
    profile = build(ProfileConfig, raw.get("profile"), "profile")
    resolution = build(ResolutionConfig, raw.get("resolution"), "resolution")
    rest = {k: v for k, v in raw.items() if k not in ("lattice", "solution", "profile", "resolution")}
    cfg = ExperimentConfig(lattice=lattice, solution=solution, profile=profile,
                           resolution=resolution, **rest)
    if not isinstance(cfg.epsilon, (list, tuple)):
        cfg.epsilon = [cfg.epsilon]
    # YAML reads exponent-only literals such as 1e-15 as strings
    cfg.epsilon = [float(e) for e in cfg.epsilon]
    try:
        cfg.noise_filter = float(cfg.noise_filter)
        cfg.resolution.a = float(cfg.resolution.a)
    except (TypeError, ValueError) as exc:
        raise ConfigValidationError([ValidationIssue("not-a-number", "noise_filter/resolution.a", str(exc))])
    for key in ("algorithms", "summation"):
        v = getattr(cfg, key)
        if isinstance(v, str):
            setattr(cfg, key, [v])
    return cfg


def load(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return from_dict(yaml.safe_load(fh))


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply ``key.sub=value`` strings (values parsed as YAML) to a raw mapping."""
    raw = copy.deepcopy(raw)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigValidationError([ValidationIssue("bad-override", item, "expected key=value")])
        key, value = item.split("=", 1)
        parts = key.strip().split(".")
        node = raw
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigValidationError(
                    [ValidationIssue("bad-override", key, f"{p} is not a mapping")]
                )
        node[parts[-1]] = yaml.safe_load(value)
    return raw


def load_with_overrides(path, overrides=()) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    return from_dict(apply_overrides(raw, overrides))


def validate(cfg: ExperimentConfig, numeric: bool = True):
    """Return every violated constraint as a ValidationIssue (errors and warnings).

    With ``numeric`` the strip-placement check evaluates the profile on the
    configured grid.
    """
    from .lattice import ConfigurationError, LatticeSpec, ModeSet

    issues = []
    add = lambda *a, **k: issues.append(ValidationIssue(*a, **k))  # noqa: E731

    K = np.asarray(cfg.lattice.K, dtype=float)
    if K.ndim == 1:
        K = K[:, None]
    lattice = None
    try:
        lattice = LatticeSpec(K, depth=cfg.lattice.depth)
    except (ConfigurationError, ValueError) as exc:
        add("lattice-invalid", "lattice.K", str(exc))
    d = K.shape[0]
    if not cfg.lattice.depth > 0:
        add("depth-nonpositive", "lattice.depth", "depth must be positive (or inf)")

    if len(cfg.resolution.N_alpha) != d:
        add("grid-dimension", "resolution.N_alpha", f"needs {d} entries to match K")
    for n in cfg.resolution.N_alpha:
        if int(n) != n or n < 2 or n % 2:
            add("grid-size", "resolution.N_alpha", f"entries must be even integers >= 2, got {n}")
            break
    if int(cfg.resolution.N_y) != cfg.resolution.N_y or cfg.resolution.N_y < 1:
        add("chebyshev-order", "resolution.N_y", "must be a positive integer")
    if not cfg.resolution.a > 0:
        add("strip-depth", "resolution.a", "artificial depth a must be positive")
    elif not math.isinf(cfg.lattice.depth) and not cfg.lattice.depth > cfg.resolution.a:
        add("strip-below-bottom", "resolution.a", f"finite depth h={cfg.lattice.depth} must exceed a")

    if len(cfg.solution.q) != d:
        add("mode-dimension", "solution.q", f"needs {d} integer entries")
    if any(int(v) != v for v in cfg.solution.q):
        add("mode-integer", "solution.q", "entries must be integers")

    if not isinstance(cfg.order, int) or cfg.order < 0:
        add("order", "order", "must be a nonnegative integer")
    elif cfg.order > 32:
        add("order", "order", "orders above 32 are not supported")
    if not cfg.epsilon:
        add("epsilon-empty", "epsilon", "at least one value is required")
    if any(e < 0 or not math.isfinite(e) for e in cfg.epsilon):
        add("epsilon-range", "epsilon", "values must be finite and nonnegative")

    for alg in cfg.algorithms:
        if alg not in ALGORITHM_TAGS:
            add("unknown-algorithm", "algorithms", f"{alg!r} not in {list(ALGORITHM_TAGS)}")
        elif alg != "tfe" and not math.isinf(cfg.lattice.depth):
            add("unsupported-depth", "algorithms",
                f"{alg} is derived for infinite depth only (depth={cfg.lattice.depth})")
    if not cfg.algorithms:
        add("algorithms-empty", "algorithms", "at least one algorithm is required")
    for s in cfg.summation:
        if s not in SUMMATION_TAGS:
            add("unknown-summation", "summation", f"{s!r} not in {list(SUMMATION_TAGS)}")
    if not cfg.summation:
        add("summation-empty", "summation", "at least one method is required")
    if cfg.pade:
        extra = set(cfg.pade) - {"L", "M"}
        if extra:
            add("pade-keys", "pade", f"unknown keys {sorted(extra)} (use L and/or M)")
        L, M = cfg.pade.get("L"), cfg.pade.get("M")
        if L is not None and M is not None and isinstance(cfg.order, int) and L + M > cfg.order:
            add("pade-split", "pade", f"L + M = {L + M} exceeds order {cfg.order}")
    if not 0 <= cfg.noise_filter < 1:
        add("noise-filter", "noise_filter", "must lie in [0, 1)")

    from .mms import PROFILES

    if cfg.profile.name not in PROFILES:
        add("unknown-profile", "profile.name",
            f"{cfg.profile.name!r}; available: {', '.join(sorted(PROFILES))}")

    errors = [i for i in issues if i.severity == "error"]
    if numeric and not errors and lattice is not None:
        from .mms import profile_library

        modes = ModeSet(tuple(int(n) for n in cfg.resolution.N_alpha))
        try:
            f = profile_library(cfg.profile.name, lattice, modes, cfg.profile.parameters)
        except ValueError as exc:
            add("profile-invalid", "profile", str(exc))
        else:
            fv = f.values
            if np.max(np.abs(fv.imag)) > 1e-12 * max(1.0, np.max(np.abs(fv))):
                add("profile-complex", "profile", "profile must be real-valued")
            sup = float(np.max(np.abs(fv.real)))
            eps_max = max(cfg.epsilon) if cfg.epsilon else 0.0
            if not cfg.resolution.a > eps_max * sup:
                add("strip-placement", "resolution.a",
                    f"a = {cfg.resolution.a} does not exceed eps_max * sup|f| = {eps_max * sup:.4g}; "
                    "the transformed-field recursion loses accuracy at high order",
                    severity="warning")
            if not math.isinf(cfg.lattice.depth) and eps_max * float(np.min(fv.real)) <= -cfg.lattice.depth:
                add("surface-below-bottom", "epsilon",
                    f"eps_max * min f reaches the bottom y = -{cfg.lattice.depth}")
    return issues


def check(cfg: ExperimentConfig, numeric: bool = True):
    """Raise ConfigValidationError listing all errors; return the warnings."""
    issues = validate(cfg, numeric)
    errors = [i for i in issues if i.severity == "error"]
    if errors:
        raise ConfigValidationError(errors)
    return [i for i in issues if i.severity != "error"]


def dump(cfg: ExperimentConfig, path) -> None:
    Path(path).write_text(yaml.safe_dump(cfg.to_dict(), sort_keys=False), encoding="utf-8")
