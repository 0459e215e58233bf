import math
from pathlib import Path

import pytest
import yaml

from qpdno.config import (
    ConfigValidationError,
    apply_overrides,
    check,
    dump,
    from_dict,
    load,
    load_with_overrides,
    validate,
)

HERE = Path(__file__).parent
CONFIGS = HERE.parent / "configs"


def raw():
    return yaml.safe_load((HERE / "small.yaml").read_text())


def codes(issues):
    return {i.code for i in issues}


@pytest.mark.parametrize("name", ["study_2d.yaml", "study_3d_infinite.yaml", "study_3d_finite.yaml"])
def test_shipped_configs_validate(name):
    cfg = load(CONFIGS / name)
    assert not [i for i in validate(cfg) if i.severity == "error"]


def test_defaults_and_types():
    cfg = from_dict(raw())
    assert math.isinf(cfg.lattice.depth)
    assert cfg.solution.amplitude == -3 + 0j
    assert cfg.epsilon == [0.02, 0.05]
    assert cfg.noise_filter == 0.0


def test_unknown_keys_rejected():
    r = raw()
    r["colour"] = "blue"
    with pytest.raises(ConfigValidationError) as info:
        from_dict(r)
    assert "unknown-key" in codes(info.value.issues)
    r = raw()
    r["resolution"]["N_z"] = 4
    with pytest.raises(ConfigValidationError):
        from_dict(r)
    with pytest.raises(ConfigValidationError):
        from_dict({"order": 3})


def test_all_violations_reported_together():
    r = raw()
    r["resolution"]["N_alpha"] = [15, 16, 16]
    r["resolution"]["a"] = -1
    r["order"] = 40
    r["epsilon"] = [-0.1]
    r["algorithms"] = ["fe", "bem"]
    r["summation"] = ["borel"]
    r["noise_filter"] = 2.0
    r["profile"]["name"] = "nope"
    found = codes(validate(from_dict(r)))
    assert {"grid-dimension", "grid-size", "strip-depth", "order", "epsilon-range",
            "unknown-algorithm", "unknown-summation", "noise-filter", "unknown-profile"} <= found


def test_finite_depth_rules():
    r = raw()
    r["lattice"]["depth"] = 0.05
    found = codes(validate(from_dict(r)))
    assert {"strip-below-bottom", "unsupported-depth"} <= found
    r["lattice"]["depth"] = 0.25
    r["algorithms"] = ["tfe"]
    assert not [i for i in validate(from_dict(r)) if i.severity == "error"]
    r["epsilon"] = [0.3]
    assert "surface-below-bottom" in codes(validate(from_dict(r)))


def test_strip_placement_is_a_warning():
    r = raw()
    r["epsilon"] = [0.5]
    warnings = check(from_dict(r))
    assert [w.code for w in warnings] == ["strip-placement"]
    assert warnings[0].severity == "warning"


def test_pade_split_checks():
    r = raw()
    r["pade"] = {"L": 3, "M": 3}
    assert "pade-split" in codes(validate(from_dict(r)))
    r["pade"] = {"N": 2}
    assert "pade-keys" in codes(validate(from_dict(r)))


def test_overrides():
    r = apply_overrides(raw(), ["order=6", "resolution.N_y=20", "epsilon=[0.1]", "pade.L=3"])
    assert r["order"] == 6 and r["resolution"]["N_y"] == 20
    assert r["epsilon"] == [0.1] and r["pade"] == {"L": 3}
    with pytest.raises(ConfigValidationError):
        apply_overrides(raw(), ["order"])
    with pytest.raises(ConfigValidationError):
        apply_overrides(raw(), ["order.sub=3"])


def test_exponent_literals_parse_as_numbers():
    cfg = load_with_overrides(HERE / "small.yaml", ["noise_filter=1e-15", "resolution.a=5e-1"])
    assert cfg.noise_filter == 1e-15 and cfg.resolution.a == 0.5


def test_dump_round_trip(tmp_path):
    cfg = load_with_overrides(HERE / "small.yaml", ["solution.amplitude=[1.0, -2.0]"])
    dump(cfg, tmp_path / "c.yaml")
    again = load(tmp_path / "c.yaml")
    assert again == cfg
