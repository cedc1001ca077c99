"""Run configuration: JSON ingestion with strict keys and unit-suffixed names.

Schema (every section optional except ``nuclei``)::

    {
      "nuclei": [{"spin": "1/2", "a_iso_uT": 1000, "electron": "A"}],
      "constants": {"gamma_e_per_s_per_T": 1.76e11},
      "defaults": {"B_hmf_uT": 1, "B_gmf_uT": 50},
      "kinetics": {"k_per_s": 1e6, "r_per_s": 1e4, "B_uT": 50},
      "grids": {"B_uT": {"values": [0, 1, 50]},
                "k_per_s": {"start": 1e3, "stop": 1e9, "num": 61, "spacing": "log"}},
      "born": "S",
      "channel": "S",
      "output": {"path": null, "format": "csv"}
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from radpair.spin import Spin
from radpair.sweep import Grid1D
from radpair.system import BornState, Electron, NucleusSpec, PhysicalConstants, RadicalPairSpec
from radpair.tolerances import MAX_ABS_HYPERFINE_UT, MAX_HILBERT_DIM
from radpair.yields import Channel, HmfContrast

OUTPUT_FORMATS = ("csv", "jsonl", "json")
GRID_NAMES = ("B_uT", "a_uT", "k_per_s", "r_per_s")

_SECTION_KEYS = {
    "": {"nuclei", "constants", "defaults", "kinetics", "grids", "born", "channel", "output"},
    "nucleus": {"spin", "a_iso_uT", "electron"},
    "constants": {"gamma_e_per_s_per_T"},
    "defaults": {"B_hmf_uT", "B_gmf_uT"},
    "kinetics": {"k_per_s", "r_per_s", "B_uT"},
    "grids": set(GRID_NAMES),
    "grid": {"values", "start", "stop", "num", "spacing"},
    "output": {"path", "format"},
}
_UNIT_SUFFIXES = ("_uT", "_per_s", "_per_s_per_T")


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class Kinetics:
    k_per_s: float = 1e6
    r_per_s: float = 1e4
    B_uT: float = 50.0


@dataclass(frozen=True)
class OutputSpec:
    path: str | None = None
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    spec: RadicalPairSpec
    constants: PhysicalConstants = PhysicalConstants()
    contrast: HmfContrast = HmfContrast()
    kinetics: Kinetics = Kinetics()
    grids: dict = field(default_factory=dict)
    born: BornState = BornState.SINGLET
    channel: Channel = Channel.SINGLET
    output: OutputSpec = OutputSpec()


def _base(key: str) -> str:
    for suffix in sorted(_UNIT_SUFFIXES, key=len, reverse=True):
        if key.endswith(suffix):
            return key[: -len(suffix)]
    return key


def _check_keys(obj, section: str, path: str, errors: list) -> None:
    allowed = _SECTION_KEYS[section]
    for key in obj:
        if key in allowed:
            continue
        # a_iso_mT, k_per_ms, B_T ... carry a known quantity with the wrong unit
        match = [a for a in allowed if _base(a) != a and (key == _base(a) or key.startswith(_base(a) + "_"))]
        if match:
            expected = max(match, key=lambda a: len(_base(a)))
            errors.append(f"{path}{key}: unit-suffix mismatch, expected {expected}")
        else:
            errors.append(f"{path}{key}: unknown key")


def _number(obj, key, path, errors, *, positive=False, nonneg=False, default=None):
    if key not in obj:
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        errors.append(f"{path}{key}: must be a finite number, got {v!r}")
        return default
    if positive and not v > 0:
        errors.append(f"{path}{key}: must be > 0, got {v!r}")
        return default
    if nonneg and v < 0:
        errors.append(f"{path}{key}: must be >= 0, got {v!r}")
        return default
    return float(v)


def _section(data, name, errors):
    obj = data.get(name, {})
    if not isinstance(obj, dict):
        errors.append(f"{name}: must be an object")
        return {}
    _check_keys(obj, name, name + ".", errors)
    return obj


def _parse_nuclei(data, errors):
    raw = data.get("nuclei")
    if raw is None:
        errors.append("nuclei: required")
        return []
    if not isinstance(raw, list):
        errors.append("nuclei: must be a list")
        return []
    out = []
    for i, item in enumerate(raw):
        path = f"nuclei[{i}]."
        if not isinstance(item, dict):
            errors.append(f"nuclei[{i}]: must be an object")
            continue
        _check_keys(item, "nucleus", path, errors)
        ok = True
        try:
            spin = Spin.parse(item.get("spin", "1/2"))
            if spin.twice_spin < 1:
                errors.append(f"{path}spin: spin must be ≥ 1/2")
                ok = False
        except ValueError as exc:
            errors.append(f"{path}spin: {exc}")
            ok = False
        if "a_iso_uT" not in item:
            errors.append(f"{path}a_iso_uT: required")
            ok = False
        a = _number(item, "a_iso_uT", path, errors)
        if a is None:
            ok = False
        elif abs(a) >= MAX_ABS_HYPERFINE_UT:
            errors.append(f"{path}a_iso_uT: |a| must be below {MAX_ABS_HYPERFINE_UT:g}")
            ok = False
        try:
            electron = Electron(item.get("electron", "A"))
        except ValueError:
            errors.append(f"{path}electron: must be 'A' or 'B', got {item.get('electron')!r}")
            ok = False
        if ok:
            out.append(NucleusSpec(a, spin, electron))
    return out


def _parse_grid(name, obj, errors):
    path = f"grids.{name}."
    if not isinstance(obj, dict):
        errors.append(f"grids.{name}: must be an object")
        return None
    _check_keys(obj, "grid", path, errors)
    spacing = obj.get("spacing", "linear")
    try:
        if "values" in obj:
            if any(k in obj for k in ("start", "stop", "num")):
                errors.append(f"grids.{name}: give either values or start/stop/num")
                return None
            return Grid1D(name, tuple(obj["values"]), spacing)
        missing = [k for k in ("start", "stop", "num") if k not in obj]
        if missing:
            errors.append(f"grids.{name}: missing {', '.join(missing)}")
            return None
        num = obj["num"]
        if isinstance(num, bool) or not isinstance(num, int) or num < 1:
            errors.append(f"{path}num: must be a positive integer")
            return None
        if spacing == "log":
            if not (obj["start"] > 0 and obj["stop"] > 0):
                errors.append(f"grids.{name}: log grid must be strictly positive")
                return None
            return Grid1D.log(name, obj["start"], obj["stop"], num)
        return Grid1D(name, tuple(Grid1D.linear(name, obj["start"], obj["stop"], num).values), spacing)
    except (ValueError, TypeError) as exc:
        errors.append(f"grids.{name}: {exc}")
        return None


def config_from_dict(data) -> RunConfig:
    """Validate a decoded config; every problem is collected before raising."""
    errors: list[str] = []
    if not isinstance(data, dict):
        raise ConfigError(["config: top level must be an object"])
    _check_keys(data, "", "", errors)
    nuclei = _parse_nuclei(data, errors)

    consts = _section(data, "constants", errors)
    gamma = _number(consts, "gamma_e_per_s_per_T", "constants.", errors, positive=True, default=1.76e11)

    defaults = _section(data, "defaults", errors)
    b_hmf = _number(defaults, "B_hmf_uT", "defaults.", errors, nonneg=True, default=1.0)
    b_gmf = _number(defaults, "B_gmf_uT", "defaults.", errors, nonneg=True, default=50.0)

    kin = _section(data, "kinetics", errors)
    k = _number(kin, "k_per_s", "kinetics.", errors, positive=True, default=Kinetics.k_per_s)
    r = _number(kin, "r_per_s", "kinetics.", errors, nonneg=True, default=Kinetics.r_per_s)
    B = _number(kin, "B_uT", "kinetics.", errors, nonneg=True, default=Kinetics.B_uT)

    grids = {}
    for name, obj in _section(data, "grids", errors).items():
        if name in GRID_NAMES:
            g = _parse_grid(name, obj, errors)
            if g is not None:
                grids[name] = g

    born = channel = None
    try:
        born = BornState(data.get("born", "S"))
    except ValueError:
        errors.append(f"born: must be 'S' or 'T', got {data.get('born')!r}")
    try:
        channel = Channel(data.get("channel", "S"))
    except ValueError:
        errors.append(f"channel: must be 'S' or 'T', got {data.get('channel')!r}")

    out = _section(data, "output", errors)
    path = out.get("path")
    if path is not None and not isinstance(path, str):
        errors.append("output.path: must be a string or null")
    fmt = out.get("format", "csv")
    if fmt not in OUTPUT_FORMATS:
        errors.append(f"output.format: must be one of {OUTPUT_FORMATS}, got {fmt!r}")

    spec = None
    if not errors:
        try:
            spec = RadicalPairSpec(tuple(nuclei), MAX_HILBERT_DIM)
        except ValueError as exc:
            errors.append(f"nuclei: {exc}")
    if errors:
        raise ConfigError(errors)
    return RunConfig(
        spec=spec,
        constants=PhysicalConstants(gamma),
        contrast=HmfContrast(b_hmf, b_gmf),
        kinetics=Kinetics(k, r, B),
        grids=grids,
        born=born,
        channel=channel,
        output=OutputSpec(path, fmt),
    )


def parse_config(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config: invalid JSON ({exc})"]) from exc
    return config_from_dict(data)


def config_to_dict(cfg: RunConfig) -> dict:
    return {
        "nuclei": cfg.spec.to_dict()["nuclei"],
        "constants": {"gamma_e_per_s_per_T": cfg.constants.gamma_e},
        "defaults": {"B_hmf_uT": cfg.contrast.B_hmf, "B_gmf_uT": cfg.contrast.B_gmf},
        "kinetics": {"k_per_s": cfg.kinetics.k_per_s, "r_per_s": cfg.kinetics.r_per_s,
                     "B_uT": cfg.kinetics.B_uT},
        "grids": {name: {"values": list(g.values), "spacing": g.spacing} for name, g in cfg.grids.items()},
        "born": cfg.born.value,
        "channel": cfg.channel.value,
        "output": {"path": cfg.output.path, "format": cfg.output.format},
    }


def serialize_config(cfg: RunConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True)
