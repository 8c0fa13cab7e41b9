"""INI-style experiment configuration: parsing with full validation (unknown
keys are errors), round-trippable emission, and unit conversion from the
MHz / ns quantities in config files to the rad/us and us used internally.

Layout::

    [experiment]
    kind = cci-dynamics        ; one of the subcommand names
    omega_mhz = 10.0           ; experiment-specific scalar keys
    phi = 1.5708

    [grid.t_ns]                ; one section per swept axis
    start = 0
    stop = 300
    count = 301

    [output]
    basename = cci             ; default: the experiment kind
    format = csv               ; csv | json

    [run]
    seed = 0
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi

EXPERIMENTS = ("cci-dynamics", "spectrum", "chiral", "entangle", "coupling", "fit")


class ConfigError(ValueError):
    """Invalid configuration; collects one message per offending field."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class OutputSpec:
    basename: str
    format: str = "csv"


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    params: dict = field(default_factory=dict)
    grids: dict = field(default_factory=dict)
    output: OutputSpec = OutputSpec(basename="result")
    seed: int = 0


def _positive(v: float) -> str | None:
    return None if v > 0 else "must be > 0"


def _nonnegative(v: float) -> str | None:
    return None if v >= 0 else "negative amplitude"


def _nonzero(v: float) -> str | None:
    return None if v != 0 else "must be nonzero"


# key -> (python type, required, default, validator or choices tuple)
_SCHEMAS: dict[str, dict] = {
    "cci-dynamics": {
        "omega_mhz": (float, False, 10.0, _nonnegative),
        "phi": (float, False, 0.0, None),
        "mode": (str, False, "direct", ("direct", "sandwich")),
    },
    "spectrum": {
        "omega_mhz": (float, False, 10.0, _nonnegative),
        "samples": (int, False, 1024, _positive),
        "dt_ns": (float, False, 0.0, _nonnegative),  # 0 = auto
        "delta1_mhz": (float, False, 0.0, None),
        "delta2_mhz": (float, False, 0.0, None),
        "delta3_mhz": (float, False, 0.0, None),
    },
    "chiral": {
        "phi": (float, False, -np.pi / 2, None),
        "window_tau": (float, False, 5.0, _positive),
        "steps_per_tau": (int, False, 2000, _positive),
        "record_every": (int, False, 50, _positive),
    },
    "entangle": {
        "j_mhz": (float, False, 6.7, _positive),
        "phi": (float, False, np.pi / 2, None),
        "psi0": (str, False, "eg", ("gg", "ge", "eg", "ee")),
    },
    "coupling": {
        "g_a_mhz": (float, True, None, _nonnegative),
        "g_b_mhz": (float, True, None, _nonnegative),
        "delta_a_mhz": (float, True, None, _nonzero),
        "delta_b_mhz": (float, True, None, _nonzero),
    },
    "fit": {
        "input_csv": (str, True, None, None),
        "t_column": (str, False, "t_ns", None),
        "p_column": (str, False, "P", None),
    },
}

# allowed grid axes per experiment: name -> (required, default GridSpec or None)
_GRID_SCHEMAS: dict[str, dict] = {
    "cci-dynamics": {"t_ns": (False, GridSpec(0.0, 300.0, 301))},
    "spectrum": {"phi": (False, GridSpec(-np.pi, np.pi, 51))},
    "chiral": {"a": (False, GridSpec(0.2, 2.5, 116))},
    "entangle": {"t_ns": (False, GridSpec(0.0, 60.0, 301))},
    "coupling": {},
    "fit": {},
}

_FORMATS = ("csv", "json")


def parse_config(text: str, kind: str | None = None) -> ExperimentConfig:
    """Parse and validate a config document.

    kind, when given, must match the document's experiment kind. Raises
    ConfigError listing every offending field.
    """
    cp = configparser.ConfigParser(interpolation=None)
    errors: list[str] = []
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"malformed config: {exc}"]) from exc
    sections = set(cp.sections())
    if "experiment" not in sections:
        raise ConfigError(["missing [experiment] section"])

    exp = dict(cp["experiment"])
    doc_kind = exp.pop("kind", None)
    if doc_kind is None:
        errors.append("experiment.kind: missing required key")
    elif doc_kind not in EXPERIMENTS:
        errors.append(f"experiment.kind: unknown experiment {doc_kind!r}")
    if kind is not None and doc_kind is not None and doc_kind != kind:
        errors.append(f"experiment.kind: config is for {doc_kind!r}, expected {kind!r}")
    if errors:
        raise ConfigError(errors)

    schema = _SCHEMAS[doc_kind]
    params: dict = {}
    failed: set[str] = set()
    for key, raw in exp.items():
        if key not in schema:
            errors.append(f"experiment.{key}: unknown key")
            continue
        typ, _, _, validator = schema[key]
        try:
            val = typ(raw)
        except ValueError:
            errors.append(f"experiment.{key}: expected {typ.__name__}, got {raw!r}")
            failed.add(key)
            continue
        if isinstance(validator, tuple):
            if val not in validator:
                errors.append(f"experiment.{key}: must be one of {validator}, got {val!r}")
                failed.add(key)
                continue
        elif validator is not None:
            msg = validator(val)
            if msg:
                errors.append(f"experiment.{key}: {msg}")
                failed.add(key)
                continue
        params[key] = val
    for key, (typ, required, default, _) in schema.items():
        if key not in params and key not in failed:
            if required:
                errors.append(f"experiment.{key}: missing required key")
            else:
                params[key] = default

    grid_schema = _GRID_SCHEMAS[doc_kind]
    grids: dict = {}
    for section in sorted(sections - {"experiment", "output", "run"}):
        if not section.startswith("grid."):
            errors.append(f"[{section}]: unknown section")
            continue
        axis = section[len("grid."):]
        if axis not in grid_schema:
            errors.append(f"[{section}]: experiment {doc_kind!r} takes no {axis!r} grid")
            continue
        body = dict(cp[section])
        vals = {}
        for key in ("start", "stop", "count"):
            if key not in body:
                errors.append(f"{section}.{key}: missing required key")
                continue
            raw = body.pop(key)
            try:
                vals[key] = int(raw) if key == "count" else float(raw)
            except ValueError:
                errors.append(f"{section}.{key}: not a number: {raw!r}")
        for key in body:
            errors.append(f"{section}.{key}: unknown key")
        if len(vals) == 3:
            if vals["count"] < 1:
                errors.append(f"{section}.count: must be >= 1")
            elif vals["stop"] < vals["start"]:
                errors.append(f"{section}: stop < start")
            else:
                grids[axis] = GridSpec(vals["start"], vals["stop"], vals["count"])
    for axis, (required, default) in grid_schema.items():
        if axis not in grids:
            if required:
                errors.append(f"[grid.{axis}]: missing required grid")
            elif default is not None:
                grids[axis] = default

    basename = doc_kind
    fmt = "csv"
    if "output" in sections:
        body = dict(cp["output"])
        basename = body.pop("basename", basename)
        fmt = body.pop("format", fmt)
        if fmt not in _FORMATS:
            errors.append(f"output.format: must be one of {_FORMATS}, got {fmt!r}")
        for key in body:
            errors.append(f"output.{key}: unknown key")

    seed = 0
    if "run" in sections:
        body = dict(cp["run"])
        raw = body.pop("seed", "0")
        try:
            seed = int(raw)
        except ValueError:
            errors.append(f"run.seed: not an integer: {raw!r}")
        for key in body:
            errors.append(f"run.{key}: unknown key")

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        kind=doc_kind, params=params, grids=grids,
        output=OutputSpec(basename=basename, format=fmt), seed=seed,
    )


def emit_config(config: ExperimentConfig) -> str:
    """Serialize a config so that parse_config(emit_config(c)) == c."""
    cp = configparser.ConfigParser(interpolation=None)
    cp["experiment"] = {"kind": config.kind}
    for key, val in config.params.items():
        cp["experiment"][key] = repr(val) if isinstance(val, float) else str(val)
    for axis, grid in config.grids.items():
        cp[f"grid.{axis}"] = {
            "start": repr(grid.start),
            "stop": repr(grid.stop),
            "count": str(grid.count),
        }
    cp["output"] = {"basename": config.output.basename, "format": config.output.format}
    cp["run"] = {"seed": str(config.seed)}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def mhz_to_rad_per_us(f_mhz: float) -> float:
    return TWO_PI * f_mhz


def ns_to_us(t_ns: float) -> float:
    return 1e-3 * t_ns
