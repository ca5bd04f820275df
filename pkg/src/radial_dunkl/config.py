"""
Experiment configuration: a flat ``key = value`` text file plus command-line
overrides. Every key has a type, a default and a check; a configuration is
fully validated (root system built, multiplicities matched to orbits, start
point checked) before any command does work.

File syntax::

    # comment
    family = B
    size = 2
    multiplicities = 0.45, 0.2
    dt = 1e-5

Lists are comma separated. ``none`` clears an optional key.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import MultiplicityFunction
from .io import config_hash
from .roots import FAMILY_MINIMUM, RootSystem, RootSystemError, build_root_system
from .sde import SimulationConfig, default_start

__all__ = ["ConfigError", "SCHEMA", "ExperimentConfig", "parse_cfg_text", "load_config"]


class ConfigError(ValueError):
    """Invalid configuration (exit status 2)."""


def _float(s):
    return float(s)


def _int(s):
    v = float(s)
    if v != int(v):
        raise ValueError(f"not an integer: {s}")
    return int(v)


def _floats(s):
    return [float(p) for p in str(s).split(",") if p.strip()]


def _str(s):
    return str(s).strip()


# key: (parser, default, optional, help)
SCHEMA = {
    "family": (_str, "A", False, "root system family: A, B, C, D or I2"),
    "size": (_int, 3, False, "ambient dimension (A-D) or dihedral order m (I2)"),
    "chamber_vector": (_floats, None, True, "vector u fixing the positive roots"),
    "multiplicities": (_floats, [0.25], False, "k per orbit in orbit-id order; one value = uniform"),
    "x0": (_floats, None, True, "start point; default is start_distance from every simple wall"),
    "start_distance": (_float, 1.0, False, "wall distance of the default start point"),
    "T": (_float, 1.0, False, "time horizon"),
    "dt": (_float, 1e-3, False, "macro step; T must be a multiple"),
    "theta": (_float, 0.1, False, "substep threshold in (0, 1)"),
    "max_substeps": (_int, 4096, False, "largest refinement of one macro step (power of 2)"),
    "epsilon_coeff": (_float, 1.0, False, "collision threshold is epsilon_coeff * sqrt(dt)"),
    "fit_fine": (_float, 16.0, False, "finest fitted box size, in units of dt"),
    "fit_coarse": (_float, 16.0, False, "coarsest fitted box size is T / fit_coarse"),
    "path_count": (_int, 32, False, "number of paths"),
    "seed": (_int, 0, False, "64-bit master seed"),
    "thread_count": (_int, 0, False, "worker threads (0 = DUNKL_THREADS or all cores)"),
    "clock_target": (_float, 0.5, False, "clock time at which the time-changed V is sampled"),
    "calibrate": (_str, None, True, "dim only: interval, point, cantor3, cantor4 or besq"),
    "k": (_float, None, True, "dim --calibrate besq: multiplicity of the 1-d reference"),
    "cantor_depth": (_int, 12, False, "depth of the calibration Cantor sets"),
    "suite": (_str, "quick", False, "verify only: quick or full"),
    "write_csv": (_str, "false", False, "also write CSV copies of the path files"),
    "out": (_str, "results", False, "output directory"),
}

# keys that do not change any numerical result
_NON_RESULT_KEYS = ("thread_count", "out")
CALIBRATIONS = ("interval", "point", "cantor3", "cantor4", "besq")


def parse_cfg_text(text: str, source: str = "<config>") -> dict:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def _coerce(raw: dict) -> dict:
    values = {}
    for key, (parse, default, optional, _) in SCHEMA.items():
        if key not in raw or raw[key] is None:
            values[key] = default
            continue
        text = str(raw[key]).strip()
        if optional and text.lower() in ("", "none"):
            values[key] = None
            continue
        try:
            values[key] = parse(text)
        except ValueError as exc:
            raise ConfigError(f"{key}: cannot parse {text!r} ({exc})") from None
    return values


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Validated experiment settings plus the objects they describe."""

    values: dict
    system: RootSystem = field(repr=False)
    multiplicity: MultiplicityFunction = field(repr=False)
    x0: np.ndarray = field(repr=False)

    def __getattr__(self, name):
        values = self.__dict__.get("values", {})
        if name in values:
            return values[name]
        raise AttributeError(name)

    @classmethod
    def from_mapping(cls, raw: dict) -> "ExperimentConfig":
        unknown = set(raw) - set(SCHEMA)
        if unknown:
            raise ConfigError(f"unknown keys: {sorted(unknown)}")
        v = _coerce(raw)
        return cls._validate(v)

    @classmethod
    def _validate(cls, v: dict) -> "ExperimentConfig":
        fam = v["family"]
        if fam not in FAMILY_MINIMUM:
            raise ConfigError(f"family: unknown family {fam!r}")
        try:
            system = build_root_system(fam, v["size"], v["chamber_vector"])
        except RootSystemError as exc:
            raise ConfigError(f"root system: {exc}") from None
        ks = v["multiplicities"]
        if len(ks) == 1:
            ks = ks * system.n_orbits
        if len(ks) != system.n_orbits:
            raise ConfigError(
                f"multiplicities: {fam}{v['size']} has {system.n_orbits} orbits, got {len(ks)} values"
            )
        try:
            mult = MultiplicityFunction(tuple(ks))
        except ValueError as exc:
            raise ConfigError(f"multiplicities: {exc}") from None
        v["multiplicities"] = list(mult.per_orbit)
        if not v["start_distance"] > 0:
            raise ConfigError("start_distance: must be > 0")
        x0 = default_start(system, v["start_distance"]) if v["x0"] is None else np.asarray(v["x0"])
        for key in ("epsilon_coeff",):
            if not v[key] >= 0:
                raise ConfigError(f"{key}: must be >= 0")
        for key in ("fit_fine", "fit_coarse", "clock_target"):
            if not v[key] > 0:
                raise ConfigError(f"{key}: must be > 0")
        if v["path_count"] < 1:
            raise ConfigError("path_count: must be >= 1")
        if v["thread_count"] < 0:
            raise ConfigError("thread_count: must be >= 0")
        if v["cantor_depth"] < 4 or v["cantor_depth"] > 14:
            raise ConfigError("cantor_depth: must lie in [4, 14]")
        if v["calibrate"] is not None and v["calibrate"] not in CALIBRATIONS:
            raise ConfigError(f"calibrate: expected one of {CALIBRATIONS}")
        if v["k"] is not None and not v["k"] > 0:
            raise ConfigError("k: must be > 0")
        if v["suite"] not in ("quick", "full"):
            raise ConfigError("suite: expected quick or full")
        if v["write_csv"].lower() not in ("true", "false"):
            raise ConfigError("write_csv: expected true or false")
        v["write_csv"] = v["write_csv"].lower()
        # reuses the engine's own checks on x0, T, dt, theta, max_substeps
        try:
            SimulationConfig(
                system=system, multiplicity=mult, x0=x0, T=v["T"], dt=v["dt"], theta=v["theta"],
                max_substeps=v["max_substeps"], seed=v["seed"], path_count=v["path_count"],
            )
        except ValueError as exc:
            raise ConfigError(f"simulation: {exc}") from None
        v["x0"] = [float(c) for c in x0]
        v["chamber_vector"] = [float(c) for c in system.chamber_vector]
        return cls(values=v, system=system, multiplicity=mult, x0=np.asarray(x0, dtype=float))

    def simulation(self, **overrides) -> SimulationConfig:
        kw = dict(
            system=self.system, multiplicity=self.multiplicity, x0=self.x0, T=self.T,
            dt=self.dt, theta=self.theta, max_substeps=self.max_substeps, seed=self.seed,
            path_count=self.path_count,
        )
        kw.update(overrides)
        return SimulationConfig(**kw)

    def result_dict(self) -> dict:
        """Resolved settings that determine the numerical results."""
        return {k: v for k, v in self.values.items() if k not in _NON_RESULT_KEYS}

    @property
    def hash(self) -> str:
        return config_hash(self.result_dict())


def load_config(path=None, overrides=None) -> ExperimentConfig:
    """Read ``path`` (optional), apply ``overrides`` and validate."""
    raw = {}
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
        raw.update(parse_cfg_text(text, str(p)))
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    return ExperimentConfig.from_mapping(raw)
