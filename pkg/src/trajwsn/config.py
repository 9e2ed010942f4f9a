"""Scenario configuration.

Grammar: an INI-style text file. Every setting has a dotted key
``<section>.<name>`` and may be written either flat::

    network.n_nodes = 100
    radio.eps1 = 10e-12

or under a section header::

    [radio]
    eps1 = 10e-12

``#`` and ``;`` start comment lines. Unknown keys are rejected. An empty file
yields the defaults below (100 nodes, 100 m field, 2 J, 516-byte messages).
"""
from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .energy import EnergyModelError, FieldParams, RadioParams

ALGORITHMS = ("trajectory", "leach")
THRESHOLD_MODES = ("sweep", "fixed")
_ROOT = "__root__"


class ConfigError(ValueError):
    pass


def _opt(section, default, help=""):
    return field(default=default, metadata={"section": section, "help": help})


@dataclass(frozen=True)
class SimConfig:
    n_nodes: int = _opt("network", 100, "number of sensors")
    side_m: float = _opt("network", 100.0, "field side length A")
    bs_x: float | None = _opt("network", None, "base station x (default side/2)")
    bs_y: float | None = _opt("network", None, "base station y (default side+40)")
    initial_energy_j: float = _opt("network", 2.0, "initial battery per node")
    radio_range_m: float = _opt("network", 30.0, "hello-path hop range")

    message_bytes: int = _opt("traffic", 516, "data message size")
    control_bits: int = _opt("traffic", 200, "hello / broadcast / rotation message size")

    algorithm: str = _opt("election", "both", "trajectory | leach | both")
    threshold_mode: str = _opt("election", "sweep", "sweep | fixed")
    threshold_m: float | None = _opt("election", None, "fixed-mode threshold (default half the max dissimilarity)")
    d1_m: float = _opt("election", 90.0, "head-to-base-station distance for the cluster-count estimate")
    reelect_period: int = _opt("election", 20, "rounds between periodic re-elections")
    p_head: float | None = _opt("election", None, "baseline head probability (default M/N)")

    rotate_below_member_mean: bool = _opt("rotation", True, "rotate when head energy < mean member energy")
    rotate_min_fraction: float = _opt("rotation", 0.05, "rotate when head energy < this fraction of initial")

    max_rounds: int = _opt("run", 20000, "round cap per run")
    seeds: tuple[int, ...] = _opt("run", (1,), "comma-separated seeds")
    seed_count: int | None = _opt("run", None, "if set, seeds = first seed .. first seed + count - 1")
    workers: int = _opt("run", 1, "parallel runs")

    e_tx: float = _opt("radio", 50e-9, "J/bit")
    e_rx: float = _opt("radio", 50e-9, "J/bit")
    e_da: float = _opt("radio", 5e-9, "J/bit")
    eps1: float = _opt("radio", 10e-12, "J/(bit m^2)")
    eps2: float = _opt("radio", 0.0013e-12, "J/(bit m^4)")

    # accepted for documentation of the original comparison target; unused
    c1: float = _opt("eecr", 0.5)
    c2: float = _opt("eecr", 0.4)
    c3: float = _opt("eecr", 0.1)

    def __post_init__(self):
        validate(self)

    @property
    def message_bits(self) -> int:
        return 8 * self.message_bytes

    @property
    def base_station(self) -> tuple[float, float]:
        x = self.side_m / 2 if self.bs_x is None else self.bs_x
        y = self.side_m + 40.0 if self.bs_y is None else self.bs_y
        return (float(x), float(y))

    @property
    def radio(self) -> RadioParams:
        return RadioParams(self.e_tx, self.e_rx, self.e_da, self.eps1, self.eps2)

    @property
    def field_params(self) -> FieldParams:
        return FieldParams(self.n_nodes, self.side_m, self.d1_m)

    @property
    def algorithms(self) -> tuple[str, ...]:
        return ALGORITHMS if self.algorithm == "both" else (self.algorithm,)

    @property
    def seed_list(self) -> tuple[int, ...]:
        if self.seed_count is None:
            return self.seeds
        return tuple(range(self.seeds[0], self.seeds[0] + self.seed_count))

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)


def option_keys() -> dict[str, dataclasses.Field]:
    return {f"{f.metadata['section']}.{f.name}": f for f in fields(SimConfig)}


def validate(cfg: SimConfig) -> None:
    def need(ok, key, what):
        if not ok:
            raise ConfigError(f"{key}: {what} (got {getattr(cfg, key.split('.')[-1])!r})")

    need(cfg.n_nodes >= 1, "network.n_nodes", "must be >= 1")
    for key in ("network.side_m", "network.initial_energy_j", "network.radio_range_m", "election.d1_m"):
        v = getattr(cfg, key.split(".")[1])
        need(math.isfinite(v) and v > 0, key, "must be a positive number")
    for key in ("network.bs_x", "network.bs_y"):
        v = getattr(cfg, key.split(".")[1])
        need(v is None or math.isfinite(v), key, "must be finite")
    need(cfg.message_bytes >= 1, "traffic.message_bytes", "must be >= 1")
    need(cfg.control_bits >= 0, "traffic.control_bits", "must be >= 0")
    need(cfg.algorithm in ALGORITHMS + ("both",), "election.algorithm", "must be trajectory, leach or both")
    need(cfg.threshold_mode in THRESHOLD_MODES, "election.threshold_mode", "must be sweep or fixed")
    need(cfg.threshold_m is None or cfg.threshold_m >= 0, "election.threshold_m", "must be >= 0")
    need(cfg.reelect_period >= 1, "election.reelect_period", "must be >= 1")
    need(cfg.p_head is None or 0 < cfg.p_head <= 1, "election.p_head", "must lie in (0, 1]")
    need(0 <= cfg.rotate_min_fraction < 1, "rotation.rotate_min_fraction", "must lie in [0, 1)")
    need(cfg.max_rounds >= 0, "run.max_rounds", "must be >= 0")
    need(len(cfg.seeds) >= 1, "run.seeds", "at least one seed required")
    need(cfg.seed_count is None or cfg.seed_count >= 1, "run.seed_count", "must be >= 1")
    need(cfg.workers >= 1, "run.workers", "must be >= 1")
    try:
        cfg.radio
    except EnergyModelError as exc:
        raise ConfigError(f"radio: {exc}") from None


def _convert(f: dataclasses.Field, key: str, raw: str):
    text = raw.strip()
    kind = str(f.type)
    try:
        if text.lower() in ("", "none", "null") and "None" in kind:
            return None
        if kind.startswith("bool"):
            lowered = text.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if kind.startswith("int"):
            return int(text)
        if kind.startswith("float"):
            return float(text)
        if kind.startswith("tuple"):
            return tuple(int(s) for s in text.replace(",", " ").split())
        return text
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def parse_overrides(pairs: dict[str, str], base: SimConfig | None = None) -> SimConfig:
    known = option_keys()
    changes = {}
    for key, raw in pairs.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        f = known[key]
        changes[f.name] = _convert(f, key, raw) if isinstance(raw, str) else raw
    base = base or SimConfig()
    try:
        return dataclasses.replace(base, **changes)
    except TypeError as exc:  # pragma: no cover
        raise ConfigError(str(exc)) from None


def parse_config_text(text: str, source: str = "<config>") -> SimConfig:
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=("#",), default_section="__unused_default__")
    try:
        parser.read_string(f"[{_ROOT}]\n" + text, source=source)
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"{source}: parse error at line {lineno - 1}: {line.strip()}") from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"{source}: duplicate key {exc.option!r} at line {exc.lineno - 1}") from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"{source}: duplicate section {exc.section!r} at line {exc.lineno - 1}") from None
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    pairs = {}
    for section in parser.sections():
        for name, value in parser.items(section):
            key = name if section == _ROOT else f"{section}.{name}"
            if key in pairs:
                raise ConfigError(f"{source}: key {key!r} given twice")
            pairs[key] = value
    return parse_overrides(pairs)


def load_config(path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text, source=str(path))
