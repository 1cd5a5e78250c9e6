"""Run configuration: flat ``key = value`` files with ``#`` comments."""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field, fields


class ConfigError(ValueError):
    pass


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("on", "true", "yes", "1"):
        return True
    if t in ("off", "false", "no", "0"):
        return False
    raise ConfigError(f"expected on/off, got {text!r}")


def _parse_grid(text: str) -> tuple[float, ...]:
    """``start:stop:step`` (stop inclusive) or a comma separated list."""
    text = text.strip()
    if ":" in text:
        start, stop, step = (float(p) for p in text.split(":"))
        if step <= 0 or stop < start:
            raise ConfigError(f"bad grid range {text!r}")
        n = int(round((stop - start) / step)) + 1
        return tuple(round(start + i * step, 10) for i in range(n))
    return tuple(float(p) for p in text.split(",") if p.strip())


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, tuple):
        return ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
    return str(value)


@dataclass(frozen=True)
class RunConfig:
    data: str = "data.csv"
    odds_columns: tuple[str, ...] = ("B365H", "B365D", "B365A")
    k_factor: float = 32.0
    scale_a: float = 400.0
    initial_rating: float = 500.0
    window: int = 10
    model: str = "ols"
    knn_k: int = 50
    mad_rescale: bool = True
    n_simulations: int = 10_000
    max_shots: int = 50
    seed: int = 0
    tail_n: int = 300
    resample_ratings: str = "per_sim"
    block_size: int = 1024
    workers: int = 1
    strategy: int = 2
    bet_scope: str = "per_market"
    p_min: float = 0.001
    margin_def: str = "inverse"
    bias_grid: tuple[float, ...] = field(default_factory=lambda: _parse_grid("0.8:1.5:0.01"))
    out: str = "out"

    def __post_init__(self):
        checks = [
            (self.k_factor > 0, "k_factor must be positive"),
            (self.scale_a > 0, "scale_a must be positive"),
            (self.window >= 1, "window must be >= 1"),
            (self.model in ("ols", "knn"), "model must be ols or knn"),
            (self.knn_k >= 1, "knn_k must be >= 1"),
            (self.n_simulations >= 1, "n_simulations must be >= 1"),
            (self.max_shots >= 1, "max_shots must be >= 1"),
            (0 <= self.seed < 2**64, "seed must be an unsigned 64-bit integer"),
            (self.tail_n >= 1, "tail_n must be >= 1"),
            (self.resample_ratings in ("per_sim", "once"), "resample_ratings must be per_sim or once"),
            (self.block_size >= 1, "block_size must be >= 1"),
            (self.workers >= 1, "workers must be >= 1"),
            (self.strategy in (1, 2), "strategy must be 1 or 2"),
            (self.bet_scope in ("per_market", "best_market"), "bet_scope must be per_market or best_market"),
            (0 < self.p_min < 1, "p_min must lie in (0, 1)"),
            (self.margin_def in ("inverse", "overround"), "margin_def must be inverse or overround"),
            (len(self.odds_columns) == 3, "odds_columns must name three columns"),
            (len(self.bias_grid) > 0 and all(m > 0 for m in self.bias_grid), "bias_grid must be non-empty and positive"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_text(self) -> str:
        return "".join(f"{f.name} = {_fmt(getattr(self, f.name))}\n" for f in fields(self))

    def digest(self) -> str:
        """SHA-256 of the canonical text form; changes iff some field changes."""
        return hashlib.sha256(self.to_text().encode()).hexdigest()


def _convert(name: str, raw: str, default):
    try:
        if isinstance(default, bool):
            return _parse_bool(raw)
        if name == "bias_grid":
            return _parse_grid(raw)
        if name == "odds_columns":
            return tuple(p.strip() for p in raw.split(","))
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r} ({exc})") from None


def parse_config(text: str) -> RunConfig:
    defaults = RunConfig()
    known = {f.name for f in fields(RunConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = (p.strip() for p in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, raw, getattr(defaults, key))
    return RunConfig(**values)


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
