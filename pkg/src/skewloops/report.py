"""Run configuration and structured reports for the command line."""

import os
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, fields

from . import io

ENV_PREFIX = "SKEWLOOPS_"


@dataclass
class RunConfig:
    refute_tol: float = 1e-10
    quadrature_tol: float = 1e-10
    symmetry_tol: float = 1e-12
    box_budget: int = 1_000_000
    projection_degree_cap: int = 512
    workers: int = 1
    seed: int = 0
    out: str = None
    format: str = "json"

    def __post_init__(self):
        for name in ("refute_tol", "quadrature_tol", "symmetry_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.box_budget < 1 or self.workers < 1 or self.projection_degree_cap < 1:
            raise ValueError("budget, workers and degree cap must be positive")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


def env_default(name, cast, default=None, environ=None):
    """Value of ``SKEWLOOPS_<NAME>`` cast by ``cast``, else ``default``."""
    environ = os.environ if environ is None else environ
    raw = environ.get(ENV_PREFIX + name.upper())
    if raw is None or raw == "":
        return default
    return cast(raw)


@dataclass
class Report:
    command: list
    config: dict
    results: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    @contextmanager
    def timed(self, label):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[label] = time.perf_counter() - t0

    def to_dict(self, timings=True):
        d = {"command": self.command, "config": self.config, "results": self.results}
        if timings:
            d["timings"] = self.timings
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(d["command"], d["config"], d.get("results", {}), d.get("timings", {}))

    def to_json(self, timings=True):
        return io.dumps(self.to_dict(timings))

    def to_text(self):
        lines = [" ".join(self.command)]
        _flatten(self.results, "", lines)
        return "\n".join(lines)


def _flatten(obj, prefix, lines):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(obj[k], f"{prefix}{k}.", lines)
        return
    lines.append(f"{prefix.rstrip('.')}: {obj}")
