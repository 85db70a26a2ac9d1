"""Experiment configuration: a TOML-loadable bag of defaults the CLI flags override."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter version
    import tomli as tomllib

from .errors import InvalidArgumentError


@dataclass
class ExperimentConfig:
    """Defaults for CLI runs.  Every field is optional; None means 'not set'.

    ``to_dict`` and ``from_dict`` round-trip exactly: unset fields are omitted
    from the dict and come back as None.
    """

    graph: Optional[str] = None
    graph_b: Optional[str] = None
    p: Optional[list] = None
    sigma2: Optional[float] = None
    family_sigma2: Optional[float] = None
    t: Optional[int] = None
    t_list: Optional[list] = None
    c_list: Optional[list] = None
    a_grid: Optional[list] = None
    theta_points: Optional[int] = None
    partitions: Optional[list] = None
    u: Optional[int] = None
    seed: Optional[int] = None
    samples: Optional[int] = None
    t_max: Optional[int] = None
    tol: Optional[float] = None
    out: Optional[str] = None
    plot: Optional[str] = None

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name)
                for f in dataclasses.fields(self)
                if getattr(self, f.name) is not None}

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidArgumentError(
                f"unknown config keys {sorted(unknown)}; known keys are {sorted(known)}"
            )
        return cls(**data)

    @classmethod
    def from_toml(cls, path) -> "ExperimentConfig":
        with open(path, "rb") as fh:
            try:
                data = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise InvalidArgumentError(f"bad TOML in {path}: {exc}") from exc
        return cls.from_dict(data)
