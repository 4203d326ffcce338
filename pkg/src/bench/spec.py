"""
Experiment specifications.

An experiment is a TOML file:

    seeds = "0..9"
    max_iters = 20000
    record_stride = 100
    output = "results/spd100"

    [problem]
    generator = "spd"
    params = { n = 100, spectrum = "geometric", cond = 100.0 }

    [[methods]]
    name = "cdm"

    [[methods]]
    name = "acdm"
    alpha = 1.0

Problems come from a generator or from files (`matrix` + `rhs`, or `edges` +
`demands`); relative paths are resolved against the experiment file.
"""

from pathlib import Path
from typing import Any, Optional
import re

import toml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import SETTINGS

_SEED_RANGE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


def parse_seeds(value) -> list[int]:
    """'a..b' (inclusive), a single integer, or a list of integers."""
    if isinstance(value, bool):
        raise ValueError("seeds must be integers")
    if isinstance(value, int):
        return [value]
    if isinstance(value, (list, tuple)):
        if not value or not all(isinstance(s, int) and not isinstance(s, bool) for s in value):
            raise ValueError("seed list must be a nonempty list of integers")
        return list(value)
    if isinstance(value, str):
        match = _SEED_RANGE.match(value)
        if match:
            first, last = int(match.group(1)), int(match.group(2))
            if last < first:
                raise ValueError(f"empty seed range {value!r}")
            return list(range(first, last + 1))
        if value.strip().lstrip("-").isdigit():
            return [int(value)]
    raise ValueError(f"cannot parse seeds {value!r}; expected 'a..b'")


class ProblemSpec(BaseModel):
    generator: Optional[str] = None
    params: dict[str, Any] = Field(default_factory=dict)
    seed: int = 0
    matrix: Optional[Path] = None
    rhs: Optional[Path] = None
    edges: Optional[Path] = None
    demands: Optional[Path] = None

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _one_source(self) -> "ProblemSpec":
        sources = [self.generator is not None, self.matrix is not None, self.edges is not None]
        if sum(sources) != 1:
            raise ValueError("problem needs exactly one of generator, matrix or edges")
        if self.matrix is not None and self.rhs is None:
            raise ValueError("matrix problems need rhs")
        if self.edges is not None and self.demands is None:
            raise ValueError("graph problems need demands")
        return self

    def resolved(self, base: Path) -> "ProblemSpec":
        update = {}
        for name in ("matrix", "rhs", "edges", "demands"):
            path = getattr(self, name)
            if path is not None and not path.is_absolute():
                update[name] = base / path
        return self.model_copy(update=update)


class MethodSpec(BaseModel):
    """A method name plus its options (alpha, mode, sigma, L, tolerance, eps, tree_strategy...)."""

    name: str
    label: Optional[str] = None

    model_config = ConfigDict(frozen=True, extra="allow")

    @property
    def options(self) -> dict[str, Any]:
        return dict(self.model_extra or {})

    @property
    def key(self) -> str:
        return self.label or self.name


class ExperimentSpec(BaseModel):
    problem: ProblemSpec
    methods: list[MethodSpec] = Field(min_length=1)
    seeds: list[int] = Field(default_factory=lambda: [0])
    max_iters: int = Field(1000, gt=0)
    record_stride: int = Field(default_factory=lambda: SETTINGS.record_stride, ge=1)
    tolerance: float = Field(default_factory=lambda: SETTINGS.summary_tolerance, gt=0.0)
    output: Path = Path("results")
    threads: int = Field(1, ge=1)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("seeds", mode="before")
    @classmethod
    def _parse_seeds(cls, value):
        return parse_seeds(value)

    @model_validator(mode="after")
    def _unique_keys(self) -> "ExperimentSpec":
        keys = [m.key for m in self.methods]
        duplicates = sorted({k for k in keys if keys.count(k) > 1})
        if duplicates:
            raise ValueError(f"methods need distinct labels, repeated: {duplicates}")
        return self

    @classmethod
    def from_toml(cls, path) -> "ExperimentSpec":
        """Parse a spec file; raises FileNotFoundError, toml.TomlDecodeError or ValidationError."""
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Spec file not found: {path}")
        with open(path, "r", encoding="utf-8") as f:
            data = toml.load(f)
        spec = cls(**data)
        base = path.resolve().parent
        output = spec.output if spec.output.is_absolute() else base / spec.output
        return spec.model_copy(update={"problem": spec.problem.resolved(base), "output": output})
