"""Run configuration with a lossless JSON file format.

A depth of None means "chosen from the cell size by the accuracy rule".
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path

from .errors import DomainError

SCHEMA = "peribeta.config/1"


@dataclass(frozen=True)
class RunConfig:
    base: str = "-1,-1,0,1"
    depth: int | None = None
    precision_bits: int = 32
    cell: float = 0.01
    qmax: int = 200
    lo: str = "0"
    hi: str = "1"
    budget: int = 10 ** 7
    threads: int = 1
    out: str = "."
    write_csv: bool = True
    write_raster: bool = True
    write_json: bool = True

    def __post_init__(self):
        for name in ("depth", "precision_bits", "qmax", "budget", "threads"):
            v = getattr(self, name)
            if v is None and name == "depth":
                continue
            if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
                raise DomainError(f"{name} must be a positive integer")
        if isinstance(self.cell, bool) or not (isinstance(self.cell, (int, float))
                                               and self.cell > 0):
            raise DomainError("cell must be positive")
        try:
            lo, hi = Fraction(self.lo), Fraction(self.hi)
        except (TypeError, ValueError, ZeroDivisionError):
            raise DomainError("scan bounds must be rationals such as 2/3")
        if not (0 <= lo < hi <= 1):
            raise DomainError("scan bounds need 0 <= lo < hi <= 1")

    def to_json(self) -> str:
        data = {"schema": SCHEMA}
        data.update(asdict(self))
        return json.dumps(data, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"config is not valid JSON: {exc}")
        if not isinstance(data, dict):
            raise DomainError("config must be a JSON object")
        schema = data.pop("schema", SCHEMA)
        if schema != SCHEMA:
            raise DomainError(f"unsupported config schema {schema!r}")
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise DomainError(f"unknown config keys: {', '.join(sorted(extra))}")
        return cls(**data)

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_json())
        return path

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_json(Path(path).read_text())
