"""Flat key=value run configuration with flag overrides.

The text form round-trips exactly: parse(render(cfg)) == cfg. Flags win
over file values; unknown keys are rejected so typos surface early.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .engine import DEFAULT_HARD_LIMIT


@dataclass(frozen=True)
class RunConfig:
    hard_limit: int = DEFAULT_HARD_LIMIT
    quad_tol: float = 1e-10
    angle_tol: float = 1e-9
    root_tol: float = 1e-12
    threads: int = 1
    output_dir: str = "out"
    cache_path: str = ""

    def render(self) -> str:
        lines = [f"{f.name}={getattr(self, f.name)!r}" for f in fields(self)]
        return "\n".join(lines) + "\n"

    def with_overrides(self, **overrides) -> "RunConfig":
        clean = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **clean)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def parse_config(text: str) -> RunConfig:
    values = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {ln}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _TYPES:
            raise ValueError(f"line {ln}: unknown key {key!r}")
        typ = _TYPES[key]
        val = val.strip()
        if typ == "int":
            values[key] = int(val)
        elif typ == "float":
            values[key] = float(val)
        else:
            values[key] = val.strip("'\"")
    return RunConfig(**values)


def load_config(path: Path | str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    return parse_config(Path(path).read_text())
