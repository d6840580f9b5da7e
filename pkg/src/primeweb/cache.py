"""On-disk cache of ray values keyed by (filter_id, generator, depth).

Entries are append-only JSON lines, each carrying the engine version and
a checksum. A corrupted or mismatching line is evicted on load and never
served; audits recompute a sample and must see zero mismatches. Append
is the only write, so concurrent readers stay consistent.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
from pathlib import Path

from .engine import PrimeIndexer
from .filters import make_filter

CACHE_VERSION = 1
ENV_CACHE_PATH = "PRIMEWEB_CACHE"


def default_cache_path() -> Path:
    env = os.environ.get(ENV_CACHE_PATH)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "primeweb" / "rays.jsonl"


def _checksum(filter_id: str, generator: int, depth: int, value: int) -> str:
    raw = f"{filter_id}|{generator}|{depth}|{value}|{CACHE_VERSION}"
    return hashlib.sha256(raw.encode()).hexdigest()[:16]


def compute_ray_value(
    filter_id: str, generator: int, depth: int, engine: PrimeIndexer | None = None
) -> int:
    """Ground truth for a cache entry: depth-fold nth-element iteration."""
    flt = make_filter(filter_id, engine)
    cur = generator
    for _ in range(depth):
        cur = flt.nth(cur)
    return cur


class RayCache:
    def __init__(self, path: Path | str | None = None):
        self.path = Path(path) if path is not None else default_cache_path()
        self._entries: dict[tuple[str, int, int], int] = {}
        self.evicted = 0
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            return
        bad = 0
        for line in self.path.read_text().splitlines():
            if not line.strip():
                continue
            try:
                e = json.loads(line)
                key = (str(e["filter"]), int(e["generator"]), int(e["depth"]))
                value = int(e["value"])
                ok = (
                    e.get("version") == CACHE_VERSION
                    and e.get("sha") == _checksum(key[0], key[1], key[2], value)
                )
            except (ValueError, KeyError, TypeError):
                ok = False
            if ok:
                self._entries[key] = value
            else:
                bad += 1
        self.evicted = bad
        if bad:
            self._rewrite()

    def _rewrite(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_suffix(".tmp")
        with tmp.open("w") as fh:
            for key in sorted(self._entries):
                fh.write(self._line(*key, self._entries[key]))
        tmp.replace(self.path)

    @staticmethod
    def _line(filter_id: str, generator: int, depth: int, value: int) -> str:
        entry = {
            "filter": filter_id,
            "generator": generator,
            "depth": depth,
            "value": value,
            "version": CACHE_VERSION,
            "sha": _checksum(filter_id, generator, depth, value),
        }
        return json.dumps(entry, sort_keys=True) + "\n"

    def get(self, filter_id: str, generator: int, depth: int) -> int | None:
        return self._entries.get((filter_id, generator, depth))

    def put(self, filter_id: str, generator: int, depth: int, value: int) -> None:
        key = (filter_id, generator, depth)
        if self._entries.get(key) == value:
            return
        self._entries[key] = value
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as fh:
            fh.write(self._line(filter_id, generator, depth, value))

    def get_or_compute(
        self,
        filter_id: str,
        generator: int,
        depth: int,
        engine: PrimeIndexer | None = None,
    ) -> int:
        hit = self.get(filter_id, generator, depth)
        if hit is not None:
            return hit
        value = compute_ray_value(filter_id, generator, depth, engine)
        self.put(filter_id, generator, depth, value)
        return value

    def audit(
        self,
        engine: PrimeIndexer | None = None,
        fraction: float = 0.01,
        seed: int = 0,
    ) -> dict:
        """Recompute a sample; mismatching entries are evicted."""
        keys = sorted(self._entries)
        if not keys:
            return {"entries": 0, "sampled": 0, "mismatches": 0, "evicted": 0}
        k = max(1, int(len(keys) * fraction))
        sample = random.Random(seed).sample(keys, min(k, len(keys)))
        engine = engine or PrimeIndexer()
        mismatches = []
        for filter_id, generator, depth in sample:
            truth = compute_ray_value(filter_id, generator, depth, engine)
            if truth != self._entries[(filter_id, generator, depth)]:
                mismatches.append((filter_id, generator, depth))
        for key in mismatches:
            del self._entries[key]
        if mismatches:
            self._rewrite()
        return {
            "entries": len(keys),
            "sampled": len(sample),
            "mismatches": len(mismatches),
            "evicted": len(mismatches),
        }

    def clear(self) -> None:
        self._entries.clear()
        if self.path.exists():
            self.path.unlink()

    def stats(self) -> dict:
        size = self.path.stat().st_size if self.path.exists() else 0
        return {
            "path": str(self.path),
            "entries": len(self._entries),
            "bytes": size,
            "evicted_on_load": self.evicted,
        }
