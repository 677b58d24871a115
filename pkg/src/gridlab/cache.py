"""Content-addressed on-disk cache for JSON results."""

from __future__ import annotations

import hashlib
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Optional, Sequence

TOOL_VERSION = "gridlab-0.1.0/r1"


def default_dir() -> Path:
    env = os.environ.get("GRIDLAB_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "gridlab"


def cache_key(operation: str, grid_texts: Sequence[str], params: Optional[dict] = None) -> str:
    doc = {"op": operation, "grids": list(grid_texts), "params": params or {}}
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class ResultCache:
    """Get/put of result strings keyed by :func:`cache_key`.

    Entries are written to a temporary file in the target directory and
    moved into place with ``os.replace``, so readers never see a partial
    entry.  Unreadable, truncated or stale-version entries count as misses.
    """

    def __init__(self, directory: Optional[os.PathLike] = None, enabled: bool = True,
                 version: str = TOOL_VERSION):
        self.dir = Path(directory) if directory is not None else default_dir()
        self.enabled = enabled
        self.version = version
        self._warned = False

    def _path(self, key: str) -> Path:
        return self.dir / key[:2] / f"{key}.json"

    def get(self, key: str) -> Optional[str]:
        if not self.enabled:
            return None
        try:
            raw = self._path(key).read_text()
            doc = json.loads(raw)
        except (OSError, ValueError):
            return None
        if not isinstance(doc, dict) or doc.get("tool_version") != self.version or doc.get("key") != key:
            return None
        value = doc.get("value")
        return value if isinstance(value, str) else None

    def put(self, key: str, value: str) -> bool:
        if not self.enabled:
            return False
        path = self._path(key)
        doc = json.dumps({"tool_version": self.version, "key": key, "value": value}, sort_keys=True)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
            try:
                with os.fdopen(fd, "w") as fh:
                    fh.write(doc)
                    fh.flush()
                    os.fsync(fh.fileno())
                os.replace(tmp, path)
            except BaseException:
                try:
                    os.unlink(tmp)
                except OSError:
                    pass
                raise
        except OSError as exc:
            if not self._warned:
                print(f"warning: cache disabled ({exc})", file=sys.stderr)
                self._warned = True
            self.enabled = False
            return False
        return True

    def fetch(self, key: str, compute) -> tuple:
        """``(value, hit)``: cached value or ``compute()`` stored under ``key``."""
        hit = self.get(key)
        if hit is not None:
            return hit, True
        value = compute()
        self.put(key, value)
        return value, False


def dumps(obj: Any) -> str:
    """Canonical JSON used for every machine-readable output."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
