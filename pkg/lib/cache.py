"""
Content-addressed on-disk store for command results.

The key is the sha256 of the canonical JSON of (command, params, version), so
a version bump makes every older entry unreachable. Writes go to a temporary
file in the cache directory and are moved into place with ``os.replace``.
"""

import hashlib
import json
import logging
import os
import tempfile
import time
from pathlib import Path
from typing import Optional

from .serialize import canonical_dumps

logger = logging.getLogger(__name__)

CACHE_DIR_ENV = "KR_CACHE_DIR"


def cache_key(command: str, params: dict, version: str) -> str:
    payload = canonical_dumps({"command": command, "params": params, "version": version})
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ResultCache:
    def __init__(self, directory, version: str):
        self.directory = Path(directory)
        self.version = version

    @classmethod
    def from_config(cls, config: dict, version: str) -> "ResultCache":
        directory = os.environ.get(CACHE_DIR_ENV) or config["cache"]["directory"]
        return cls(Path(directory).expanduser(), version)

    def path_for(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, command: str, params: dict) -> Optional[dict]:
        key = cache_key(command, params, self.version)
        path = self.path_for(key)
        if not path.exists():
            logger.debug("cache miss %s %s", command, key[:12])
            return None
        try:
            entry = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            logger.debug("unreadable cache entry %s: %s", path, e)
            return None
        if entry.get("version") != self.version or entry.get("key") != key:
            logger.debug("stale cache entry %s", path)
            return None
        logger.debug("cache hit %s %s", command, key[:12])
        return entry["value"]

    def put(self, command: str, params: dict, value: dict) -> Path:
        key = cache_key(command, params, self.version)
        self.directory.mkdir(parents=True, exist_ok=True)
        entry = {
            "key": key,
            "version": self.version,
            "command": command,
            "params": params,
            "timestamp": time.time(),
            "value": value,
        }
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump(entry, f, indent=2)
            os.replace(tmp, self.path_for(key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        logger.debug("cache put %s %s", command, key[:12])
        return self.path_for(key)

    def clear(self) -> int:
        """Remove every entry; returns how many were removed."""
        if not self.directory.exists():
            return 0
        removed = 0
        for path in self.directory.glob("*.json"):
            path.unlink()
            removed += 1
        return removed

    def entries(self) -> list:
        if not self.directory.exists():
            return []
        return sorted(p.stem for p in self.directory.glob("*.json") if not p.name.startswith(".tmp-"))
