"""Content-addressed disk cache for command results.

Entries live in ``$MULAB_CACHE`` (default ``.mulab-cache``), named by the
SHA-256 of the canonical job description.  Writes go to a temporary file
in the same directory and are moved into place with ``os.replace``, so
concurrent writers of the same job leave exactly one complete entry.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from . import __version__

__all__ = ["JobSpec", "cache_dir", "cache_lookup_store", "SCHEMA_VERSION"]

log = logging.getLogger("mulab.cache")

SCHEMA_VERSION = 1
_MAGIC = b"MULAB-CACHE"


@dataclass(frozen=True)
class JobSpec:
    command: str
    params: dict
    version: str = __version__

    def canonical(self) -> str:
        return json.dumps({"command": self.command, "params": self.params,
                           "version": self.version, "schema": SCHEMA_VERSION},
                          sort_keys=True, separators=(",", ":"))

    @property
    def key(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()


def cache_dir() -> Path:
    return Path(os.environ.get("MULAB_CACHE", ".mulab-cache"))


def _encode(spec: JobSpec, result: Any) -> bytes:
    body = json.dumps({"job": spec.canonical(), "result": result}, sort_keys=True).encode()
    head = b"%s %d %s\n" % (_MAGIC, SCHEMA_VERSION, hashlib.sha256(body).hexdigest().encode())
    return head + body


def _decode(spec: JobSpec, data: bytes) -> Any:
    head, _, body = data.partition(b"\n")
    magic, schema, digest = head.split(b" ")
    if magic != _MAGIC or int(schema) != SCHEMA_VERSION:
        raise ValueError("schema mismatch")
    if hashlib.sha256(body).hexdigest().encode() != digest:
        raise ValueError("checksum mismatch")
    obj = json.loads(body)
    if obj["job"] != spec.canonical():
        raise ValueError("entry belongs to another job")
    return obj["result"]


def cache_lookup_store(spec: JobSpec, producer: Callable[[], Any], enabled: bool = True,
                       directory: Path | None = None) -> Any:
    """Return the cached result for ``spec`` or compute, store and return it.

    Results must be JSON-serializable.  A corrupt or foreign entry counts as
    a miss and is overwritten.
    """
    if not enabled:
        return producer()
    d = directory or cache_dir()
    path = d / f"{spec.key}.bin"
    if path.exists():
        try:
            result = _decode(spec, path.read_bytes())
            log.info("cache hit %s %s", spec.command, spec.key[:12])
            return result
        except (ValueError, KeyError, json.JSONDecodeError) as e:
            log.warning("corrupt cache entry %s (%s); recomputing", path.name, e)
    result = producer()
    # normalize through JSON so hits and misses return identical objects
    result = json.loads(json.dumps(result, sort_keys=True))
    d.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(_encode(spec, result))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    log.info("cache store %s %s", spec.command, spec.key[:12])
    return result
