"""Loader for the coefficient tables shipped with the package."""
from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from importlib import resources


class ChecksumError(ValueError):
    """A data file does not match its recorded checksum."""


def canonical(tables) -> str:
    return json.dumps(tables, sort_keys=True, separators=(",", ":"))


@lru_cache(maxsize=None)
def load_tables(name: str) -> dict:
    """Return the ``tables`` object of ``vptkit/data/<name>.json`` after checking it."""
    text = resources.files("vptkit.data").joinpath(f"{name}.json").read_text(encoding="utf-8")
    doc = json.loads(text)
    digest = hashlib.sha256(canonical(doc["tables"]).encode()).hexdigest()
    if digest != doc["sha256"]:
        raise ChecksumError(f"{name}.json: checksum {digest} != recorded {doc['sha256']}")
    return doc["tables"]
