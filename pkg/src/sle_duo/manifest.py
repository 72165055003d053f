"""Run manifests: reproducibility metadata written beside every CLI output."""

from __future__ import annotations

import hashlib
import json
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def versions_string() -> str:
    return (
        f"sle-duo {__version__}; numpy {np.__version__}; "
        f"python {platform.python_version()} ({sys.platform})"
    )


def write_manifest(
    out_path: Path,
    command: str,
    parameters: dict,
    started: str,
    finished: str,
    outputs: list[Path],
    seed: int | None = None,
) -> Path:
    manifest = {
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "versions": versions_string(),
        "started": started,
        "finished": finished,
        "checksums": {str(p): sha256_file(p) for p in outputs},
    }
    path = Path(str(out_path) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
