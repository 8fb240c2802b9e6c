"""Result files: CSV tables, JSON documents, and the run manifest.

Files are written to a staging directory next to the target and moved in
only when every file is complete; a failed run leaves nothing behind.
The manifest goes last, so its presence marks a finished run. Timestamps
appear only in the manifest; every other byte is a function of the
settings and seed.
"""
from __future__ import annotations

import csv
import hashlib
import json
import os
import shutil
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from . import __version__

CSV_SCHEMA_VERSION = 1
MANIFEST = "manifest.json"


class Table:
    def __init__(self, columns: list[str], rows: list[dict]):
        self.columns = columns
        self.rows = rows


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return " ".join(str(_fmt(x)) for x in v)
    return v


def write_csv(path: Path, name: str, table: Table) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# rtgsim-csv v{CSV_SCHEMA_VERSION} {name}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_fmt(row[c]) for c in table.columns])


def read_csv(path: str | os.PathLike) -> tuple[str, list[dict]]:
    """Return ``(schema comment, rows)``; values stay strings."""
    with open(path, newline="") as fh:
        schema = fh.readline().rstrip("\n")
        return schema, list(csv.DictReader(fh))


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def emit_results(out_dir: str | os.PathLike, tables: dict[str, Table], documents: dict[str, object],
                 text_files: dict[str, str] | None = None, manifest_extra: dict | None = None,
                 started: datetime | None = None) -> dict[str, str]:
    """Write all outputs plus the manifest; return ``{file name: sha256}``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=out))
    try:
        for name, table in tables.items():
            write_csv(staging / name, name, table)
        for name, doc in documents.items():
            with open(staging / name, "w") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
                fh.write("\n")
        for name, text in (text_files or {}).items():
            with open(staging / name, "w") as fh:
                fh.write(text)
        checksums = {p.name: sha256(p) for p in sorted(staging.iterdir())}
        for name in checksums:
            os.replace(staging / name, out / name)
    finally:
        shutil.rmtree(staging, ignore_errors=True)

    manifest = {
        "tool": "rtgsim",
        "version": __version__,
        "started": (started or datetime.now(timezone.utc)).isoformat(),
        "finished": datetime.now(timezone.utc).isoformat(),
        "files": checksums,
        "csv_schema_version": CSV_SCHEMA_VERSION,
    }
    manifest.update(manifest_extra or {})
    tmp = out / (MANIFEST + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, out / MANIFEST)
    return checksums
