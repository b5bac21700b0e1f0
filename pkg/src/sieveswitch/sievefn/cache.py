"""On-disk table cache.

File layout (little endian)::

    b"SSFT"                magic
    u8                     format version
    u32                    header length N
    N bytes                UTF-8 JSON header
    float64 * len(values)  table values

The header carries kind, index_j, grid_start, grid_step, s_max,
refinement_level, the value count and a checksum of the defining constants.
A manifest.json next to the tables lists every file with its SHA-256.
"""

from __future__ import annotations

import csv
import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .. import __version__
from .functions import SieveFunctions
from .tables import EULER_GAMMA, REFINE_TOL, FunctionTable

MAGIC = b"SSFT"
FORMAT_VERSION = 1
MANIFEST = "manifest.json"


class StaleCacheError(Exception):
    """Cached tables were built from different defining constants."""


def constants_checksum(kind: str, index_j: int | None) -> str:
    text = f"gamma={EULER_GAMMA!r};kind={kind};j={index_j};tol={REFINE_TOL!r};v{FORMAT_VERSION}"
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def table_filename(table: FunctionTable) -> str:
    j = f"_j{table.index_j}" if table.index_j is not None else ""
    return f"{table.kind}{j}_smax{table.s_max:g}_step{table.grid_step:.0e}.sstab"


def write_table(table: FunctionTable, path: Path) -> None:
    header = {
        "kind": table.kind,
        "index_j": table.index_j,
        "grid_start": table.grid_start,
        "grid_step": table.grid_step,
        "s_max": table.s_max,
        "refinement_level": table.refinement_level,
        "count": int(len(table.values)),
        "checksum": constants_checksum(table.kind, table.index_j),
    }
    raw = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<BI", FORMAT_VERSION, len(raw)))
        fh.write(raw)
        fh.write(np.asarray(table.values, dtype="<f8").tobytes())


def read_table(path: Path) -> FunctionTable:
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ValueError(f"{path}: not a table file")
    version, hlen = struct.unpack_from("<BI", data, 4)
    if version != FORMAT_VERSION:
        raise StaleCacheError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    start = 4 + struct.calcsize("<BI")
    header = json.loads(data[start : start + hlen])
    if header["checksum"] != constants_checksum(header["kind"], header["index_j"]):
        raise StaleCacheError(f"{path}: defining-constant checksum mismatch")
    values = np.frombuffer(data, dtype="<f8", offset=start + hlen).astype(float)
    if len(values) != header["count"]:
        raise ValueError(f"{path}: truncated table")
    return FunctionTable(
        kind=header["kind"],
        grid_start=header["grid_start"],
        grid_step=header["grid_step"],
        values=values,
        s_max=header["s_max"],
        refinement_level=header["refinement_level"],
        index_j=header["index_j"],
    )


def export_csv(table: FunctionTable, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "value"])
        for s, v in zip(table.grid, table.values):
            writer.writerow([repr(float(s)), repr(float(v))])


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def save_cache(funcs: SieveFunctions, directory: Path) -> dict:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for table in funcs.build_all():
        name = table_filename(table)
        write_table(table, directory / name)
        entries.append(
            {
                "file": name,
                "kind": table.kind,
                "index_j": table.index_j,
                "refinement_level": table.refinement_level,
                "sha256": _sha256(directory / name),
            }
        )
    manifest = {
        "schema_version": 1,
        "tool_version": __version__,
        "ff_smax": funcs.ff_smax,
        "omega_smax": funcs.omega_smax,
        "j_max": funcs.j_max,
        "grid_step": funcs.grid_step,
        "tables": entries,
    }
    (directory / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return manifest


def load_cache(directory: Path) -> tuple[SieveFunctions, dict]:
    """Load every table listed in the manifest; raises StaleCacheError on mismatch."""
    directory = Path(directory)
    manifest = json.loads((directory / MANIFEST).read_text())
    funcs = SieveFunctions(
        ff_smax=manifest["ff_smax"],
        omega_smax=manifest["omega_smax"],
        j_max=manifest["j_max"],
        grid_step=manifest["grid_step"],
    )
    for entry in manifest["tables"]:
        path = directory / entry["file"]
        if _sha256(path) != entry["sha256"]:
            raise StaleCacheError(f"{path}: file checksum does not match manifest")
        funcs.install(read_table(path))
    return funcs, manifest
