"""
Run artifacts: binary snapshots, ledger CSV and the run manifest.

Snapshot file layout (little-endian):

    8 bytes   magic b"DYNPSNAP"
    uint32    format version
    uint32    header length L
    L bytes   UTF-8 JSON header (grid, config hash, field names and shapes)
    records   fixed-size float64 blocks: step, t, u, v, e, p, sigma, de, dp, T, pD

Nothing time-dependent is written, so identical runs give identical bytes.
"""

import hashlib
import json
import logging
import struct
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from dynplast.common.exceptions import ConfigHashMismatchError, SnapshotIntegrityError
from dynplast.discretization.grid import Grid
from dynplast.dynamics.ledger import LEDGER_COLUMNS
from dynplast.dynamics.state import State, StepRecord

logger = logging.getLogger(__name__)

MAGIC = b"DYNPSNAP"
FORMAT_VERSION = 1
SNAPSHOT_FILE = "snapshots.bin"
LEDGER_FILE = "ledger.csv"
MANIFEST_FILE = "manifest.json"
HASH_PREFIX = "# config_hash="

PathLike = Union[str, Path]


def field_layout(grid: Grid, n_boundary: int) -> List[Tuple[str, Tuple[int, ...]]]:
    node = grid.node_shape + (2,)
    cell = grid.cell_shape + (2, 2)
    return [
        ("step", ()),
        ("t", ()),
        ("u", node),
        ("v", node),
        ("e", cell),
        ("p", cell),
        ("sigma", cell),
        ("de", cell),
        ("dp", cell),
        ("T", (n_boundary, 2)),
        ("pD", (n_boundary, 2)),
    ]


def _record_size(layout) -> int:
    return sum(int(np.prod(shape)) if shape else 1 for _, shape in layout)


class SnapshotWriter:
    """Append-only snapshot file writer; use as a context manager."""

    def __init__(self, path: PathLike, grid: Grid, n_boundary: int, config_hash: str):
        self.path = Path(path)
        self.grid = grid
        self.layout = field_layout(grid, n_boundary)
        self.config_hash = config_hash
        self.count = 0
        self._fh = None

    def __enter__(self) -> "SnapshotWriter":
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "wb")
        header = {
            "format_version": FORMAT_VERSION,
            "config_hash": self.config_hash,
            "grid": self.grid.describe(),
            "fields": [[name, list(shape)] for name, shape in self.layout],
            "record_floats": _record_size(self.layout),
        }
        blob = json.dumps(header, sort_keys=True).encode("utf-8")
        self._fh.write(MAGIC)
        self._fh.write(struct.pack("<II", FORMAT_VERSION, len(blob)))
        self._fh.write(blob)
        return self

    def __exit__(self, exc_type, exc, tb):
        if self._fh is not None:
            self._fh.close()
            self._fh = None
        return False

    def write(self, step: int, state: State, record: Optional[StepRecord] = None) -> None:
        cell_zero = self.grid.zero_sym_field()
        values = {
            "step": float(step),
            "t": state.t,
            "u": state.u,
            "v": state.v,
            "e": state.e,
            "p": state.p,
            "sigma": state.sigma,
            "de": record.de if record is not None else cell_zero,
            "dp": record.dp if record is not None else cell_zero,
            "T": record.traction if record is not None else np.zeros_like(state.pD),
            "pD": state.pD,
        }
        parts = [np.asarray(values[name], dtype="<f8").ravel() for name, _ in self.layout]
        self._fh.write(np.concatenate(parts).tobytes())
        self.count += 1


def read_snapshots(path: PathLike, expected_hash: Optional[str] = None) -> Tuple[Dict[str, Any], List[Dict[str, Any]]]:
    """
    Read every record of a snapshot file.

    Raises:
        SnapshotIntegrityError: on bad magic, unknown version or truncation
        ConfigHashMismatchError: if the header hash differs from expected_hash
    """
    path = Path(path)
    if not path.exists():
        raise SnapshotIntegrityError("Snapshot file is missing", file_path=str(path))
    raw = path.read_bytes()
    if len(raw) < len(MAGIC) + 8 or raw[:len(MAGIC)] != MAGIC:
        raise SnapshotIntegrityError("Snapshot file has no valid header", file_path=str(path))
    version, header_len = struct.unpack("<II", raw[len(MAGIC):len(MAGIC) + 8])
    if version != FORMAT_VERSION:
        raise SnapshotIntegrityError(f"Unsupported snapshot format version {version}", file_path=str(path))
    offset = len(MAGIC) + 8
    try:
        header = json.loads(raw[offset:offset + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise SnapshotIntegrityError("Snapshot header is corrupt", file_path=str(path), original_error=e)
    offset += header_len

    if expected_hash is not None and header.get("config_hash") != expected_hash:
        raise ConfigHashMismatchError("Snapshot file belongs to a different config",
                                      expected=expected_hash, actual=header.get("config_hash"))

    layout = [(name, tuple(shape)) for name, shape in header["fields"]]
    record_bytes = 8 * _record_size(layout)
    body = len(raw) - offset
    if body % record_bytes != 0:
        raise SnapshotIntegrityError(
            f"Snapshot file is truncated ({body} bytes is not a multiple of {record_bytes})",
            file_path=str(path),
        )
    data = np.frombuffer(raw, dtype="<f8", offset=offset).reshape(-1, record_bytes // 8)
    return header, [_unpack(row, layout) for row in data]


def _unpack(row: np.ndarray, layout) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    pos = 0
    for name, shape in layout:
        size = int(np.prod(shape)) if shape else 1
        chunk = row[pos:pos + size]
        out[name] = float(chunk[0]) if not shape else chunk.reshape(shape).copy()
        pos += size
    out["step"] = int(out["step"])
    return out


# LEDGER CSV

def write_ledger_csv(path: PathLike, frame: pd.DataFrame, config_hash: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = frame.reset_index()[["step"] + LEDGER_COLUMNS]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"{HASH_PREFIX}{config_hash}\n")
        table.to_csv(fh, index=False, float_format="%.17g", lineterminator="\n")


def read_ledger_csv(path: PathLike, expected_hash: Optional[str] = None) -> pd.DataFrame:
    """
    Raises:
        SnapshotIntegrityError: if the file is missing, has no hash line or lacks columns
        ConfigHashMismatchError: if the hash differs from expected_hash
    """
    path = Path(path)
    if not path.exists():
        raise SnapshotIntegrityError("Ledger file is missing", file_path=str(path))
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if not first.startswith(HASH_PREFIX):
            raise SnapshotIntegrityError("Ledger file has no config hash line", file_path=str(path))
        found = first[len(HASH_PREFIX):]
        if expected_hash is not None and found != expected_hash:
            raise ConfigHashMismatchError("Ledger belongs to a different config",
                                          expected=expected_hash, actual=found)
        try:
            frame = pd.read_csv(fh)
        except pd.errors.EmptyDataError as e:
            raise SnapshotIntegrityError("Ledger file has no header row", file_path=str(path), original_error=e)
    missing = [c for c in ["step"] + LEDGER_COLUMNS if c not in frame.columns]
    if missing:
        raise SnapshotIntegrityError(f"Ledger file lacks columns {missing}", file_path=str(path))
    return frame.set_index("step")


# MANIFEST

def file_sha256(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(path: PathLike, manifest: Dict[str, Any]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def read_manifest(path: PathLike) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise SnapshotIntegrityError("Run manifest is missing", file_path=str(path))
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SnapshotIntegrityError("Run manifest is not valid JSON", file_path=str(path), original_error=e)


def verify_artifacts(run_dir: PathLike, manifest: Dict[str, Any]) -> None:
    """
    Check every artifact listed in the manifest against its recorded sha256.

    Raises:
        SnapshotIntegrityError: on a missing or altered artifact
    """
    run_dir = Path(run_dir)
    for name, meta in sorted(manifest.get("artifacts", {}).items()):
        path = run_dir / name
        if not path.exists():
            raise SnapshotIntegrityError(f"Artifact {name} is missing", file_path=str(path))
        size = path.stat().st_size
        if size != meta.get("bytes"):
            raise SnapshotIntegrityError(
                f"Artifact {name} has {size} bytes, manifest records {meta.get('bytes')}",
                file_path=str(path),
            )
        if file_sha256(path) != meta.get("sha256"):
            raise SnapshotIntegrityError(f"Artifact {name} does not match its checksum", file_path=str(path))
