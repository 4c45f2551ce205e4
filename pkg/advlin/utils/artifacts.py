"""Artifact writing: atomic files, CSV formatting and content hashes."""
import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, List, Mapping, Sequence

from advlin.config import settings


def format_float(value: float, digits: int = None) -> str:
    """
    Format a real number with a fixed number of significant digits.

    Args:
        value: Number to format
        digits: Significant digits (default from settings)

    Returns:
        Decimal text, e.g. ``0.84134474606854293``
    """
    if digits is None:
        digits = settings.CSV_SIGNIFICANT_DIGITS
    return f"{float(value):.{digits}g}"


def write_bytes_atomic(path: Path, data: bytes) -> Path:
    """
    Write bytes to ``path`` via a temporary file in the same directory and rename.

    Args:
        path: Destination file
        data: File contents

    Returns:
        The destination path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Render rows as CSV text with ``\\n`` line endings; floats keep 17 significant digits."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


def write_csv_atomic(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a CSV file atomically."""
    return write_bytes_atomic(path, render_csv(header, rows).encode("utf-8"))


def read_csv(path: Path) -> List[dict]:
    """Read a CSV file written by :func:`write_csv_atomic` into a list of dicts."""
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def canonical_json(payload: Any) -> str:
    """Serialize with sorted keys and stable separators."""
    return json.dumps(payload, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def write_json_atomic(path: Path, payload: Any) -> Path:
    """Write a JSON document atomically with canonical formatting."""
    return write_bytes_atomic(path, canonical_json(payload).encode("utf-8"))


def git_blob_hash(data: bytes) -> str:
    """
    Compute the git-style content hash of a blob.

    Args:
        data: File contents

    Returns:
        Hex-encoded ``sha1("blob <len>\\0" + data)``
    """
    header = f"blob {len(data)}\0".encode()
    return hashlib.sha1(header + data).hexdigest()


def write_manifest(
    out_dir: Path,
    subcommand: str,
    params: Mapping[str, Any],
    files: Sequence[Path]
) -> Path:
    """
    Write ``manifest.json`` listing resolved parameters and output hashes.

    Args:
        out_dir: Output directory
        subcommand: Subcommand that produced the files
        params: Resolved parameters (JSON-serializable)
        files: Output files to hash

    Returns:
        Path of the manifest
    """
    out_dir = Path(out_dir)
    outputs = {}
    for file_path in sorted(Path(f) for f in files):
        outputs[file_path.name] = git_blob_hash(file_path.read_bytes())
    manifest = {
        "subcommand": subcommand,
        "params": dict(params),
        "outputs": outputs,
    }
    return write_json_atomic(out_dir / "manifest.json", manifest)
