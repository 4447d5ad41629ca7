"""Artifact API for this project

CSV tables are typed by the schemas in schema_types.py; every float is
written with FLOAT_SIGNIFICANT_DIGITS significant digits so repeated runs
produce byte-identical files.
"""

from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import hashlib
import json
import logging
import math

import numpy as np
import pandas as pd

from config import FLOAT_SIGNIFICANT_DIGITS, MANIFEST_FILENAME, TIMINGS_FILENAME
from errors import InputError
from schema_types import RunManifest

logger = logging.getLogger(__name__)

FLOAT_FORMAT = f"%.{FLOAT_SIGNIFICANT_DIGITS}g"


class SchemaUtil:
    """Helpers for the "column TYPE" schema strings.

    """
    @classmethod
    def table_schema_to_fields(cls, schema: str) -> List[str]:
        """Extracts the column names from a schema.

        """
        return [line.strip().split()[0] for line in schema.strip().split("\n")]

    @classmethod
    def table_schema_to_types(cls, schema: str) -> Dict[str, str]:
        return dict(line.strip().split()[:2] for line in schema.strip().split("\n"))


def round_float(value: float) -> float:
    """value rounded to FLOAT_SIGNIFICANT_DIGITS significant digits."""
    if not math.isfinite(value):
        return value
    return float(FLOAT_FORMAT % value)


def jsonable(obj: Any) -> Any:
    """Converts numpy scalars/arrays and rounds floats for JSON output."""
    if isinstance(obj, dict):
        return {str(key): jsonable(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(val) for val in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_float(float(obj))
    return obj


def sha256_of_file(path: Union[str, Path]) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as f:
        while True:
            chunk = f.read(1024 * 1024)
            if not chunk:
                break
            h.update(chunk)
    return h.hexdigest()


class CsvArtifact:
    """One CSV file with a fixed schema.

    Example:
        CsvArtifact(path, CDF_SCHEMA).write_rows([(0.0, 0.86), (0.01, 0.9)])
    """
    def __init__(self, path: Union[str, Path], schema: str):
        self.path = Path(path)
        self.schema = schema
        self.fields = SchemaUtil.table_schema_to_fields(schema)
        self.types = SchemaUtil.table_schema_to_types(schema)

    def to_frame(self, rows: Iterable[Sequence]) -> pd.DataFrame:
        df = pd.DataFrame(list(rows), columns=self.fields)
        for field, _type in self.types.items():
            if _type == "INTEGER":
                df[field] = df[field].astype("int64")
            elif _type == "REAL":
                df[field] = df[field].astype("float64")
        return df

    def write_rows(self, rows: Iterable[Sequence]):
        df = self.to_frame(rows)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(self.path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.debug("wrote %d rows to %s", len(df), self.path)


def write_json(path: Union[str, Path], obj: Any):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        json.dump(jsonable(obj), f, indent=2)
        f.write("\n")


def read_json(path: Union[str, Path]) -> Any:
    try:
        with Path(path).open("r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read JSON from {path}: {e}") from e


class ArtifactSet:
    """Output directory of one run; remembers every file written into it.

    Files named in `untracked` (wall-clock timings) are written but left out
    of the manifest checksums.
    """
    def __init__(self, out_dir: Union[str, Path], untracked: Sequence[str] = (TIMINGS_FILENAME,)):
        self.out_dir = Path(out_dir)
        self.untracked = set(untracked)
        self.names: List[str] = []

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def write_csv(self, name: str, schema: str, rows: Iterable[Sequence]):
        CsvArtifact(self.path(name), schema).write_rows(rows)
        self._remember(name)

    def write_json(self, name: str, obj: Any):
        write_json(self.path(name), obj)
        self._remember(name)

    def _remember(self, name: str):
        if name not in self.names:
            self.names.append(name)

    def checksums(self) -> Dict[str, str]:
        return {
            name: sha256_of_file(self.path(name))
            for name in sorted(self.names)
            if name not in self.untracked
        }

    def write_manifest(self, manifest: RunManifest, name: str = MANIFEST_FILENAME) -> Path:
        write_json(self.path(name), manifest.to_dict())
        return self.path(name)


def verify_checksums(out_dir: Union[str, Path], expected: Dict[str, str]) -> List[str]:
    """Names of artifacts whose checksum differs from the recorded one (or that are missing)."""
    mismatched = []
    for name, checksum in sorted(expected.items()):
        path = Path(out_dir) / name
        if not path.exists() or sha256_of_file(path) != checksum:
            mismatched.append(name)
    return mismatched


def load_manifest(path: Union[str, Path]) -> RunManifest:
    dic = read_json(path)
    try:
        return RunManifest.from_dict(dic)
    except (TypeError, KeyError) as e:
        raise InputError(f"malformed manifest {path}: {e}") from e
