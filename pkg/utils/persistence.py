"""JSON file persistence and deterministic output emitters.

Provides a unified interface for loading/saving JSON data files
with consistent error handling and directory creation, plus the
JSON and CSV renderings every command writes.
"""

import csv
import io
import sys
from json import JSONDecodeError, dump, dumps, load
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from models.config import settings
from utils.exceptions import PersistenceError


class JSONStore:
    """Manages JSON file persistence with automatic directory creation and error handling."""

    def __init__(self, file_path: Path) -> None:
        self.file_path = Path(file_path)

    def load(self, default: Any = None) -> Any:
        """Load JSON data from file.

        Args:
            default: Value to return if file doesn't exist or is invalid.
                    Defaults to empty dict.

        Raises:
            PersistenceError: On permission errors (won't auto-create file)
        """
        if default is None:
            default = {}

        try:
            return self.read()
        except PersistenceError as e:
            if isinstance(e.__cause__, PermissionError):
                raise
            return default

    def read(self) -> Any:
        """Load JSON data, failing loudly on missing or malformed files.

        Raises:
            PersistenceError: If the file is missing, unreadable or not JSON
        """
        try:
            with self.file_path.open() as f:
                return load(f)
        except FileNotFoundError as e:
            raise PersistenceError(f"File not found: {self.file_path}") from e
        except PermissionError as e:
            raise PersistenceError(f"Permission denied reading {self.file_path}") from e
        except JSONDecodeError as e:
            raise PersistenceError(f"Invalid JSON in {self.file_path}: {e}") from e

    def save(self, data: Any) -> None:
        """Save data as deterministic JSON.

        Creates parent directories if they don't exist.

        Raises:
            PersistenceError: On serialization or permission errors
        """
        text = dumps_json(data)
        try:
            self.file_path.parent.mkdir(parents=True, exist_ok=True)
            self.file_path.write_text(text)
        except PermissionError as e:
            raise PersistenceError(f"Permission denied writing {self.file_path}") from e

    def exists(self) -> bool:
        return self.file_path.exists()


def to_jsonable(data: Any) -> Any:
    """Plain JSON structure from models, lists of models and dicts."""
    if isinstance(data, BaseModel):
        return data.model_dump(mode="json")
    if isinstance(data, (list, tuple)):
        return [to_jsonable(item) for item in data]
    if isinstance(data, dict):
        return {key: to_jsonable(value) for key, value in data.items()}
    return data


def dumps_json(data: Any, *, indent: int = 2) -> str:
    """Deterministic JSON: fixed key order, shortest round-trip floats, trailing newline.

    Raises:
        PersistenceError: On non-serializable or non-finite values
    """
    buffer = io.StringIO()
    try:
        dump(to_jsonable(data), buffer, indent=indent, allow_nan=False)
    except (TypeError, ValueError) as e:
        raise PersistenceError(f"Cannot serialize data: {e}") from e
    return buffer.getvalue() + "\n"


def format_float(value: float, digits: int | None = None) -> str:
    digits = settings.output.csv_digits if digits is None else digits
    return f"{value:.{digits}g}"


def _csv_cell(value: Any, digits: int | None) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    return format_float(float(value), digits)


def dumps_csv(header: list[str], rows, digits: int | None = None) -> str:
    """CSV with a header row; numbers at a fixed number of significant digits, text as is."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(value, digits) for value in row])
    return buffer.getvalue()


def emit(text: str, out: Path | None = None) -> None:
    """Write text to a file (creating directories) or to stdout.

    Raises:
        PersistenceError: If the file cannot be written
    """
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    out = Path(out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    except OSError as e:
        raise PersistenceError(f"Cannot write {out}: {e}") from e
