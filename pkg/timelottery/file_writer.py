import dataclasses
import io
import json
from enum import Enum
from fractions import Fraction
from pathlib import Path

import typer
from rich.console import Console
from rich.table import Table

from timelottery.logger import logger

TABLE_WIDTH = 120


def to_jsonable(value):
    """
    Converts domain values to JSON-ready structures.

    Dataclasses become objects keyed by field name, enums their value and
    fractions an "n/d" string; floats stay floats.
    """
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(to_jsonable(k)): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def dumps_json(value) -> str:
    return json.dumps(to_jsonable(value), indent=2, ensure_ascii=False) + "\n"


def render_table(table: Table) -> str:
    """Renders a rich table to plain text of fixed width, without colour codes."""
    buffer = io.StringIO()
    console = Console(file=buffer, width=TABLE_WIDTH, color_system=None, force_terminal=False)
    console.print(table)
    return buffer.getvalue()


def write_output(content: str | bytes, out_path: str | None = None) -> str | None:
    """
    Writes command output to ``out_path`` or, when it is None, to stdout.

    Returns the resolved path of the written file, or None for stdout.
    Write failures are logged and re-raised.
    """
    if out_path is None:
        typer.echo(content, nl=False)
        return None

    path = Path(out_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(content, bytes):
            path.write_bytes(content)
        else:
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(content)
    except OSError as e:
        logger.error(f"[FileWriter] Error writing '{path}': {e}")
        raise

    saved_path = str(path.resolve())
    logger.info(f"[FileWriter] Successfully saved output to: {saved_path}")
    return saved_path
