"""
JSON document helpers shared by every stage.

Documents are written with sorted keys and a trailing newline so identical
inputs produce byte-identical files.
"""

import json
from pathlib import Path
from typing import Any, TypeVar

from pydantic import BaseModel, ValidationError

from colopack.exceptions import FleetParseError
from colopack.utils.error_formatter import describe_validation_error

ModelT = TypeVar("ModelT", bound=BaseModel)


def read_json(path: Path) -> Any:
    """
    Read a JSON document.

    Raises:
        FleetParseError: If the file is missing or is not valid JSON
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise FleetParseError(f"cannot read {path}: {e.strerror or e}", path=str(path)) from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FleetParseError(
            f"{path} is not valid JSON: {e.msg} (line {e.lineno})", path=str(path)
        ) from e


def read_model(path: Path, model: type[ModelT]) -> ModelT:
    """
    Read and validate a JSON document into a pydantic model.

    Raises:
        FleetParseError: If the document does not parse or validate
    """
    return validate_document(read_json(path), model, source=str(path))


def validate_document(data: Any, model: type[ModelT], source: str = "document") -> ModelT:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise FleetParseError(
            f"{source}: {describe_validation_error(e)}", path=source
        ) from e


def dump_json(data: Any) -> str:
    """Serialize plain data or a pydantic model deterministically."""
    if isinstance(data, BaseModel):
        data = data.model_dump(mode="json")
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path: Path, data: Any) -> Path:
    """
    Write a JSON document, creating parent directories.

    Returns:
        Path: The written path
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dump_json(data), encoding="utf-8")
    return target
