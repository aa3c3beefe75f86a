"""
Error formatting utilities.

Provides the single-line machine-parsable error form printed by the CLI and
the status document written next to stage outputs.
"""

from typing import Any

from pydantic import ValidationError

from colopack.exceptions import ColopackError
from colopack.models.errors import ErrorResponse, ErrorStatus

OK_CODE = "ok"


def format_error_line(exc: ColopackError) -> str:
    """
    Format an error as one ``key=value`` line.

    Args:
        exc: The failure to report

    Returns:
        A line of the form ``error=<code> message=<text>``; newlines in the
        message are collapsed so the line stays parsable.

    Example:
        >>> format_error_line(FleetParseError("bad json"))
        'error=parse_error message=bad json'
    """
    message = " ".join(str(exc.message).split())
    return f"error={exc.code} message={message}"


def format_status_document(
    command: str, code: str, exit_status: int, message: str
) -> dict[str, Any]:
    """
    Format a status document for a subcommand.

    Args:
        command: Subcommand name
        code: Error code, or ``ok``
        exit_status: Process exit status
        message: Human-readable message

    Returns:
        Dictionary in the ErrorResponse schema
    """
    document = ErrorResponse(
        command=command,
        status=ErrorStatus(code=code, exit_status=exit_status, message=message),
    )
    return document.model_dump()


def format_error_document(command: str, exc: ColopackError) -> dict[str, Any]:
    """Status document of a failed subcommand."""
    return format_status_document(command, exc.code, exc.exit_status, exc.message)


def format_ok_document(command: str) -> dict[str, Any]:
    """Status document of a successful subcommand."""
    return format_status_document(command, OK_CODE, 0, OK_CODE)


def describe_validation_error(error: ValidationError) -> str:
    """
    Summarize a pydantic validation error as one message.

    Only the first error is reported, with its location.

    Example:
        >>> describe_validation_error(err)
        'Field required at hosts.0.arch'
    """
    errors = error.errors()
    if not errors:
        return "validation failed"
    first = errors[0]
    location = ".".join(str(loc) for loc in first.get("loc", ()))
    msg = first.get("msg", "validation error")
    return f"{msg} at {location}" if location else msg
