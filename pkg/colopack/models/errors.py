"""
Error document models.

Provides the standardized status document the CLI writes next to its outputs
when a stage fails.
"""

from pydantic import BaseModel, ConfigDict, Field


class ErrorStatus(BaseModel):
    """
    Error status details.

    Attributes:
        code: Stable machine-parsable error code
        exit_status: Process exit status of the failure family
        message: Human-readable error message
    """

    code: str = Field(
        ...,
        description="Stable machine-parsable error code",
        pattern=r"^[a-z_]+$",
        examples=["parse_error", "dangling_reference", "infeasible"],
    )
    exit_status: int = Field(
        ...,
        description="Process exit status",
        ge=0,
        le=255,
        examples=[0, 2, 5],
    )
    message: str = Field(
        ...,
        description="Human-readable error message",
        min_length=1,
        examples=[
            "task->host reference from 't-0001' to unknown 'h-9'",
            "timestamps of task 't-0003' decrease at offset 17",
        ],
    )


class ErrorResponse(BaseModel):
    """
    Standard status document wrapper.

    Attributes:
        command: Subcommand that produced the document
        status: Error status details
    """

    command: str = Field(..., description="Subcommand name")
    status: ErrorStatus = Field(..., description="Error status details")

    model_config = ConfigDict(
        json_schema_extra={
            "examples": [
                {
                    "command": "solve",
                    "status": {
                        "code": "infeasible",
                        "exit_status": 5,
                        "message": "task 't-0007' fits on no host under mode p99",
                    },
                },
                {
                    "command": "percentile",
                    "status": {"code": "ok", "exit_status": 0, "message": "ok"},
                },
            ]
        }
    )
