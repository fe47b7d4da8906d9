# models/cli_config.py - Global options shared by every subcommand

from typing import Optional

from pydantic import BaseModel, Field, field_validator

from ffdensity.constants import OUTPUT_MODES


class CliConfig(BaseModel):
    subcommand: str
    spec: Optional[str] = None
    seed: int = Field(..., ge=0)
    max_box: int = Field(..., gt=0)
    max_bruteforce: int = Field(..., gt=0)
    max_enum: int = Field(..., gt=0)
    output: str = Field(default="json")
    workers: int = Field(default=1, ge=1)

    @field_validator("output")
    @classmethod
    def _known_output(cls, value: str) -> str:
        if value not in OUTPUT_MODES:
            raise ValueError(f"Unknown output mode {value!r}")
        return value
