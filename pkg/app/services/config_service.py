"""
Configuration Service

Reads ``key = value`` run files, merges command-line overrides on top and
validates the result through the pydantic request models. Every failure
surfaces as a ConfigError naming the offending field.
"""

import io
import logging
from typing import Any, Dict, Optional, Type, TypeVar

import numpy as np
from dotenv.parser import parse_stream
from pydantic import BaseModel, ValidationError

from app.errors import ConfigError
from app.models.grid import Grid, GridFunction

# Configure logging
logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)


def parse_config_text(text: str) -> Dict[str, str]:
    """
    Parse ``key = value`` lines with python-dotenv's parser. Blank lines and
    ``#`` comments are skipped; a repeated key keeps its last value.
    """
    values: Dict[str, str] = {}
    for binding in parse_stream(io.StringIO(text)):
        text_read = binding.original.string
        # the parser marks a binding at the first of any blank lines before it
        lineno = binding.original.line + text_read[: len(text_read) - len(text_read.lstrip())].count("\n")
        if binding.error or (binding.key is not None and binding.value is None):
            raise ConfigError(
                f"line {lineno}: expected 'key = value', got {text_read.strip()!r}"
            )
        if binding.key is None:
            continue
        values[binding.key] = binding.value
    return values


def read_config_file(path: str) -> Dict[str, str]:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e.strerror}", field="config") from e
    logger.debug(f"config file {path} read")
    return parse_config_text(text)


def build_config(
    model: Type[ModelT],
    file_values: Optional[Dict[str, Any]] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> ModelT:
    """
    Validate file values with overrides applied on top. Overrides whose
    value is None (flags not given) are ignored.
    """
    merged: Dict[str, Any] = dict(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})

    unknown = sorted(set(merged) - set(model.__fields__))
    if unknown:
        raise ConfigError(f"unknown configuration key: {unknown[0]}", field=unknown[0])

    try:
        return model(**merged)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"] if part != "__root__") or None
        where = f"{field}: " if field else ""
        raise ConfigError(f"{where}{first['msg']}", field=field) from e


def load_initial_data(path: str, grid: Grid) -> GridFunction:
    """Whitespace- or newline-separated samples of u0 at the grid points."""
    try:
        samples = np.loadtxt(path, dtype=float, ndmin=1, delimiter=None).ravel()
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot load initial data from {path}: {e}", field="initial_data") from e
    if samples.size != grid.n:
        raise ConfigError(
            f"initial data has {samples.size} samples, expected n = {grid.n}",
            field="initial_data",
        )
    try:
        return GridFunction(grid, samples)
    except ValueError as e:
        raise ConfigError(str(e), field="initial_data") from e
