"""Python bindings for the onevision simulator core."""

from ._core import (
    RunConfig,
    frameworks,
    parse_config,
    run,
    serialize_config,
    solve_dare,
    sweep,
    tasks,
    verify_anchor_exactness,
)

__all__ = [
    "RunConfig",
    "frameworks",
    "parse_config",
    "run",
    "serialize_config",
    "solve_dare",
    "sweep",
    "tasks",
    "verify_anchor_exactness",
]
