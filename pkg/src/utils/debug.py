"""Timing helpers for long-running numerical operations."""

import time
from collections.abc import Callable
from functools import wraps
from typing import ParamSpec, TypeVar

import structlog

logger = structlog.get_logger()

P = ParamSpec("P")
R = TypeVar("R")


def time_function(func: Callable[P, R]) -> Callable[P, R]:
    """Simple timing decorator for functions."""

    @wraps(func)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
        start_time = time.perf_counter()

        try:
            result = func(*args, **kwargs)
        except Exception as e:
            logger.error(
                "Function timing (with error)",
                function=func.__name__,
                execution_time=f"{time.perf_counter() - start_time:.4f}s",
                error=str(e),
            )
            raise

        logger.debug(
            "Function timing",
            function=func.__name__,
            execution_time=f"{time.perf_counter() - start_time:.4f}s",
        )
        return result

    return wrapper
