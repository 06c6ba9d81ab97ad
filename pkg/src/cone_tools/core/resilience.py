"""Bounded resampling and seed derivation utilities."""

from __future__ import annotations

from collections.abc import Callable
from typing import TypeVar

import numpy as np
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

T = TypeVar("T")

DEFAULT_MAX_ATTEMPTS = 10


def resampler(
    *exceptions: type[BaseException],
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> Retrying:
    """Create a retryer that redraws immediately on the given exceptions.

    Args:
        *exceptions: Exception types that signal a rejected draw.
        max_attempts: Maximum number of draws (including the first).

    Returns:
        Configured Retrying instance that re-raises the last rejection.
    """
    return Retrying(
        stop=stop_after_attempt(max_attempts),
        retry=retry_if_exception_type(exceptions),
        reraise=True,
    )


def resample(
    draw: Callable[[], T],
    *exceptions: type[BaseException],
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> T:
    """Call ``draw`` until it stops raising one of ``exceptions``.

    ``draw`` is expected to consume a shared random generator so every
    attempt sees a fresh sample.
    """
    for attempt in resampler(*exceptions, max_attempts=max_attempts):
        with attempt:
            return draw()
    # Should not reach here due to reraise=True
    raise RuntimeError("Unexpected resample exhaustion")


def derive_seed(*parts: int) -> int:
    """Derive an independent 63-bit seed from a tuple of integers.

    Used for per-sample and per-trial streams so work items can be
    generated in any order (or in parallel) without changing results.
    """
    state = np.random.SeedSequence([int(p) & 0xFFFFFFFFFFFFFFFF for p in parts])
    return int(state.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def derive_rng(*parts: int) -> np.random.Generator:
    """Return a numpy Generator seeded from :func:`derive_seed`."""
    return np.random.default_rng(derive_seed(*parts))


__all__ = [
    "DEFAULT_MAX_ATTEMPTS",
    "resampler",
    "resample",
    "derive_seed",
    "derive_rng",
]
