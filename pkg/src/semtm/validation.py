"""Input validation helpers used across the package.

Kept deliberately small: each helper either returns a canonical form of the
input or raises one of the package's exception types.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from .exceptions import DegenerateVectorError, DimensionMismatchError


def check_vector(v, *, dim: int | None = None, allow_zero: bool = True) -> np.ndarray:
    """Coerce ``v`` to a finite 1-D float64 array, optionally checking its length."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("expected a non-empty vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector contains non-finite values")
    if dim is not None and arr.size != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {arr.size}")
    if not allow_zero and not np.any(arr):
        raise DegenerateVectorError("zero-norm vector where a direction is required")
    return arr


def check_matrix(m, *, dim: int | None = None) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D float array of row vectors."""
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains non-finite values")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {arr.shape[1]}")
    return arr


def check_text_list(texts: Iterable[str]) -> list[str]:
    """Materialize ``texts`` as a list of str, rejecting non-string items."""
    out = list(texts)
    for i, t in enumerate(out):
        if not isinstance(t, str):
            raise TypeError(f"texts[{i}] is not a string: {type(t).__name__}")
    return out


def check_fraction(x: float, name: str = "value") -> float:
    """Validate a score/fraction in [0, 1]."""
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")
    return x


def check_same_length(a: Sequence, b: Sequence, what: str = "sequences") -> None:
    if len(a) != len(b):
        raise ValueError(f"{what} must have equal length, got {len(a)} and {len(b)}")
