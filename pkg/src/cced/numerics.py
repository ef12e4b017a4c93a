"""Dense kernels for the main model's forward pass.

All values are 32-bit IEEE-754. The kernels are compiled scalar loops
with a pinned index-ascending accumulation order, so results are
bit-identical across runs and platforms; BLAS is deliberately avoided
because its reduction order is unspecified. Accumulation happens in
float64 and is rounded to float32 once per output element.

Fault campaigns push arbitrary bit patterns through these functions, so
every kernel has a defined answer for NaN and infinite inputs instead of
assuming well-formed logits.
"""

from __future__ import annotations

import numpy as np
from numba import float32, njit

__all__ = ["INVALID_CLASS", "affine", "argmax", "relu", "softmax"]

# argmax result when the score vector contains NaN and no class is selectable
INVALID_CLASS = -1

F32 = np.float32


@njit(float32[::1](float32[:, ::1], float32[::1], float32[::1]), cache=True, nogil=True)
def _affine_kernel(W, b, x):
    m, n = W.shape
    out = np.empty(m, np.float32)
    for i in range(m):
        acc = np.float64(0.0)
        for j in range(n):
            acc += np.float64(W[i, j]) * np.float64(x[j])
        out[i] = np.float32(acc + np.float64(b[i]))
    return out


@njit(float32[::1](float32[::1]), cache=True, nogil=True)
def _relu_kernel(x):
    out = np.empty(x.shape[0], np.float32)
    for i in range(x.shape[0]):
        v = x[i]
        if v > 0.0:
            out[i] = v
        elif v == v:
            out[i] = np.float32(0.0)
        else:  # NaN propagates
            out[i] = v
    return out


def _as_f32_vector(x, name: str) -> np.ndarray:
    from .errors import ShapeError

    arr = np.ascontiguousarray(x, dtype=F32)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got shape {arr.shape}")
    return arr


def affine(W: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Return W @ x + b with index-ascending float64 accumulation."""
    from .errors import ShapeError

    W = np.ascontiguousarray(W, dtype=F32)
    b = _as_f32_vector(b, "b")
    x = _as_f32_vector(x, "x")
    if W.ndim != 2:
        raise ShapeError(f"W must be 2-D, got shape {W.shape}")
    if W.shape[1] != x.shape[0]:
        raise ShapeError(f"W has {W.shape[1]} columns but x has length {x.shape[0]}")
    if W.shape[0] != b.shape[0]:
        raise ShapeError(f"W has {W.shape[0]} rows but b has length {b.shape[0]}")
    return _affine_kernel(W, b, x)


def relu(x: np.ndarray) -> np.ndarray:
    """Elementwise max(0, x); NaN stays NaN."""
    return _relu_kernel(_as_f32_vector(x, "x"))


def softmax(logits: np.ndarray) -> np.ndarray:
    """Max-stabilized softmax over a logit vector.

    Degenerate inputs get a defined answer so campaigns stay total:
    any NaN logit, or all logits -Inf, yields an all-NaN vector; +Inf
    logits take the whole mass (split evenly if several are +Inf).
    """
    from .errors import ShapeError

    x = _as_f32_vector(logits, "logits")
    if x.shape[0] == 0:
        raise ShapeError("softmax of an empty vector")
    if np.isnan(x).any():
        return np.full(x.shape, np.nan, dtype=F32)
    m = x.max()
    if m == -np.inf:
        return np.full(x.shape, np.nan, dtype=F32)
    # entries equal to the max get exp(0); avoids Inf - Inf when m is +Inf
    x64 = x.astype(np.float64)
    z = np.zeros(x.shape[0], dtype=np.float64)
    np.subtract(x64, np.float64(m), out=z, where=x != m)
    e = np.exp(z)
    return (e / e.sum()).astype(F32)


def argmax(x: np.ndarray) -> int:
    """Index of the maximum, lowest index on ties, INVALID_CLASS on NaN."""
    from .errors import ShapeError

    arr = _as_f32_vector(x, "x")
    if arr.shape[0] == 0:
        raise ShapeError("argmax of an empty vector")
    if np.isnan(arr).any():
        return INVALID_CLASS
    return int(np.argmax(arr))
