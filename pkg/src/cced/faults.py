"""Transient single-bit faults in model parameters.

The error model: one uniformly random bit of one uniformly random
parameter is corrupted for the duration of a single inference, then the
parameter is clean again (a soft error in a value that gets re-loaded
for the next inference). All 32 bit positions are eligible, sign and
exponent included.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import InferenceResult, ModelSpec, Parameters, forward, param_count
from .rng import RngStream

F32 = np.float32


@dataclass(frozen=True)
class FaultSpec:
    """One bit flip: flat parameter index and bit position.

    Bit 0 is the mantissa LSB, bit 31 the sign.
    """

    param_index: int
    bit_position: int

    def to_json(self) -> dict:
        return {"param_index": self.param_index, "bit": self.bit_position}

    @classmethod
    def from_json(cls, obj: dict) -> "FaultSpec":
        return cls(param_index=int(obj["param_index"]), bit_position=int(obj["bit"]))


def flip_bit(value: np.float32, bit_position: int) -> np.float32:
    """XOR-toggle one bit of a float32's pattern."""
    if not 0 <= bit_position <= 31:
        raise ValueError(f"bit position must be in [0, 31], got {bit_position}")
    pattern = np.asarray(value, dtype=F32).view(np.uint32)
    return (pattern ^ np.uint32(1) << np.uint32(bit_position)).view(F32)[()]


def sample_fault(rng: RngStream, param_count: int) -> FaultSpec:
    """Draw a fault uniformly over parameters and bit positions."""
    if param_count < 1:
        raise ValueError("cannot sample a fault from an empty parameter space")
    idx = int(rng.integers(param_count))
    bit = int(rng.integers(32))
    return FaultSpec(param_index=idx, bit_position=bit)


def _check(params: Parameters, f: FaultSpec) -> None:
    n = param_count(params.spec)
    if not 0 <= f.param_index < n:
        raise ValueError(f"param_index {f.param_index} out of range [0, {n})")
    if not 0 <= f.bit_position <= 31:
        raise ValueError(f"bit position must be in [0, 31], got {f.bit_position}")


def apply_fault(params: Parameters, f: FaultSpec) -> Parameters:
    """Return a copy of the parameters with the one bit toggled."""
    _check(params, f)
    out = params.copy()
    out.buffer.view(np.uint32)[f.param_index] ^= np.uint32(1) << np.uint32(
        f.bit_position
    )
    return out


def faulty_forward(
    spec: ModelSpec, params: Parameters, x: np.ndarray, f: FaultSpec
) -> InferenceResult:
    """Forward pass with the fault present; params are untouched after.

    Works on a copy, so concurrent trials may share one read-only
    Parameters instance.
    """
    return forward(spec, apply_fault(params, f), x)


def faulty_forward_inplace(
    spec: ModelSpec, params: Parameters, x: np.ndarray, f: FaultSpec
) -> InferenceResult:
    """Flip-compute-restore variant that avoids copying the buffer.

    Restoration is bit-exact (XOR involution), but the caller must hold
    exclusive access to ``params`` for the duration of the call.
    """
    _check(params, f)
    bits = params.buffer.view(np.uint32)
    mask = np.uint32(1) << np.uint32(f.bit_position)
    bits[f.param_index] ^= mask
    try:
        return forward(spec, params, x)
    finally:
        bits[f.param_index] ^= mask
