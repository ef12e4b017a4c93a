"""The desk-scale main model: an L-layer MLP softmax classifier.

The model exists to be attacked: its parameters live in one flat float32
buffer so a fault campaign can index every weight and bias uniformly,
and its forward pass emits the softmax vector that serves as the check
signal monitored by the concurrent detector.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, ShapeError
from .numerics import affine, argmax, relu, softmax

F32 = np.float32

MAGIC = b"CCEDW1"


@dataclass(frozen=True)
class ModelSpec:
    """Layer widths [d0, ..., dL]: d0 input features, dL classes."""

    layer_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.layer_dims)
        object.__setattr__(self, "layer_dims", dims)
        if len(dims) < 2:
            raise ValueError("model needs at least an input and an output layer")
        if any(d < 1 for d in dims):
            raise ValueError(f"layer dims must be >= 1, got {dims}")
        if dims[-1] < 2:
            raise ValueError("output layer needs at least 2 classes")

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def class_count(self) -> int:
        return self.layer_dims[-1]


def param_count(spec: ModelSpec) -> int:
    """Size of the flat parameter buffer: weights plus biases per layer."""
    dims = spec.layer_dims
    return sum(dims[i + 1] * dims[i] + dims[i + 1] for i in range(len(dims) - 1))


def _layout(spec: ModelSpec):
    """Per layer: (weight slice, bias slice, (rows, cols)) into the buffer."""
    out = []
    off = 0
    dims = spec.layer_dims
    for i in range(len(dims) - 1):
        rows, cols = dims[i + 1], dims[i]
        w_sl = slice(off, off + rows * cols)
        off += rows * cols
        b_sl = slice(off, off + rows)
        off += rows
        out.append((w_sl, b_sl, (rows, cols)))
    return out


@dataclass
class Parameters:
    """Flat float32 parameter buffer plus its per-layer layout."""

    buffer: np.ndarray
    spec: ModelSpec

    @classmethod
    def for_spec(cls, spec: ModelSpec, buffer: np.ndarray) -> "Parameters":
        buf = np.ascontiguousarray(buffer, dtype=F32)
        expected = param_count(spec)
        if buf.ndim != 1 or buf.shape[0] != expected:
            raise ShapeError(
                f"buffer for {spec.layer_dims} must have {expected} values, "
                f"got shape {buf.shape}"
            )
        return cls(buffer=buf, spec=spec)

    @classmethod
    def zeros(cls, spec: ModelSpec) -> "Parameters":
        return cls.for_spec(spec, np.zeros(param_count(spec), dtype=F32))

    def layer_slices(self):
        return _layout(self.spec)

    def layer_arrays(self):
        """Read-only (W, b) views into the flat buffer, one pair per layer."""
        for w_sl, b_sl, (rows, cols) in _layout(self.spec):
            yield self.buffer[w_sl].reshape(rows, cols), self.buffer[b_sl]

    def copy(self) -> "Parameters":
        return Parameters(buffer=self.buffer.copy(), spec=self.spec)


@dataclass
class InferenceResult:
    """Softmax check signal and the class it selects."""

    check_signal: np.ndarray
    predicted_class: int


def forward(spec: ModelSpec, params: Parameters, x: np.ndarray) -> InferenceResult:
    """Run affine+relu hidden layers, then affine+softmax. Pure."""
    if params.spec != spec:
        raise ShapeError(
            f"parameters are for {params.spec.layer_dims}, not {spec.layer_dims}"
        )
    h = np.ascontiguousarray(x, dtype=F32)
    if h.ndim != 1 or h.shape[0] != spec.input_dim:
        raise ShapeError(
            f"input must have length {spec.input_dim}, got shape {h.shape}"
        )
    layers = list(params.layer_arrays())
    for W, b in layers[:-1]:
        h = relu(affine(W, b, h))
    W, b = layers[-1]
    signal = softmax(affine(W, b, h))
    return InferenceResult(check_signal=signal, predicted_class=argmax(signal))


def save_weights(spec: ModelSpec, params: Parameters, path) -> None:
    """Write the binary weight file: magic, u32 dim count, dims, raw buffer."""
    if params.spec != spec:
        raise ShapeError("parameters do not match the spec being saved")
    dims = spec.layer_dims
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(dims)))
        fh.write(struct.pack(f"<{len(dims)}I", *dims))
        fh.write(params.buffer.astype("<f4").tobytes())


def load_weights(path) -> tuple[ModelSpec, Parameters]:
    """Read a weight file back; the round-trip is bit-exact."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(MAGIC) or data[: len(MAGIC)] != MAGIC:
        raise FormatError(
            f"{path}: bad magic at byte 0: expected {MAGIC!r}, "
            f"got {data[:len(MAGIC)]!r}"
        )
    off = len(MAGIC)
    if len(data) < off + 4:
        raise FormatError(f"{path}: truncated header at byte {off}")
    (n_dims,) = struct.unpack_from("<I", data, off)
    off += 4
    if n_dims < 2:
        raise FormatError(f"{path}: needs at least 2 layer dims, got {n_dims}")
    if len(data) < off + 4 * n_dims:
        raise FormatError(f"{path}: truncated dim table at byte {off}")
    dims = struct.unpack_from(f"<{n_dims}I", data, off)
    off += 4 * n_dims
    try:
        spec = ModelSpec(dims)
    except ValueError as e:
        raise FormatError(f"{path}: invalid dims {dims}: {e}") from e
    expected = param_count(spec) * 4
    actual = len(data) - off
    if actual != expected:
        raise FormatError(
            f"{path}: buffer at byte {off} should be {expected} bytes "
            f"for dims {dims}, got {actual}"
        )
    buf = np.frombuffer(data, dtype="<f4", count=param_count(spec), offset=off)
    return spec, Parameters.for_spec(spec, buf.copy())
