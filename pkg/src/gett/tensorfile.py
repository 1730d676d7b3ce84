"""Line-oriented text format for strided tensors.

Layout of a .tns file:

    GETT-TENSOR 1
    dtype: d
    rank: 2
    extents: 2 3
    increments: 1 2
    offset: 0
    buffer: 6
    1 2 3
    4 5 6

The header keys appear in exactly that order.  After ``buffer:`` (the buffer
element count) come whitespace-separated values in buffer order, wrapped
freely across lines.  Complex dtypes store each element as a re/im pair, so
the value count doubles.  Values are written with full round-trip precision;
write_tensor followed by read_tensor is bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .layout import TensorView, footprint

MAGIC = "GETT-TENSOR 1"

_DTYPES = {
    "s": np.dtype(np.float32),
    "d": np.dtype(np.float64),
    "c": np.dtype(np.complex64),
    "z": np.dtype(np.complex128),
}
_PREFIX_OF = {v: k for k, v in _DTYPES.items()}


class TensorFileError(Exception):
    """A malformed tensor file; message names the offending line."""

    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


@dataclass
class TensorFile:
    """A parsed tensor file: element type tag, view, and the full buffer."""

    dtype: str  # "s" | "d" | "c" | "z"
    view: TensorView
    data: np.ndarray


def write_tensor(path, tensor: TensorFile) -> None:
    view = tensor.view
    if tensor.dtype not in _DTYPES:
        raise ValueError(f"unknown dtype tag {tensor.dtype!r}")
    if len(tensor.data) != view.buffer_len:
        raise ValueError(
            f"buffer has {len(tensor.data)} elements, view declares {view.buffer_len}"
        )
    lines = [
        MAGIC,
        f"dtype: {tensor.dtype}",
        f"rank: {view.rank}",
        "extents: " + " ".join(str(e) for e in view.extents),
        "increments: " + " ".join(str(i) for i in view.increments),
        f"offset: {view.base_offset}",
        f"buffer: {view.buffer_len}",
    ]
    values = []
    for v in tensor.data:
        if tensor.dtype in ("c", "z"):
            values.append(repr(float(v.real)))
            values.append(repr(float(v.imag)))
        else:
            values.append(repr(float(v)))
    for i in range(0, len(values), 8):
        lines.append(" ".join(values[i:i + 8]))
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_header_line(path, lines, lineno: int, key: str) -> str:
    if lineno > len(lines):
        raise TensorFileError(path, lineno, f"missing '{key}:' line")
    line = lines[lineno - 1].strip()
    if not line.startswith(key + ":"):
        raise TensorFileError(path, lineno, f"expected '{key}: ...', got {line!r}")
    return line[len(key) + 1:].strip()


def _parse_ints(path, lineno: int, text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split())
    except ValueError:
        raise TensorFileError(path, lineno, f"{what} must be integers, got {text!r}")


def _parse_int(path, lineno: int, text: str, what: str) -> int:
    ints = _parse_ints(path, lineno, text, what)
    if len(ints) != 1:
        raise TensorFileError(path, lineno, f"{what} must be a single integer, got {text!r}")
    return ints[0]


def read_tensor(path) -> TensorFile:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise TensorFileError(path, 1, f"bad magic, expected {MAGIC!r}")

    dtype = _parse_header_line(path, lines, 2, "dtype")
    if dtype not in _DTYPES:
        raise TensorFileError(path, 2, f"unknown dtype tag {dtype!r}, expected s/d/c/z")
    rank = _parse_int(path, 3, _parse_header_line(path, lines, 3, "rank"), "rank")
    extents = _parse_ints(path, 4, _parse_header_line(path, lines, 4, "extents"), "extents")
    increments = _parse_ints(
        path, 5, _parse_header_line(path, lines, 5, "increments"), "increments"
    )
    offset = _parse_int(path, 6, _parse_header_line(path, lines, 6, "offset"), "offset")
    buffer_len = _parse_int(path, 7, _parse_header_line(path, lines, 7, "buffer"), "buffer")

    if len(extents) != rank:
        raise TensorFileError(path, 4, f"rank {rank} needs {rank} extents, got {len(extents)}")
    if len(increments) != rank:
        raise TensorFileError(
            path, 5, f"rank {rank} needs {rank} increments, got {len(increments)}"
        )
    try:
        view = TensorView(rank, extents, increments, offset, buffer_len)
    except ValueError as exc:
        raise TensorFileError(path, 3, str(exc))

    values = []
    expected = buffer_len * (2 if dtype in ("c", "z") else 1)
    for lineno in range(8, len(lines) + 1):
        for tok in lines[lineno - 1].split():
            if len(values) == expected:
                raise TensorFileError(
                    path, lineno, f"more than {expected} values for buffer {buffer_len}"
                )
            try:
                values.append(float(tok))
            except ValueError:
                raise TensorFileError(path, lineno, f"bad value {tok!r}")
    if len(values) != expected:
        raise TensorFileError(
            path, len(lines), f"expected {expected} values for buffer {buffer_len}, got {len(values)}"
        )

    np_dtype = _DTYPES[dtype]
    if dtype in ("c", "z"):
        arr = np.array(values, dtype=np.float64).reshape(-1, 2)
        data = (arr[:, 0] + 1j * arr[:, 1]).astype(np_dtype)
    else:
        data = np.array(values, dtype=np.float64).astype(np_dtype)

    for d, e in enumerate(view.extents):
        if e < 0:
            raise TensorFileError(path, 4, f"negative extent {e} at dimension {d}")
    if not view.is_empty:
        lo, hi = footprint(view)
        if view.base_offset + lo < 0 or view.base_offset + hi >= view.buffer_len:
            raise TensorFileError(
                path, 6,
                f"view addresses offsets {view.base_offset + lo}..{view.base_offset + hi} "
                f"outside buffer of {view.buffer_len}",
            )

    return TensorFile(dtype, view, data)


def tensor_of(view: TensorView, data: np.ndarray) -> TensorFile:
    """Wrap a buffer + view as a TensorFile, deriving the dtype tag."""
    return TensorFile(_PREFIX_OF[np.dtype(data.dtype)], view, data)
