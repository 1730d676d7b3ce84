"""Strided tensor descriptors and mixed-radix coordinate iteration.

A tensor is described as a view into a flat element buffer: per-dimension
extents give the number of coordinates along each dimension, per-dimension
increments give the element-count jump in the buffer between neighbouring
coordinates (negative increments read the dimension backward), and a base
offset locates coordinate (0, ..., 0).  A rank-0 view addresses exactly one
element.

The canonical packed layout used throughout is first-dimension-fastest:
increments [1, e0, e0*e1, ...] for extents [e0, e1, e2, ...].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def num_elements(extents) -> int:
    """Product of extents; the empty extent list (rank 0) holds one element."""
    n = 1
    for e in extents:
        n *= int(e)
    return n


def contiguous_increments(extents) -> tuple[int, ...]:
    """Packed first-dimension-fastest increments for the given extents.

    inc[0] = 1 and inc[i] = inc[i-1] * extents[i-1], e.g. extents [3, 3, 3]
    give increments [1, 3, 9].
    """
    inc = []
    step = 1
    for e in extents:
        inc.append(step)
        step *= int(e)
    return tuple(inc)


def linear_offset(coords, increments) -> int:
    """Dot product of a coordinate tuple with per-dimension increments.

    Empty inputs yield 0.  Raises ValueError if the lengths differ.
    """
    if len(coords) != len(increments):
        raise ValueError(
            f"coordinate/increment length mismatch: {len(coords)} vs {len(increments)}"
        )
    return sum(int(c) * int(i) for c, i in zip(coords, increments))


@dataclass(frozen=True)
class TensorView:
    """A strided window into a flat buffer of ``buffer_len`` elements.

    Construction checks only structural consistency (array lengths match the
    rank, rank and buffer_len non-negative).  Value-level problems such as
    negative extents or a footprint that escapes the buffer are reported by
    ``gett.plan.validate`` so callers get error lists instead of exceptions.
    """

    rank: int
    extents: tuple[int, ...]
    increments: tuple[int, ...]
    base_offset: int = 0
    buffer_len: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "extents", tuple(int(e) for e in self.extents))
        object.__setattr__(self, "increments", tuple(int(i) for i in self.increments))
        if self.rank < 0:
            raise ValueError(f"rank must be non-negative, got {self.rank}")
        if len(self.extents) != self.rank or len(self.increments) != self.rank:
            raise ValueError(
                f"rank {self.rank} view needs {self.rank} extents and increments, "
                f"got {len(self.extents)} and {len(self.increments)}"
            )
        if self.base_offset < 0:
            raise ValueError(f"base_offset must be non-negative, got {self.base_offset}")
        if self.buffer_len < 0:
            raise ValueError(f"buffer_len must be non-negative, got {self.buffer_len}")

    @classmethod
    def contiguous(cls, extents, base_offset: int = 0) -> "TensorView":
        """A packed view starting at base_offset in a tightly sized buffer."""
        extents = tuple(int(e) for e in extents)
        return cls(
            rank=len(extents),
            extents=extents,
            increments=contiguous_increments(extents),
            base_offset=base_offset,
            buffer_len=base_offset + num_elements(extents),
        )

    @property
    def is_empty(self) -> bool:
        """True when some extent is 0, i.e. the view addresses no elements."""
        return any(e == 0 for e in self.extents)

    @property
    def size(self) -> int:
        return num_elements(self.extents)


def footprint(view: TensorView) -> tuple[int, int]:
    """Lowest and highest offset the view touches, relative to base_offset.

    min sums inc*(ext-1) over negative-increment dimensions, max over
    positive ones.  Dimensions with extent 0 contribute nothing (the view
    is empty and addresses no elements at all).
    """
    lo = 0
    hi = 0
    for ext, inc in zip(view.extents, view.increments):
        if ext <= 0:
            continue
        span = inc * (ext - 1)
        if span < 0:
            lo += span
        else:
            hi += span
    return lo, hi


def view_offsets(view: TensorView) -> np.ndarray:
    """Absolute buffer offsets of every addressed element.

    Order is mixed-radix with dimension 0 fastest, matching the coordinate
    cycle of increment_coords.  Empty views give an empty array.
    """
    if view.is_empty:
        return np.empty(0, dtype=np.int64)
    offs = np.full(1, view.base_offset, dtype=np.int64)
    for ext, inc in zip(view.extents, view.increments):
        steps = np.int64(inc) * np.arange(ext, dtype=np.int64)
        offs = (offs[np.newaxis, :] + steps[:, np.newaxis]).ravel()
    return offs


@dataclass(frozen=True)
class CoordCounter:
    """A mixed-radix counter: coords[i] counts modulo extents[i].

    A length-0 counter represents the single empty coordinate.
    """

    coords: tuple[int, ...]
    extents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        object.__setattr__(self, "extents", tuple(int(e) for e in self.extents))
        if len(self.coords) != len(self.extents):
            raise ValueError("coords and extents must have the same length")
        for c, e in zip(self.coords, self.extents):
            if e < 1:
                raise ValueError(f"counter extents must be positive, got {e}")
            if not 0 <= c < e:
                raise ValueError(f"coordinate {c} out of range for extent {e}")

    @classmethod
    def zeros(cls, extents) -> "CoordCounter":
        extents = tuple(int(e) for e in extents)
        return cls((0,) * len(extents), extents)


def increment_coords(counter: CoordCounter) -> CoordCounter:
    """Advance the counter by one step, dimension 0 fastest.

    Position 0 is incremented modulo its extent; while the just-incremented
    position wrapped to zero and positions remain, the carry propagates to
    the next position.  A full wrap returns to all zeros.  Length-0 counters
    are returned unchanged.
    """
    n = len(counter.coords)
    if n == 0:
        return counter
    coords = list(counter.coords)
    i = 0
    while True:
        coords[i] = (coords[i] + 1) % counter.extents[i]
        i += 1
        if coords[i - 1] != 0 or i >= n:
            break
    return CoordCounter(tuple(coords), counter.extents)
