"""Reference binary tensor contraction kernel.

For every output coordinate (mixed-radix order over the output extents,
dimension 0 fastest) the kernel resolves the output offset plus the two
partial input offsets contributed by free dimensions, then walks every
contracted coordinate (same ordering over the pair extents) accumulating

    C[idx_c] += A[idx_a] * B[idx_b]

directly into the output buffer.  C is read-modify-write: callers wanting a
plain contraction must clear the output view first (see zero_view).  The
sequential accumulation happens in the element type itself, with no widened
accumulator, and the fixed iteration order makes float results reproducible.

The loops are compiled with numba; semantics are identical to the plain
nested-loop form.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .layout import TensorView, view_offsets
from .plan import (
    ContractionPlan,
    ContractionSpec,
    _plan_tables,
    output_view_errors,
    validate,
)


@njit(cache=True)
def _advance(coords, exts):
    # mixed-radix odometer: bump position 0, carry while a position wraps to 0
    n = coords.shape[0]
    if n <= 0:
        return
    i = 0
    while True:
        coords[i] = (coords[i] + 1) % exts[i]
        i += 1
        if coords[i - 1] != 0 or i >= n:
            break


@njit(cache=True)
def _contract_loop(
    c, a, b,
    base_c, base_a, base_b,
    out_inc, src_inc, from_a, ext_free,
    inc_ca, inc_cb, ext_cont,
    size_free, size_cont,
):
    num_free = ext_free.shape[0]
    num_cont = ext_cont.shape[0]
    coord_free = np.zeros(num_free, np.int64)
    coord_cont = np.zeros(num_cont, np.int64)
    for _ in range(size_free):
        idx_c = base_c
        free_a = base_a
        free_b = base_b
        for j in range(num_free):
            idx_c += out_inc[j] * coord_free[j]
            if from_a[j]:
                free_a += src_inc[j] * coord_free[j]
            else:
                free_b += src_inc[j] * coord_free[j]
        for _ in range(size_cont):
            idx_a = free_a
            idx_b = free_b
            for k in range(num_cont):
                idx_a += inc_ca[k] * coord_cont[k]
                idx_b += inc_cb[k] * coord_cont[k]
            c[idx_c] = c[idx_c] + a[idx_a] * b[idx_b]
            _advance(coord_cont, ext_cont)
        _advance(coord_free, ext_free)


def contract(
    plan: ContractionPlan,
    a_view: TensorView, a: np.ndarray,
    b_view: TensorView, b: np.ndarray,
    c_view: TensorView, c: np.ndarray,
) -> None:
    """Accumulate the planned contraction of (a, b) into the c buffer.

    The plan must have been validated against these views; no checking
    happens here.  Buffers are flat 1-D arrays of a common element type.
    If any extent is 0 the iteration space is empty and nothing is written.
    """
    if plan.size_free == 0 or plan.size_cont == 0:
        return
    out_inc = np.array([f.out_increment for f in plan.free_table], np.int64)
    src_inc = np.array([f.src_increment for f in plan.free_table], np.int64)
    from_a = np.array([f.owner == "A" for f in plan.free_table], np.bool_)
    ext_free = np.array(plan.ext_c, np.int64)
    inc_ca = np.array([p.inc_a for p in plan.cont_table], np.int64)
    inc_cb = np.array([p.inc_b for p in plan.cont_table], np.int64)
    ext_cont = np.array([p.extent for p in plan.cont_table], np.int64)
    _contract_loop(
        c, a, b,
        c_view.base_offset, a_view.base_offset, b_view.base_offset,
        out_inc, src_inc, from_a, ext_free,
        inc_ca, inc_cb, ext_cont,
        plan.size_free, plan.size_cont,
    )


def zero_view(view: TensorView, buf: np.ndarray) -> None:
    """Set every element addressed by the view to zero, touching nothing else."""
    buf[view_offsets(view)] = 0


_PREFIX_DTYPE = {
    "s": np.dtype(np.float32),
    "d": np.dtype(np.float64),
    "c": np.dtype(np.complex64),
    "z": np.dtype(np.complex128),
}


def _gett(
    dtype,
    rank_a, ext_a, inc_a, a,
    rank_b, ext_b, inc_b, b,
    conts, cont_a, cont_b, perm,
    inc_c, c,
    offset_a, offset_b, offset_c,
):
    if not isinstance(c, np.ndarray):
        raise TypeError("c must be a numpy array (results are written in place)")
    a = np.asarray(a)
    b = np.asarray(b)
    for name, buf in (("a", a), ("b", b), ("c", c)):
        if buf.ndim != 1:
            raise TypeError(f"{name} must be a flat 1-D buffer, got shape {buf.shape}")
        if buf.dtype != dtype:
            raise TypeError(f"{name} has dtype {buf.dtype}, this entry point needs {dtype}")

    a_view = TensorView(rank_a, ext_a, inc_a, offset_a, a.shape[0])
    b_view = TensorView(rank_b, ext_b, inc_b, offset_b, b.shape[0])
    spec = ContractionSpec(conts, cont_a, cont_b, perm)

    errors = validate(a_view, b_view, spec, inc_c)
    if errors:
        return errors
    plan = _plan_tables(a_view, b_view, spec, inc_c)
    c_view = TensorView(plan.rank_c, plan.ext_c, inc_c, offset_c, c.shape[0])
    errors = output_view_errors(c_view)
    if errors:
        return errors
    contract(plan, a_view, a, b_view, b, c_view, c)
    return []


def sgett(rank_a, ext_a, inc_a, a, rank_b, ext_b, inc_b, b,
          conts, cont_a, cont_b, perm, inc_c, c,
          offset_a=0, offset_b=0, offset_c=0):
    """32-bit real contraction; see dgett for the parameter contract."""
    return _gett(_PREFIX_DTYPE["s"], rank_a, ext_a, inc_a, a, rank_b, ext_b, inc_b, b,
                 conts, cont_a, cont_b, perm, inc_c, c, offset_a, offset_b, offset_c)


def dgett(rank_a, ext_a, inc_a, a, rank_b, ext_b, inc_b, b,
          conts, cont_a, cont_b, perm, inc_c, c,
          offset_a=0, offset_b=0, offset_c=0):
    """64-bit real binary tensor contraction, accumulating into c.

    Parameters follow the interface order: each argument is described by its
    predecessors.  rank/extents/increments/buffer for A, the same for B, then
    the number of contracted pairs, the paired dimensions of A and of B, the
    output placement of the free indices, and finally the output increments
    and buffer.  The offset keywords locate each view's first used element
    inside its buffer (buffers here stand in for raw pointers, so an interior
    starting point is an explicit offset).

    Returns the validation error list; an empty list means the contraction
    ran.  On a non-empty list c is untouched.  The output is accumulated
    (read-modify-write): clear the output view first for a plain contraction.
    """
    return _gett(_PREFIX_DTYPE["d"], rank_a, ext_a, inc_a, a, rank_b, ext_b, inc_b, b,
                 conts, cont_a, cont_b, perm, inc_c, c, offset_a, offset_b, offset_c)


def cgett(rank_a, ext_a, inc_a, a, rank_b, ext_b, inc_b, b,
          conts, cont_a, cont_b, perm, inc_c, c,
          offset_a=0, offset_b=0, offset_c=0):
    """64-bit complex (2x32-bit) contraction; see dgett for the parameter contract."""
    return _gett(_PREFIX_DTYPE["c"], rank_a, ext_a, inc_a, a, rank_b, ext_b, inc_b, b,
                 conts, cont_a, cont_b, perm, inc_c, c, offset_a, offset_b, offset_c)


def zgett(rank_a, ext_a, inc_a, a, rank_b, ext_b, inc_b, b,
          conts, cont_a, cont_b, perm, inc_c, c,
          offset_a=0, offset_b=0, offset_c=0):
    """128-bit complex (2x64-bit) contraction; see dgett for the parameter contract."""
    return _gett(_PREFIX_DTYPE["z"], rank_a, ext_a, inc_a, a, rank_b, ext_b, inc_b, b,
                 conts, cont_a, cont_b, perm, inc_c, c, offset_a, offset_b, offset_c)


def dtype_prefix(dtype) -> str:
    """The s/d/c/z tag for a numpy element type."""
    dtype = np.dtype(dtype)
    for prefix, dt in _PREFIX_DTYPE.items():
        if dt == dtype:
            return prefix
    raise TypeError(f"no entry point for dtype {dtype}")


def gett_for_dtype(dtype):
    """The s/d/c/z entry point matching a numpy dtype."""
    return globals()[dtype_prefix(dtype) + "gett"]
