"""Argument validation and execution planning for binary tensor contractions.

A contraction is specified positionally: dimension cont_a[k] of A is summed
against dimension cont_b[k] of B, so paired dimensions must have equal
extents.  The remaining (free) dimensions are enumerated as A's free
dimensions in ascending order followed by B's free dimensions in ascending
order; free index i lands at output dimension perm[i].  The identity
permutation must be passed explicitly as (0, 1, ...).

Note the direction of perm: it maps free-index -> output-position.  The
inverse convention (output-position -> free-index) is NOT used here; callers
holding an inverse-style permutation must invert it first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .layout import TensorView, footprint, num_elements


class ErrorCode(enum.Enum):
    ExtentMismatch = "ExtentMismatch"
    ContIndexOutOfRange = "ContIndexOutOfRange"
    ContIndexDuplicate = "ContIndexDuplicate"
    PermLengthWrong = "PermLengthWrong"
    PermNotBijection = "PermNotBijection"
    IncCLengthWrong = "IncCLengthWrong"
    OutputWriteAliasing = "OutputWriteAliasing"
    FootprintOutOfBounds = "FootprintOutOfBounds"
    NegativeExtent = "NegativeExtent"


@dataclass(frozen=True)
class ValidationError:
    code: ErrorCode
    message: str

    def __str__(self) -> str:
        return f"{self.code.value}: {self.message}"


class ContractionError(ValueError):
    """Raised by build_plan when validation fails; carries the error list."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


@dataclass(frozen=True)
class ContractionSpec:
    """The raw contraction arguments: pair count, paired dimensions, and the
    placement of free indices in the output."""

    conts: int
    cont_a: tuple[int, ...]
    cont_b: tuple[int, ...]
    perm: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "cont_a", tuple(int(i) for i in self.cont_a))
        object.__setattr__(self, "cont_b", tuple(int(i) for i in self.cont_b))
        object.__setattr__(self, "perm", tuple(int(p) for p in self.perm))
        if self.conts < 0:
            raise ValueError(f"conts must be non-negative, got {self.conts}")
        if len(self.cont_a) != self.conts or len(self.cont_b) != self.conts:
            raise ValueError(
                f"cont_a and cont_b must each list {self.conts} dimensions, "
                f"got {len(self.cont_a)} and {len(self.cont_b)}"
            )


@dataclass(frozen=True)
class FreeDim:
    """One output dimension: where its data comes from and how it is strided."""

    owner: str  # "A" or "B"
    src_increment: int
    out_increment: int
    extent: int


@dataclass(frozen=True)
class ContPair:
    """One contracted dimension pair and the input increments that walk it."""

    extent: int
    inc_a: int
    inc_b: int


@dataclass(frozen=True)
class ContractionPlan:
    """Validated per-output-dimension and per-contracted-pair tables.

    free_table is ordered by output dimension; cont_table by pair index.
    """

    rank_c: int
    ext_c: tuple[int, ...]
    free_table: tuple[FreeDim, ...]
    cont_table: tuple[ContPair, ...]
    size_free: int
    size_cont: int


def output_rank(rank_a: int, rank_b: int, conts: int) -> int:
    return rank_a + rank_b - 2 * conts


def free_dims(rank: int, contracted) -> list[int]:
    """Non-contracted dimensions of a rank-`rank` tensor, ascending."""
    dropped = set(contracted)
    return [d for d in range(rank) if d not in dropped]


def derive_output_extents(a: TensorView, b: TensorView, spec: ContractionSpec) -> tuple[int, ...]:
    """Output extents ordered by output dimension (requires a valid spec)."""
    rank_c = output_rank(a.rank, b.rank, spec.conts)
    ext_c = [0] * rank_c
    sources = [a.extents[d] for d in free_dims(a.rank, spec.cont_a)]
    sources += [b.extents[d] for d in free_dims(b.rank, spec.cont_b)]
    for i, ext in enumerate(sources):
        ext_c[spec.perm[i]] = ext
    return tuple(ext_c)


def _check_cont_indices(name: str, indices, rank: int, errors: list) -> bool:
    ok = True
    seen = set()
    for k, d in enumerate(indices):
        if not 0 <= d < rank:
            errors.append(ValidationError(
                ErrorCode.ContIndexOutOfRange,
                f"cont_{name.lower()}[{k}] = {d} is outside dimensions 0..{rank - 1} of {name}",
            ))
            ok = False
        elif d in seen:
            errors.append(ValidationError(
                ErrorCode.ContIndexDuplicate,
                f"cont_{name.lower()}[{k}] = {d} repeats a contracted dimension of {name}",
            ))
            ok = False
        seen.add(d)
    return ok


def _check_footprint(name: str, view: TensorView, errors: list) -> None:
    if view.is_empty:
        return  # addresses nothing
    lo, hi = footprint(view)
    if view.base_offset + lo < 0 or view.base_offset + hi >= view.buffer_len:
        errors.append(ValidationError(
            ErrorCode.FootprintOutOfBounds,
            f"{name} addresses offsets {view.base_offset + lo}..{view.base_offset + hi} "
            f"but its buffer holds {view.buffer_len} elements",
        ))


def validate(
    a: TensorView,
    b: TensorView,
    spec: ContractionSpec,
    inc_c,
    c_view: TensorView | None = None,
) -> list[ValidationError]:
    """Collect every violation in the arguments; an empty list means valid.

    This never raises on bad data: all problems are reported as coded
    entries so callers can react programmatically.  Pass c_view to also
    bounds-check the output; aliasing of the output with the inputs is the
    caller's responsibility and is not checked.
    """
    errors: list[ValidationError] = []
    inc_c = tuple(int(i) for i in inc_c)

    for name, view in (("A", a), ("B", b)) + ((("C", c_view),) if c_view is not None else ()):
        for d, e in enumerate(view.extents):
            if e < 0:
                errors.append(ValidationError(
                    ErrorCode.NegativeExtent, f"{name} has extent {e} at dimension {d}"
                ))

    a_ok = _check_cont_indices("A", spec.cont_a, a.rank, errors)
    b_ok = _check_cont_indices("B", spec.cont_b, b.rank, errors)
    if a_ok and b_ok:
        for k, (da, db) in enumerate(zip(spec.cont_a, spec.cont_b)):
            if a.extents[da] != b.extents[db]:
                errors.append(ValidationError(
                    ErrorCode.ExtentMismatch,
                    f"contracted pair {k} has extent {a.extents[da]} in A "
                    f"(dimension {da}) but {b.extents[db]} in B (dimension {db})",
                ))

    rank_c = output_rank(a.rank, b.rank, spec.conts)
    perm_ok = True
    if len(spec.perm) != rank_c:
        errors.append(ValidationError(
            ErrorCode.PermLengthWrong,
            f"perm has {len(spec.perm)} entries, output rank is {rank_c}",
        ))
        perm_ok = False
    elif sorted(spec.perm) != list(range(rank_c)):
        errors.append(ValidationError(
            ErrorCode.PermNotBijection,
            f"perm {spec.perm} is not a bijection on 0..{rank_c - 1}",
        ))
        perm_ok = False

    inc_ok = True
    if len(inc_c) != rank_c:
        errors.append(ValidationError(
            ErrorCode.IncCLengthWrong,
            f"inc_c has {len(inc_c)} entries, output rank is {rank_c}",
        ))
        inc_ok = False

    if a_ok and b_ok and perm_ok and inc_ok:
        ext_c = derive_output_extents(a, b, spec)
        for d, (ext, inc) in enumerate(zip(ext_c, inc_c)):
            if inc == 0 and ext > 1:
                errors.append(ValidationError(
                    ErrorCode.OutputWriteAliasing,
                    f"inc_c[{d}] = 0 would alias writes across extent {ext}",
                ))

    _check_footprint("A", a, errors)
    _check_footprint("B", b, errors)
    if c_view is not None:
        _check_footprint("C", c_view, errors)

    return errors


def output_view_errors(view: TensorView) -> list[ValidationError]:
    """Footprint check for an output view built after planning."""
    errors: list[ValidationError] = []
    _check_footprint("C", view, errors)
    return errors


def build_plan(a: TensorView, b: TensorView, spec: ContractionSpec, inc_c) -> ContractionPlan:
    """Derive the execution tables for a contraction, validating first.

    Raises ContractionError carrying the full error list if validation
    fails; never returns a partially built plan.  The output footprint is
    not checked here (the output view is not an argument); use validate
    with c_view for that.
    """
    errors = validate(a, b, spec, inc_c)
    if errors:
        raise ContractionError(errors)
    return _plan_tables(a, b, spec, inc_c)


def _plan_tables(a: TensorView, b: TensorView, spec: ContractionSpec, inc_c) -> ContractionPlan:
    inc_c = tuple(int(i) for i in inc_c)

    sources = [("A", a, d) for d in free_dims(a.rank, spec.cont_a)]
    sources += [("B", b, d) for d in free_dims(b.rank, spec.cont_b)]
    rank_c = len(sources)

    ext_c = [0] * rank_c
    table: list[FreeDim | None] = [None] * rank_c
    for i, (owner, view, d) in enumerate(sources):
        p = spec.perm[i]
        ext_c[p] = view.extents[d]
        table[p] = FreeDim(
            owner=owner,
            src_increment=view.increments[d],
            out_increment=inc_c[p],
            extent=view.extents[d],
        )

    cont_table = tuple(
        ContPair(extent=a.extents[da], inc_a=a.increments[da], inc_b=b.increments[db])
        for da, db in zip(spec.cont_a, spec.cont_b)
    )

    return ContractionPlan(
        rank_c=rank_c,
        ext_c=tuple(ext_c),
        free_table=tuple(table),
        cont_table=cont_table,
        size_free=num_elements(ext_c),
        size_cont=num_elements(p.extent for p in cont_table),
    )
