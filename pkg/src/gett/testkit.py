"""Brute-force oracle, randomized case generator, and result comparison.

The oracle is deliberately independent of the kernel: it works only on
packed copies of the operands, derives free dimensions and output extents
with its own few lines, enumerates coordinates by division-based
decomposition instead of the kernel's odometer, addresses elements through
full coordinate tuples dotted with packed strides, and accumulates in the
widest real type.  It shares no iteration or planning code with the kernel,
so agreement between the two routes is meaningful evidence.

The generator reproduces the verification taxonomy: 23 named categories
covering basic shapes, degenerate contractions, equal-extent families,
permutation shifts, and the sub-tensor / negative-increment embeddings.
Cases are deterministic functions of (category, seed) and always validate;
data values are integers in [-4, 4] so every intermediate is exactly
representable and kernel-vs-oracle comparison can demand bitwise equality.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import kernel
from .layout import (
    TensorView,
    contiguous_increments,
    num_elements,
    view_offsets,
)
from .plan import ContractionError, ContractionSpec, free_dims, validate

CATEGORIES = (
    "Basic contraction",
    "Commutativity",
    "Nothing contraction",
    "Scalar contraction",
    "Permutations",
    "Rank zero tensor",
    "Rank one tensor",
    "Square tensors zero contractions",
    "Square tensors one contraction",
    "Square tensors two contractions",
    "Cube tensors zero contractions",
    "Cube tensor one contraction",
    "Cube tensor two contractions",
    "Cube tensor three contractions",
    "Hypercube tensors zero contractions",
    "Hypercube tensor one contraction",
    "Hypercube tensor two contractions",
    "Hypercube tensor three contractions",
    "Hypercube tensor four contractions",
    "Sub-tensor of same rank",
    "Negative increment",
    "Sub-tensor negative increment",
    "Sub-tensor of lower rank",
)

# equal-extent families: (rank of both tensors, contracted pairs)
_EQUAL_EXTENT = {
    "Square tensors zero contractions": (2, 0),
    "Square tensors one contraction": (2, 1),
    "Square tensors two contractions": (2, 2),
    "Cube tensors zero contractions": (3, 0),
    "Cube tensor one contraction": (3, 1),
    "Cube tensor two contractions": (3, 2),
    "Cube tensor three contractions": (3, 3),
    "Hypercube tensors zero contractions": (4, 0),
    "Hypercube tensor one contraction": (4, 1),
    "Hypercube tensor two contractions": (4, 2),
    "Hypercube tensor three contractions": (4, 3),
    "Hypercube tensor four contractions": (4, 4),
}

_EMBEDDING = {
    "Sub-tensor of same rank": "sub",
    "Negative increment": "neg",
    "Sub-tensor negative increment": "subneg",
    "Sub-tensor of lower rank": "lower",
}


# ---------------------------------------------------------------------------
# packed tensors and the oracle


@dataclass
class PackedTensor:
    """Extents plus data in canonical packed order (first dimension fastest)."""

    extents: tuple[int, ...]
    data: np.ndarray

    def __post_init__(self):
        self.extents = tuple(int(e) for e in self.extents)


def pack(view: TensorView, buf: np.ndarray) -> PackedTensor:
    """Copy the elements a view addresses into canonical packed order."""
    return PackedTensor(view.extents, buf[view_offsets(view)])


def cast_packed(t: PackedTensor, dtype) -> PackedTensor:
    return PackedTensor(t.extents, t.data.astype(dtype))


@njit(cache=True)
def _oracle_loop(out, a, b, ext_out, stride_a, stride_b,
                 a_free, b_free, perm, cont_a, cont_b, ext_cont):
    n_out = out.shape[0]
    n_cont = 1
    for k in range(ext_cont.shape[0]):
        n_cont *= ext_cont[k]
    fa = a_free.shape[0]
    coord_out = np.zeros(ext_out.shape[0], np.int64)
    coord_a = np.zeros(stride_a.shape[0], np.int64)
    coord_b = np.zeros(stride_b.shape[0], np.int64)
    for p in range(n_out):
        rem = p
        for d in range(ext_out.shape[0]):
            coord_out[d] = rem % ext_out[d]
            rem //= ext_out[d]
        for i in range(fa):
            coord_a[a_free[i]] = coord_out[perm[i]]
        for i in range(b_free.shape[0]):
            coord_b[b_free[i]] = coord_out[perm[fa + i]]
        acc = out[p]
        for q in range(n_cont):
            rem = q
            for k in range(ext_cont.shape[0]):
                t = rem % ext_cont[k]
                rem //= ext_cont[k]
                coord_a[cont_a[k]] = t
                coord_b[cont_b[k]] = t
            off_a = 0
            for d in range(coord_a.shape[0]):
                off_a += coord_a[d] * stride_a[d]
            off_b = 0
            for d in range(coord_b.shape[0]):
                off_b += coord_b[d] * stride_b[d]
            acc += a[off_a] * b[off_b]
        out[p] = acc


def oracle_contract(a: PackedTensor, b: PackedTensor, spec: ContractionSpec) -> PackedTensor:
    """Contract two packed tensors by direct summation over coordinates.

    Every output coordinate is materialized by explicit loops over free then
    contracted coordinate tuples; addressing uses full coordinate tuples
    against packed strides only.  Accumulation happens in float64, or
    complex128 for complex inputs, and the result is returned in that wide
    type.
    """
    rank_a, rank_b = len(a.extents), len(b.extents)
    rank_c = rank_a + rank_b - 2 * spec.conts
    av = TensorView.contiguous(a.extents)
    bv = TensorView.contiguous(b.extents)
    errors = validate(av, bv, spec, (1,) * max(rank_c, 0))
    if errors:
        raise ContractionError(errors)

    a_free = [d for d in range(rank_a) if d not in set(spec.cont_a)]
    b_free = [d for d in range(rank_b) if d not in set(spec.cont_b)]
    ext_c = [0] * rank_c
    for i, d in enumerate(a_free):
        ext_c[spec.perm[i]] = a.extents[d]
    for i, d in enumerate(b_free):
        ext_c[spec.perm[len(a_free) + i]] = b.extents[d]

    complex_in = np.issubdtype(a.data.dtype, np.complexfloating) or np.issubdtype(
        b.data.dtype, np.complexfloating
    )
    wide = np.complex128 if complex_in else np.float64
    out = np.zeros(num_elements(ext_c), dtype=wide)
    _oracle_loop(
        out,
        a.data.astype(wide, copy=False),
        b.data.astype(wide, copy=False),
        np.array(ext_c, np.int64),
        np.array(contiguous_increments(a.extents), np.int64),
        np.array(contiguous_increments(b.extents), np.int64),
        np.array(a_free, np.int64),
        np.array(b_free, np.int64),
        np.array(spec.perm, np.int64),
        np.array(spec.cont_a, np.int64),
        np.array(spec.cont_b, np.int64),
        np.array([a.extents[d] for d in spec.cont_a], np.int64),
    )
    return PackedTensor(tuple(ext_c), out)


# ---------------------------------------------------------------------------
# comparison


@dataclass
class CompareResult:
    ok: bool
    coords: tuple[int, ...] | None = None
    got: object = None
    want: object = None

    def __bool__(self) -> bool:
        return self.ok

    @property
    def message(self) -> str:
        if self.ok:
            return "equal"
        return f"first mismatch at coordinate {self.coords}: got {self.got!r}, want {self.want!r}"


def _unflatten(flat: int, extents) -> tuple[int, ...]:
    coords = []
    for e in extents:
        coords.append(flat % e)
        flat //= e
    return tuple(coords)


def compare(x: PackedTensor, y: PackedTensor, tol: float | None = None) -> CompareResult:
    """Check two packed tensors for equality.

    tol None demands bitwise equality (same dtype required); otherwise the
    elementwise relative criterion |x - y| <= tol * max(1, |y|) applies and
    mixed widths are allowed.  Raises ValueError on mismatched extents.
    """
    if x.extents != y.extents:
        raise ValueError(f"extents mismatch: {x.extents} vs {y.extents}")
    if tol is None:
        if x.data.dtype != y.data.dtype:
            raise ValueError(
                f"bitwise comparison needs one dtype, got {x.data.dtype} vs {y.data.dtype}"
            )
        if x.data.tobytes() == y.data.tobytes():
            return CompareResult(True)
        item = x.data.dtype.itemsize
        xb = np.ascontiguousarray(x.data).view(np.uint8).reshape(-1, item)
        yb = np.ascontiguousarray(y.data).view(np.uint8).reshape(-1, item)
        bad = int(np.argmax((xb != yb).any(axis=1)))
    else:
        wide = np.complex128 if (
            np.issubdtype(x.data.dtype, np.complexfloating)
            or np.issubdtype(y.data.dtype, np.complexfloating)
        ) else np.float64
        xd = x.data.astype(wide)
        yd = y.data.astype(wide)
        over = np.abs(xd - yd) > tol * np.maximum(1.0, np.abs(yd))
        if not over.any():
            return CompareResult(True)
        bad = int(np.argmax(over))
    return CompareResult(False, _unflatten(bad, x.extents), x.data[bad], y.data[bad])


# ---------------------------------------------------------------------------
# case generation


@dataclass
class TestCase:
    """One generated contraction: operand views + buffers, the spec, and a
    pre-zeroed output view (outside the view the buffer holds sentinels)."""

    category: str
    seed: int
    a_view: TensorView
    a: np.ndarray
    b_view: TensorView
    b: np.ndarray
    c_view: TensorView
    c: np.ndarray
    spec: ContractionSpec
    dtype: np.dtype = field(default=np.dtype(np.float64))

    @property
    def inc_c(self) -> tuple[int, ...]:
        return self.c_view.increments


def _case_rng(category: str, seed: int) -> np.random.Generator:
    idx = CATEGORIES.index(category)
    ss = np.random.SeedSequence([idx, int(seed) & 0xFFFFFFFFFFFFFFFF])
    return np.random.Generator(np.random.PCG64(ss))


# Parent buffers are kept under this element count: enlargement draws stay
# inside their stated 1..5 (or 1..3) range, but are walked back toward the
# minimum when the full product would explode (an output of rank 10 with
# every dimension enlarged can otherwise demand gigabytes).
_PARENT_CAP = 1 << 20


def _shrink_to_cap(parent: list[int], floors: list[int], cap: int = _PARENT_CAP) -> list[int]:
    while num_elements(parent) > cap:
        best = -1
        for d in range(len(parent)):
            if parent[d] > floors[d] and (best < 0 or parent[d] > parent[best]):
                best = d
        if best < 0:
            break
        parent[best] -= 1
    return parent


def _reversed_view(view: TensorView) -> TensorView:
    """The same elements read backward: increments negated, base moved to the
    far corner of the footprint."""
    shift = sum(i * (e - 1) for e, i in zip(view.extents, view.increments) if e > 0)
    return TensorView(
        view.rank,
        view.extents,
        tuple(-i for i in view.increments),
        view.base_offset + shift,
        view.buffer_len,
    )


def _embed(rng: np.random.Generator, extents: tuple[int, ...], kind: str) -> TensorView:
    """Wrap extents in a view according to the embedding kind.

    plain: tightly packed.  sub: placed at a random offset inside a same-rank
    parent whose extents are 1..5 larger.  neg / subneg: as plain / sub but
    read backward.  lower: placed inside a parent of rank 1..3 higher whose
    matching extents are 1..3 larger (the extra dimensions are pinned at a
    random coordinate).
    """
    r = len(extents)
    if kind == "plain":
        return TensorView.contiguous(extents)
    if kind == "neg":
        return _reversed_view(TensorView.contiguous(extents))
    if kind in ("sub", "subneg"):
        parent = [e + int(rng.integers(1, 6)) for e in extents]
        parent = _shrink_to_cap(parent, [e + 1 for e in extents])
        inc = contiguous_increments(parent)
        base = sum(
            int(rng.integers(0, p - e + 1)) * i
            for p, e, i in zip(parent, extents, inc)
        )
        view = TensorView(r, extents, inc, base, num_elements(parent))
        return _reversed_view(view) if kind == "subneg" else view
    if kind == "lower":
        parent_rank = r + int(rng.integers(1, 4))
        used = sorted(int(d) for d in rng.permutation(parent_rank)[:r])
        used_set = set(used)
        parent = []
        floors = []
        ui = 0
        for d in range(parent_rank):
            if d in used_set:
                parent.append(extents[ui] + int(rng.integers(1, 4)))
                floors.append(extents[ui] + 1)
                ui += 1
            else:
                parent.append(int(rng.integers(1, 6)))
                floors.append(1)
        parent = _shrink_to_cap(parent, floors)
        ui = 0
        place = []
        for d in range(parent_rank):
            if d in used_set:
                place.append(int(rng.integers(0, parent[d] - extents[ui] + 1)))
                ui += 1
            else:
                place.append(int(rng.integers(0, parent[d])))
        pinc = contiguous_increments(parent)
        base = sum(o * i for o, i in zip(place, pinc))
        return TensorView(
            r, extents, tuple(pinc[d] for d in used), base, num_elements(parent)
        )
    raise ValueError(f"unknown embedding kind {kind!r}")


def _fill_integers(rng: np.random.Generator, view: TensorView) -> np.ndarray:
    return rng.integers(-4, 5, size=view.buffer_len).astype(np.float64)


def _draw_ranks_conts(category: str, rng: np.random.Generator) -> tuple[int, int, int]:
    if category in _EQUAL_EXTENT:
        rank, conts = _EQUAL_EXTENT[category]
        return rank, rank, conts
    if category == "Nothing contraction":
        return int(rng.integers(1, 6)), int(rng.integers(1, 6)), 0
    if category == "Scalar contraction":
        rank = int(rng.integers(1, 6))
        return rank, rank, rank
    if category == "Rank zero tensor":
        rank = int(rng.integers(1, 6))
        return (0, rank, 0) if rng.integers(0, 2) else (rank, 0, 0)
    if category == "Rank one tensor":
        rank = int(rng.integers(1, 6))
        conts = int(rng.integers(0, 2))
        return (1, rank, conts) if rng.integers(0, 2) else (rank, 1, conts)
    # Basic contraction, Commutativity, Permutations, and the sub-tensor /
    # negative-increment variants all draw the same shape family.
    rank_a = int(rng.integers(1, 6))
    rank_b = int(rng.integers(1, 6))
    conts = int(rng.integers(0, min(rank_a, rank_b, 4) + 1))
    return rank_a, rank_b, conts


def generate_case(category: str, seed: int) -> TestCase:
    """Build the deterministic test case for (category, seed).

    The case always validates; raises ValueError for an unknown category.
    """
    if category not in CATEGORIES:
        raise ValueError(f"unknown category: {category!r}")
    rng = _case_rng(category, seed)
    kind = _EMBEDDING.get(category, "plain")

    rank_a, rank_b, conts = _draw_ranks_conts(category, rng)
    cont_a = tuple(int(d) for d in rng.permutation(rank_a)[:conts])
    cont_b = tuple(int(d) for d in rng.permutation(rank_b)[:conts])

    if category in _EQUAL_EXTENT:
        e = int(rng.integers(1, 6))
        ext_a = [e] * rank_a
        ext_b = [e] * rank_b
    else:
        ext_a = [int(rng.integers(1, 6)) for _ in range(rank_a)]
        ext_b = [int(rng.integers(1, 6)) for _ in range(rank_b)]
        for da, db in zip(cont_a, cont_b):
            ext_b[db] = ext_a[da]

    rank_c = rank_a + rank_b - 2 * conts
    perm = tuple(int(p) for p in rng.permutation(rank_c))
    spec = ContractionSpec(conts, cont_a, cont_b, perm)

    free_exts = [ext_a[d] for d in free_dims(rank_a, cont_a)]
    free_exts += [ext_b[d] for d in free_dims(rank_b, cont_b)]
    ext_c = [0] * rank_c
    for i, ext in enumerate(free_exts):
        ext_c[perm[i]] = ext

    a_view = _embed(rng, tuple(ext_a), kind)
    b_view = _embed(rng, tuple(ext_b), kind)
    c_view = _embed(rng, tuple(ext_c), kind)
    a = _fill_integers(rng, a_view)
    b = _fill_integers(rng, b_view)
    c = _fill_integers(rng, c_view)
    kernel.zero_view(c_view, c)

    return TestCase(category, seed, a_view, a, b_view, b, c_view, c, spec)


def refill_uniform(case: TestCase, dtype, seed: int) -> TestCase:
    """The same case structure with buffers refilled uniformly in [-1, 1]
    (independent real and imaginary parts for complex dtypes)."""
    dtype = np.dtype(dtype)
    rng = np.random.default_rng(seed)

    def draw(n):
        if np.issubdtype(dtype, np.complexfloating):
            return (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)).astype(dtype)
        return rng.uniform(-1, 1, n).astype(dtype)

    a = draw(case.a_view.buffer_len)
    b = draw(case.b_view.buffer_len)
    c = draw(case.c_view.buffer_len)
    kernel.zero_view(case.c_view, c)
    return TestCase(
        case.category, case.seed,
        case.a_view, a, case.b_view, b, case.c_view, c,
        case.spec, dtype,
    )


# ---------------------------------------------------------------------------
# spec transforms


def swap_spec(spec: ContractionSpec, free_a_count: int) -> ContractionSpec:
    """Remap a spec for swapped operands.

    Pairs keep their order with roles exchanged; the free-index enumeration
    becomes B's dimensions first, so the permutation rotates by the number of
    A-owned free indices.  Every free index keeps its output position, hence
    the swapped contraction writes an identical output.
    """
    perm = spec.perm[free_a_count:] + spec.perm[:free_a_count]
    return ContractionSpec(spec.conts, spec.cont_b, spec.cont_a, perm)


def swap_case(case: TestCase) -> TestCase:
    fa = case.a_view.rank - case.spec.conts
    return TestCase(
        case.category, case.seed,
        case.b_view, case.b, case.a_view, case.a,
        case.c_view, case.c.copy(),
        swap_spec(case.spec, fa), case.dtype,
    )


def rotate_output(spec: ContractionSpec, shift: int, rank_c: int) -> ContractionSpec:
    """Shift every free index's output position left by `shift`, cyclically."""
    if rank_c <= 0:
        return spec
    perm = tuple((p - shift) % rank_c for p in spec.perm)
    return ContractionSpec(spec.conts, spec.cont_a, spec.cont_b, perm)


def rotate_packed(t: PackedTensor, shift: int) -> PackedTensor:
    """Relabel coordinates of a packed tensor by a cyclic left shift of its
    dimensions: output dimension d becomes dimension (d - shift) mod rank."""
    n = len(t.extents)
    if n == 0:
        return PackedTensor(t.extents, t.data.copy())
    axes = [(a + shift) % n for a in range(n)]
    nd = t.data.reshape(t.extents, order="F")
    return PackedTensor(
        tuple(t.extents[a] for a in axes),
        nd.transpose(axes).ravel(order="F"),
    )


# ---------------------------------------------------------------------------
# per-case checking and the suite runner


def run_gett(case: TestCase, spec: ContractionSpec | None = None,
             c_view: TensorView | None = None, c: np.ndarray | None = None):
    """Drive the public entry point for a case (optionally overriding the
    spec or output); returns the validation error list."""
    spec = case.spec if spec is None else spec
    c_view = case.c_view if c_view is None else c_view
    c = case.c if c is None else c
    entry = getattr(kernel, kernel.dtype_prefix(case.dtype) + "gett")
    return entry(
        case.a_view.rank, case.a_view.extents, case.a_view.increments, case.a,
        case.b_view.rank, case.b_view.extents, case.b_view.increments, case.b,
        spec.conts, spec.cont_a, spec.cont_b, spec.perm,
        c_view.increments, c,
        offset_a=case.a_view.base_offset,
        offset_b=case.b_view.base_offset,
        offset_c=c_view.base_offset,
    )


def check_case(case: TestCase) -> list[str]:
    """Run a case through the kernel and the oracle; list every discrepancy.

    All categories check kernel-vs-oracle equality (bitwise, after casting
    the wide oracle result to the case dtype) and that bytes outside the
    output view never change.  Commutativity additionally reruns with
    swapped operands and demands a bit-identical output buffer; Permutations
    reruns each cyclic shift of the output placement and checks both the
    oracle and the coordinate relabeling against the baseline.
    """
    failures = []
    work = TestCase(case.category, case.seed, case.a_view, case.a,
                    case.b_view, case.b, case.c_view, case.c.copy(),
                    case.spec, case.dtype)
    errors = run_gett(work)
    if errors:
        return [f"validation rejected a generated case: {errors[0]}"]

    offsets = view_offsets(case.c_view)
    got = PackedTensor(case.c_view.extents, work.c[offsets])
    want = oracle_contract(pack(case.a_view, case.a), pack(case.b_view, case.b), case.spec)
    result = compare(got, cast_packed(want, case.dtype))
    if not result:
        failures.append(f"kernel vs oracle: {result.message}")

    # splice the written view back into the pristine buffer: any remaining
    # byte difference means something outside the output view was touched
    spliced = case.c.copy()
    spliced[offsets] = work.c[offsets]
    if spliced.tobytes() != work.c.tobytes():
        failures.append("bytes outside the output view changed")

    if case.category == "Commutativity":
        swapped = swap_case(case)
        errors = run_gett(swapped)
        if errors:
            failures.append(f"swapped operands rejected: {errors[0]}")
        elif swapped.c.tobytes() != work.c.tobytes():
            failures.append("swapped-operand output is not bit-identical")

    if case.category == "Permutations":
        rank_c = case.c_view.rank
        for shift in range(1, rank_c):
            spec_s = rotate_output(case.spec, shift, rank_c)
            want_s = rotate_packed(got, shift)
            c_s_view = TensorView.contiguous(want_s.extents)
            c_s = np.zeros(c_s_view.buffer_len, dtype=case.dtype)
            errors = run_gett(case, spec=spec_s, c_view=c_s_view, c=c_s)
            if errors:
                failures.append(f"shift {shift} rejected: {errors[0]}")
                continue
            got_s = pack(c_s_view, c_s)
            oracle_s = oracle_contract(
                pack(case.a_view, case.a), pack(case.b_view, case.b), spec_s
            )
            result = compare(got_s, cast_packed(oracle_s, case.dtype))
            if not result:
                failures.append(f"shift {shift} vs oracle: {result.message}")
            result = compare(got_s, want_s)
            if not result:
                failures.append(f"shift {shift} is not the baseline relabeled: {result.message}")

    return failures


@dataclass
class CategoryResult:
    category: str
    passed: int = 0
    failed: int = 0
    failures: list = field(default_factory=list)  # (seed, message), first few


@dataclass
class SuiteReport:
    results: list[CategoryResult]
    cases: int
    seed: int
    elapsed: float

    @property
    def ok(self) -> bool:
        return all(r.failed == 0 for r in self.results)


def case_seed(master_seed: int, index: int) -> int:
    """Per-case seed derivation; printed on failure so a case can be replayed."""
    return master_seed * 1_000_003 + index


def run_suite(categories=None, cases: int = 100, seed: int = 1,
              max_failures: int = 5, progress=None) -> SuiteReport:
    """Run `cases` generated cases per category through check_case.

    categories None or "all" selects every category, in the fixed listing
    order.  progress, if given, is called with each CategoryResult as it
    completes.
    """
    if categories in (None, "all"):
        selected = CATEGORIES
    elif isinstance(categories, str):
        selected = (categories,)
    else:
        selected = tuple(categories)
    for cat in selected:
        if cat not in CATEGORIES:
            raise ValueError(f"unknown category: {cat!r}")

    start = time.perf_counter()
    results = []
    for cat in selected:
        res = CategoryResult(cat)
        for i in range(cases):
            s = case_seed(seed, i)
            problems = check_case(generate_case(cat, s))
            if problems:
                res.failed += 1
                if len(res.failures) < max_failures:
                    res.failures.extend((s, msg) for msg in problems)
            else:
                res.passed += 1
        results.append(res)
        if progress is not None:
            progress(res)
    return SuiteReport(results, cases, seed, time.perf_counter() - start)
