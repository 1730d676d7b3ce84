"""Command-line harness: contract tensors from files, generate cases, verify
the kernel against the oracle, and benchmark.

Commands:
    run       contract two .tns files and write the result
    verify    run generated cases per category, kernel vs oracle
    gen       serialize a generated case to a directory
    bench     time the reference kernel on a cubic contraction
    selftest  alias for verify --suite all --cases 1000

Exit codes: 0 ok, 1 validation or verification failure, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import testkit
from .kernel import gett_for_dtype, zero_view
from .layout import TensorView, contiguous_increments, footprint, num_elements
from .plan import ContractionSpec, derive_output_extents, output_rank, validate
from .tensorfile import TensorFile, TensorFileError, read_tensor, write_tensor


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok != "")


def cmd_run(args) -> int:
    ta = read_tensor(args.a)
    tb = read_tensor(args.b)
    if ta.dtype != tb.dtype:
        print(f"error: dtype mismatch: {args.a} is '{ta.dtype}', {args.b} is '{tb.dtype}'",
              file=sys.stderr)
        return 1

    try:
        spec = ContractionSpec(args.conts, args.cont_a, args.cont_b, args.perm)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    rank_c = output_rank(ta.view.rank, tb.view.rank, spec.conts)
    inc_c = args.out_inc if args.out_inc is not None else (1,) * max(rank_c, 0)
    errors = validate(ta.view, tb.view, spec, inc_c)
    if errors:
        for e in errors:
            print(str(e), file=sys.stderr)
        return 1

    ext_c = derive_output_extents(ta.view, tb.view, spec)
    if args.out_ext is not None and tuple(args.out_ext) != ext_c:
        print(f"error: --out-ext {args.out_ext} does not match the derived "
              f"output extents {ext_c}", file=sys.stderr)
        return 1
    inc_c = args.out_inc if args.out_inc is not None else contiguous_increments(ext_c)

    lo, hi = footprint(TensorView(rank_c, ext_c, inc_c, 0, 0))
    c_view = TensorView(rank_c, ext_c, inc_c, max(0, -lo), hi - lo + 1)
    c = np.zeros(c_view.buffer_len, dtype=ta.data.dtype)
    zero_view(c_view, c)

    entry = gett_for_dtype(ta.data.dtype)
    errors = entry(
        ta.view.rank, ta.view.extents, ta.view.increments, ta.data,
        tb.view.rank, tb.view.extents, tb.view.increments, tb.data,
        spec.conts, spec.cont_a, spec.cont_b, spec.perm,
        c_view.increments, c,
        offset_a=ta.view.base_offset, offset_b=tb.view.base_offset,
        offset_c=c_view.base_offset,
    )
    if errors:
        for e in errors:
            print(str(e), file=sys.stderr)
        return 1

    write_tensor(args.out, TensorFile(ta.dtype, c_view, c))
    return 0


def cmd_verify(args) -> int:
    try:
        width = max(len(c) for c in testkit.CATEGORIES) + 2

        def progress(res):
            print(f"{res.category:<{width}}{res.passed}/{res.passed + res.failed}")

        report = testkit.run_suite(
            categories=args.suite, cases=args.cases, seed=args.seed, progress=progress
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    total = sum(r.passed + r.failed for r in report.results)
    failed = sum(r.failed for r in report.results)
    print(f"{len(report.results)} categories, {total} cases, {failed} failures, "
          f"{report.elapsed:.1f} s")
    if failed:
        for res in report.results:
            for seed, msg in res.failures:
                print(f"FAIL {res.category} seed={seed}: {msg}", file=sys.stderr)
        return 1
    return 0


def cmd_gen(args) -> int:
    try:
        case = testkit.generate_case(args.category, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tag = "d"
    write_tensor(out / "a.tns", TensorFile(tag, case.a_view, case.a))
    write_tensor(out / "b.tns", TensorFile(tag, case.b_view, case.b))
    spec = case.spec
    lines = [
        f"category: {case.category}",
        f"seed: {case.seed}",
        f"dtype: {tag}",
        f"conts: {spec.conts}",
        "cont_a: " + " ".join(str(d) for d in spec.cont_a),
        "cont_b: " + " ".join(str(d) for d in spec.cont_b),
        "perm: " + " ".join(str(p) for p in spec.perm),
        "out_ext: " + " ".join(str(e) for e in case.c_view.extents),
        "out_inc: " + " ".join(str(i) for i in case.c_view.increments),
        f"out_offset: {case.c_view.base_offset}",
        f"out_buffer: {case.c_view.buffer_len}",
    ]
    (out / "spec.txt").write_text("\n".join(lines) + "\n")
    return 0


def cmd_bench(args) -> int:
    rank, extent, conts, reps = args.rank, args.extent, args.conts, args.reps
    if conts > rank:
        print(f"error: --conts {conts} exceeds --rank {rank}", file=sys.stderr)
        return 2
    ext = (extent,) * rank
    a_view = TensorView.contiguous(ext)
    b_view = TensorView.contiguous(ext)
    cont_a = tuple(range(rank - conts, rank))
    cont_b = tuple(range(conts))
    rank_c = 2 * (rank - conts)
    perm = tuple(range(rank_c))
    ext_c = (extent,) * rank_c
    inc_c = contiguous_increments(ext_c)

    rng = np.random.default_rng(0)
    a = rng.uniform(-1, 1, a_view.buffer_len)
    b = rng.uniform(-1, 1, b_view.buffer_len)
    c = np.zeros(num_elements(ext_c))

    entry = gett_for_dtype(np.float64)
    times = []
    for _ in range(reps):
        c[:] = 0.0
        start = time.perf_counter()
        errors = entry(rank, ext, a_view.increments, a,
                       rank, ext, b_view.increments, b,
                       conts, cont_a, cont_b, perm, inc_c, c)
        times.append(time.perf_counter() - start)
        if errors:
            for e in errors:
                print(str(e), file=sys.stderr)
            return 1

    macs = extent ** (rank_c + conts)
    med = statistics.median(times)
    print(f"rank {rank}, extent {extent}, {conts} contracted pairs: "
          f"{macs} multiply-adds per rep, {num_elements(ext_c)} output elements")
    print(f"median of {reps} reps: {med:.6f} s  "
          f"({macs / med:.3e} multiply-adds/s, {num_elements(ext_c) / med:.3e} elements/s)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gett", description="binary tensor contraction over strided buffers"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="contract two tensor files")
    p.add_argument("a", help="first input .tns file")
    p.add_argument("b", help="second input .tns file")
    p.add_argument("out", help="output .tns file")
    p.add_argument("--conts", type=int, default=0, help="number of contracted pairs")
    p.add_argument("--cont-a", type=_int_list, default=(), metavar="i,j,...",
                   help="contracted dimensions of A")
    p.add_argument("--cont-b", type=_int_list, default=(), metavar="i,j,...",
                   help="contracted dimensions of B")
    p.add_argument("--perm", type=_int_list, default=(), metavar="p0,p1,...",
                   help="output position of each free index")
    p.add_argument("--out-ext", type=_int_list, default=None, metavar="e0,...",
                   help="expected output extents (checked against the derived ones)")
    p.add_argument("--out-inc", type=_int_list, default=None, metavar="i0,...",
                   help="output increments (default: packed)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="run generated cases, kernel vs oracle")
    p.add_argument("--suite", default="all", metavar="CATEGORY",
                   help='category name or "all"')
    p.add_argument("--cases", type=int, default=100, help="cases per category")
    p.add_argument("--seed", type=int, default=1, help="master seed")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a generated case to a directory")
    p.add_argument("--category", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time the kernel on a cubic contraction")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--extent", type=int, required=True)
    p.add_argument("--conts", type=int, required=True)
    p.add_argument("--reps", type=int, default=5)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", help="verify --suite all --cases 1000")
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=None)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        args.suite = "all"
        args.cases = 1000
        args.func = cmd_verify
    try:
        return args.func(args)
    except TensorFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
