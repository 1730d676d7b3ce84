#!/usr/bin/env python3
"""Print the structure of a generated verification case.

Usage:
    python scripts/inspect_case.py --category "Sub-tensor of lower rank" --seed 7
    python scripts/inspect_case.py --list
"""

import argparse

from gett import testkit
from gett.layout import num_elements


def describe(name, view):
    used = num_elements(view.extents)
    print(f"  {name}: rank {view.rank}, extents {list(view.extents)}, "
          f"increments {list(view.increments)}")
    print(f"     base offset {view.base_offset}, buffer {view.buffer_len} elements "
          f"({used} addressed)")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--category", default="Basic contraction")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--list", action="store_true", help="list category names")
    args = parser.parse_args()

    if args.list:
        for cat in testkit.CATEGORIES:
            print(cat)
        return

    case = testkit.generate_case(args.category, args.seed)
    spec = case.spec
    print(f"{case.category!r} seed {case.seed}")
    describe("A", case.a_view)
    describe("B", case.b_view)
    describe("C", case.c_view)
    print(f"  contracted pairs: {spec.conts}")
    for k, (da, db) in enumerate(zip(spec.cont_a, spec.cont_b)):
        print(f"     pair {k}: A dim {da} <-> B dim {db} "
              f"(extent {case.a_view.extents[da]})")
    print(f"  perm (free index -> output dim): {list(spec.perm)}")
    print(f"  output work: {num_elements(case.c_view.extents)} elements x "
          f"{num_elements(case.a_view.extents[d] for d in spec.cont_a)} products each")
    problems = testkit.check_case(case)
    print(f"  kernel vs oracle: {'ok' if not problems else problems}")


if __name__ == "__main__":
    main()
