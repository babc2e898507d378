"""Compare a regenerated table CSV against its stored reference.

Rows are matched on their key columns (text and count columns such as
``n``, ``estimator`` or ``stat``). Numeric value columns must agree within
``abs_tol + rel_tol * |reference|``. Monte Carlo tables are regenerated from
pinned seeds, so on the same numpy they match exactly; the tolerances absorb
generator or library drift across platforms.

Usage::

    python3 repro/compare.py fresh.csv repro/reference/table4.csv --rel 0.05
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

KEY_COLUMNS = {"n", "estimator", "stat", "alt", "alpha", "t1", "t2"}
# per-table defaults: deterministic tables are compared tightly
DEFAULT_TOLERANCES = {
    "table1": (0.10, 1e-6),
    "table2": (0.10, 1e-6),
    "table3": (0.10, 1e-6),
    "table4": (0.05, 1e-6),
    "table5": (0.02, 0.01),
    "table6": (1e-9, 1e-15),
}


def _read(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return reader.fieldnames or [], list(reader)


def _key(row, keys):
    return tuple(row[k] for k in keys)


def _number(text):
    try:
        return float(text)
    except ValueError:
        return None


def compare(fresh_path, ref_path, rel_tol, abs_tol) -> list[str]:
    fresh_fields, fresh = _read(fresh_path)
    ref_fields, ref = _read(ref_path)
    if fresh_fields != ref_fields:
        return [f"header differs: {fresh_fields} vs {ref_fields}"]
    keys = [f for f in ref_fields if f in KEY_COLUMNS]
    values = [f for f in ref_fields if f not in KEY_COLUMNS]
    fresh_rows = {_key(r, keys): r for r in fresh}
    problems = []
    for row in ref:
        key = _key(row, keys)
        other = fresh_rows.pop(key, None)
        if other is None:
            problems.append(f"missing row {dict(zip(keys, key))}")
            continue
        for col in values:
            a, b = _number(other[col]), _number(row[col])
            if a is None or b is None:
                if other[col] != row[col]:
                    problems.append(f"{dict(zip(keys, key))} {col}: {other[col]!r} vs {row[col]!r}")
                continue
            if math.isnan(a) and math.isnan(b):
                continue
            if not abs(a - b) <= abs_tol + rel_tol * abs(b):
                problems.append(f"{dict(zip(keys, key))} {col}: {a!r} vs reference {b!r}")
    for key in fresh_rows:
        problems.append(f"extra row {dict(zip(keys, key))}")
    return problems


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("fresh")
    parser.add_argument("reference")
    parser.add_argument("--rel", type=float, default=None, help="relative tolerance")
    parser.add_argument("--abs", type=float, default=None, help="absolute tolerance")
    args = parser.parse_args(argv)
    name = args.reference.rsplit("/", 1)[-1].split(".")[0]
    rel, abs_ = DEFAULT_TOLERANCES.get(name, (0.05, 1e-6))
    rel = rel if args.rel is None else args.rel
    abs_ = abs_ if args.abs is None else args.abs
    problems = compare(args.fresh, args.reference, rel, abs_)
    for line in problems:
        print(line, file=sys.stderr)
    print(f"{name}: {'OK' if not problems else f'{len(problems)} mismatches'} (rel {rel:g}, abs {abs_:g})")
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main())
