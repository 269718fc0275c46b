"""Compare the compiled and pure-Python search kernels.

Usage: python benchmarks/bench_kernel.py [--repeat N] [--quick]

Each case enumerates completions with both backends, checks that they return
the same solutions and node counts, and reports the best wall time.
"""

from __future__ import annotations

import argparse
import time

from latinp import _kernel_py, catalog
from latinp.model import EMPTY

try:
    from latinp import _kernel as _kernel_c
except ImportError:  # extension not built
    _kernel_c = None


def _cases(quick: bool):
    sudoku = catalog.sudoku()
    # 30 givens taken from a valid grid; this subset happens to have a unique completion
    grid = "534678912672195348198342567859761423426853791713924856961537284287419635345286179"
    keep = {0, 1, 4, 9, 12, 13, 14, 19, 20, 25, 27, 31, 35, 36, 39, 41, 44, 45, 49, 53, 55, 60, 61, 66, 67, 68, 71, 76, 79, 80}
    vals = [int(ch) - 1 if i in keep else EMPTY for i, ch in enumerate(grid)]
    cases = [
        ("latin 4x4, all", catalog.latin_square(4), -1),
        ("shidoku, all", catalog.shidoku(), -1),
        ("sudoku puzzle, 30 clues", sudoku.with_values(vals), -1),
        ("sudoku empty, first 2000", sudoku, 2000),
    ]
    if not quick:
        cases.append(("latin 5x5, all", catalog.latin_square(5), -1))
    return cases


def _run(mod, plb, limit):
    b = plb.board
    t0 = time.perf_counter()
    out = mod.search(b.cell_count, b.asterisms, b.cell_asterisms, plb.multiset.counts, plb.values, limit, 0)
    return time.perf_counter() - t0, out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="skip the 5x5 enumeration")
    args = ap.parse_args(argv)
    backends = [("python", _kernel_py)] + ([("cython", _kernel_c)] if _kernel_c else [])
    if _kernel_c is None:
        print("compiled kernel not available; timing the Python kernel only")
    print(f"{'case':28} {'solutions':>9} {'nodes':>8} " + " ".join(f"{n + ' s':>10}" for n, _ in backends) + "  speedup")
    for name, plb, limit in _cases(args.quick):
        times = []
        results = []
        for _, mod in backends:
            best = None
            for _ in range(args.repeat):
                dt, out = _run(mod, plb, limit)
                best = dt if best is None else min(best, dt)
            times.append(best)
            results.append(out)
        if any(r != results[0] for r in results[1:]):
            raise SystemExit(f"backends disagree on {name!r}")
        sols, nodes, _ = results[0]
        speed = f"{times[0] / times[1]:7.1f}x" if len(times) > 1 else ""
        print(f"{name:28} {len(sols):9d} {nodes:8d} " + " ".join(f"{t:10.4f}" for t in times) + f"  {speed}")


if __name__ == "__main__":
    main()
