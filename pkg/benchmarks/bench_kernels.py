"""Compare the compiled and pure-Python kernel backends.

Run ``python benchmarks/bench_kernels.py [--repeat N]``.  Each workload is
run on both backends, outputs are compared, and the best wall time is shown.
"""
from __future__ import annotations

import argparse
import sys
import timeit

from regalg import _pykernels
from regalg.instances.finite import all_posets, chain, diamond

try:
    from regalg import _ckernels
except ImportError:
    _ckernels = None


def _leq(alg):
    return [[alg.leq(a, b) for b in alg.elements] for a in alg.elements]


def workload_enumerate(k):
    """All monotone binary tables on the diamond and on a 4-chain."""
    d, c = diamond(), chain(4)
    return [(k.monotone_tables, (_leq(d), 4, 2)), (k.monotone_tables, (_leq(c), 4, 2))]


def workload_check(k):
    """Monotonicity checks over every table arity 1 on all posets of size <= 4."""
    calls = []
    for n, leq in all_posets(4):
        rows = leq.tolist()
        for t in _pykernels.monotone_tables(rows, n, 1):
            calls.append((k.is_monotone, (rows, t, n, 1)))
    return calls


def workload_kleene(k, m=400, n=64):
    """A cycle of ``m`` successor nodes over a chain of ``n`` elements."""
    succ = [min(i + 1, n - 1) for i in range(n)]
    leq = [[i <= j for j in range(n)] for i in range(n)]
    kind = [2] * m
    consts = [0] * m
    arity = [1] * m
    offset = [0] * m
    children = [[(i - 1) % m] for i in range(m)]
    return [(k.table_kleene, (kind, consts, arity, offset, children, succ, leq, n, 0, 100_000))]


def workload_capped(k, cap=200_000):
    """Saturating naturals: ``x = x + 1`` iterated until it reaches ``cap``."""
    kind, consts, left, right = [2, 5], [0, 0], [0, 0], [1, 0]
    return [(k.capped_kleene, (kind, consts, left, right, cap, 2 * cap))]


WORKLOADS = {"enumerate": workload_enumerate, "check": workload_check, "kleene": workload_kleene,
             "capped": workload_capped}


def run(calls):
    return [fn(*args) for fn, args in calls]


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled kernels unavailable; timing the Python backend only")
    print(f"{'workload':<10} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for name, make in WORKLOADS.items():
        times, results = {}, {}
        for b, k in backends.items():
            calls = make(k)
            results[b] = run(calls)
            times[b] = min(timeit.repeat(lambda: run(calls), number=1, repeat=args.repeat))
        if len({repr(r) for r in results.values()}) != 1:
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else "       -"
        print(f"{name:<10} " + " ".join(f"{times[b] * 1e3:8.2f}ms" for b in backends) + f"  {speed}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
