"""Finite ordered algebras given by an order and operation tables."""
from __future__ import annotations

import itertools
import random
from typing import Any, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .. import kernels
from ..algebra import AlgebraSpec, FiniteTables, StabilizeWithin
from ..report import Report


def order_closure(elements: Sequence, covers: Iterable[tuple]) -> set[tuple]:
    """Reflexive-transitive closure of a covering relation."""
    idx = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    reach = np.eye(n, dtype=bool)
    for a, b in covers:
        reach[idx[a], idx[b]] = True
    for k in range(n):
        reach |= reach[:, [k]] & reach[[k], :]
    return {(elements[i], elements[j]) for i in range(n) for j in range(n) if reach[i, j]}


def linear_extension(elements: Sequence, leq) -> list:
    """Elements sorted so that ``a < b`` implies ``a`` comes first."""
    below = {e: sum(1 for d in elements if leq(d, e)) for e in elements}
    return sorted(elements, key=lambda e: below[e])


class FiniteAlgebra:
    """A finite poset with bottom and monotone operation tables.

    ``tables`` maps an operation name to a dict from argument tuples to
    results (a bare element for constants).  Nothing is validated until
    :meth:`validate` is called, so deliberately broken fixtures can be built.
    """

    def __init__(self, elements: Sequence[Hashable], leq: set[tuple] | None = None,
                 covers: Iterable[tuple] = (), tables: Mapping[str, Any] | None = None,
                 name: str = "finite", bottom: Hashable | None = None):
        self.name = name
        self.elements = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("duplicate elements")
        self.order = set(leq) if leq is not None else order_closure(self.elements, covers)
        if bottom is None:
            lows = [e for e in self.elements if all((e, d) in self.order for d in self.elements)]
            if len(lows) != 1:
                raise ValueError(f"{name}: no least element")
            bottom = lows[0]
        self.bottom = bottom
        self.tables: dict[str, dict[tuple, Hashable]] = {}
        self.arities: dict[str, int] = {}
        for opname, table in (tables or {}).items():
            self.add_op(opname, table)

    def add_op(self, name: str, table) -> None:
        if not isinstance(table, Mapping):
            table = {(): table}
        arities = {len(k) for k in table}
        if len(arities) != 1:
            raise ValueError(f"{name}: argument tuples of mixed length")
        arity = arities.pop()
        missing = [a for a in itertools.product(self.elements, repeat=arity) if a not in table]
        if missing:
            raise ValueError(f"{name}: table has no entry for {missing[0]}")
        bad = [v for v in table.values() if v not in self.elements]
        if bad:
            raise ValueError(f"{name}: {bad[0]!r} is not an element")
        self.tables[name] = dict(table)
        self.arities[name] = arity

    @classmethod
    def from_rows(cls, elements, covers, rows: Mapping[str, Any], name="finite"):
        """Tables as rows: constants are an element, unary ops a list, binary ops a list of rows."""
        alg = cls(elements, covers=covers, name=name)
        for opname, spec in rows.items():
            alg.add_op(opname, rows_to_table(alg.elements, spec))
        return alg

    def leq(self, a, b) -> bool:
        return (a, b) in self.order

    def join(self, a, b):
        ups = [c for c in self.elements if self.leq(a, c) and self.leq(b, c)]
        least = [c for c in ups if all(self.leq(c, d) for d in ups)]
        return least[0] if least else None

    def validate(self) -> Report:
        report = Report("validate", self.name)
        E = self.elements
        for a in E:
            report.samples += 1
            if not self.leq(a, a):
                report.add("reflexive", {"a": a})
            if not self.leq(self.bottom, a):
                report.add("bottom-least", {"a": a})
        for a, b in itertools.product(E, repeat=2):
            if a != b and self.leq(a, b) and self.leq(b, a):
                report.add("antisymmetric", {"a": a, "b": b})
        for a, b, c in itertools.product(E, repeat=3):
            if self.leq(a, b) and self.leq(b, c) and not self.leq(a, c):
                report.add("transitive", {"a": a, "b": b, "c": c})
        if report.violations:
            return report
        ft = self.finite_tables()
        for name, (ar, flat) in ft.tables.items():
            report.samples += 1
            if not kernels.is_monotone(ft.leq, np.asarray(flat, dtype=np.int32), len(E), ar):
                report.add(f"monotone {name}", self._monotone_witness(name))
        return report

    def _monotone_witness(self, name) -> dict:
        table = self.tables[name]
        for args, v in table.items():
            for pos, b in itertools.product(range(len(args)), self.elements):
                if self.leq(args[pos], b):
                    bigger = args[:pos] + (b,) + args[pos + 1:]
                    if not self.leq(v, table[bigger]):
                        return {"args": ",".join(map(str, args)), "raised": ",".join(map(str, bigger))}
        return {}

    def finite_tables(self) -> FiniteTables:
        ordered = linear_extension(self.elements, self.leq)
        idx = {e: i for i, e in enumerate(ordered)}
        n = len(ordered)
        leq = np.zeros((n, n), dtype=np.uint8)
        for a, b in self.order:
            leq[idx[a], idx[b]] = 1
        tables = {}
        for name, table in self.tables.items():
            ar = self.arities[name]
            flat = tuple(idx[table[tuple(ordered[i] for i in combo)]]
                         for combo in itertools.product(range(n), repeat=ar))
            tables[name] = (ar, flat)
        return FiniteTables(tuple(ordered), leq, tables)

    def spec(self, strategy=None) -> AlgebraSpec:
        ops = {name: _lookup(table) for name, table in self.tables.items()}
        by_name = {str(e): e for e in self.elements}

        def parse(text: str):
            if text not in by_name:
                raise ValueError(f"{text!r} is not an element of {self.name}")
            return by_name[text]

        return AlgebraSpec(
            name=self.name, bottom=self.bottom, leq=self.leq, ops=ops,
            arities=dict(self.arities), elements=self.elements,
            sup_strategy=strategy or StabilizeWithin(), join=self.join,
            sample=lambda rng: rng.choice(self.elements), parse=parse,
            tables=self.finite_tables(),
        )


def _lookup(table):
    def op(*args):
        return table[args]
    return op


def rows_to_table(elements: Sequence, spec) -> dict[tuple, Any]:
    if isinstance(spec, Mapping):
        return dict(spec)
    if not isinstance(spec, (list, tuple)):
        return {(): spec}
    if spec and isinstance(spec[0], (list, tuple)):
        return {(a, b): spec[i][j] for i, a in enumerate(elements) for j, b in enumerate(elements)}
    return {(a,): spec[i] for i, a in enumerate(elements)}


# -- built-in instances ------------------------------------------------------

def two_point(f: str = "id") -> FiniteAlgebra:
    """``bot < top`` with one unary ``f``: ``id``, ``top`` (constant) or ``bot`` (constant)."""
    E = ("bot", "top")
    images = {"id": E, "top": ("top", "top"), "bot": ("bot", "bot")}[f]
    return FiniteAlgebra.from_rows(E, [("bot", "top")], {"f": list(images)},
                                   name=f"two-point[f={f}]")


def chain(n: int) -> FiniteAlgebra:
    """``c0 < c1 < ... `` as a lattice semiring (join, meet, bottom, top)."""
    E = tuple(f"c{i}" for i in range(n))
    covers = list(zip(E, E[1:]))
    return lattice_semiring(E, covers, name=f"chain{n}")


def diamond() -> FiniteAlgebra:
    """The four-element Boolean lattice ``bot < a, b < top`` as a semiring."""
    E = ("bot", "a", "b", "top")
    covers = [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")]
    return lattice_semiring(E, covers, name="diamond")


def lattice_semiring(elements, covers, name="lattice", extra: Mapping[str, Any] | None = None) -> FiniteAlgebra:
    """plus = join, times = meet, zero = bottom, one = top."""
    alg = FiniteAlgebra(elements, covers=covers, name=name)
    E = alg.elements

    def meet(a, b):
        downs = [c for c in E if alg.leq(c, a) and alg.leq(c, b)]
        return next(c for c in downs if all(alg.leq(d, c) for d in downs))

    top = next(e for e in E if all(alg.leq(d, e) for d in E))
    alg.add_op("plus", {(a, b): alg.join(a, b) for a in E for b in E})
    alg.add_op("times", {(a, b): meet(a, b) for a in E for b in E})
    alg.add_op("zero", alg.bottom)
    alg.add_op("one", top)
    for opname, spec in (extra or {}).items():
        alg.add_op(opname, rows_to_table(E, spec))
    return alg


def all_posets(max_size: int):
    """Posets with bottom on ``0..n-1`` (``n <= max_size``), one per isomorphism class.

    Elements are numbered along a linear extension, bottom = 0.  Yields
    ``(n, leq)`` with ``leq`` an ``n x n`` boolean numpy array.
    """
    for n in range(1, max_size + 1):
        seen = set()
        pairs = [(i, j) for i in range(1, n) for j in range(i + 1, n)]
        for bits in itertools.product((False, True), repeat=len(pairs)):
            leq = np.eye(n, dtype=bool)
            leq[0, :] = True
            for (i, j), b in zip(pairs, bits):
                leq[i, j] = b
            closed = leq.copy()
            for k in range(n):
                closed |= closed[:, [k]] & closed[[k], :]
            if not (closed == leq).all():
                continue
            key = _canonical(leq)
            if key in seen:
                continue
            seen.add(key)
            yield n, leq


def _canonical(leq) -> bytes:
    n = len(leq)
    best = None
    for perm in itertools.permutations(range(1, n)):
        p = (0,) + perm
        code = leq[np.ix_(p, p)].tobytes()
        if best is None or code < best:
            best = code
    return best


def random_monotone_table(leq, arity: int, rng: random.Random) -> tuple[int, ...]:
    tables = kernels.monotone_tables(np.asarray(leq, dtype=np.uint8), len(leq), arity)
    return rng.choice(tables)
