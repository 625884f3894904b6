"""Ideal completion of finite posets, the term/ideal distributive law, and law checks.

On a finite poset every directed down-set has a maximum, so the completion
is isomorphic to the poset itself.  The checks here still build every object
the diagrams mention (ideals, ideals of ideals, terms over ideals, ideals of
terms) and compare both paths of each diagram elementwise.

Terms over a poset use ``Var(a)`` leaves; the leaf for the poset's bottom is
identified with the bottom term ``BOT``, which keeps the term order and the
leaf order in step.

The symbolic layer (:class:`SymbolicDeltaIdeal`) reads an equation system as
the ideal of finite approximants of its tree, where the completion is not
degenerate.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .algebra import AlgebraSpec, FiniteTables, StabilizeWithin
from .coterms import RegSys, approximates, bisim_witness, of_term, subst_sys, unfold
from .report import Report
from .terms import BOT, App, PartialTerm, Signature, Var, eval_term, format_term, subst, truncate, variables

__all__ = [
    "BoundExceeded", "FinitePoset", "Ideal", "TermPoset", "ideals_of", "ideal_poset",
    "etaD", "muD", "D_map", "lambda_map", "lifted_structure", "terms_upto",
    "check_monad_laws", "check_em_laws", "check_distributive_laws", "check_continuity",
    "poset_algebra", "run_law_suites", "SymbolicDeltaIdeal", "free_completion_iso_check",
    "DEFAULT_LAW_SIG",
]

DEFAULT_MAX_SIZE = 6
DEFAULT_LAW_SIG = Signature([("f", 1), ("g", 2), ("c", 0)], name="laws")
LABELS = ("⊥", "a", "b", "c", "d", "e", "f", "g")


class BoundExceeded(ValueError):
    pass


class Ideal(frozenset):
    """A down-closed directed subset, stored as its member set."""

    __slots__ = ()

    def __repr__(self):
        return "Ideal{" + ", ".join(sorted(map(_show, self))) + "}"


def _show(x) -> str:
    if isinstance(x, PartialTerm):
        return format_term(x)
    return str(x)


class FinitePoset:
    """Finite poset with a least element."""

    def __init__(self, elements: Sequence[Hashable], order: Iterable[tuple], name: str = "P"):
        self.elements = tuple(elements)
        self.name = name
        self._leq = frozenset(order)
        self._down = {a: frozenset(b for b in self.elements if (b, a) in self._leq) for a in self.elements}
        lows = [a for a in self.elements if len(self._down[a]) == 1 and
                all((a, b) in self._leq for b in self.elements)]
        if len(lows) != 1:
            raise ValueError(f"{name} has no least element")
        self.bottom = lows[0]
        self._ideal_poset = None

    @classmethod
    def from_covers(cls, elements, covers, name="P") -> FinitePoset:
        idx = {e: i for i, e in enumerate(elements)}
        reach = np.eye(len(elements), dtype=bool)
        for a, b in covers:
            reach[idx[a], idx[b]] = True
        for k in range(len(elements)):
            reach |= reach[:, [k]] & reach[[k], :]
        return cls.from_matrix(reach, list(elements), name)

    @classmethod
    def from_matrix(cls, leq, labels: Sequence | None = None, name="P") -> FinitePoset:
        n = len(leq)
        labels = list(labels) if labels is not None else list(LABELS[:n])
        order = [(labels[i], labels[j]) for i in range(n) for j in range(n) if leq[i][j]]
        return cls(labels, order, name)

    @classmethod
    def of_algebra(cls, A: AlgebraSpec) -> FinitePoset:
        if A.elements is None:
            raise ValueError(f"{A.name} has no finite carrier")
        return cls(A.elements, [(a, b) for a in A.elements for b in A.elements if A.leq(a, b)], A.name)

    def __len__(self):
        return len(self.elements)

    def leq(self, a, b) -> bool:
        return (a, b) in self._leq

    def down(self, a) -> Ideal:
        return Ideal(self._down[a])

    def down_closure(self, xs: Iterable) -> frozenset:
        out = set()
        for x in xs:
            out |= self._down[x]
        return frozenset(out)

    def is_directed(self, xs) -> bool:
        xs = list(xs)
        if not xs:
            return False
        return all(any(self.leq(a, c) and self.leq(b, c) for c in xs) for a in xs for b in xs)

    def maximum(self, xs):
        for c in xs:
            if all(self.leq(a, c) for a in xs):
                return c
        return None

    def validate(self) -> Report:
        report = Report("poset", self.name)
        for a, b, c in itertools.product(self.elements, repeat=3):
            report.samples += 1
            if not self.leq(a, a):
                report.add("reflexive", {"a": a})
            if a != b and self.leq(a, b) and self.leq(b, a):
                report.add("antisymmetric", {"a": a, "b": b})
            if self.leq(a, b) and self.leq(b, c) and not self.leq(a, c):
                report.add("transitive", {"a": a, "b": b, "c": c})
        return report

    def linear_extension(self) -> list:
        return sorted(self.elements, key=lambda e: len(self._down[e]))

    def leq_matrix(self, order: Sequence | None = None) -> np.ndarray:
        order = order or self.linear_extension()
        return np.array([[1 if self.leq(a, b) else 0 for b in order] for a in order], dtype=np.uint8)

    def monotone_maps(self, arity: int) -> list[dict[tuple, Any]]:
        """All monotone ``arity``-ary operations, as argument-tuple dicts."""
        order = self.linear_extension()
        n = len(order)
        out = []
        for flat in kernels.monotone_tables(self.leq_matrix(order), n, arity):
            combos = itertools.product(order, repeat=arity)
            out.append({args: order[v] for args, v in zip(combos, flat)})
        return out

    def fmt_ideal(self, I) -> str:
        top = self.maximum(I)
        if top is not None and frozenset(I) == self._down[top]:
            return f"↓{_show(top)}"
        return "{" + ", ".join(sorted(map(_show, I))) + "}"


def ideals_of(P: FinitePoset, bound: int = DEFAULT_MAX_SIZE) -> list[Ideal]:
    """Every nonempty directed down-set, by brute force over all subsets.

    On a finite poset each of them is principal; that is asserted here.
    """
    if len(P) > bound:
        raise BoundExceeded(f"poset of size {len(P)} exceeds bound {bound}")
    out = []
    els = P.elements
    for r in range(1, len(els) + 1):
        for combo in itertools.combinations(els, r):
            s = frozenset(combo)
            if P.down_closure(s) == s and P.is_directed(s):
                top = P.maximum(s)
                assert top is not None and P.down(top) == s, "non-principal ideal on a finite poset"
                out.append(Ideal(s))
    order = {e: i for i, e in enumerate(P.linear_extension())}
    return sorted(out, key=lambda I: (len(I), order[P.maximum(I)]))


def ideal_poset(P: FinitePoset, bound: int = DEFAULT_MAX_SIZE) -> FinitePoset:
    """The ideals of ``P`` ordered by inclusion."""
    if P._ideal_poset is None:
        ids = ideals_of(P, bound)
        P._ideal_poset = FinitePoset(ids, [(I, J) for I in ids for J in ids if I <= J], f"D{P.name}")
    return P._ideal_poset


def etaD(P: FinitePoset, a) -> Ideal:
    return P.down(a)


def muD(P: FinitePoset, II: Iterable[frozenset]) -> Ideal:
    """Down-closure of the union of a family of ideals."""
    return Ideal(P.down_closure(itertools.chain.from_iterable(II)))


def D_map(h: Callable, Q, I: Iterable) -> Ideal:
    """The ideal generated by the image of ``I`` in ``Q``."""
    return Ideal(Q.down_closure(h(a) for a in I))


# -- terms over a poset ------------------------------------------------------

def leaf(P, a) -> PartialTerm:
    return BOT if a == P.bottom else Var(a)


class TermPoset:
    """Finite partial terms with leaves in a poset, ordered by deletion and leaf order.

    Infinite as a set; only the down-set operations used by the checks are
    provided.  ``bottom`` is ``BOT``.
    """

    def __init__(self, P, name: str | None = None):
        self.P = P
        self.bottom = BOT
        self.name = name or f"F{P.name}"
        self._memo: dict[PartialTerm, frozenset] = {}

    def down(self, t: PartialTerm) -> frozenset:
        hit = self._memo.get(t)
        if hit is not None:
            return hit
        if t is BOT:
            out = frozenset({BOT})
        elif isinstance(t, Var):
            out = frozenset(leaf(self.P, b) for b in self.P.down(t.name))
        else:
            out = {BOT}
            for combo in itertools.product(*(self.down(a) for a in t.args)):
                out.add(App(t.op, combo))
            out = frozenset(out)
        self._memo[t] = out
        return out

    def down_closure(self, ts: Iterable[PartialTerm]) -> frozenset:
        out = set()
        for t in ts:
            out |= self.down(t)
        return frozenset(out)

    def leq(self, s, t) -> bool:
        if s is BOT:
            return True
        if isinstance(s, Var):
            return isinstance(t, Var) and self.P.leq(s.name, t.name)
        return (isinstance(t, App) and s.op == t.op
                and all(self.leq(a, b) for a, b in zip(s.args, t.args)))


def terms_upto(sig: Signature, leaves: Iterable, depth: int, bottom=None) -> list[PartialTerm]:
    """All terms of depth ``<= depth`` over the given leaves (``bottom`` becomes ``BOT``)."""
    base = [BOT] + [Var(x) for x in leaves if x != bottom] + [App(op, ()) for op in sig if op.arity == 0]
    if depth <= 0:
        return [BOT]
    layer = base
    for _ in range(depth - 1):
        grown = list(base)
        for op in sig:
            if op.arity:
                grown.extend(App(op, combo) for combo in itertools.product(layer, repeat=op.arity))
        layer = list(dict.fromkeys(grown))
    return layer


def F_map(h: Callable, Q, t: PartialTerm) -> PartialTerm:
    """Apply ``h`` to every leaf; leaves landing on ``Q``'s bottom become ``BOT``."""
    return subst(t, {x: leaf(Q, h(x)) for x in variables(t)})


def mu_F(T: PartialTerm) -> PartialTerm:
    """Flatten a term whose leaves are terms."""
    return subst(T, {s: s for s in variables(T)})


def lambda_map(P, t: PartialTerm, FP: TermPoset | None = None, max_depth: int = 6) -> Ideal:
    """Distribute terms over ideals: all same-shape terms with leaves drawn from the ideals, down-closed.

    ``P`` is the leaf poset (anything with ``bottom``, ``down`` and ``leq``,
    including a :class:`TermPoset`); the leaves of ``t`` are ideals of it.
    """
    from .terms import depth as term_depth
    if term_depth(t) > max_depth:
        raise BoundExceeded(f"term depth {term_depth(t)} exceeds {max_depth}")
    FP = FP or TermPoset(P)
    leaves = sorted(variables(t), key=repr)
    choices = [sorted(I, key=repr) for I in leaves]
    out = set()
    for pick in itertools.product(*choices):
        out |= FP.down(subst(t, {I: leaf(P, a) for I, a in zip(leaves, pick)}))
    return Ideal(out)


def lifted_structure(A: AlgebraSpec, P: FinitePoset | None = None) -> Callable[[PartialTerm], Ideal]:
    """The structure map on ideals: distribute, evaluate each term, down-close."""
    P = P or FinitePoset.of_algebra(A)
    FP = TermPoset(P)
    env = {a: a for a in P.elements}

    def beta(t: PartialTerm) -> Ideal:
        terms = lambda_map(P, t, FP)
        return Ideal(P.down_closure(eval_term(s, A, env) for s in terms))

    return beta


# -- law suites --------------------------------------------------------------

def _check_bound(P: FinitePoset, bound: int):
    if len(P) > bound:
        raise BoundExceeded(f"poset {P.name} has {len(P)} elements; bound is {bound}")


def check_monad_laws(P: FinitePoset, max_size: int = 4) -> Report:
    """Unit triangles, associativity square and naturality of the ideal monad on ``P``."""
    _check_bound(P, max_size)
    report = Report("monad", P.name)
    DP = ideal_poset(P)
    DDP = ideal_poset(DP)
    DDDP = ideal_poset(DDP)
    fmt = P.fmt_ideal
    for I in DP.elements:
        report.samples += 2
        if muD(P, etaD(DP, I)) != I:
            report.add("left unit", {"ideal": fmt(I)})
        if muD(P, D_map(lambda a: etaD(P, a), DP, I)) != I:
            report.add("right unit", {"ideal": fmt(I)})
    for K in DDDP.elements:
        report.samples += 1
        lhs = muD(P, muD(DP, K))
        rhs = muD(P, D_map(lambda II: muD(P, II), DP, K))
        if lhs != rhs:
            report.add("associativity", {"ideal": "{" + ", ".join(sorted(map(DDP.fmt_ideal, K))) + "}"},
                       f"{fmt(lhs)} vs {fmt(rhs)}")
    for table in P.monotone_maps(1):
        h = lambda a: table[(a,)]
        for a in P.elements:
            report.samples += 1
            if D_map(h, P, etaD(P, a)) != etaD(P, h(a)):
                report.add("unit naturality", {"a": a})
        for II in DDP.elements:
            report.samples += 1
            lhs = D_map(h, P, muD(P, II))
            rhs = muD(P, D_map(lambda I: D_map(h, P, I), DP, II))
            if lhs != rhs:
                report.add("multiplication naturality", {"ideal": DP.fmt_ideal(II)})
    return report


def check_em_laws(P: FinitePoset, sup: Mapping[frozenset, Any] | None = None, max_size: int = 4) -> Report:
    """Both algebra laws for ``sup`` as structure map on ideals.

    ``sup`` overrides the default (the maximum) on selected ideals, which is
    how corrupted fixtures are expressed.
    """
    _check_bound(P, max_size)
    overrides = {frozenset(k): v for k, v in (sup or {}).items()}
    report = Report("em", P.name)
    DP = ideal_poset(P)
    DDP = ideal_poset(DP)

    def s(I):
        return overrides.get(frozenset(I), P.maximum(I))

    for I in DP.elements:
        for J in DP.elements:
            if I <= J:
                report.samples += 1
                if not P.leq(s(I), s(J)):
                    report.add("structure map monotone", {"ideal": P.fmt_ideal(I), "above": P.fmt_ideal(J)})
    for a in P.elements:
        report.samples += 1
        if s(etaD(P, a)) != a:
            report.add("unit", {"ideal": P.fmt_ideal(etaD(P, a))}, f"sup = {s(etaD(P, a))}, expected {a}")
    for K in DDP.elements:
        report.samples += 1
        lhs = s(muD(P, K))
        rhs = s(D_map(s, P, K))
        if lhs != rhs:
            report.add("multiplication", {"ideal": DP.fmt_ideal(K)}, f"{lhs} vs {rhs}")
    return report


def check_distributive_laws(P: FinitePoset, sig: Signature = DEFAULT_LAW_SIG, depth: int = 2,
                            max_size: int = 3) -> Report:
    """The four coherence conditions of the term/ideal distributive law on ``P``.

    Terms have depth ``<= depth``; for the multiplication square the outer
    and inner terms each have depth ``<= depth``.
    """
    _check_bound(P, max_size)
    report = Report("distributive", P.name)
    DP = ideal_poset(P)
    DDP = ideal_poset(DP)
    FP = TermPoset(P)
    FDP = TermPoset(DP)
    FFP = TermPoset(FP)

    def lam(t):
        return lambda_map(P, t, FP)

    # unit of the term monad
    for I in DP.elements:
        report.samples += 1
        if lam(leaf(DP, I)) != Ideal(FP.down_closure(leaf(P, a) for a in I)):
            report.add("term unit", {"ideal": P.fmt_ideal(I)})
    # unit of the ideal monad
    for t in terms_upto(sig, P.elements, depth, P.bottom):
        report.samples += 1
        if lam(F_map(lambda a: etaD(P, a), DP, t)) != FP.down(t):
            report.add("ideal unit", {"term": format_term(t)})
    # multiplication of the term monad
    inner = terms_upto(sig, DP.elements, depth, DP.bottom)
    for T in terms_upto(sig, inner, depth, BOT):
        report.samples += 1
        lhs = lam(mu_F(T))
        lifted = subst(T, {s: leaf_ideal(lam(s)) for s in variables(T)})
        outer = lambda_map(FP, lifted, FFP)
        rhs = Ideal(FP.down_closure(mu_F(s) for s in outer))
        if lhs != rhs:
            report.add("term multiplication", {"term": _fmt_nested(T)})
    # multiplication of the ideal monad
    for T in terms_upto(sig, DDP.elements, depth, DDP.bottom):
        report.samples += 1
        lhs = lam(F_map(lambda K: muD(P, K), DP, T))
        spread = lambda_map(DP, T, FDP)
        rhs = Ideal(FP.down_closure(itertools.chain.from_iterable(lam(s) for s in spread)))
        if lhs != rhs:
            report.add("ideal multiplication", {"term": _fmt_nested(T)})
    return report


def leaf_ideal(I: Ideal) -> PartialTerm:
    """``I`` as a leaf; the bottom ideal ``{BOT}`` of a term poset is the bottom term."""
    return BOT if I == frozenset({BOT}) else Var(I)


def _fmt_nested(T) -> str:
    if T is BOT:
        return "bot"
    if isinstance(T, Var):
        x = T.name
        return f"[{_fmt_nested(x)}]" if isinstance(x, PartialTerm) else _show_leaf(x)
    if not T.args:
        return T.op.name
    return f"{T.op.name}({', '.join(_fmt_nested(a) for a in T.args)})"


def _show_leaf(x) -> str:
    if isinstance(x, frozenset):
        return "{" + ", ".join(sorted(_show_leaf(y) for y in x)) + "}"
    return _show(x)


def check_continuity(A: AlgebraSpec, depth: int = 2, P: FinitePoset | None = None) -> Report:
    """Operations commute with suprema of ideals, and the lifted structure is well behaved.

    For each operation ``f`` and ideals ``I1..In``: ``f(sup I1, .., sup In)``
    equals ``sup`` of the lifted structure applied to ``f(I1, .., In)``.  Also
    checks that the lifted structure yields ideals, is the principal formula
    on terms of depth ``<= depth``, and that ``etaD`` is a morphism into it.
    """
    P = P or FinitePoset.of_algebra(A)
    report = Report("continuity", A.name)
    DP = ideal_poset(P)
    beta = lifted_structure(A, P)
    env = {a: a for a in P.elements}
    sig = Signature([(name, A.arities[name]) for name in A.ops], name=A.name)
    for op in sig:
        for ideals in itertools.product(DP.elements, repeat=op.arity):
            report.samples += 1
            t = App(op, [leaf(DP, I) for I in ideals])
            image = beta(t)
            where = {"op": op.name, "args": ",".join(P.fmt_ideal(I) for I in ideals)}
            if not P.is_directed(image):
                report.add("lifted value is an ideal", where, f"{P.fmt_ideal(image)} is not directed")
                continue
            lhs = A.ops[op.name](*[P.maximum(I) for I in ideals])
            rhs = P.maximum(image)
            if lhs != rhs:
                report.add("ops commute with sup", where, f"{op.name}(sup ..) = {lhs} but sup of lifted = {rhs}")
        for args in itertools.product(P.elements, repeat=op.arity):
            report.samples += 1
            lhs = etaD(P, A.ops[op.name](*args))
            rhs = beta(App(op, [leaf(DP, etaD(P, a)) for a in args]))
            if lhs != rhs:
                report.add("unit is a morphism", {"op": op.name, "args": ",".join(map(str, args))})
    if depth >= 2 and not report.violations:
        for t in terms_upto(sig, DP.elements, depth, DP.bottom):
            report.samples += 1
            principal = subst(t, {I: leaf(P, P.maximum(I)) for I in variables(t)})
            if beta(t) != P.down(eval_term(principal, A, env)):
                report.add("principal formula", {"term": _fmt_nested(t)})
    return report


def poset_algebra(P: FinitePoset, ops: Mapping[str, Mapping[tuple, Any]], name: str | None = None) -> AlgebraSpec:
    """An algebra on ``P`` from operation dicts (argument tuple to element)."""
    order = P.linear_extension()
    idx = {e: i for i, e in enumerate(order)}
    arities = {k: len(next(iter(t))) for k, t in ops.items()}
    tables = {k: (arities[k], tuple(idx[t[c]] for c in itertools.product(order, repeat=arities[k])))
              for k, t in ops.items()}

    def make(table):
        return lambda *args: table[args]

    return AlgebraSpec(
        name=name or P.name, bottom=P.bottom, leq=P.leq,
        ops={k: make(t) for k, t in ops.items()}, arities=arities, elements=tuple(order),
        sup_strategy=StabilizeWithin(), join=None,
        tables=FiniteTables(tuple(order), P.leq_matrix(order), tables),
    )


def run_law_suites(suites: Iterable[str] = ("monad", "em", "distrib", "continuity"),
                   poset_size: int = 3, monad_size: int | None = None, depth: int = 2,
                   progress: Callable[[str], None] | None = None) -> list[Report]:
    """Run the suites on every poset with bottom up to the size bounds, one report per suite.

    ``continuity`` covers every monotone unary and binary table on each poset.
    """
    from .instances.finite import all_posets
    suites = list(suites)
    monad_size = monad_size if monad_size is not None else max(poset_size, 4 if poset_size >= 3 else poset_size)
    posets = {n: [FinitePoset.from_matrix(leq, name=f"P{n}.{k}")
                  for k, (_, leq) in enumerate(p for p in all_posets(n) if p[0] == n)]
              for n in range(1, max(poset_size, monad_size) + 1)}
    out = []
    for suite in suites:
        total = Report({"distrib": "distributive"}.get(suite, suite), f"posets<={poset_size}")
        limit = monad_size if suite in ("monad", "em") else poset_size
        for n in range(1, limit + 1):
            for P in posets[n]:
                if suite == "monad":
                    total.merge(check_monad_laws(P, max_size=limit))
                elif suite == "em":
                    total.merge(check_em_laws(P, max_size=limit))
                elif suite == "distrib":
                    total.merge(check_distributive_laws(P, depth=depth, max_size=limit))
                elif suite == "continuity":
                    for arity, opname in ((1, "f"), (2, "g")):
                        for table in P.monotone_maps(arity):
                            A = poset_algebra(P, {opname: table}, name=P.name)
                            total.merge(check_continuity(A, depth=depth, P=P))
                else:
                    raise ValueError(f"unknown law suite {suite!r}")
        total.instance = f"posets<={limit}"
        if progress:
            progress(f"{suite}: {total.samples} instances, {len(total.violations)} violations")
        out.append(total)
    return out


# -- symbolic layer ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SymbolicDeltaIdeal:
    """An equation system read as the ideal of finite approximants of its tree."""

    system: RegSys

    def __eq__(self, other):
        return isinstance(other, SymbolicDeltaIdeal) and bisim_witness(self.system, other.system) is None

    def __hash__(self):
        return hash(unfold(self.system, 4))

    def __contains__(self, s: PartialTerm) -> bool:
        return approximates(s, self.system)

    @classmethod
    def eta(cls, t: PartialTerm, sig: Signature, gens: Iterable[str] | None = None) -> SymbolicDeltaIdeal:
        return cls(of_term(t, gens, sig))

    def mu(self, inner: Mapping[str, SymbolicDeltaIdeal]) -> SymbolicDeltaIdeal:
        return SymbolicDeltaIdeal(subst_sys(self.system, {p: I.system for p, I in inner.items()}))


def free_completion_iso_check(samples: int = 100, seed: int = 0, depth: int = 8,
                              sig: Signature | None = None) -> Report:
    """Unit and associativity laws of system substitution, up to bisimulation, on seeded samples.

    Per sample: both unit laws, associativity, agreement with term
    substitution on finite terms, and ``unfold`` of a substituted system
    against substitution of unfoldings for every depth up to ``depth``.
    """
    from . import sampling
    rng = random.Random(seed)
    report = Report("free-completion", "symbolic", seed=seed)
    report.notes.append("every symbolic ideal is given by a system (surjective by construction)")
    for k in range(samples):
        ns = sampling.nested_sample(rng, sig)
        S, tau, tau2 = ns.outer, ns.inner, ns.second
        where = {"sample": k, "outer": format_term(ns.term) if ns.term is not None else S.name}
        D = SymbolicDeltaIdeal
        report.samples += 1
        for p, T in tau.items():
            unit_outer = of_term(Var(p), [p], T.sig)
            if not bisim_equal_sys(subst_sys(unit_outer, {p: T}), T):
                report.add("left unit", {**where, "generator": p})
            ident = {g: of_term(Var(g), [g], T.sig) for g in T.gens}
            if not bisim_equal_sys(subst_sys(T, ident), T):
                report.add("right unit", {**where, "generator": p})
        once = D(S).mu({p: D(T) for p, T in tau.items()}).mu({g: D(T) for g, T in tau2.items()})
        nested = D(S).mu({p: D(subst_sys(T, tau2)) for p, T in tau.items()})
        if once != nested:
            report.add("associativity", where)
        if ns.term is not None:
            finite = {p: unfold(T, 3) for p, T in tau.items()}
            direct = of_term(subst(ns.term, finite), None, S.sig)
            via = subst_sys(S, {p: of_term(u, None, S.sig) for p, u in finite.items()})
            if bisim_witness(direct, via) is not None:
                report.add("finite fragment", where)
        composite = subst_sys(S, tau)
        for d in range(depth + 1):
            expect = truncate(subst(unfold(S, d), {p: unfold(T, d) for p, T in tau.items()}), d)
            if unfold(composite, d) != expect:
                report.add("unfold commutes with substitution", {**where, "depth": d})
                break
    return report


def bisim_equal_sys(S1: RegSys, S2: RegSys) -> bool:
    return bisim_witness(S1, S2) is None
