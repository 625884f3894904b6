"""Ordered algebras and least-fixed-point evaluation of equation systems.

The value of a regular coterm in an ordered algebra is the supremum of the
values of its finite approximants.  :func:`kleene_eval` computes it by
ascending iteration on the system's *flattened* form, where every distinct
subterm is its own node.  One round of that iteration adds exactly one level
of unfolding, so after ``k`` rounds the root holds
``eval_term(unfold(S, k))``; a converged run is therefore the supremum of the
canonical approximant chain, not merely some fixpoint.

Non-convergence is reported as :class:`Unresolved`, never as a value.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, replace
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence, Union

from . import kernels
from .coterms import RegSys, of_term, subst_sys, unfold
from .report import Report
from .terms import (
    BOT, MissingBinding, PartialTerm, Signature, SignatureMismatch, Var,
    eval_term, format_term, read_term, variables,
)
from ._syntax import ParseError, TokenStream

__all__ = [
    "AlgebraSpec", "FiniteTables", "StabilizeWithin", "CapAndFlag", "ExactHook",
    "Converged", "Unresolved", "EvalOutcome", "AlgebraError", "NotAChain",
    "FlatSystem", "flatten", "kleene_eval", "approx_eval", "step", "is_fixpoint",
    "check_em_identity", "check_inequalities", "check_morphism", "validate_algebra",
    "parse_inequalities", "DEFAULT_BUDGET", "DEFAULT_CAP",
]

DEFAULT_BUDGET = 10_000
DEFAULT_CAP = 10**6


class AlgebraError(Exception):
    pass


class NotAChain(AlgebraError):
    """The iterates failed to ascend: some operation is not monotone."""


# -- supremum strategies -----------------------------------------------------

@dataclass(frozen=True)
class StabilizeWithin:
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be at least 1")


@dataclass(frozen=True)
class CapAndFlag:
    """Iterate with every value clamped at ``cap``; clamped sysvars are flagged.

    Needs an algebra with ``magnitude`` and ``clamp``.
    """

    cap: int = DEFAULT_CAP
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be at least 1")


@dataclass(frozen=True)
class ExactHook:
    """Plain iteration, falling back to ``rule(S, A, env, last)`` on exhaustion.

    ``rule`` returns the exact supremum per system variable, or None.
    """

    rule: Callable[..., Mapping[str, Any] | None]
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be at least 1")


SupStrategy = Union[StabilizeWithin, CapAndFlag, ExactHook]


# -- algebras ----------------------------------------------------------------

@dataclass(frozen=True)
class FiniteTables:
    """Index form of a finite algebra, for the compiled iteration kernel.

    ``elements`` are listed along a linear extension of the order, bottom first.
    """

    elements: tuple
    leq: Any  # n x n uint8 array
    tables: Mapping[str, tuple[int, tuple[int, ...]]]  # name -> (arity, flat table)

    @property
    def index(self) -> dict:
        return {e: i for i, e in enumerate(self.elements)}


@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    name: str
    bottom: Any
    leq: Callable[[Any, Any], bool]
    ops: Mapping[str, Callable[..., Any]]
    arities: Mapping[str, int]
    elements: tuple | None = None
    sup_strategy: SupStrategy = StabilizeWithin()
    join: Callable[[Any, Any], Any] | None = None
    magnitude: Callable[[Any], float] | None = None
    clamp: Callable[[Any, int], Any] | None = None
    sample: Callable[[random.Random], Any] | None = None
    fmt: Callable[[Any], str] = str
    parse: Callable[[str], Any] | None = None
    tables: FiniteTables | None = None
    arith: Mapping[str, str] | None = None  # op name -> plus|times|zero|one over ints with INF

    def equal(self, a, b) -> bool:
        return a is b or a == b or (self.leq(a, b) and self.leq(b, a))

    def with_strategy(self, strategy: SupStrategy) -> AlgebraSpec:
        return replace(self, sup_strategy=strategy)

    def bind(self, sig: Signature) -> AlgebraSpec:
        """Rename semiring-role operations to the symbols of ``sig``'s profile."""
        if sig.profile is None:
            return self
        ops, arities = dict(self.ops), dict(self.arities)
        tables = dict(self.tables.tables) if self.tables else None
        arith = dict(self.arith) if self.arith else None
        for role, opname in sig.profile.roles().items():
            if opname != role and role in self.ops:
                ops[opname] = self.ops[role]
                arities[opname] = self.arities[role]
                if tables is not None and role in tables:
                    tables[opname] = tables[role]
                if arith is not None and role in arith:
                    arith[opname] = arith[role]
        ft = replace(self.tables, tables=tables) if self.tables else None
        return replace(self, ops=ops, arities=arities, tables=ft, arith=arith)

    def value(self, text: str) -> Any:
        if self.parse is None:
            raise ValueError(f"{self.name} has no literal syntax")
        return self.parse(text)


# -- outcomes ----------------------------------------------------------------

@dataclass(frozen=True)
class Converged:
    values: Mapping[str, Any]
    iterations: int
    root: str
    refined: bool = False

    @property
    def value(self):
        return self.values[self.root]


@dataclass(frozen=True)
class Unresolved:
    last: Mapping[str, Any]
    iterations: int
    root: str
    flags: tuple[str, ...] = ()
    capped: tuple[str, ...] = ()

    @property
    def value(self):
        return self.last[self.root]


EvalOutcome = Union[Converged, Unresolved]


# -- flattening --------------------------------------------------------------

@dataclass(frozen=True)
class FlatSystem:
    """One node per distinct resolved subterm.

    A node is ``("bot",)``, ``("gen", name)`` or ``("app", op, child_ids)``.
    """

    nodes: tuple
    var_node: Mapping[str, int]


def flatten(S: RegSys) -> FlatSystem:
    ids: dict[PartialTerm, int] = {}
    order: list[PartialTerm] = []
    pending: list[PartialTerm] = []

    def intern(t):
        t = S.resolve(t)
        i = ids.get(t)
        if i is None:
            i = ids[t] = len(order)
            order.append(t)
            pending.append(t)
        return i

    var_node = {x: intern(Var(x)) for x in S.sysvars}
    built: dict[int, tuple] = {}
    while pending:
        t = pending.pop()
        if t is BOT:
            node = ("bot",)
        elif isinstance(t, Var):
            node = ("gen", t.name)
        else:
            node = ("app", t.op, tuple(intern(a) for a in t.args))
        built[ids[t]] = node
    return FlatSystem(tuple(built[i] for i in range(len(order))), var_node)


def _check_env(S: RegSys, env: Mapping[Hashable, Any]):
    missing = [g for g in S.gens if g not in env]
    if missing:
        raise MissingBinding(f"no binding for generator(s) {', '.join(missing)}")


# -- evaluation --------------------------------------------------------------

def kleene_eval(S: RegSys, A: AlgebraSpec, env: Mapping[Hashable, Any] | None = None,
                strategy: SupStrategy | None = None, use_tables: bool = True) -> EvalOutcome:
    """Least solution of ``S`` in ``A`` by ascending iteration from bottom."""
    env = env or {}
    _check_env(S, env)
    strategy = strategy or A.sup_strategy
    flat = flatten(S)
    for node in flat.nodes:
        if node[0] == "app" and node[1].name not in A.ops:
            raise SignatureMismatch(f"{A.name} does not interpret {node[1]}")
    if use_tables and A.tables is not None and isinstance(strategy, StabilizeWithin):
        return _kleene_tables(S, A, env, strategy, flat)
    if use_tables and isinstance(strategy, CapAndFlag):
        out = _kleene_capped(S, A, env, strategy, flat)
        if out is not None:
            return out

    nodes = flat.nodes
    m = len(nodes)
    ops = [A.ops[n[1].name] if n[0] == "app" else None for n in nodes]
    bottom, leq = A.bottom, A.leq
    capping = isinstance(strategy, CapAndFlag)
    if capping and (A.clamp is None or A.magnitude is None):
        raise AlgebraError(f"{A.name} does not support capped iteration")
    old = [bottom] * m
    it = 0
    for it in range(1, strategy.budget + 1):
        new = []
        for i, node in enumerate(nodes):
            kind = node[0]
            if kind == "bot":
                v = bottom
            elif kind == "gen":
                v = env[node[1]]
            else:
                v = ops[i](*[old[c] for c in node[2]])
            new.append(v)
        if capping:
            new = [A.clamp(v, strategy.cap) for v in new]
        stable = True
        for i in range(m):
            a, b = old[i], new[i]
            if a is b or a == b:
                continue
            if not leq(a, b):
                raise NotAChain(f"iterate {it} of node {_describe(nodes[i])} is not above "
                                f"iterate {it - 1} in {A.name}")
            if not leq(b, a):
                stable = False
        old = new
        if stable:
            values = {x: old[i] for x, i in flat.var_node.items()}
            if capping:
                capped = tuple(x for x in S.sysvars
                               if A.magnitude(values[x]) >= strategy.cap)
                if capped:
                    return Unresolved(values, it, S.root, ("cap-exceeded",), capped)
            return Converged(values, it, S.root)
    values = {x: old[i] for x, i in flat.var_node.items()}
    if isinstance(strategy, ExactHook):
        exact = strategy.rule(S, A, env, values)
        if exact is not None:
            return Converged(dict(exact), it, S.root, refined=True)
    flags = ["budget-exhausted"]
    capped = ()
    if capping:
        capped = tuple(x for x in S.sysvars if A.magnitude(values[x]) >= strategy.cap)
        if capped:
            flags.insert(0, "cap-exceeded")
    return Unresolved(values, it, S.root, tuple(flags), capped)


def _describe(node) -> str:
    if node[0] == "app":
        return node[1].name
    return node[1] if node[0] == "gen" else "bot"


_ARITH_KIND = {"plus": 2, "times": 3, "zero": 4, "one": 5}


def _kleene_capped(S, A, env, strategy, flat):
    # Fast path for saturating naturals; None means fall back to the generic loop.
    if not A.arith or strategy.cap >= 2 ** 31 or strategy.cap < 0:
        return None
    m = len(flat.nodes)
    kind, consts, left, right = [0] * m, [0] * m, [0] * m, [0] * m
    for i, node in enumerate(flat.nodes):
        if node[0] == "gen":
            v = env[node[1]]
            if v == math.inf:
                v = strategy.cap
            elif isinstance(v, bool) or not isinstance(v, int) or v < 0:
                return None
            kind[i], consts[i] = 1, min(v, strategy.cap)
        elif node[0] == "app":
            role = A.arith.get(node[1].name)
            if role is None:
                return None
            kind[i] = _ARITH_KIND[role]
            if role in ("plus", "times"):
                left[i], right[i] = node[2]
    values, it, status = kernels.capped_kleene(kind, consts, left, right,
                                               strategy.cap, strategy.budget)
    if status == 2:
        raise NotAChain(f"capped iteration in {A.name} is not ascending")
    vals = {x: int(values[i]) for x, i in flat.var_node.items()}
    capped = tuple(x for x in S.sysvars if vals[x] >= strategy.cap)
    if status == 0:
        if capped:
            return Unresolved(vals, it, S.root, ("cap-exceeded",), capped)
        return Converged(vals, it, S.root)
    flags = ("cap-exceeded", "budget-exhausted") if capped else ("budget-exhausted",)
    return Unresolved(vals, it, S.root, flags, capped)


def _kleene_tables(S, A, env, strategy, flat):
    ft = A.tables
    index = ft.index
    n = len(ft.elements)
    nodes = flat.nodes
    m = len(nodes)
    maxar = max([len(nd[2]) for nd in nodes if nd[0] == "app"] + [1])
    kind, consts, arity, offset = [], [], [], []
    children = [[0] * maxar for _ in range(m)]
    flat_tables: list[int] = []
    op_offset: dict[str, int] = {}
    for name, (ar, table) in ft.tables.items():
        op_offset[name] = len(flat_tables)
        flat_tables.extend(table)
    bottom = index[A.bottom]
    for i, nd in enumerate(nodes):
        if nd[0] == "bot":
            kind.append(0), consts.append(0), arity.append(0), offset.append(0)
        elif nd[0] == "gen":
            value = env[nd[1]]
            if value not in index:
                raise ValueError(f"{value!r} is not an element of {A.name}")
            kind.append(1), consts.append(index[value]), arity.append(0), offset.append(0)
        else:
            op = nd[1].name
            if op not in ft.tables:
                raise SignatureMismatch(f"{A.name} has no table for {op}")
            kind.append(2), consts.append(0), arity.append(len(nd[2])), offset.append(op_offset[op])
            children[i][: len(nd[2])] = nd[2]
    if not flat_tables:
        flat_tables = [0]
    vals, it, status = kernels.table_kleene(kind, consts, arity, offset, children, flat_tables,
                                            ft.leq, n, bottom, strategy.budget)
    values = {x: ft.elements[vals[i]] for x, i in flat.var_node.items()}
    if status == 2:
        raise NotAChain(f"iterates of {S.name} do not ascend in {A.name}")
    if status == 1:
        return Unresolved(values, it, S.root, ("budget-exhausted",))
    return Converged(values, it, S.root)


def approx_eval(S: RegSys, A: AlgebraSpec, env: Mapping[Hashable, Any] | None, d: int) -> Any:
    """Value of the depth-``d`` approximant of ``S``."""
    env = env or {}
    _check_env(S, env)
    return eval_term(unfold(S, d), A, env)


def step(S: RegSys, A: AlgebraSpec, env: Mapping[Hashable, Any], values: Mapping[str, Any]) -> dict:
    """One application of the system's own equations to ``values``."""
    full = {**env, **values}
    return {x: eval_term(S.defs[x], A, full) for x in S.sysvars}


def is_fixpoint(S: RegSys, A: AlgebraSpec, env, values) -> bool:
    nxt = step(S, A, env, values)
    return all(A.equal(nxt[x], values[x]) for x in S.sysvars)


# -- law checks --------------------------------------------------------------

def check_em_identity(t: PartialTerm, inner: Mapping[str, RegSys], A: AlgebraSpec,
                      env: Mapping[Hashable, Any] | None = None,
                      sig: Signature | None = None) -> bool | None:
    """Evaluate a term of systems two ways: flatten first, or evaluate inner systems first.

    Returns True/False, or None when some evaluation did not converge.
    """
    env = dict(env or {})
    if sig is None:
        if not inner:
            raise ValueError("need a signature when there are no inner systems")
        sig = next(iter(inner.values())).sig
    outer = of_term(t, sorted(variables(t), key=str), sig)
    composite = subst_sys(outer, inner)
    lhs = kleene_eval(composite, A, env)
    if not isinstance(lhs, Converged):
        return None
    inner_values = {}
    for p, T in inner.items():
        out = kleene_eval(T, A, env)
        if not isinstance(out, Converged):
            return None
        inner_values[p] = out.value
    rhs = eval_term(t, A, {**env, **inner_values})
    return A.equal(lhs.value, rhs)


def _envs(A: AlgebraSpec, names: Sequence, mode, rng: random.Random) -> Iterable[dict]:
    if mode == "exhaustive":
        if A.elements is None:
            raise ValueError(f"{A.name} has no finite carrier; use sampled mode")
        for combo in itertools.product(A.elements, repeat=len(names)):
            yield dict(zip(names, combo))
    else:
        _, n = mode
        if A.sample is None:
            raise ValueError(f"{A.name} cannot be sampled")
        for _ in range(n):
            yield {x: A.sample(rng) for x in names}


def parse_inequalities(text: str, sig: Signature) -> list[tuple[PartialTerm, PartialTerm]]:
    """Parse ``lhs <= rhs`` (or ``⊑``) pairs, one per line or separated by ``;``."""
    ts = TokenStream(text)
    out = []
    while not ts.eof():
        lhs = read_term(ts, sig)
        tok = ts.next()
        if tok.value not in ("<=", "⊑"):
            raise ParseError(f"expected '<=' between terms, found {tok.value!r}", tok.line, tok.col)
        out.append((lhs, read_term(ts, sig)))
        ts.accept(";")
    return out


def check_inequalities(E: Iterable[tuple[PartialTerm, PartialTerm]], A: AlgebraSpec,
                       mode: str | tuple[str, int] = "exhaustive", seed: int = 0) -> Report:
    """Check ``lhs <= rhs`` pointwise for every (or ``n`` sampled) environment."""
    report = Report("inequalities", A.name, seed=seed if mode != "exhaustive" else None)
    rng = random.Random(seed)
    for k, (lhs, rhs) in enumerate(E):
        names = sorted(variables(lhs) | variables(rhs), key=str)
        for env in _envs(A, names, mode, rng):
            report.samples += 1
            a, b = eval_term(lhs, A, env), eval_term(rhs, A, env)
            if not A.leq(a, b):
                report.add(f"#{k} {format_term(lhs)} <= {format_term(rhs)}",
                           {x: A.fmt(v) for x, v in env.items()},
                           f"{A.fmt(a)} is not below {A.fmt(b)}")
    return report


def _carrier_sample(A: AlgebraSpec, rng: random.Random, n: int) -> list:
    if A.elements is not None:
        return list(A.elements)
    if A.sample is None:
        raise ValueError(f"{A.name} has neither a finite carrier nor a sampler")
    return [A.bottom] + [A.sample(rng) for _ in range(n)]


def validate_algebra(A: AlgebraSpec, samples: int = 24, seed: int = 0,
                     max_tuples: int = 200_000) -> Report:
    """Order axioms, least bottom and monotone operations.

    Exhaustive on finite carriers, otherwise on a seeded sample of elements.
    """
    rng = random.Random(seed)
    xs = _carrier_sample(A, rng, samples)
    report = Report("validate", A.name, seed=None if A.elements is not None else seed)
    if A.elements is None:
        report.notes.append(f"sampled carrier of {len(xs)} elements")
    leq, fmt = A.leq, A.fmt
    for a in xs:
        report.samples += 1
        if not leq(a, a):
            report.add("reflexive", {"a": fmt(a)})
        if not leq(A.bottom, a):
            report.add("bottom-least", {"a": fmt(a)})
    for a, b in itertools.product(xs, repeat=2):
        if a is not b and leq(a, b) and leq(b, a) and a != b:
            report.add("antisymmetric", {"a": fmt(a), "b": fmt(b)})
    up = {i: [j for j, b in enumerate(xs) if leq(a, b)] for i, a in enumerate(xs)}
    for i, a in enumerate(xs):
        for j in up[i]:
            for k in up[j]:
                if not leq(a, xs[k]):
                    report.add("transitive", {"a": fmt(a), "b": fmt(xs[j]), "c": fmt(xs[k])})
    idx = range(len(xs))
    for name, fn in A.ops.items():
        ar = A.arities[name]
        if len(xs) ** ar > max_tuples:
            report.notes.append(f"{name}: monotonicity sampled")
            count = max_tuples // max(1, len(xs))
            tuples = [tuple(rng.choice(idx) for _ in range(ar)) for _ in range(count)]
        else:
            tuples = itertools.product(idx, repeat=ar)
        for ix in tuples:
            args = tuple(xs[i] for i in ix)
            base = fn(*args)
            for pos in range(ar):
                for j in up[ix[pos]]:
                    bigger = args[:pos] + (xs[j],) + args[pos + 1:]
                    report.samples += 1
                    if not leq(base, fn(*bigger)):
                        report.add(f"monotone {name}", {"args": ",".join(map(fmt, args)),
                                                        "raised": ",".join(map(fmt, bigger))})
    return report


def check_morphism(h: Callable[[Any], Any], A: AlgebraSpec, B: AlgebraSpec,
                   systems: Iterable[tuple[RegSys, Mapping]] = (), samples: int = 24,
                   seed: int = 0, max_tuples: int = 200_000) -> Report:
    """Strictness, monotonicity, commutation with operations, and preservation of suprema.

    The last is checked on the given ``(system, env)`` pairs: the image of the
    least solution in ``A`` must be the least solution in ``B`` under ``h∘env``.
    """
    rng = random.Random(seed)
    report = Report("morphism", f"{A.name} -> {B.name}", seed=seed)
    xs = _carrier_sample(A, rng, samples)
    fa, fb = A.fmt, B.fmt
    report.samples += 1
    if not B.equal(h(A.bottom), B.bottom):
        report.add("strict", {"h(bot)": fb(h(A.bottom))})
    for a, b in itertools.product(xs, repeat=2):
        if A.leq(a, b):
            report.samples += 1
            if not B.leq(h(a), h(b)):
                report.add("monotone", {"a": fa(a), "b": fa(b)})
    for name, fn in A.ops.items():
        if name not in B.ops:
            report.add("signature", {"op": name}, f"{B.name} does not interpret {name}")
            continue
        ar = A.arities[name]
        if len(xs) ** ar > max_tuples:
            tuples = [tuple(rng.choice(xs) for _ in range(ar)) for _ in range(max_tuples // max(1, len(xs)))]
        else:
            tuples = itertools.product(xs, repeat=ar)
        for args in tuples:
            report.samples += 1
            lhs = h(fn(*args))
            rhs = B.ops[name](*[h(a) for a in args])
            if not B.equal(lhs, rhs):
                report.add(f"commutes {name}", {"args": ",".join(map(fa, args))},
                           f"h({name}(..)) = {fb(lhs)} but {name}(h(..)) = {fb(rhs)}")
    for S, env in systems:
        report.samples += 1
        out_a = kleene_eval(S, A, env)
        out_b = kleene_eval(S, B, {k: h(v) for k, v in env.items()})
        if not (isinstance(out_a, Converged) and isinstance(out_b, Converged)):
            report.indeterminate += 1
            continue
        if not B.equal(h(out_a.value), out_b.value):
            report.add("preserves-sup", {"system": S.name, **{k: fa(v) for k, v in env.items()}},
                       f"h(sup) = {fb(h(out_a.value))} but sup of images = {fb(out_b.value)}")
    return report
