"""Seeded generators for terms, systems, graphs and nested substitution samples.

Every generator takes a ``random.Random``; nothing reads global state.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .coterms import RegSys, of_term
from .instances.tropical import WeightedDigraph
from .terms import BOT, App, PartialTerm, Signature, Var, subterm_at, variables

DEFAULT_SIG = Signature([("f", 1), ("g", 2), ("c", 0)], name="fgc")


def random_term(rng: random.Random, sig: Signature, leaves: Sequence[str], depth: int,
                p_bot: float = 0.1, p_leaf: float = 0.3) -> PartialTerm:
    """A term of depth ``<= depth``; leaves drawn from ``leaves``."""
    if depth <= 0:
        return BOT
    ops = [op for op in sig if op.arity > 0]
    consts = [op for op in sig if op.arity == 0]
    r = rng.random()
    if r < p_bot:
        return BOT
    if depth == 1 or r < p_bot + p_leaf or not ops:
        pool = [Var(x) for x in leaves] + [App(c, ()) for c in consts]
        return rng.choice(pool) if pool else BOT
    op = rng.choice(ops)
    return App(op, [random_term(rng, sig, leaves, depth - 1, p_bot, p_leaf) for _ in range(op.arity)])


def random_system(rng: random.Random, sig: Signature = DEFAULT_SIG, gens: Sequence[str] = ("a", "b"),
                  max_vars: int = 4, depth: int = 3, prefix: str = "x", name: str = "S") -> RegSys:
    """Arbitrary (typically cyclic) system with up to ``max_vars`` variables."""
    n = rng.randint(1, max_vars)
    xs = [f"{prefix}{i}" for i in range(n)]
    defs = {x: random_term(rng, sig, xs + list(gens), depth, p_bot=0.05) for x in xs}
    return RegSys(sig, xs, tuple(gens), defs, xs[0], name)


# -- semiring systems --------------------------------------------------------

SEMIRING = Signature.semiring()


def _sum(terms: list[PartialTerm], sig: Signature) -> PartialTerm:
    if not terms:
        return App(sig["zero"], ())
    t = terms[-1]
    for s in reversed(terms[:-1]):
        t = App(sig["plus"], (s, t))
    return t


def _prod(terms: list[PartialTerm], sig: Signature) -> PartialTerm:
    if not terms:
        return App(sig["one"], ())
    t = terms[-1]
    for s in reversed(terms[:-1]):
        t = App(sig["times"], (s, t))
    return t


def right_linear_system(rng: random.Random, letters: Sequence[str] = ("a", "b"), max_vars: int = 4,
                        max_summands: int = 3, name: str = "R") -> RegSys:
    """Summands are ``w·y`` or ``w`` with ``w`` a product of up to two letters (or one)."""
    n = rng.randint(1, max_vars)
    xs = [f"x{i}" for i in range(n)]
    sig = SEMIRING
    defs = {}
    for x in xs:
        summands = []
        for _ in range(rng.randint(1, max_summands)):
            coef = [Var(rng.choice(letters)) for _ in range(rng.choice((0, 1, 1, 2)))]
            if rng.random() < 0.7:
                summands.append(_prod(coef + [Var(rng.choice(xs))], sig))
            else:
                summands.append(_prod(coef, sig))
        defs[x] = _sum(summands, sig)
    return RegSys(sig, xs, tuple(letters), defs, xs[0], name)


def algebraic_system(rng: random.Random, letters: Sequence[str] = ("a", "b"), max_vars: int = 3,
                     max_summands: int = 3, max_factors: int = 3, name: str = "G") -> RegSys:
    """Summands are products of letters and variables, typically not linear."""
    n = rng.randint(1, max_vars)
    xs = [f"x{i}" for i in range(n)]
    sig = SEMIRING
    defs = {}
    for x in xs:
        summands = []
        for _ in range(rng.randint(1, max_summands)):
            k = rng.randint(0, max_factors)
            factors = [Var(rng.choice(xs)) if rng.random() < 0.4 else Var(rng.choice(letters))
                       for _ in range(k)]
            summands.append(_prod(factors, sig))
        defs[x] = _sum(summands, sig)
    return RegSys(sig, xs, tuple(letters), defs, xs[0], name)


def semiring_system(rng: random.Random, gens: Sequence[str] = ("a", "b"), max_vars: int = 4,
                    depth: int = 3, name: str = "W") -> RegSys:
    """Random system over plus/times/zero/one with no shape restriction."""
    n = rng.randint(1, max_vars)
    xs = [f"x{i}" for i in range(n)]
    defs = {x: random_term(rng, SEMIRING, xs + list(gens), depth, p_bot=0.05) for x in xs}
    return RegSys(SEMIRING, xs, tuple(gens), defs, xs[0], name)


def linear_natinf_system(rng: random.Random, max_vars: int = 4, max_coef: int = 2,
                         name: str = "N") -> tuple[RegSys, dict[str, int]]:
    """Right-linear system with coefficient generators bound to small naturals."""
    n = rng.randint(1, max_vars)
    xs = [f"x{i}" for i in range(n)]
    sig = SEMIRING
    env: dict[str, int] = {}
    defs = {}
    for x in xs:
        summands = []
        for _ in range(rng.randint(1, 3)):
            c = f"c{len(env)}"
            env[c] = rng.choice([0] + list(range(max_coef + 1)))
            if rng.random() < 0.6:
                summands.append(_prod([Var(c), Var(rng.choice(xs))], sig))
            else:
                summands.append(Var(c))
        defs[x] = _sum(summands, sig)
    return RegSys(sig, xs, tuple(env), defs, xs[0], name), env


def random_digraph(rng: random.Random, max_nodes: int = 8, max_weight: int = 9,
                   density: float = 0.3) -> WeightedDigraph:
    n = rng.randint(1, max_nodes)
    nodes = [f"n{i}" for i in range(n)]
    edges = [(u, v, rng.randint(0, max_weight)) for u in nodes for v in nodes if rng.random() < density]
    return WeightedDigraph.from_edges(edges, nodes)


# -- bisimulation-preserving transformations ---------------------------------

def _replace_vars(t: PartialTerm, choose) -> PartialTerm:
    if isinstance(t, Var):
        return choose(t)
    if isinstance(t, App):
        return App(t.op, [_replace_vars(a, choose) for a in t.args])
    return t


def unroll(S: RegSys, rng: random.Random) -> RegSys:
    """Inline a variable's definition at some of its occurrences."""
    defs = dict(S.defs)
    x = rng.choice(S.sysvars)

    def choose(v):
        if v.name in S.defs and rng.random() < 0.5:
            return S.defs[v.name]
        return v

    defs[x] = _replace_vars(defs[x], choose)
    return RegSys(S.sig, S.sysvars, S.gens, defs, S.root, S.name + "'")


def duplicate(S: RegSys, rng: random.Random) -> RegSys:
    """Copy a variable and redirect some occurrences to the copy."""
    x = rng.choice(S.sysvars)
    taken = set(S.sysvars) | set(S.gens) | set(S.sig.ops)
    k = 0
    while f"{x}_d{k}" in taken:
        k += 1
    copy = f"{x}_d{k}"

    def choose(v):
        return Var(copy) if v.name == x and rng.random() < 0.5 else v

    defs = {y: _replace_vars(t, choose) for y, t in S.defs.items()}
    defs[copy] = _replace_vars(S.defs[x], choose)
    return RegSys(S.sig, S.sysvars + (copy,), S.gens, defs, S.root, S.name + "'")


def bisimilar_variant(S: RegSys, rng: random.Random, steps: int = 3) -> RegSys:
    for _ in range(steps):
        S = unroll(S, rng) if rng.random() < 0.5 else duplicate(S, rng)
    return S


# -- consistent families -----------------------------------------------------

def _positions(t: PartialTerm, pos=()):
    yield pos
    if isinstance(t, App):
        for i, a in enumerate(t.args):
            yield from _positions(a, pos + (i,))


def delete_at(t: PartialTerm, pos) -> PartialTerm:
    if not pos:
        return BOT
    args = list(t.args)
    args[pos[0]] = delete_at(args[pos[0]], pos[1:])
    return App(t.op, args)


def consistent_family(rng: random.Random, t: PartialTerm, k: int = 3) -> list[PartialTerm]:
    """``k`` terms, each obtained from ``t`` by deleting random subterms."""
    out = []
    for _ in range(k):
        s = t
        for _ in range(rng.randint(0, 3)):
            positions = [p for p in _positions(s) if subterm_at(s, p) is not BOT]
            if not positions:
                break
            s = delete_at(s, rng.choice(positions))
        out.append(s)
    return out


# -- nested samples ----------------------------------------------------------

@dataclass(frozen=True)
class NestedSample:
    """An outer system over ``p*`` generators, images over ``a, b``, and second images over ``u, v``."""

    term: PartialTerm | None
    outer: RegSys
    inner: dict[str, RegSys]
    second: dict[str, RegSys]


def nested_sample(rng: random.Random, sig: Signature | None = None) -> NestedSample:
    sig = sig or DEFAULT_SIG
    ps = [f"p{i}" for i in range(rng.randint(1, 3))]
    xs, ys = ("a", "b"), ("u", "v")
    if rng.random() < 0.5:
        term = random_term(rng, sig, ps, 3, p_bot=0.05)
        outer = of_term(term, ps, sig, name="outer")
    else:
        term = None
        outer = random_system(rng, sig, ps, max_vars=3, prefix="x", name="outer")
    inner = {p: random_system(rng, sig, xs, max_vars=3, prefix="y", name=f"in_{p}") for p in ps}
    second = {x: random_system(rng, sig, ys, max_vars=2, prefix="z", name=f"in2_{x}") for x in xs}
    return NestedSample(term, outer, inner, second)


def em_sample(rng: random.Random, gens: Sequence[str] = ("a", "b")) -> tuple[PartialTerm, dict[str, RegSys]]:
    """A semiring term over ``p*`` and, per ``p``, a semiring system over ``gens``."""
    ps = [f"p{i}" for i in range(rng.randint(1, 3))]
    t = random_term(rng, SEMIRING, ps, 3, p_bot=0.05)
    inner = {p: semiring_system(rng, gens, max_vars=3, name=f"in_{p}") for p in ps}
    for p in list(inner):
        if p not in variables(t):
            del inner[p]
    return t, inner
