"""Regular coterms as finite equation systems.

A :class:`RegSys` is a set of equations ``x = t`` over system variables and
generators.  It denotes the (possibly infinite) tree obtained by unfolding
from the root; chains of variable-to-variable equations that never reach an
operation symbol denote bottom, which is the least-solution reading.

Text syntax::

    sys loop over S vars {x} gens {a, b} root x {
      x = plus(times(a, x), b)
    }
"""
from __future__ import annotations

import enum
import graphlib
from collections import deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from ._syntax import ParseError, TokenStream
from .terms import (
    BOT, App, PartialTerm, Signature, SignatureMismatch, TermError, Var,
    format_term, parse_term, read_term, subst, variables,
)

__all__ = [
    "RegSys", "SysClass", "LinearUndefined", "NotLinear", "of_term", "unfold",
    "approximates", "approximant_chain", "bisim_equal", "bisim_witness", "subst_sys",
    "rename", "classify", "linear_form", "parse_system", "format_system", "read_system",
    "reachable_vars",
]


class LinearUndefined(TermError):
    pass


class NotLinear(TermError):
    pass


class SysClass(enum.Enum):
    FINITE = "finite"
    LINEAR = "linear"
    ALGEBRAIC = "algebraic"


@dataclass(frozen=True, eq=False)
class RegSys:
    sig: Signature
    sysvars: tuple[str, ...]
    gens: tuple[str, ...]
    defs: Mapping[str, PartialTerm]
    root: str
    name: str = field(default="S")

    def __post_init__(self):
        object.__setattr__(self, "sysvars", tuple(self.sysvars))
        object.__setattr__(self, "gens", tuple(self.gens))
        object.__setattr__(self, "defs", MappingProxyType(dict(self.defs)))
        sv, gs = set(self.sysvars), set(self.gens)
        if len(sv) != len(self.sysvars) or len(gs) != len(self.gens):
            raise ValueError("duplicate system variable or generator")
        if sv & gs:
            raise ValueError(f"names used as both variable and generator: {sorted(sv & gs)}")
        clash = (sv | gs) & set(self.sig.ops)
        if clash:
            raise ValueError(f"names clash with signature symbols: {sorted(clash)}")
        if set(self.defs) != sv:
            raise ValueError("need exactly one definition per system variable")
        if self.root not in sv:
            raise ValueError(f"root {self.root!r} is not a system variable")
        for x, t in self.defs.items():
            stack = [t]
            while stack:
                u = stack.pop()
                if isinstance(u, Var):
                    if u.name not in sv and u.name not in gs:
                        raise ValueError(f"{u.name!r} in definition of {x} is neither a "
                                         "system variable nor a generator")
                elif isinstance(u, App):
                    if u.op not in self.sig:
                        raise SignatureMismatch(f"{u.op} in definition of {x} is not in "
                                                f"signature {self.sig.name}")
                    stack.extend(u.args)

    @classmethod
    def make(cls, sig: Signature, defs: Mapping[str, PartialTerm | str], root: str | None = None,
             gens: Iterable[str] | None = None, name: str = "S") -> RegSys:
        """Convenience constructor: parses string definitions, infers generators."""
        parsed = {x: parse_term(t, sig) if isinstance(t, str) else t for x, t in defs.items()}
        sysvars = tuple(parsed)
        if gens is None:
            seen = []
            for t in parsed.values():
                for v in sorted(variables(t)):
                    if v not in parsed and v not in seen:
                        seen.append(v)
            gens = seen
        return cls(sig, sysvars, tuple(gens), parsed, root or sysvars[0], name)

    def __eq__(self, other):
        return (isinstance(other, RegSys) and self.sig == other.sig
                and self.sysvars == other.sysvars and self.gens == other.gens
                and self.root == other.root and dict(self.defs) == dict(other.defs))

    def __hash__(self):
        return hash((self.sysvars, self.gens, self.root, tuple(self.defs[x] for x in self.sysvars)))

    def __repr__(self):
        eqs = "; ".join(f"{x} = {format_term(self.defs[x])}" for x in self.sysvars)
        return f"RegSys(root={self.root}; {eqs})"

    def __str__(self):
        return format_system(self)

    def with_root(self, root: str) -> RegSys:
        return RegSys(self.sig, self.sysvars, self.gens, self.defs, root, self.name)

    def resolve(self, t: PartialTerm) -> PartialTerm:
        """Follow variable-to-variable equations; an unproductive cycle yields ``BOT``."""
        seen = set()
        while isinstance(t, Var) and t.name in self.defs:
            if t.name in seen:
                return BOT
            seen.add(t.name)
            t = self.defs[t.name]
        return t


def reachable_vars(S: RegSys) -> list[str]:
    order, seen, stack = [], {S.root}, [S.root]
    while stack:
        x = stack.pop()
        order.append(x)
        for v in sorted(variables(S.defs[x])):
            if v in S.defs and v not in seen:
                seen.add(v)
                stack.append(v)
    return order


def _fresh(base: str, taken: set[str]) -> str:
    if base not in taken:
        taken.add(base)
        return base
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    taken.add(f"{base}_{i}")
    return f"{base}_{i}"


def of_term(t: PartialTerm, gens: Iterable[str] | None, sig: Signature, name: str = "S") -> RegSys:
    """Embed a finite term as a one-equation acyclic system."""
    leaves = variables(t)
    gens = tuple(sorted(leaves)) if gens is None else tuple(gens)
    extra = leaves - set(gens)
    if extra:
        raise ValueError(f"leaves outside the generators: {sorted(extra)}")
    root = _fresh("x0", set(gens) | set(sig.ops))
    return RegSys(sig, (root,), gens, {root: t}, root, name)


def unfold(S: RegSys, d: int) -> PartialTerm:
    """Depth-``d`` truncation of the tree denoted by ``S``."""
    memo: dict[tuple[int, int], PartialTerm] = {}

    def go(t, k):
        t = S.resolve(t)
        if k <= 0 or t is BOT:
            return BOT
        if isinstance(t, Var):
            return t
        key = (id(t), k)
        if key not in memo:
            memo[key] = App(t.op, [go(a, k - 1) for a in t.args])
        return memo[key]

    return go(Var(S.root), d)


def approximates(s: PartialTerm, S: RegSys) -> bool:
    """Decide whether finite ``s`` agrees with the tree of ``S`` wherever defined.

    Walks ``s`` against the equation graph; nothing is unfolded.
    """

    def agree(u, t):
        if u is BOT:
            return True
        t = S.resolve(t)
        if isinstance(u, Var):
            return u == t
        if u.op not in S.sig:
            raise SignatureMismatch(f"{u.op} is not in signature {S.sig.name}")
        if not isinstance(t, App) or t.op != u.op:
            return False
        return all(agree(a, b) for a, b in zip(u.args, t.args))

    return agree(s, Var(S.root))


def approximant_chain(S: RegSys, d: int) -> list[PartialTerm]:
    return [unfold(S, k) for k in range(d + 1)]


def bisim_witness(S1: RegSys, S2: RegSys) -> tuple[int, tuple[int, ...]] | None:
    """Shallowest position where the trees of ``S1`` and ``S2`` differ, or None.

    Breadth-first exploration of the product of the two equation graphs; a
    state is a pair of resolved subterms, so at most |S1|*|S2| states exist.
    Returns ``(depth, position)`` with ``depth == len(position)``.
    """
    result = _explore(S1, S2)
    return result[0]


def bisim_equal(S1: RegSys, S2: RegSys) -> bool:
    return bisim_witness(S1, S2) is None


def product_states(S1: RegSys, S2: RegSys) -> int:
    """Number of pair states explored when the systems are bisimilar."""
    return _explore(S1, S2)[1]


def _explore(S1, S2):
    if S1.sig != S2.sig:
        raise SignatureMismatch("systems over different signatures")
    start = (S1.resolve(Var(S1.root)), S2.resolve(Var(S2.root)))
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        (t1, t2), pos = queue.popleft()
        if t1 is BOT or t2 is BOT or isinstance(t1, Var) or isinstance(t2, Var):
            if t1 != t2:
                return (len(pos), pos), len(seen)
            continue
        if t1.op != t2.op:
            return (len(pos), pos), len(seen)
        for i, (a, b) in enumerate(zip(t1.args, t2.args)):
            pair = (S1.resolve(a), S2.resolve(b))
            if pair not in seen:
                seen.add(pair)
                queue.append((pair, pos + (i,)))
    return None, len(seen)


def subst_sys(S: RegSys, tau: Mapping[str, RegSys], strict: bool = False,
              name: str | None = None) -> RegSys:
    """Plug systems in for generators: the multiplication of the regular-tree monad.

    The result is the disjoint union of ``S`` and the images, with each
    generator leaf of ``S`` rewired to the root of its image.
    """
    if strict:
        missing = [g for g in S.gens if g not in tau]
        if missing:
            raise ValueError(f"no image for generators {missing}")
    for T in tau.values():
        if T.sig != S.sig:
            raise SignatureMismatch("substituted system over a different signature")
    mapped = [g for g in S.gens if g in tau]
    new_gens: list[str] = [g for g in S.gens if g not in tau]
    for g in mapped:
        for h in tau[g].gens:
            if h not in new_gens:
                new_gens.append(h)
    taken = set(new_gens) | set(S.sig.ops)
    sysvars: list[str] = []
    defs: dict[str, PartialTerm] = {}

    own = {x: _fresh(x, taken) for x in S.sysvars}
    roots = {}
    parts = []
    for g in mapped:
        T = tau[g]
        ren = {x: _fresh(f"{g}_{x}", taken) for x in T.sysvars}
        roots[g] = Var(ren[T.root])
        parts.append((T, {x: Var(v) for x, v in ren.items()}))

    own_sigma = {x: Var(v) for x, v in own.items()}
    own_sigma.update(roots)
    for x in S.sysvars:
        sysvars.append(own[x])
        defs[own[x]] = subst(S.defs[x], own_sigma)
    for T, sigma in parts:
        for x in T.sysvars:
            v = sigma[x].name
            sysvars.append(v)
            defs[v] = subst(T.defs[x], sigma)
    return RegSys(S.sig, sysvars, new_gens, defs, own[S.root], name or S.name)


def rename(S: RegSys, h: Mapping[str, str]) -> RegSys:
    """Rename generators along an injective map."""
    targets = [h.get(g, g) for g in S.gens]
    if len(set(h.values())) != len(h):
        raise ValueError("renaming is not injective")
    if len(set(targets)) != len(targets):
        raise ValueError("renaming merges two generators")
    clash = set(targets) & (set(S.sysvars) | set(S.sig.ops))
    if clash:
        raise ValueError(f"renamed generators clash with existing names: {sorted(clash)}")
    sigma = {g: Var(h[g]) for g in S.gens if g in h}
    defs = {x: subst(t, sigma) for x, t in S.defs.items()}
    return RegSys(S.sig, S.sysvars, targets, defs, S.root, S.name)


# -- classification ----------------------------------------------------------

def _is_acyclic(S: RegSys) -> bool:
    graph = {x: {v for v in variables(S.defs[x]) if v in S.defs} for x in S.sysvars}
    try:
        tuple(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError:
        return False
    return True


def linear_form(S: RegSys, left: bool = False) -> dict[str, list[tuple[tuple[PartialTerm, ...], str | None]]]:
    """Split each definition into summands ``coefficient-factors · variable``.

    A summand is a list of variable-free factors, optionally followed (or,
    with ``left=True``, preceded) by a single system variable.  Raises
    :class:`NotLinear` when a definition does not have this shape.
    """
    profile = S.sig.profile
    if profile is None:
        raise LinearUndefined(f"signature {S.sig.name} has no semiring profile")
    sysvars = set(S.sysvars)

    def closed(t):
        return not (variables(t) & sysvars)

    def summands(t):
        if isinstance(t, App) and t.op.name == profile.plus:
            return summands(t.args[0]) + summands(t.args[1])
        if t is BOT or (isinstance(t, App) and t.op.name == profile.zero):
            return []
        return [t]

    def factors(t):
        if isinstance(t, App) and t.op.name == profile.times:
            return factors(t.args[0]) + factors(t.args[1])
        return [t]

    form = {}
    for x in S.sysvars:
        rows = []
        for summand in summands(S.defs[x]):
            fs = factors(summand)
            open_idx = [i for i, f in enumerate(fs) if not closed(f)]
            if not open_idx:
                rows.append((tuple(fs), None))
                continue
            edge = 0 if left else len(fs) - 1
            var = fs[edge]
            if open_idx != [edge] or not isinstance(var, Var):
                side = "left" if left else "right"
                raise NotLinear(f"definition of {x} is not {side}-linear: {format_term(summand)}")
            rest = fs[1:] if left else fs[:-1]
            rows.append((tuple(rest), var.name))
        form[x] = rows
    return form


def classify(S: RegSys, linear: bool | None = None, left_linear: bool = False) -> SysClass:
    """Finite if acyclic, else Linear or Algebraic.

    ``linear=None`` tests linearity only when the signature has a semiring
    profile; ``linear=True`` demands the test and raises
    :class:`LinearUndefined` without a profile.
    """
    if _is_acyclic(S):
        return SysClass.FINITE
    if S.sig.profile is None:
        if linear:
            raise LinearUndefined(f"signature {S.sig.name} has no semiring profile")
        return SysClass.ALGEBRAIC
    try:
        linear_form(S, left=left_linear)
    except NotLinear:
        return SysClass.ALGEBRAIC
    return SysClass.LINEAR


# -- syntax ------------------------------------------------------------------

def _ident_set(ts: TokenStream) -> list[str]:
    ts.expect("{")
    names = []
    if not ts.accept("}"):
        while True:
            names.append(ts.ident())
            if ts.accept("}"):
                break
            ts.expect(",")
    return names


def read_system(ts: TokenStream, sigs: Mapping[str, Signature]) -> RegSys:
    start = ts.expect("sys")
    name = ts.ident()
    ts.expect("over")
    sig_tok = ts.peek()
    signame = ts.ident()
    if signame not in sigs:
        raise ParseError(f"unknown signature {signame!r}", sig_tok.line, sig_tok.col)
    sig = sigs[signame]
    ts.expect("vars")
    sysvars = _ident_set(ts)
    ts.expect("gens")
    gens = _ident_set(ts)
    ts.expect("root")
    root = ts.ident()
    for n in sysvars + gens:
        if n in sig.ops:
            raise ParseError(f"{n!r} is an operation symbol of {signame}; it cannot be a variable",
                             start.line, start.col)
    ts.expect("{")
    defs = {}
    while not ts.accept("}"):
        tok = ts.peek()
        x = ts.ident()
        if x not in sysvars:
            raise ParseError(f"{x!r} is not a declared system variable", tok.line, tok.col)
        if x in defs:
            raise ParseError(f"second definition of {x!r}", tok.line, tok.col)
        ts.expect("=")
        defs[x] = read_term(ts, sig)
        ts.accept(";")
    try:
        return RegSys(sig, sysvars, gens, defs, root, name)
    except ValueError as exc:
        raise ParseError(f"system {name}: {exc}", start.line, start.col) from None


def parse_system(text: str, sigs: Mapping[str, Signature] | Signature) -> RegSys:
    if isinstance(sigs, Signature):
        sigs = {sigs.name: sigs}
    ts = TokenStream(text)
    S = read_system(ts, sigs)
    if not ts.eof():
        raise ts.error("trailing input after system")
    return S


def format_system(S: RegSys) -> str:
    lines = [f"sys {S.name} over {S.sig.name} vars {{{', '.join(S.sysvars)}}} "
             f"gens {{{', '.join(S.gens)}}} root {S.root} {{"]
    lines += [f"  {x} = {format_term(S.defs[x])}" for x in S.sysvars]
    lines.append("}")
    return "\n".join(lines)

