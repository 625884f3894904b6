"""Ranked signatures and finite partial terms.

A partial term is ``BOT``, a variable leaf ``Var(name)`` or an application
``App(op, args)``.  Terms are immutable, hashable and compared structurally;
hashes are cached, so heavily shared term DAGs (such as deep unfoldings of
cyclic systems) stay cheap to compare.

Text syntax::

    sig S { f/1, plus/2, one/0 }
    f(plus(x, one), bot)

An identifier that names a nullary symbol of the signature denotes that
constant; any other bare identifier is a variable.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping

from ._syntax import IDENT, ParseError, TokenStream

__all__ = [
    "OpSymbol", "Signature", "SemiringProfile", "PartialTerm", "BOT", "Var", "App",
    "TermError", "UnknownSymbol", "ArityMismatch", "MissingBinding", "SignatureMismatch",
    "ExplosionGuard", "Inconsistent", "ParseError",
    "build", "parse_term", "parse_signature", "format_term", "depth", "size", "truncate",
    "variables", "subterm_at", "leq_syn", "merge", "consistent", "subst", "eval_term",
    "enumerate_below", "count_below",
]


class TermError(Exception):
    pass


class UnknownSymbol(TermError):
    pass


class ArityMismatch(TermError):
    pass


class MissingBinding(TermError):
    pass


class SignatureMismatch(TermError):
    pass


class ExplosionGuard(TermError):
    pass


class Inconsistent(TermError):
    """Two terms carry different labels at ``position`` (a child-index path)."""

    def __init__(self, position: tuple[int, ...]):
        self.position = position
        path = ".".join(str(i + 1) for i in position) or "root"
        super().__init__(f"inconsistent at position {path}")


@dataclass(frozen=True)
class OpSymbol:
    name: str
    arity: int

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name}")
        if not IDENT.fullmatch(self.name) or self.name == "bot":
            raise ValueError(f"bad operation name {self.name!r}")

    def __str__(self):
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class SemiringProfile:
    """Which operation symbols play the semiring roles."""

    plus: str = "plus"
    times: str = "times"
    zero: str = "zero"
    one: str = "one"

    def roles(self) -> dict[str, str]:
        return {"plus": self.plus, "times": self.times, "zero": self.zero, "one": self.one}


class Signature:
    """A ranked alphabet."""

    def __init__(self, ops: Iterable[OpSymbol | tuple[str, int]], name: str = "sig",
                 profile: SemiringProfile | None = None):
        self.name = name
        self.ops: dict[str, OpSymbol] = {}
        for op in ops:
            if not isinstance(op, OpSymbol):
                op = OpSymbol(*op)
            if op.name in self.ops:
                raise ValueError(f"duplicate operation {op.name!r} in signature {name}")
            self.ops[op.name] = op
        self.profile = profile
        if profile is not None:
            wanted = {profile.plus: 2, profile.times: 2, profile.zero: 0, profile.one: 0}
            for opname, arity in wanted.items():
                if opname not in self.ops or self.ops[opname].arity != arity:
                    raise ValueError(f"semiring profile needs {opname}/{arity} in {name}")

    @classmethod
    def semiring(cls, extra: Iterable[tuple[str, int]] = (), name: str = "semiring") -> Signature:
        ops = [("plus", 2), ("times", 2), ("zero", 0), ("one", 0), *extra]
        return cls(ops, name=name, profile=SemiringProfile())

    def with_profile(self, profile: SemiringProfile | None) -> Signature:
        return Signature(self.ops.values(), self.name, profile)

    def __getitem__(self, name: str) -> OpSymbol:
        try:
            return self.ops[name]
        except KeyError:
            raise UnknownSymbol(f"{name!r} is not in signature {self.name}") from None

    def __contains__(self, item) -> bool:
        if isinstance(item, OpSymbol):
            return self.ops.get(item.name) == item
        return item in self.ops

    def __iter__(self) -> Iterator[OpSymbol]:
        return iter(self.ops.values())

    def __len__(self):
        return len(self.ops)

    def __eq__(self, other):
        return isinstance(other, Signature) and self.ops == other.ops

    def __hash__(self):
        return hash(frozenset(self.ops.values()))

    def __repr__(self):
        return f"Signature({self.name}: {', '.join(map(str, self.ops.values()))})"

    def format(self) -> str:
        return f"sig {self.name} {{ {', '.join(map(str, self.ops.values()))} }}"


class PartialTerm:
    __slots__ = ()

    def __str__(self):
        return format_term(self)


class _Bottom(PartialTerm):
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOT"

    def __reduce__(self):
        return (_Bottom, ())


BOT = _Bottom()


class Var(PartialTerm):
    """A variable or generator leaf.  ``name`` is any hashable payload, usually a str."""

    __slots__ = ("name",)

    def __init__(self, name: Hashable):
        object.__setattr__(self, "name", name)

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return self is other or (type(other) is Var and self.name == other.name)

    def __hash__(self):
        return hash(("var", self.name))

    def __repr__(self):
        return f"Var({self.name!r})"

    def __reduce__(self):
        return (Var, (self.name,))


class App(PartialTerm):
    __slots__ = ("op", "args", "_hash")

    def __init__(self, op: OpSymbol, args: Iterable[PartialTerm] = ()):
        args = tuple(args)
        if len(args) != op.arity:
            raise ArityMismatch(f"{op.name} expects {op.arity} argument(s), got {len(args)}")
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash((op, args)))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is App and self._hash == other._hash
                and self.op == other.op and self.args == other.args)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.op.name}, {list(self.args)!r})"

    def __reduce__(self):
        return (App, (self.op, self.args))


# -- construction and syntax ------------------------------------------------

def build(sig: Signature, spec: Any) -> PartialTerm:
    """Build a term from text or from a nested ``(name, child, ...)`` description.

    In the nested form a bare string is a constant when the signature has a
    nullary symbol of that name, ``"bot"`` is bottom, and anything else is a
    variable.
    """
    if isinstance(spec, PartialTerm):
        _check_sig(spec, sig)
        return spec
    if isinstance(spec, str):
        return parse_term(spec, sig)
    if isinstance(spec, tuple) and spec and isinstance(spec[0], str):
        op = sig[spec[0]]
        children = [build(sig, c) for c in spec[1:]]
        return App(op, children)
    raise TypeError(f"cannot build a term from {spec!r}")


def _check_sig(t: PartialTerm, sig: Signature):
    for node in _nodes(t):
        if isinstance(node, App) and node.op not in sig:
            raise SignatureMismatch(f"{node.op} is not in signature {sig.name}")


def parse_term(text: str, sig: Signature) -> PartialTerm:
    ts = TokenStream(text)
    t = read_term(ts, sig)
    if not ts.eof():
        raise ts.error(f"trailing input {ts.peek().value!r}")
    return t


def read_term(ts: TokenStream, sig: Signature) -> PartialTerm:
    tok = ts.peek()
    if tok.kind != "ident":
        raise ts.error(f"expected a term, found {tok.value or 'end of input'!r}")
    name = ts.ident()
    if name == "bot":
        return BOT
    if ts.accept("("):
        if name not in sig:
            raise UnknownSymbol(f"{tok.line}:{tok.col}: unknown symbol {name!r}")
        args = []
        if not ts.accept(")"):
            while True:
                args.append(read_term(ts, sig))
                if ts.accept(")"):
                    break
                ts.expect(",")
        op = sig[name]
        if len(args) != op.arity:
            raise ArityMismatch(f"{tok.line}:{tok.col}: {name} expects {op.arity} "
                                f"argument(s), got {len(args)}")
        return App(op, args)
    if name in sig:
        op = sig[name]
        if op.arity:
            raise ArityMismatch(f"{tok.line}:{tok.col}: {name} expects {op.arity} argument(s)")
        return App(op, ())
    return Var(name)


def parse_signature(text: str) -> Signature:
    ts = TokenStream(text)
    sig = read_signature(ts)
    if not ts.eof():
        raise ts.error("trailing input after signature")
    return sig


def read_signature(ts: TokenStream) -> Signature:
    ts.expect("sig")
    name = ts.ident()
    ts.expect("{")
    ops = []
    if not ts.accept("}"):
        while True:
            op = ts.ident()
            ts.expect("/")
            ops.append(OpSymbol(op, ts.integer()))
            if ts.accept("}"):
                break
            ts.expect(",")
    try:
        return Signature(ops, name)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def format_term(t: PartialTerm) -> str:
    if t is BOT:
        return "bot"
    if isinstance(t, Var):
        return str(t.name)
    if not t.args:
        return t.op.name
    return f"{t.op.name}({', '.join(format_term(a) for a in t.args)})"


# -- structure ---------------------------------------------------------------

def _nodes(t: PartialTerm) -> Iterator[PartialTerm]:
    stack = [t]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, App):
            stack.extend(node.args)


def depth(t: PartialTerm) -> int:
    """Longest root-to-node path counting defined nodes; ``BOT`` has depth 0.

    Leaves count as one level, so ``truncate(t, depth(t)) == t``.
    """
    if t is BOT:
        return 0
    if isinstance(t, Var):
        return 1
    return 1 + max((depth(a) for a in t.args), default=0)


def size(t: PartialTerm) -> int:
    return sum(1 for n in _nodes(t) if n is not BOT)


def truncate(t: PartialTerm, d: int) -> PartialTerm:
    """Replace every node at path length ``>= d`` by ``BOT``."""
    if d <= 0 or t is BOT:
        return BOT
    if isinstance(t, Var):
        return t
    return App(t.op, [truncate(a, d - 1) for a in t.args])


def variables(t: PartialTerm) -> set:
    return {n.name for n in _nodes(t) if isinstance(n, Var)}


def subterm_at(t: PartialTerm, position: Iterable[int]) -> PartialTerm:
    for i in position:
        if not isinstance(t, App):
            raise IndexError(f"no node at position {tuple(position)}")
        t = t.args[i]
    return t


# -- order -------------------------------------------------------------------

def leq_syn(s: PartialTerm, t: PartialTerm) -> bool:
    """True iff ``s`` is obtained from ``t`` by replacing subterms with ``BOT``."""
    if s is BOT or s is t:
        return True
    if isinstance(s, Var):
        return s == t
    if not isinstance(t, App) or t.op != s.op:
        return False
    return all(leq_syn(a, b) for a, b in zip(s.args, t.args))


def merge(s: PartialTerm, t: PartialTerm) -> PartialTerm:
    """Least upper bound of two consistent terms; raises :class:`Inconsistent`."""
    return _merge(s, t, ())


def _merge(s, t, pos):
    if s is BOT:
        return t
    if t is BOT or s is t:
        return s
    if isinstance(s, Var) or isinstance(t, Var):
        if s == t:
            return s
        raise Inconsistent(pos)
    if s.op != t.op:
        raise Inconsistent(pos)
    return App(s.op, [_merge(a, b, pos + (i,)) for i, (a, b) in enumerate(zip(s.args, t.args))])


def consistent(ts: Iterable[PartialTerm]) -> bool:
    acc = BOT
    for t in ts:
        try:
            acc = merge(acc, t)
        except Inconsistent:
            return False
    return True


# -- substitution and evaluation ---------------------------------------------

def subst(t: PartialTerm, sigma: Mapping[Hashable, PartialTerm],
          sig: Signature | None = None) -> PartialTerm:
    """Simultaneously replace variable leaves by their images; unmapped leaves stay."""
    if sig is not None:
        for image in sigma.values():
            _check_sig(image, sig)
    memo: dict[int, PartialTerm] = {}

    def go(u):
        if u is BOT:
            return u
        if isinstance(u, Var):
            return sigma.get(u.name, u)
        key = id(u)
        if key not in memo:
            memo[key] = App(u.op, [go(a) for a in u.args])
        return memo[key]

    return go(t)


def eval_term(t: PartialTerm, A, env: Mapping[Hashable, Any]) -> Any:
    """Evaluate ``t`` homomorphically in the ordered algebra ``A``.

    ``A`` needs ``bottom`` and an ``ops`` mapping from symbol names to
    callables.  The bottom *term* always evaluates to ``A.bottom``.
    """
    memo: dict[int, Any] = {}
    ops = A.ops

    def go(u):
        if u is BOT:
            return A.bottom
        if isinstance(u, Var):
            try:
                return env[u.name]
            except KeyError:
                raise MissingBinding(f"no binding for {u.name!r}") from None
        key = id(u)
        if key in memo:
            return memo[key]
        try:
            fn = ops[u.op.name]
        except KeyError:
            raise SignatureMismatch(f"{A.name} does not interpret {u.op}") from None
        value = fn(*[go(a) for a in u.args])
        memo[key] = value
        return value

    return go(t)


# -- enumeration -------------------------------------------------------------

DEFAULT_BELOW_BOUND = 10**6


def count_below(t: PartialTerm) -> int:
    if t is BOT:
        return 1
    if isinstance(t, Var):
        return 2
    return 1 + math.prod(count_below(a) for a in t.args)


def enumerate_below(t: PartialTerm, bound: int = DEFAULT_BELOW_BOUND) -> list[PartialTerm]:
    """All ``s`` with ``leq_syn(s, t)``, without duplicates."""
    n = count_below(t)
    if n > bound:
        raise ExplosionGuard(f"{n} terms below {format_term(t)} exceeds bound {bound}")
    return _below(t)


def _below(t):
    if t is BOT:
        return [BOT]
    if isinstance(t, Var):
        return [BOT, t]
    out = [BOT]
    for combo in itertools.product(*(_below(a) for a in t.args)):
        out.append(App(t.op, combo))
    return out


Env = Mapping[Hashable, Any]
Interp = Callable[..., Any]
