"""Workspace files: named signatures, profiles, systems, posets and finite algebras.

Blocks, in any order as long as names are declared before use::

    sig SR { plus/2, times/2, zero/0, one/0 }
    profile SR semiring                      # or: profile SR semiring { plus = add, ... }
    sys anbn over SR vars {x} gens {a, b} root x { x = plus(times(a, times(x, b)), one) }
    poset V { elements bot a b; cover bot a; cover bot b; sup a = bot }
    algebra Two on V { op f/1 = a a b }      # rows follow the element order;
                                             # binary rows are separated by '|'
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ._syntax import ParseError, TokenStream
from .algebra import AlgebraSpec
from .completion import FinitePoset
from .coterms import RegSys, format_system, read_system
from .instances.finite import FiniteAlgebra
from .terms import (
    SemiringProfile, Signature, TermError, eval_term, parse_term, read_signature, variables,
)


_POSET_WORDS = ("elements", "cover", "sup")


@dataclass
class PosetDecl:
    name: str
    elements: tuple[str, ...]
    covers: tuple[tuple[str, str], ...]
    sup_overrides: dict[str, str] = field(default_factory=dict)

    def poset(self) -> FinitePoset:
        return FinitePoset.from_covers(self.elements, self.covers, self.name)

    def sup_table(self) -> dict[frozenset, str]:
        """Overrides keyed by ideal: ``sup a = b`` sets the supremum of the ideal below ``a``."""
        P = self.poset()
        return {P.down(a): b for a, b in self.sup_overrides.items()}

    def format(self) -> str:
        parts = [f"elements {' '.join(self.elements)}"]
        parts += [f"cover {a} {b}" for a, b in self.covers]
        parts += [f"sup {a} = {b}" for a, b in self.sup_overrides.items()]
        return f"poset {self.name} {{ " + "; ".join(parts) + " }"


@dataclass
class AlgebraDecl:
    name: str
    poset: str
    ops: dict[str, tuple[int, list[list[str]]]]  # name -> (arity, rows)

    def format(self) -> str:
        body = []
        for op, (ar, rows) in self.ops.items():
            body.append(f"op {op}/{ar} = " + " | ".join(" ".join(r) for r in rows))
        return f"algebra {self.name} on {self.poset} {{ " + "; ".join(body) + " }"


class Workspace:
    """Everything named in the loaded files; names are unique per kind."""

    def __init__(self):
        self.sigs: dict[str, Signature] = {}
        self.profiles: dict[str, SemiringProfile] = {}
        self.systems: dict[str, RegSys] = {}
        self.posets: dict[str, PosetDecl] = {}
        self.algebras: dict[str, AlgebraDecl] = {}
        self._shadowable: set[tuple[str, str]] = set()

    # -- loading
    def load_file(self, path: str | Path, shadowable: bool = False) -> None:
        self.load(Path(path).read_text(encoding="utf-8"), shadowable)

    def load(self, text: str, shadowable: bool = False) -> None:
        ts = TokenStream(text)
        while not ts.eof():
            tok = ts.peek()
            if tok.value == "sig":
                sig = read_signature(ts)
                self._put("sig", self.sigs, sig.name, sig, tok, shadowable)
            elif tok.value == "profile":
                self._read_profile(ts)
            elif tok.value == "sys":
                S = read_system(ts, self.sigs)
                self._put("sys", self.systems, S.name, S, tok, shadowable)
            elif tok.value == "poset":
                decl = self._read_poset(ts)
                self._put("poset", self.posets, decl.name, decl, tok, shadowable)
            elif tok.value == "algebra":
                decl = self._read_algebra(ts)
                self._put("algebra", self.algebras, decl.name, decl, tok, shadowable)
            else:
                raise ts.error(f"expected sig, profile, sys, poset or algebra, found {tok.value!r}")
            ts.accept(";")

    def _put(self, kind, table, name, value, tok, shadowable):
        if name in table and (kind, name) not in self._shadowable:
            raise ParseError(f"duplicate {kind} {name!r}", tok.line, tok.col)
        table[name] = value
        if shadowable:
            self._shadowable.add((kind, name))
        else:
            self._shadowable.discard((kind, name))

    def _read_profile(self, ts: TokenStream) -> None:
        ts.expect("profile")
        tok = ts.peek()
        name = ts.ident()
        if name not in self.sigs:
            raise ParseError(f"unknown signature {name!r}", tok.line, tok.col)
        ts.expect("semiring")
        roles = {}
        if ts.accept("{"):
            while not ts.accept("}"):
                rtok = ts.peek()
                role = ts.ident()
                if role not in ("plus", "times", "zero", "one"):
                    raise ParseError(f"unknown semiring role {role!r}", rtok.line, rtok.col)
                ts.expect("=")
                roles[role] = ts.ident()
                ts.accept(",")
        profile = SemiringProfile(**roles)
        try:
            self.sigs[name] = self.sigs[name].with_profile(profile)
        except ValueError as exc:
            raise ParseError(str(exc), tok.line, tok.col) from None
        self.profiles[name] = profile
        # systems already read keep working: signatures compare by their operations
        for sname, S in list(self.systems.items()):
            if S.sig == self.sigs[name]:
                self.systems[sname] = RegSys(self.sigs[name], S.sysvars, S.gens, S.defs, S.root, S.name)

    def _read_poset(self, ts: TokenStream) -> PosetDecl:
        ts.expect("poset")
        name = ts.ident()
        ts.expect("{")
        elements: list[str] = []
        covers, sups = [], {}
        while not ts.accept("}"):
            tok = ts.peek()
            word = ts.ident()
            if word == "elements":
                while ts.peek().kind == "ident" and ts.peek().value not in _POSET_WORDS:
                    elements.append(ts.ident())
                    ts.accept(",")
            elif word == "cover":
                a, b = self._element(ts, elements), self._element(ts, elements)
                covers.append((a, b))
            elif word == "sup":
                a = self._element(ts, elements)
                ts.expect("=")
                sups[a] = self._element(ts, elements)
            else:
                raise ParseError(f"expected elements, cover or sup, found {word!r}", tok.line, tok.col)
            ts.accept(";")
        decl = PosetDecl(name, tuple(elements), tuple(covers), sups)
        try:
            P = decl.poset()
        except ValueError as exc:
            raise ts.error(f"poset {name}: {exc}") from None
        if not P.validate().ok:
            raise ts.error(f"poset {name}: covers do not define a partial order")
        return decl

    @staticmethod
    def _element(ts: TokenStream, elements) -> str:
        tok = ts.peek()
        e = ts.ident()
        if e not in elements:
            raise ParseError(f"{e!r} is not a declared element", tok.line, tok.col)
        return e

    def _read_algebra(self, ts: TokenStream) -> AlgebraDecl:
        ts.expect("algebra")
        name = ts.ident()
        ts.expect("on")
        tok = ts.peek()
        pname = ts.ident()
        if pname not in self.posets:
            raise ParseError(f"unknown poset {pname!r}", tok.line, tok.col)
        elements = self.posets[pname].elements
        n = len(elements)
        ts.expect("{")
        ops: dict[str, tuple[int, list[list[str]]]] = {}
        while not ts.accept("}"):
            ts.expect("op")
            otok = ts.peek()
            op = ts.ident()
            ts.expect("/")
            ar = ts.integer()
            ts.expect("=")
            rows = [[]]
            while (ts.peek().kind == "ident" and not ts.at("op")) or ts.at("|"):
                if ts.accept("|"):
                    rows.append([])
                else:
                    rows[-1].append(self._element(ts, elements))
            want_rows, want_cols = (n, n) if ar == 2 else (1, n if ar == 1 else 1)
            if ar > 2:
                raise ParseError("operation tables support arity 0, 1 or 2", otok.line, otok.col)
            if len(rows) != want_rows or any(len(r) != want_cols for r in rows):
                raise ParseError(f"table of {op}/{ar} needs {want_rows} row(s) of {want_cols} "
                                 f"entries", otok.line, otok.col)
            ops[op] = (ar, rows)
            ts.accept(";")
        return AlgebraDecl(name, pname, ops)

    # -- lookups
    def system(self, name: str) -> RegSys:
        if name not in self.systems:
            raise KeyError(f"unknown system {name!r}")
        return self.systems[name]

    def poset(self, name: str) -> PosetDecl:
        if name not in self.posets:
            raise KeyError(f"unknown poset {name!r}")
        return self.posets[name]

    def finite_algebra(self, name: str) -> FiniteAlgebra:
        if name not in self.algebras:
            raise KeyError(f"unknown algebra {name!r}")
        decl = self.algebras[name]
        pd = self.posets[decl.poset]
        rows = {}
        for op, (ar, table) in decl.ops.items():
            rows[op] = table[0][0] if ar == 0 else (table[0] if ar == 1 else table)
        return FiniteAlgebra.from_rows(pd.elements, pd.covers, rows, name=name)

    def format(self) -> str:
        out = []
        for name, sig in self.sigs.items():
            out.append(sig.format())
            if name in self.profiles:
                out.append(format_profile(name, self.profiles[name]))
        out += [format_system(S) for S in self.systems.values()]
        out += [p.format() for p in self.posets.values()]
        out += [a.format() for a in self.algebras.values()]
        return "\n".join(out) + "\n"


def format_profile(name: str, profile: SemiringProfile) -> str:
    roles = {k: v for k, v in profile.roles().items() if k != v}
    if not roles:
        return f"profile {name} semiring"
    return f"profile {name} semiring {{ " + ", ".join(f"{k} = {v}" for k, v in roles.items()) + " }"


def parse_env(text: str, A: AlgebraSpec, sig: Signature | None = None) -> dict[str, Any]:
    """``name = literal`` or ``name = ground term`` lines; terms are evaluated in ``A``."""
    env: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'name = value', got {line!r}", lineno, 1)
        name, rhs = (s.strip() for s in line.split("=", 1))
        if name in env:
            raise ParseError(f"second binding for {name!r}", lineno, 1)
        env[name] = _env_value(rhs, A, sig, lineno)
    return env


def _env_value(rhs: str, A: AlgebraSpec, sig: Signature | None, lineno: int):
    if A.parse is not None:
        try:
            return A.parse(rhs)
        except (ValueError, KeyError):
            pass
    if sig is None:
        raise ParseError(f"cannot read {rhs!r} as a value of {A.name}", lineno, 1)
    try:
        t = parse_term(rhs, sig)
    except (ParseError, TermError) as exc:
        raise ParseError(f"cannot read {rhs!r} as a value or term: {exc}", lineno, 1) from None
    if variables(t):
        raise ParseError(f"term {rhs!r} must be ground", lineno, 1)
    return eval_term(t, A.bind(sig), {})


def builtin_workspace() -> Workspace:
    """The demo fixtures shipped with the package; user files may shadow them."""
    ws = Workspace()
    data = Path(__file__).with_name("data")
    for path in sorted(data.glob("*.ra")):
        ws.load_file(path, shadowable=True)
    return ws


def data_path(name: str) -> Path:
    return Path(__file__).with_name("data") / name


__all__ = ["Workspace", "PosetDecl", "AlgebraDecl", "parse_env", "builtin_workspace",
           "format_profile", "data_path"]
