"""Languages cut off at a length bound, and a grammar-based oracle for them."""
from __future__ import annotations

import itertools
import random
from collections import deque
from typing import Iterable, Mapping, Sequence

from ..algebra import AlgebraSpec, StabilizeWithin
from ..coterms import RegSys
from ..terms import BOT, Var

EMPTY: frozenset = frozenset()
EPS = frozenset({""})


def shortlex(words: Iterable[str]) -> list[str]:
    return sorted(words, key=lambda w: (len(w), w))


def fmt_words(ws) -> str:
    return "{" + ", ".join(w if w else "ε" for w in shortlex(ws)) + "}"


def parse_words(text: str) -> frozenset:
    text = text.strip()
    if text in ("∅", "{}"):
        return EMPTY
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"expected a word set like {{ε, ab}}, got {text!r}")
    body = text[1:-1].strip()
    if not body:
        return EMPTY
    return frozenset("" if w.strip() in ("ε", "eps") else w.strip() for w in body.split(","))


def all_words(alphabet: Sequence[str], L: int) -> list[str]:
    out = [""]
    for n in range(1, L + 1):
        out.extend("".join(p) for p in itertools.product(alphabet, repeat=n))
    return out


def concat(A: frozenset, B: frozenset, L: int) -> frozenset:
    """Concatenation, keeping words of length at most ``L``."""
    if not A or not B:
        return EMPTY
    bs = sorted(B, key=len)
    out = set()
    for u in A:
        room = L - len(u)
        for v in bs:
            if len(v) > room:
                break
            out.add(u + v)
    return frozenset(out)


def lang_slice(alphabet: Sequence[str], L: int, enumerate_limit: int = 8, strategy=None) -> AlgebraSpec:
    """Finite sets of words of length ``<= L`` under inclusion.

    The carrier is listed explicitly (for exhaustive checks) only when there
    are at most ``enumerate_limit`` words.
    """
    if L < 0:
        raise ValueError("length bound must be nonnegative")
    alphabet = tuple(dict.fromkeys(alphabet))
    words = all_words(alphabet, L)
    elements = None
    if len(words) <= enumerate_limit:
        elements = tuple(frozenset(c) for r in range(len(words) + 1)
                         for c in itertools.combinations(words, r))

    def sample(rng: random.Random):
        return frozenset(w for w in words if rng.random() < 0.3)

    return AlgebraSpec(
        name=f"slice{L}", bottom=EMPTY, leq=lambda a, b: a <= b,
        ops={"plus": lambda a, b: a | b, "times": lambda a, b: concat(a, b, L),
             "zero": lambda: EMPTY, "one": lambda: EPS},
        arities={"plus": 2, "times": 2, "zero": 0, "one": 0},
        elements=elements, sup_strategy=strategy or StabilizeWithin(),
        join=lambda a, b: a | b, sample=sample, fmt=fmt_words, parse=parse_words,
    )


def letter_env(S: RegSys, letters: Mapping[str, str] | None = None,
               L: int | None = None) -> dict[str, frozenset]:
    """Generators as singleton languages; by default each generator names its own letter.

    With ``L`` given, words longer than ``L`` are dropped so values lie in the slice.
    """
    letters = letters or {}
    return {g: frozenset(w for w in (letters.get(g, g),) if L is None or len(w) <= L) for g in S.gens}


def slice_height(alphabet: Sequence[str], L: int) -> int:
    return len(all_words(alphabet, L))


# -- grammars ----------------------------------------------------------------

def to_grammar(S: RegSys, letters: Mapping[str, str] | None = None):
    """Context-free grammar of a semiring system.

    Symbols are ``("N", name)`` or ``("T", letter)``.  plus becomes
    alternation, times concatenation, one the empty word; zero and ⊥ have no
    productions.  A times-argument with several alternatives gets a fresh
    nonterminal.  Returns ``(start, productions)``.
    """
    profile = S.sig.profile
    if profile is None:
        raise ValueError(f"signature {S.sig.name} has no semiring profile")
    letters = letters or {}
    prods: dict[tuple, list[tuple]] = {}
    counter = itertools.count()

    def alts(t) -> list[tuple]:
        if t is BOT:
            return []
        if isinstance(t, Var):
            if t.name in S.defs:
                return [(("N", t.name),)]
            word = letters.get(t.name, t.name)
            return [tuple(("T", ch) for ch in word)]
        op = t.op.name
        if op == profile.plus:
            return alts(t.args[0]) + alts(t.args[1])
        if op == profile.zero:
            return []
        if op == profile.one:
            return [()]
        if op == profile.times:
            parts = []
            for arg in t.args:
                a = alts(arg)
                if len(a) > 1:
                    nt = ("N", f"#{next(counter)}")
                    prods[nt] = a
                    a = [(nt,)]
                parts.append(a)
            return [x + y for x in parts[0] for y in parts[1]]
        raise ValueError(f"{op} has no grammar reading")

    for x in S.sysvars:
        prods[("N", x)] = alts(S.defs[x])
    return ("N", S.root), prods


def _nullable(prods) -> set:
    null = set()
    changed = True
    while changed:
        changed = False
        for nt, rhss in prods.items():
            if nt not in null and any(all(s in null for s in rhs) for rhs in rhss):
                null.add(nt)
                changed = True
    return null


def _normalize(prods):
    """Drop ε- and unit productions; the language loses only ε."""
    null = _nullable(prods)
    noeps = {}
    for nt, rhss in prods.items():
        out = set()
        for rhs in rhss:
            options = [((s,), ()) if s in null else ((s,),) for s in rhs]
            for combo in itertools.product(*options):
                new = tuple(itertools.chain.from_iterable(combo))
                if new:
                    out.add(new)
        noeps[nt] = out
    # unit closure
    result = {}
    for nt in noeps:
        reach, stack = {nt}, [nt]
        while stack:
            a = stack.pop()
            for rhs in noeps[a]:
                if len(rhs) == 1 and rhs[0][0] == "N" and rhs[0] not in reach:
                    reach.add(rhs[0])
                    stack.append(rhs[0])
        result[nt] = {rhs for a in reach for rhs in noeps[a]
                      if not (len(rhs) == 1 and rhs[0][0] == "N")}
    return result, null


def cfg_slice_oracle(S: RegSys, L: int, letters: Mapping[str, str] | None = None) -> frozenset:
    """Words of length ``<= L`` derivable from the root, by breadth-first derivation.

    After removing ε- and unit productions every step grows the sentential
    form, so forms longer than ``L`` can be pruned and the search is finite.
    """
    start, prods = to_grammar(S, letters)
    norm, null = _normalize(prods)
    words = {""} if start in null and L >= 0 else set()
    seen = {(start,)}
    queue = deque([(start,)])
    while queue:
        form = queue.popleft()
        i = next((k for k, s in enumerate(form) if s[0] == "N"), None)
        if i is None:
            words.add("".join(s[1] for s in form))
            continue
        for rhs in norm[form[i]]:
            new = form[:i] + rhs + form[i + 1:]
            if len(new) <= L and new not in seen:
                seen.add(new)
                queue.append(new)
    return frozenset(words)


def is_right_linear_grammar(prods) -> bool:
    """Each right side has at most one nonterminal, in last position."""
    for rhss in prods.values():
        for rhs in rhss:
            ns = [k for k, s in enumerate(rhs) if s[0] == "N"]
            if ns and ns != [len(rhs) - 1]:
                return False
    return True
