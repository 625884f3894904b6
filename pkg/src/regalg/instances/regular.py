"""Regular languages as ε-automata, with an exact solver for linear systems."""
from __future__ import annotations

from collections import deque
from typing import Iterable, Mapping

from ..algebra import AlgebraSpec, StabilizeWithin
from ..coterms import NotLinear, RegSys, SysClass, classify, linear_form
from ..terms import BOT, Var
from .languages import fmt_words, shortlex


class RegularLang:
    """An ε-NFA with states ``0..n-1``.

    ``trans[q]`` maps a letter to a frozenset of targets and ``eps[q]`` is
    the set of ε-successors.  Instances are immutable; every construction
    returns a fresh automaton.
    """

    __slots__ = ("n", "start", "finals", "trans", "eps", "_dfa")

    def __init__(self, n: int, start: int, finals: Iterable[int],
                 trans: Iterable[Mapping[str, Iterable[int]]], eps: Iterable[Iterable[int]]):
        self.n = n
        self.start = start
        self.finals = frozenset(finals)
        self.trans = tuple({a: frozenset(ts) for a, ts in m.items()} for m in trans)
        self.eps = tuple(frozenset(e) for e in eps)
        self._dfa = None

    # -- constructors
    @classmethod
    def empty(cls) -> RegularLang:
        return cls(1, 0, (), [{}], [()])

    @classmethod
    def epsilon(cls) -> RegularLang:
        return cls(1, 0, (0,), [{}], [()])

    @classmethod
    def word(cls, w: str) -> RegularLang:
        n = len(w) + 1
        return cls(n, 0, (n - 1,), [{w[i]: (i + 1,)} for i in range(len(w))] + [{}], [()] * n)

    @classmethod
    def words(cls, ws: Iterable[str]) -> RegularLang:
        out = cls.empty()
        for w in ws:
            out = out.union(cls.word(w))
        return out

    # -- structure
    def _shifted(self, k):
        trans = [{a: [t + k for t in ts] for a, ts in m.items()} for m in self.trans]
        eps = [[t + k for t in e] for e in self.eps]
        return trans, eps

    def union(self, other: RegularLang) -> RegularLang:
        t1, e1 = self._shifted(1)
        t2, e2 = other._shifted(1 + self.n)
        trans = [{}] + t1 + t2
        eps = [[self.start + 1, other.start + 1 + self.n]] + e1 + e2
        finals = [f + 1 for f in self.finals] + [f + 1 + self.n for f in other.finals]
        return RegularLang(1 + self.n + other.n, 0, finals, trans, eps).trim()

    def concat(self, other: RegularLang) -> RegularLang:
        t1, e1 = self._shifted(0)
        t2, e2 = other._shifted(self.n)
        eps = e1 + e2
        for f in self.finals:
            eps[f] = list(eps[f]) + [other.start + self.n]
        finals = [f + self.n for f in other.finals]
        return RegularLang(self.n + other.n, self.start, finals, t1 + t2, eps).trim()

    def star(self) -> RegularLang:
        t, e = self._shifted(1)
        eps = [[self.start + 1]] + e
        for f in self.finals:
            eps[f + 1] = list(eps[f + 1]) + [0]
        return RegularLang(self.n + 1, 0, [0], [{}] + t, eps).trim()

    def reverse(self) -> RegularLang:
        n = self.n + 1
        trans = [dict() for _ in range(n)]
        eps = [set() for _ in range(n)]
        for q in range(self.n):
            for a, ts in self.trans[q].items():
                for t in ts:
                    trans[t + 1].setdefault(a, set()).add(q + 1)
            for t in self.eps[q]:
                eps[t + 1].add(q + 1)
        eps[0] = {f + 1 for f in self.finals}
        return RegularLang(n, 0, [self.start + 1], trans, eps).trim()

    def trim(self) -> RegularLang:
        """Keep states that are reachable and can reach a final state."""
        fwd = self._reach([self.start], self._succ)
        pred = [set() for _ in range(self.n)]
        for q in range(self.n):
            for t in self._succ(q):
                pred[t].add(q)
        bwd = self._reach(self.finals, lambda q: pred[q])
        keep = sorted(fwd & bwd)
        if self.start not in keep:
            return RegularLang.empty()
        if len(keep) == self.n:
            return self
        new = {q: i for i, q in enumerate(keep)}
        trans = [{a: [new[t] for t in ts if t in new] for a, ts in self.trans[q].items()} for q in keep]
        trans = [{a: ts for a, ts in m.items() if ts} for m in trans]
        eps = [[new[t] for t in self.eps[q] if t in new] for q in keep]
        return RegularLang(len(keep), new[self.start], [new[f] for f in self.finals if f in new], trans, eps)

    def _succ(self, q):
        out = set(self.eps[q])
        for ts in self.trans[q].values():
            out |= ts
        return out

    @staticmethod
    def _reach(seeds, nxt) -> set:
        seen, stack = set(seeds), list(seeds)
        while stack:
            q = stack.pop()
            for t in nxt(q):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen

    @property
    def alphabet(self) -> frozenset:
        return frozenset(a for m in self.trans for a in m)

    # -- subset construction
    def closure(self, states) -> frozenset:
        return frozenset(self._reach(states, lambda q: self.eps[q]))

    def move(self, states: frozenset, a: str) -> frozenset:
        out = set()
        for q in states:
            out |= self.trans[q].get(a, frozenset())
        return self.closure(out)

    def initial(self) -> frozenset:
        return self.closure([self.start])

    def accepting(self, states: frozenset) -> bool:
        return bool(states & self.finals)

    def accepts(self, word: str) -> bool:
        cur = self.initial()
        for a in word:
            cur = self.move(cur, a)
            if not cur:
                return False
        return self.accepting(cur)

    def determinize(self):
        """Reachable subset automaton: ``(states, start, finals, delta)``."""
        if self._dfa is None:
            sigma = sorted(self.alphabet)
            start = self.initial()
            index, states, delta = {start: 0}, [start], {}
            queue = deque([start])
            while queue:
                s = queue.popleft()
                for a in sigma:
                    t = self.move(s, a)
                    if t not in index:
                        index[t] = len(states)
                        states.append(t)
                        queue.append(t)
                    delta[(index[s], a)] = index[t]
            finals = frozenset(i for i, s in enumerate(states) if self.accepting(s))
            self._dfa = (len(states), 0, finals, delta)
        return self._dfa

    # -- decisions
    def is_empty(self) -> bool:
        return not (self._reach([self.start], self._succ) & self.finals)

    def includes_in(self, other: RegularLang) -> bool:
        """``L(self) ⊆ L(other)``, by searching the product for a counterexample."""
        return self.counterexample(other) is None

    def counterexample(self, other: RegularLang) -> str | None:
        """A shortest word of ``self`` not in ``other``, or None."""
        sigma = sorted(self.alphabet | other.alphabet)
        start = (self.initial(), other.initial())
        seen = {start: ""}
        queue = deque([start])
        while queue:
            s, t = queue.popleft()
            if self.accepting(s) and not other.accepting(t):
                return seen[(s, t)]
            for a in sigma:
                nxt = (self.move(s, a), other.move(t, a))
                if nxt[0] and nxt not in seen:
                    seen[nxt] = seen[(s, t)] + a
                    queue.append(nxt)
        return None

    def equivalent(self, other: RegularLang) -> bool:
        return self.includes_in(other) and other.includes_in(self)

    def __eq__(self, other):
        return isinstance(other, RegularLang) and self.equivalent(other)

    def __hash__(self):
        return hash(regular_slice(self, 3))

    def __repr__(self):
        return f"RegularLang({self.n} states, slice≤3 {fmt_words(regular_slice(self, 3))})"


def regular_slice(R: RegularLang, L: int) -> frozenset:
    """Words of length ``<= L`` accepted by ``R``, by bounded breadth-first search."""
    sigma = sorted(R.alphabet)
    out = set()
    frontier = {R.initial(): {""}}
    for n in range(L + 1):
        nxt: dict[frozenset, set[str]] = {}
        for states, ws in frontier.items():
            if R.accepting(states):
                out |= ws
            if n == L:
                continue
            for a in sigma:
                t = R.move(states, a)
                if t:
                    nxt.setdefault(t, set()).update(w + a for w in ws)
        frontier = nxt
    return frozenset(out)


def fmt_regular(R: RegularLang, L: int = 4) -> str:
    ws = shortlex(regular_slice(R, L))
    more = "" if regular_slice(R, L + 1) == frozenset(ws) else ", …"
    return "{" + ", ".join(w or "ε" for w in ws) + more + "}"


def regular_algebra(strategy=None) -> AlgebraSpec:
    """Regular languages under inclusion; suprema of infinite chains are not reached by iteration."""
    return AlgebraSpec(
        name="regular", bottom=RegularLang.empty(), leq=lambda a, b: a.includes_in(b),
        ops={"plus": RegularLang.union, "times": RegularLang.concat,
             "zero": RegularLang.empty, "one": RegularLang.epsilon, "star": RegularLang.star},
        arities={"plus": 2, "times": 2, "zero": 0, "one": 0, "star": 1},
        sup_strategy=strategy or StabilizeWithin(100),
        join=RegularLang.union, fmt=fmt_regular,
    )


# -- linear systems ----------------------------------------------------------

def _closed_value(t, S: RegSys, letters: Mapping[str, RegularLang]) -> RegularLang:
    profile = S.sig.profile
    if t is BOT:
        return RegularLang.empty()
    if isinstance(t, Var):
        return letters[t.name]
    name = t.op.name
    if name == profile.plus:
        return _closed_value(t.args[0], S, letters).union(_closed_value(t.args[1], S, letters))
    if name == profile.times:
        return _closed_value(t.args[0], S, letters).concat(_closed_value(t.args[1], S, letters))
    if name == profile.zero:
        return RegularLang.empty()
    if name == profile.one:
        return RegularLang.epsilon()
    raise NotLinear(f"{name} has no reading as a regular language")


def arden_solve_linear(S: RegSys, letters: Mapping[str, RegularLang | str] | None = None,
                       left: bool = False) -> dict[str, RegularLang]:
    """Exact least solution of a linear system by elimination with Arden's rule.

    Right-linear equations ``x = A·x + B`` solve to ``A*·B``; with
    ``left=True`` equations ``x = x·A + B`` solve to ``B·A*``.  ``letters``
    maps generators to languages or words (default: the generator's name).
    """
    if classify(S, linear=True, left_linear=left) is SysClass.ALGEBRAIC:
        raise NotLinear(f"{S.name} is not {'left' if left else 'right'}-linear")
    env = {}
    for g in S.gens:
        v = (letters or {}).get(g, g)
        env[g] = RegularLang.word(v) if isinstance(v, str) else v
    form = linear_form(S, left=left)

    def mul(a: RegularLang, b: RegularLang) -> RegularLang:
        return b.concat(a) if left else a.concat(b)  # coefficient side first

    xs = list(S.sysvars)
    coef: dict[str, dict[str, RegularLang]] = {}
    base: dict[str, RegularLang] = {}
    for x in xs:
        coef[x], base[x] = {}, RegularLang.empty()
        for factors, var in form[x]:
            c = RegularLang.epsilon()
            for f in factors:
                c = c.concat(_closed_value(f, S, env))
            if c.is_empty():
                continue
            if var is None:
                base[x] = base[x].union(c)
            else:
                coef[x][var] = coef[x][var].union(c) if var in coef[x] else c
    for x in xs:
        loop = coef[x].pop(x, None)
        if loop is not None:
            s = loop.star()
            coef[x] = {y: mul(s, c) for y, c in coef[x].items()}
            base[x] = mul(s, base[x])
        for z in xs:
            c = coef[z].pop(x, None) if z != x else None
            if c is None:
                continue
            for y, d in coef[x].items():
                term = mul(c, d)
                coef[z][y] = coef[z][y].union(term) if y in coef[z] else term
            base[z] = base[z].union(mul(c, base[x]))
    return base
