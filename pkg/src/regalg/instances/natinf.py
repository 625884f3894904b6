"""Natural numbers with infinity, and exact divergence detection for linear systems."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Any, Mapping

from ..algebra import AlgebraSpec, ExactHook, StabilizeWithin
from ..coterms import NotLinear, RegSys, linear_form
from ..terms import eval_term

INF = math.inf


def _times(a, b):
    if a == 0 or b == 0:
        return 0
    return a * b


def fmt_value(v) -> str:
    return "∞" if v == INF else str(int(v))


def parse_value(text: str):
    text = text.strip()
    if text in ("∞", "inf", "infinity"):
        return INF
    n = int(text)
    if n < 0:
        raise ValueError("values are natural numbers")
    return n


def _sample(rng: random.Random):
    return INF if rng.random() < 0.1 else rng.randrange(8)


def natinf(strategy=None) -> AlgebraSpec:
    """Numeric order, bottom 0, saturating ``+`` and ``×`` with ``0·∞ = 0``."""
    return AlgebraSpec(
        name="natinf", bottom=0, leq=lambda a, b: a <= b,
        ops={"plus": lambda a, b: a + b, "times": _times, "zero": lambda: 0, "one": lambda: 1},
        arities={"plus": 2, "times": 2, "zero": 0, "one": 0},
        sup_strategy=strategy or StabilizeWithin(), join=max,
        magnitude=lambda v: v, clamp=lambda v, cap: v if v <= cap else cap,
        arith={"plus": "plus", "times": "times", "zero": "zero", "one": "one"},
        sample=_sample, fmt=fmt_value, parse=parse_value,
    )


@dataclass(frozen=True)
class Verdict:
    finite: bool
    value: Any  # exact value; INF when not finite

    def __str__(self):
        return f"Finite ({fmt_value(self.value)})" if self.finite else "Infinite"


def _coefficients(S: RegSys, env: Mapping[str, Any]):
    A = natinf().bind(S.sig)
    try:
        form = linear_form(S)
    except NotLinear:
        form = linear_form(S, left=True)  # ℕ∞ is commutative, either side will do
    base: dict[str, Any] = {}
    weight: dict[str, dict[str, Any]] = {}
    for x, rows in form.items():
        b, w = 0, {}
        for factors, var in rows:
            c = 1
            for f in factors:
                c = _times(c, eval_term(f, A, env))
            if var is None:
                b = b + c
            elif c != 0:
                w[var] = w.get(var, 0) + c
        base[x], weight[x] = b, w
    return base, weight


def divergence_certificate_linear(S: RegSys, env: Mapping[str, Any] | None = None) -> dict[str, Verdict]:
    """Exact least solution of ``x = A·x + b`` over ℕ∞, per system variable.

    A component is infinite exactly when some path in the positive-weight
    coefficient graph leads from it to a nonzero base term and passes a
    cycle, an infinite weight, or ends at an infinite base term.  All other
    components are computed exactly by summing over the (acyclic) paths.
    """
    env = dict(env or {})
    base, weight = _coefficients(S, env)
    nodes = list(S.sysvars)
    preds: dict[str, set[str]] = {x: set() for x in nodes}
    for x in nodes:
        for y in weight[x]:
            preds[y].add(x)

    def backward(seeds) -> set[str]:
        out, stack = set(seeds), list(seeds)
        while stack:
            y = stack.pop()
            for x in preds[y]:
                if x not in out:
                    out.add(x)
                    stack.append(x)
        return out

    feeding = backward([x for x in nodes if base[x] != 0])
    # on a positive cycle: some successor reaches x again
    cyclic = {x for x in feeding if set(weight[x]) & backward([x])}
    seeds = cyclic | {x for x in nodes if base[x] == INF}
    seeds |= {x for x in nodes for y, c in weight[x].items() if c == INF and y in feeding}
    infinite = backward(seeds)

    value: dict[str, Any] = {}

    def solve(x):
        if x in value:
            return value[x]
        if x not in feeding:
            value[x] = 0
            return 0
        total = base[x]
        for y, c in weight[x].items():
            total += _times(c, solve(y))
        value[x] = total
        return total

    out = {}
    for x in nodes:
        if x in infinite:
            out[x] = Verdict(False, INF)
        else:
            out[x] = Verdict(True, solve(x))
    return out


def certify_rule(S: RegSys, A: AlgebraSpec, env, last) -> dict[str, Any] | None:
    """Fallback for :class:`ExactHook`: exact values when the system is linear."""
    try:
        verdicts = divergence_certificate_linear(S, env)
    except NotLinear:
        return None
    return {x: v.value for x, v in verdicts.items()}


def exact_strategy(budget: int = 10_000) -> ExactHook:
    return ExactHook(certify_rule, budget)
