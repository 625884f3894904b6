"""Min-plus arithmetic on ℕ ∪ {∞}, ordered so that smaller distances are larger."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Mapping

from ..algebra import AlgebraSpec, StabilizeWithin
from ..coterms import RegSys, _fresh
from ..terms import App, Signature, Var

INF = math.inf


def _plus(a, b):
    return a if a <= b else b


def _times(a, b):
    return a + b  # inf + n = inf


def fmt_value(v) -> str:
    return "∞" if v == INF else str(int(v))


def parse_value(text: str):
    text = text.strip()
    if text in ("∞", "inf", "infinity", "bot", "⊥"):
        return INF
    n = int(text)
    if n < 0:
        raise ValueError("weights are natural numbers")
    return n


def _sample(rng: random.Random):
    return INF if rng.random() < 0.15 else rng.randrange(10)


def tropical(strategy=None) -> AlgebraSpec:
    """``x ⊑ y`` iff ``x >= y``; bottom ∞, plus min, times saturating +, zero ∞, one 0."""
    return AlgebraSpec(
        name="tropical", bottom=INF, leq=lambda a, b: a >= b,
        ops={"plus": _plus, "times": _times, "zero": lambda: INF, "one": lambda: 0},
        arities={"plus": 2, "times": 2, "zero": 0, "one": 0},
        sup_strategy=strategy or StabilizeWithin(), join=_plus,
        sample=_sample, fmt=fmt_value, parse=parse_value,
    )


@dataclass(frozen=True)
class WeightedDigraph:
    nodes: tuple[str, ...]
    edges: Mapping[tuple[str, str], int] = field(default_factory=dict)

    @classmethod
    def from_edges(cls, edges, nodes=()) -> WeightedDigraph:
        """Parallel edges keep the smallest weight."""
        best: dict[tuple[str, str], int] = {}
        order = list(dict.fromkeys(nodes))
        for u, v, w in edges:
            if w < 0:
                raise ValueError(f"negative weight on {u}->{v}")
            for x in (u, v):
                if x not in order:
                    order.append(x)
            if (u, v) not in best or w < best[(u, v)]:
                best[(u, v)] = w
        return cls(tuple(order), best)

    def successors(self, u):
        return [(v, w) for (a, v), w in self.edges.items() if a == u]


def parse_graph(text: str) -> WeightedDigraph:
    """Lines ``u v w``; a line with a single name declares an isolated node."""
    edges, nodes = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) == 1:
            nodes.append(parts[0])
        elif len(parts) == 3:
            try:
                w = int(parts[2])
            except ValueError:
                raise ValueError(f"line {lineno}: weight {parts[2]!r} is not an integer") from None
            edges.append((parts[0], parts[1], w))
        else:
            raise ValueError(f"line {lineno}: expected 'u v w', got {line!r}")
    return WeightedDigraph.from_edges(edges, nodes)


def graph_to_linear_system(G: WeightedDigraph, source: str, target: str,
                           sig: Signature | None = None) -> tuple[RegSys, dict[str, int]]:
    """One sysvar per node: ``x_u = min over edges (w + x_v)``, with ``one`` added at the target.

    Edge weights become generators bound in the returned environment.
    """
    for node in (source, target):
        if node not in G.nodes:
            raise ValueError(f"unknown node {node!r}")
    sig = sig or Signature.semiring()
    roles = sig.profile.roles()
    plus, times = sig[roles["plus"]], sig[roles["times"]]
    taken = {op.name for op in sig}
    var_of = {}
    for u in G.nodes:
        var_of[u] = _fresh(f"x_{u}", taken)
        taken.add(var_of[u])
    env: dict[str, int] = {}
    gen_of = {}
    for (u, v), w in sorted(G.edges.items()):
        g = _fresh(f"w_{u}_{v}", taken)
        taken.add(g)
        gen_of[(u, v)] = g
        env[g] = w
    defs = {}
    for u in G.nodes:
        summands = [App(times, (Var(gen_of[(u, v)]), Var(var_of[v])))
                    for v, _ in sorted(G.successors(u))]
        if u == target:
            summands.append(App(sig[roles["one"]], ()))
        if not summands:
            defs[var_of[u]] = App(sig[roles["zero"]], ())
            continue
        t = summands[-1]
        for s in reversed(summands[:-1]):
            t = App(plus, (s, t))
        defs[var_of[u]] = t
    S = RegSys.make(sig, defs, var_of[source], gens=sorted(env), name=f"paths_{source}_{target}")
    return S, env


def bellman_ford_oracle(G: WeightedDigraph, source: str) -> dict[str, float]:
    dist = {u: INF for u in G.nodes}
    dist[source] = 0
    for _ in range(max(0, len(G.nodes) - 1)):
        changed = False
        for (u, v), w in G.edges.items():
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            break
    return dist
