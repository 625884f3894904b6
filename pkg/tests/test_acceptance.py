"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from regalg.algebra import (  # noqa: E402
    CapAndFlag, Converged, approx_eval, check_em_identity, kleene_eval,
)
from regalg.completion import (  # noqa: E402
    FinitePoset, check_continuity, check_em_laws, free_completion_iso_check, poset_algebra,
    run_law_suites,
)
from regalg.coterms import RegSys, bisim_equal, subst_sys, unfold  # noqa: E402
from regalg.instances.finite import chain, diamond, lattice_semiring  # noqa: E402
from regalg.instances.languages import cfg_slice_oracle, lang_slice, letter_env  # noqa: E402
from regalg.instances.natinf import INF as NINF  # noqa: E402
from regalg.instances.natinf import divergence_certificate_linear, natinf  # noqa: E402
from regalg.instances.regular import arden_solve_linear, regular_slice  # noqa: E402
from regalg.instances.tropical import (  # noqa: E402
    bellman_ford_oracle, graph_to_linear_system, tropical,
)
from regalg.sampling import (  # noqa: E402
    SEMIRING, algebraic_system, bisimilar_variant, consistent_family, em_sample,
    linear_natinf_system, nested_sample, random_digraph, random_term, right_linear_system,
    semiring_system,
)
from regalg.terms import eval_term, merge, subst, truncate  # noqa: E402

SEED = 20240601
RESULTS: dict[int, tuple[bool, str]] = {}
DIAMOND = diamond().spec()
SLICE4 = lang_slice("ab", 4)


def _instances():
    """(name, algebra, env maker) for the semiring instances with finite height."""
    return [
        ("tropical", tropical(), lambda S, rng: {g: rng.randrange(10) for g in S.gens}),
        ("diamond", DIAMOND, lambda S, rng: {g: rng.choice(DIAMOND.elements) for g in S.gens}),
        ("slice(ab,4)", SLICE4, lambda S, rng: letter_env(S, L=4)),
    ]


def _value(out):
    return out.values[out.root] if isinstance(out, Converged) else out.last[out.root]


# -- criteria ----------------------------------------------------------------

def criterion_1():
    reports = run_law_suites(("monad", "em", "distrib", "continuity"), poset_size=3, monad_size=4)
    bad = [r for r in reports if not r.ok]
    detail = ", ".join(f"{r.check} {r.samples}/{len(r.violations)}" for r in reports)
    V = FinitePoset.from_covers(["bot", "a", "b"], [("bot", "a"), ("bot", "b")], "V")
    corrupt = check_em_laws(V, {V.down("a"): "bot"})
    P2 = FinitePoset.from_covers(["bot", "top"], [("bot", "top")], "two")
    flip = check_continuity(poset_algebra(P2, {"f": {("bot",): "top", ("top",): "bot"}}))
    caught = not corrupt.ok and not flip.ok
    witnesses = []
    for r in (corrupt, flip):
        if r.violations:
            witnesses.append(r.violations[0].text())
    ok = not bad and caught
    return ok, (f"suites (samples/violations): {detail}; mutations detected: {caught}; "
                f"witnesses: {' | '.join(witnesses)}")


def criterion_2():
    rng = random.Random(SEED)
    checked = failures = 0
    for name, A, mk in _instances():
        for _ in range(100):
            S = semiring_system(rng, max_vars=4)
            env = mk(S, rng)
            out = kleene_eval(S, A, env)
            if not isinstance(out, Converged):
                failures += 1
                continue
            n = out.iterations
            for d in range(n, 2 * n + 4):
                checked += 1
                if approx_eval(S, A, env, d) != out.value:
                    failures += 1
    return failures == 0, f"300 systems, {checked} depth checks, {failures} failures"


def criterion_3():
    rng = random.Random(SEED + 3)
    parts, ok = [], True
    cases = [(name, A, mk) for name, A, mk in _instances()]
    # uncapped iteration of nonlinear natinf systems grows doubly exponentially
    cases.append(("natinf@cap1e6", natinf(CapAndFlag(10 ** 6, budget=200)),
                  lambda S, r: {g: r.choice([0, 1, 2, 3, NINF]) for g in S.gens}))
    for name, A, mk in cases:
        passed = failed = indeterminate = 0
        while passed + failed < 100 and passed + failed + indeterminate < 2000:
            t, inner = em_sample(rng)
            if not inner:
                continue
            env = mk(RegSys.make(SEMIRING, {"z": "one"}, gens=["a", "b"]), rng)
            verdict = check_em_identity(t, inner, A, env, sig=SEMIRING)
            if verdict is None:
                indeterminate += 1
            elif verdict:
                passed += 1
            else:
                failed += 1
        total = passed + failed + indeterminate
        ok = ok and failed == 0 and passed >= 100
        parts.append(f"{name} {passed} pass/{failed} fail, indeterminate "
                     f"{indeterminate}/{total} ({100 * indeterminate / total:.1f}%)")
    return ok, "; ".join(parts)


def criterion_4():
    rng = random.Random(SEED + 4)
    cases = _instances() + [("natinf@cap1000", natinf(CapAndFlag(1000)),
                             lambda S, r: {g: r.choice([0, 1, 2, NINF]) for g in S.gens})]
    pairs = failures = 0
    for _ in range(100):
        S = semiring_system(rng)
        T = bisimilar_variant(S, rng)
        pairs += 1
        if not bisim_equal(S, T):
            failures += 1
            continue
        for name, A, mk in cases:
            env = mk(S, rng)
            a, b = kleene_eval(S, A, env), kleene_eval(T, A, env)
            if type(a) is not type(b) or _value(a) != _value(b):
                failures += 1
    return failures == 0, f"{pairs} pairs x {len(cases)} instances, {failures} failures"


def criterion_5():
    rng = random.Random(SEED + 5)
    failures = comparisons = 0
    for _ in range(50):
        S = right_linear_system(rng, ("a", "b", "c"), max_vars=4)
        sol = arden_solve_linear(S)
        for L in range(7):
            out = kleene_eval(S, lang_slice("abc", L), letter_env(S, L=L))
            for x in S.sysvars:
                comparisons += 1
                if regular_slice(sol[x], L) != out.values[x]:
                    failures += 1
    return failures == 0, f"50 systems, L<=6, {comparisons} set comparisons, {failures} failures"


def criterion_6():
    rng = random.Random(SEED + 6)
    anbn = RegSys.make(SEMIRING, {"x": "plus(times(a, times(x, b)), one)"}, name="anbn")
    systems = [anbn] + [algebraic_system(rng) for _ in range(50)]
    failures = comparisons = 0
    for S in systems:
        for L in range(9):
            comparisons += 1
            out = kleene_eval(S, lang_slice("ab", L), letter_env(S, L=L))
            if out.value != cfg_slice_oracle(S, L):
                failures += 1
    expect = {"a" * n + "b" * n for n in range(5)}
    fixture = cfg_slice_oracle(anbn, 8) == expect
    return failures == 0 and fixture, (f"{len(systems)} systems incl. anbn, L<=8, {comparisons} "
                                       f"comparisons, {failures} failures, anbn fixture {fixture}")


def criterion_7():
    rng = random.Random(SEED + 7)
    A = tropical()
    failures = comparisons = infinite = 0
    for _ in range(100):
        G = random_digraph(rng, max_nodes=8, max_weight=9)
        for s in G.nodes:
            dist = bellman_ford_oracle(G, s)
            for t in G.nodes:
                S, env = graph_to_linear_system(G, s, t)
                comparisons += 1
                infinite += dist[t] == float("inf")
                if kleene_eval(S, A, env).value != dist[t]:
                    failures += 1
    return failures == 0, (f"100 digraphs, {comparisons} source/target pairs "
                           f"({infinite} unreachable), {failures} failures")


def criterion_8():
    rng = random.Random(SEED + 8)
    failures = finite = infinite = 0
    for _ in range(50):
        S, env = linear_natinf_system(rng)
        cert = divergence_certificate_linear(S, env)
        per_cap = []
        for cap in (10 ** 3, 10 ** 6):
            out = kleene_eval(S, natinf(), env, CapAndFlag(cap, budget=2 * cap + 10))
            vals = out.values if isinstance(out, Converged) else out.last
            if "budget-exhausted" in getattr(out, "flags", ()):
                failures += 1
            capped = set(getattr(out, "capped", ()))
            per_cap.append(vals)
            for x, v in cert.items():
                if v.finite:
                    if x in capped or vals[x] != v.value or not vals[x] < cap:
                        failures += 1
                elif x not in capped:
                    failures += 1
        for x, v in cert.items():
            if v.finite:
                finite += 1
                if per_cap[0][x] != per_cap[1][x]:
                    failures += 1
            else:
                infinite += 1
    return failures == 0, (f"50 systems, {finite} finite and {infinite} infinite components, "
                           f"caps 1e3/1e6, {failures} failures")


def criterion_9():
    rng = random.Random(SEED + 9)
    failures = 0
    for _ in range(100):
        ns = nested_sample(rng)
        composite = subst_sys(ns.outer, ns.inner)
        for d in range(9):
            images = {p: unfold(T, d) for p, T in ns.inner.items()}
            if unfold(composite, d) != truncate(subst(unfold(ns.outer, d), images), d):
                failures += 1
    report = free_completion_iso_check(100, seed=SEED)
    ok = failures == 0 and report.ok
    return ok, (f"100 samples x depths 0..8, {failures} failures; iso check "
                f"{report.samples} samples, {len(report.violations)} violations")


def _directed_closure(family):
    out = set(family)
    grew = True
    while grew:
        grew = False
        for s in list(out):
            for t in list(out):
                m = merge(s, t)
                if m not in out:
                    out.add(m)
                    grew = True
    return out


def criterion_10():
    rng = random.Random(SEED + 10)
    lattices = [
        DIAMOND,
        chain(4).spec(),
        lattice_semiring(("bot", "a", "b", "c", "top"),
                         [("bot", "a"), ("bot", "b"), ("a", "c"), ("b", "top"), ("c", "top")],
                         name="pentagon").spec(),
    ]
    failures = families = 0
    for _ in range(100):
        t = random_term(rng, SEMIRING, ("p", "q"), 4)
        fam = consistent_family(rng, t, k=rng.randint(2, 4))
        members = _directed_closure(fam)
        m = fam[0]
        for s in fam[1:]:
            m = merge(m, s)
        families += 1
        for A in lattices:
            env = {"p": rng.choice(A.elements), "q": rng.choice(A.elements)}
            vals = [eval_term(s, A, env) for s in members]
            top = eval_term(m, A, env)
            maxima = [v for v in vals if all(A.leq(w, v) for w in vals)]
            if m not in members or not maxima or not all(A.equal(top, v) for v in maxima):
                failures += 1
            if not all(A.leq(eval_term(s, A, env), top) for s in fam):
                failures += 1
    return failures == 0, f"{families} families x {len(lattices)} lattices, {failures} failures"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 11)}


def run_criterion(n: int) -> tuple[bool, str]:
    start = time.perf_counter()
    ok, detail = CRITERIA[n]()
    detail += f" [{time.perf_counter() - start:.1f}s]"
    RESULTS[n] = (ok, detail)
    return ok, detail


def format_line(n: int) -> str:
    ok, detail = RESULTS[n]
    return f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"


@pytest.mark.parametrize("n", list(CRITERIA))
def test_criterion(n):
    ok, _ = run_criterion(n)
    print(format_line(n))
    assert ok, format_line(n)


if __name__ == "__main__":
    status = 0
    for n in CRITERIA:
        run_criterion(n)
        print(format_line(n), flush=True)
        status |= not RESULTS[n][0]
    sys.exit(status)
