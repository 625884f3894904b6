import itertools
import random

import pytest
from hypothesis import given, settings

from regalg.algebra import (
    CapAndFlag, Converged, ExactHook, StabilizeWithin, Unresolved, approx_eval, check_em_identity,
    check_inequalities, check_morphism, is_fixpoint, kleene_eval, parse_inequalities, step,
    validate_algebra,
)
from regalg.coterms import RegSys, bisim_equal
from regalg.instances.finite import FiniteAlgebra, chain, diamond, lattice_semiring, two_point
from regalg.instances.languages import lang_slice, letter_env
from regalg.instances.natinf import INF as NINF, certify_rule, natinf
from regalg.instances.tropical import INF, tropical
from regalg.sampling import SEMIRING, bisimilar_variant, semiring_system
from regalg.terms import MissingBinding, Signature, parse_term

from strategies import seeded

SR = SEMIRING
F1 = Signature([("f", 1)], name="f1")


def sys_(defs, sig=SR, gens=None):
    return RegSys.make(sig, defs, gens=gens)


def tables_and_generic(S, A, env):
    """The compiled table path and the generic path must agree."""
    a = kleene_eval(S, A, env)
    b = kleene_eval(S, A, env, use_tables=False)
    assert type(a) is type(b)
    if isinstance(a, Converged):
        assert a.values == b.values and a.iterations == b.iterations
    return a


class TestKleene:
    def test_identity_loop(self):
        out = kleene_eval(RegSys.make(F1, {"x": "f(x)"}), two_point("id").spec())
        assert isinstance(out, Converged) and out.value == "bot" and out.iterations == 1

    def test_tropical_one_node(self):
        out = kleene_eval(sys_({"x": "plus(times(a, x), b)"}), tropical(), {"a": 1, "b": 0})
        assert isinstance(out, Converged) and out.value == 0

    def test_natinf_growth_capped(self):
        out = kleene_eval(sys_({"x": "plus(x, one)"}), natinf(), {}, CapAndFlag(100))
        assert isinstance(out, Unresolved)
        assert out.value == 100 and "cap-exceeded" in out.flags and out.capped == ("x",)

    def test_budget_exhausted(self):
        out = kleene_eval(sys_({"x": "plus(x, one)"}), natinf(), {}, StabilizeWithin(50))
        assert isinstance(out, Unresolved) and out.flags == ("budget-exhausted",)

    def test_exact_hook_refines(self):
        strategy = ExactHook(certify_rule, budget=20)
        out = kleene_eval(sys_({"x": "plus(times(c, x), one)"}), natinf(), {"c": 2}, strategy)
        assert isinstance(out, Converged) and out.refined and out.value == NINF

    def test_missing_binding(self):
        with pytest.raises(MissingBinding):
            kleene_eval(sys_({"x": "plus(a, x)"}), tropical(), {})

    def test_strategy_budget_validated(self):
        with pytest.raises(ValueError):
            StabilizeWithin(0)

    @settings(max_examples=60, deadline=None)
    @given(seeded(lambda rng: (semiring_system(rng), rng.random())))
    def test_converged_is_fixpoint_and_chain(self, pair):
        S, r = pair
        A = diamond().spec()
        env = {g: A.elements[int(r * 4 + i) % 4] for i, g in enumerate(S.gens)}
        out = tables_and_generic(S, A, env)
        assert isinstance(out, Converged)
        assert is_fixpoint(S, A, env, out.values)
        for d in range(out.iterations + 2):
            assert A.leq(approx_eval(S, A, env, d), approx_eval(S, A, env, d + 1))

    @settings(max_examples=40, deadline=None)
    @given(seeded(semiring_system))
    def test_tropical_always_converges(self, S):
        out = kleene_eval(S, tropical(), {g: 1 for g in S.gens})
        assert isinstance(out, Converged)
        assert is_fixpoint(S, tropical(), {g: 1 for g in S.gens}, out.values)

    def test_one_step_map_monotone_exhaustive(self):
        A = chain(3).spec()
        S = sys_({"x": "plus(times(a, y), one)", "y": "times(x, x)"})
        xs = A.elements
        vecs = [dict(zip(S.sysvars, v)) for v in itertools.product(xs, repeat=2)]
        for a in xs:
            env = {"a": a}
            for v, w in itertools.product(vecs, repeat=2):
                if all(A.leq(v[k], w[k]) for k in v):
                    sv, sw = step(S, A, env, v), step(S, A, env, w)
                    assert all(A.leq(sv[k], sw[k]) for k in sv)

    def test_monotone_in_env(self):
        A = diamond().spec()
        rng = random.Random(7)
        for _ in range(40):
            S = semiring_system(rng)
            env = {g: rng.choice(A.elements) for g in S.gens}
            up = {g: rng.choice([e for e in A.elements if A.leq(v, e)]) for g, v in env.items()}
            lo, hi = kleene_eval(S, A, env), kleene_eval(S, A, up)
            assert A.leq(lo.value, hi.value)

    def test_bisimulation_invariance(self):
        A = diamond().spec()
        rng = random.Random(11)
        for _ in range(40):
            S = semiring_system(rng)
            T = bisimilar_variant(S, rng)
            assert bisim_equal(S, T)
            env = {g: rng.choice(A.elements) for g in S.gens}
            assert kleene_eval(S, A, env).value == kleene_eval(T, A, env).value


class TestApproxEval:
    def test_depth_zero_is_bottom(self):
        S = sys_({"x": "plus(times(a, x), b)"})
        for A, env in ((tropical(), {"a": 1, "b": 0}), (diamond().spec(), {"a": "a", "b": "b"})):
            assert approx_eval(S, A, env, 0) == A.bottom

    def test_tropical_depth_one(self):
        # unfold(S, 1) = plus(bot, bot): every summand sits at path length 1
        S = sys_({"x": "plus(times(a, x), b)"})
        assert approx_eval(S, tropical(), {"a": 1, "b": 0}, 1) == INF
        assert approx_eval(S, tropical(), {"a": 1, "b": 0}, 2) == 0

    def test_stabilization(self):
        S = sys_({"x": "plus(times(a, x), b)"})
        env = {"a": 1, "b": 0}
        out = kleene_eval(S, tropical(), env)
        for d in range(out.iterations, out.iterations + 5):
            assert approx_eval(S, tropical(), env, d) == out.value


class TestEmIdentity:
    def test_unit(self):
        inner = {"p": sys_({"y": "plus(times(a, y), b)"})}
        assert check_em_identity(parse_term("p", SR), inner, tropical(), {"a": 1, "b": 2})

    def test_lattice_example(self):
        sig = Signature([("f", 1), ("g", 1), ("a", 0)], name="fga")
        alg = FiniteAlgebra(("bot", "m", "top"), covers=[("bot", "m"), ("m", "top")], name="three")
        alg.add_op("f", {("bot",): "m", ("m",): "top", ("top",): "top"})
        alg.add_op("g", {("bot",): "bot", ("m",): "m", ("top",): "top"})
        alg.add_op("a", "m")
        inner = {"p": RegSys.make(sig, {"y": "g(a)"})}
        assert check_em_identity(parse_term("f(p)", sig), inner, alg.spec())

    def test_tropical_samples(self):
        from regalg.sampling import em_sample
        rng = random.Random(5)
        for _ in range(100):
            t, inner = em_sample(rng)
            env = {"a": rng.randrange(5), "b": rng.randrange(5)}
            assert check_em_identity(t, inner, tropical(), env, sig=SR) is True

    def test_indeterminate(self):
        inner = {"p": sys_({"y": "plus(y, one)"})}
        strategy_A = natinf(StabilizeWithin(30))
        assert check_em_identity(parse_term("p", SR), inner, strategy_A) is None


class TestInequalities:
    def test_reflexive(self):
        E = parse_inequalities("x <= x", SR)
        for A in (diamond().spec(), lang_slice("a", 2)):
            assert check_inequalities(E, A).ok
        assert check_inequalities(E, tropical(), ("sampled", 50)).ok

    def test_idempotent_slice(self):
        E = parse_inequalities("plus(x, x) <= x; x <= plus(x, x)", SR)
        report = check_inequalities(E, lang_slice("a", 2))
        assert report.ok and report.samples == 2 * 8

    def test_natinf_square_violated(self):
        E = parse_inequalities("times(x, x) <= x", SR)
        report = check_inequalities(E, natinf(), ("sampled", 200), seed=0)
        assert not report.ok
        assert any(v.witness["x"] == "2" and "4 is not below 2" in v.detail for v in report.violations)

    def test_repeated_variables_allowed(self):
        E = parse_inequalities("times(x, x) ⊑ plus(x, times(x, x))", SR)
        assert check_inequalities(E, chain(3).spec()).ok

    def test_exhaustive_needs_finite(self):
        with pytest.raises(ValueError):
            check_inequalities(parse_inequalities("x <= x", SR), tropical())


class TestMorphism:
    def test_identity(self):
        for A in (diamond().spec(), tropical()):
            assert check_morphism(lambda x: x, A, A).ok

    def test_bottom_map_fails_on_constant_top(self):
        A = two_point("top").spec()
        report = check_morphism(lambda x: A.bottom, A, A)
        assert not report.ok
        assert any(v.law == "commutes f" for v in report.violations)

    def test_slice_truncation(self):
        A, B = lang_slice("a", 4), lang_slice("a", 2)
        rng = random.Random(0)
        systems = [(S, letter_env(S, {"a": "a", "b": "a"})) for S in (semiring_system(rng) for _ in range(15))]
        report = check_morphism(lambda X: frozenset(w for w in X if len(w) <= 2), A, B, systems)
        assert report.ok and report.samples > 100


class TestValidate:
    def test_builtin_instances(self):
        for A in (tropical(), natinf(), lang_slice("ab", 2), diamond().spec(), chain(4).spec(),
                  two_point("bot").spec()):
            assert validate_algebra(A).ok, A.name

    def test_non_monotone(self):
        alg = FiniteAlgebra(("bot", "top"), covers=[("bot", "top")])
        alg.add_op("f", {("bot",): "top", ("top",): "bot"})
        assert not validate_algebra(alg.spec()).ok


class TestMergeShadow:
    def test_merge_eval_is_max(self):
        from regalg.sampling import consistent_family, random_term
        from regalg.terms import eval_term, merge
        A = lattice_semiring(("bot", "a", "b", "top"),
                             [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")]).spec()
        rng = random.Random(2)
        for _ in range(50):
            t = random_term(rng, SR, ("p", "q"), 4)
            fam = consistent_family(rng, t)
            env = {"p": rng.choice(A.elements), "q": rng.choice(A.elements)}
            m = fam[0]
            for s in fam[1:]:
                m = merge(m, s)
            vm = eval_term(m, A, env)
            assert all(A.leq(eval_term(s, A, env), vm) for s in fam)
