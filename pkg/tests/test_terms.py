import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regalg._syntax import ParseError
from regalg.instances.finite import diamond, two_point
from regalg.instances.tropical import tropical
from regalg.sampling import DEFAULT_SIG
from regalg.terms import (
    BOT, App, ArityMismatch, ExplosionGuard, Inconsistent, MissingBinding, Signature, UnknownSymbol,
    Var, build, consistent, count_below, depth, enumerate_below, eval_term, format_term, leq_syn,
    merge, parse_signature, parse_term, size, subst, truncate, variables,
)

from strategies import SIG2, SIG_A, terms

F = DEFAULT_SIG
SR = Signature.semiring()


def t(text, sig=F):
    return parse_term(text, sig)


class TestSyntax:
    def test_round_trip(self):
        for text in ["f(g(x, bot))", "bot", "c", "g(f(c), y)"]:
            assert format_term(t(text)) == text

    def test_signature_text(self):
        sig = parse_signature("sig S { f/1, g/2, c/0 }")
        assert [str(op) for op in sig] == ["f/1", "g/2", "c/0"]
        assert parse_signature(sig.format()) == sig

    def test_arity_error(self):
        with pytest.raises(ArityMismatch):
            t("f(x, y)")

    def test_unknown_symbol_as_application(self):
        with pytest.raises(UnknownSymbol):
            t("h(x)")

    def test_parse_error_position(self):
        with pytest.raises(ParseError) as err:
            t("f(x,")
        assert err.value.line == 1

    def test_build_nested(self):
        assert build(F, ("g", ("f", "x"), "c")) == t("g(f(x), c)")
        assert build(F, ("f", "bot")) == t("f(bot)")

    @given(terms())
    def test_parse_format_identity(self, s):
        assert parse_term(format_term(s), F) == s


class TestStructure:
    def test_depth_conventions(self):
        assert depth(BOT) == 0
        assert depth(Var("x")) == 1
        assert depth(t("f(g(x, c))")) == 3

    def test_truncate(self):
        assert truncate(t("f(f(f(x)))"), 2) == t("f(f(bot))")
        assert truncate(t("f(x)"), 0) is BOT

    @given(terms())
    def test_truncate_at_depth_is_identity(self, s):
        assert truncate(s, depth(s)) == s

    def test_size_and_variables(self):
        s = t("g(f(x), bot)")
        assert size(s) == 3
        assert variables(s) == {"x"}


class TestOrder:
    def test_examples(self):
        assert leq_syn(BOT, t("f(x)"))
        assert leq_syn(t("f(bot)"), t("f(x)"))
        assert not leq_syn(t("f(x)"), t("f(bot)"))
        assert not leq_syn(t("f(x)"), t("f(y)"))

    @given(terms(), terms(), terms())
    def test_partial_order(self, a, b, c):
        assert leq_syn(a, a)
        assert leq_syn(BOT, a)
        if leq_syn(a, b) and leq_syn(b, a):
            assert a == b
        if leq_syn(a, b) and leq_syn(b, c):
            assert leq_syn(a, c)

    def test_merge_examples(self):
        assert merge(t("g(x, bot)"), t("g(bot, c)")) == t("g(x, c)")
        with pytest.raises(Inconsistent) as err:
            merge(t("g(x, c)"), t("g(y, c)"))
        assert err.value.position == (0,)

    @settings(max_examples=60)
    @given(terms(SIG_A, ("x",), max_leaves=6), st.data())
    def test_merge_is_least_upper_bound(self, u, data):
        below = enumerate_below(u)
        s, r = data.draw(st.sampled_from(below)), data.draw(st.sampled_from(below))
        m = merge(s, r)
        assert leq_syn(s, m) and leq_syn(r, m)
        for w in below:
            if leq_syn(s, w) and leq_syn(r, w):
                assert leq_syn(m, w)

    def test_consistent(self):
        assert consistent([t("f(bot)"), t("f(x)"), BOT])
        assert not consistent([t("f(x)"), t("f(y)")])


class TestEnumerateBelow:
    def test_examples(self):
        sig = Signature([("f", 1), ("a", 0)])
        assert set(enumerate_below(parse_term("f(bot)", sig))) == {BOT, parse_term("f(bot)", sig)}
        assert set(enumerate_below(parse_term("f(a)", sig))) == {
            BOT, parse_term("f(bot)", sig), parse_term("f(a)", sig)}
        assert enumerate_below(BOT) == [BOT]

    @given(terms(SIG_A, ("x",), max_leaves=6))
    def test_matches_brute_force(self, u):
        # oracle: every way of cutting u at a set of positions
        def cuts(w):
            if w is BOT:
                return {BOT}
            if isinstance(w, Var):
                return {BOT, w}
            return {BOT} | {App(w.op, c) for c in itertools.product(*(cuts(a) for a in w.args))}

        got = enumerate_below(u)
        assert len(got) == len(set(got)) == count_below(u)
        assert set(got) == cuts(u)
        assert all(leq_syn(s, u) for s in got)

    def test_explosion_guard(self):
        big = t("g(g(g(x, x), g(x, x)), g(g(x, x), g(x, x)))")
        with pytest.raises(ExplosionGuard):
            enumerate_below(big, bound=100)


class TestSubst:
    def test_unit(self):
        s = t("g(x, c)")
        assert subst(Var("x"), {"x": s}) == s
        assert subst(s, {}) == s

    @given(terms(SIG2, ("x", "y"), 8), terms(SIG2, ("x", "y"), 8), terms(SIG2, ("x", "y"), 8))
    def test_associative(self, s, a, b):
        sigma = {"x": a, "y": b}
        tau = {"x": b, "y": a}
        composed = {k: subst(v, tau) for k, v in sigma.items()}
        assert subst(subst(s, sigma), tau) == subst(s, composed)

    def test_exhaustive_monad_laws_depth3(self):
        sig = Signature([("f", 1), ("g", 2)])
        from regalg.completion import terms_upto
        ts = terms_upto(sig, ("x", "y"), 3)
        images = terms_upto(sig, ("x", "y"), 2)
        sigma = {"x": images[5], "y": images[-1]}
        tau = {"x": images[-2], "y": images[3]}
        composed = {k: subst(v, tau) for k, v in sigma.items()}
        for s in ts:
            assert subst(s, {v: Var(v) for v in variables(s)}) == s
            assert subst(subst(s, sigma), tau) == subst(s, composed)


class TestEval:
    def test_tropical_plus_one_one(self):
        # min(0, 0) with one = 0
        assert eval_term(parse_term("plus(one, one)", SR), tropical(), {}) == 0

    def test_two_point_identity(self):
        A = two_point("id").spec()
        sig = Signature([("f", 1)])
        assert eval_term(parse_term("f(x)", sig), A, {"x": "top"}) == "top"

    def test_bottom_term_is_bottom(self):
        A = two_point("top").spec()
        assert eval_term(BOT, A, {}) == "bot"
        sig = Signature([("f", 1)])
        assert eval_term(parse_term("f(bot)", sig), A, {}) == "top"  # ops need not be strict

    def test_missing_binding(self):
        with pytest.raises(MissingBinding):
            eval_term(Var("x"), tropical(), {})

    @given(terms(SR, ("x", "y"), 10), st.data())
    def test_monotone(self, s, data):
        A = diamond().spec()
        els = A.elements
        below = data.draw(st.sampled_from(enumerate_below(s))) if count_below(s) < 5000 else BOT
        env = {v: data.draw(st.sampled_from(els)) for v in ("x", "y")}
        bigger = {v: data.draw(st.sampled_from([e for e in els if A.leq(env[v], e)])) for v in env}
        assert A.leq(eval_term(below, A, env), eval_term(s, A, env))
        assert A.leq(eval_term(s, A, env), eval_term(s, A, bigger))

    @given(terms(SR, ("x", "y"), 8), terms(SR, ("x", "y"), 6), terms(SR, ("x",), 6), st.data())
    def test_commutes_with_subst(self, s, a, b, data):
        A = tropical()
        env = {"x": data.draw(st.integers(0, 9)), "y": data.draw(st.sampled_from([0, 3, float("inf")]))}
        sigma = {"x": a, "y": b}
        extended = {k: eval_term(v, A, env) for k, v in sigma.items()}
        assert eval_term(subst(s, sigma), A, env) == eval_term(s, A, extended)
