import pytest

from regalg._syntax import ParseError
from regalg.coterms import bisim_equal
from regalg.instances.natinf import natinf
from regalg.instances.tropical import tropical
from regalg.terms import Signature
from regalg.workspace import Workspace, builtin_workspace, data_path, parse_env


def test_fixtures_round_trip():
    ws = builtin_workspace()
    text = ws.format()
    again = Workspace()
    again.load(text)
    assert again.format() == text
    for name, S in ws.systems.items():
        assert again.systems[name] == S


def test_fixture_contents():
    ws = builtin_workspace()
    assert {"loop", "loop2", "astarb", "anbn", "growth", "tropone"} <= set(ws.systems)
    assert bisim_equal(ws.system("loop"), ws.system("loop2"))
    assert ws.sigs["SR"].profile is not None
    assert ws.poset("Vbad").sup_overrides == {"a": "bot"}
    assert ws.finite_algebra("twoid").validate().ok
    assert not ws.finite_algebra("twoflip").validate().ok


def test_user_file_shadows_demo(tmp_path):
    ws = builtin_workspace()
    f = tmp_path / "mine.ra"
    f.write_text("sig F { f/1, g/2, c/0 }\nsys loop over F vars {x} gens {} root x { x = f(f(x)) }\n")
    ws.load_file(f)
    assert ws.system("loop").defs["x"].args[0].op.name == "f"
    with pytest.raises(ParseError):
        ws.load_file(f)


def test_custom_profile():
    ws = Workspace()
    ws.load("sig K { add/2, mul/2, nil/0, unit/0 }\n"
            "sys s over K vars {x} gens {a} root x { x = add(mul(a, x), unit) }\n"
            "profile K semiring { plus = add, times = mul, zero = nil, one = unit }\n")
    S = ws.system("s")
    assert S.sig.profile.plus == "add"
    again = Workspace()
    again.load(ws.format())
    assert again.system("s").sig.profile == S.sig.profile


@pytest.mark.parametrize("text, needle", [
    ("poset P { elements bot a; cover bot z }", "not a declared element"),
    ("poset P { elements a b }", "least element"),
    ("poset P { elements bot a; cover bot a }\nalgebra A on P { op f/1 = bot }", "needs 1 row"),
    ("algebra A on Q { }", "unknown poset"),
    ("profile Q semiring", "unknown signature"),
    ("blah", "expected sig"),
])
def test_errors(text, needle):
    with pytest.raises(ParseError) as err:
        Workspace().load(text)
    assert needle in str(err.value)


def test_env_files():
    SR = Signature.semiring()
    assert parse_env(data_path("tropone.env").read_text(), tropical(), SR) == {"a": 1, "b": 0}
    assert parse_env("c = plus(one, one)", natinf(), SR) == {"c": 2}
    with pytest.raises(ParseError):
        parse_env("c = 1\nc = 2", natinf(), SR)
    with pytest.raises(ParseError):
        parse_env("c = plus(x, one)", natinf(), SR)
