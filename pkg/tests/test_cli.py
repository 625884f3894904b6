from regalg.cli import main
from regalg.workspace import data_path

PATHS = str(data_path("paths.txt"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestUnfold:
    def test_examples(self, capsys):
        assert run(capsys, "unfold", "loop", "--depth", "2")[:2] == (0, "f(f(bot))\n")
        assert run(capsys, "unfold", "loop", "--depth", "0")[:2] == (0, "bot\n")

    def test_unknown_system(self, capsys):
        code, out, err = run(capsys, "unfold", "nope")
        assert code == 2 and "unknown system" in err and out == ""

    def test_max_depth(self, capsys):
        assert run(capsys, "unfold", "loop", "--depth", "9", "--max-depth", "4")[0] == 2


class TestEval:
    def test_shortest_path(self, capsys):
        code, out, _ = run(capsys, "eval", "--graph", PATHS, "--source", "A", "--target", "C")
        assert code == 0 and "x_A = 5" in out.splitlines()

    def test_tropical_one_node(self, capsys):
        code, out, _ = run(capsys, "eval", "tropone", "--instance", "tropical",
                           "--env", str(data_path("tropone.env")))
        assert code == 0 and out.splitlines()[-1] == "x = 0"

    def test_growth_capped_then_certified(self, capsys):
        code, out, _ = run(capsys, "--cap", "100", "eval", "growth", "--instance", "natinf")
        assert code == 3 and "cap-exceeded" in out
        code, out, _ = run(capsys, "eval", "growth", "--instance", "natinf", "--cap", "100",
                           "--certify-linear")
        assert code == 0 and out.splitlines()[-1] == "x = ∞"

    def test_missing_binding(self, capsys):
        code, _, err = run(capsys, "eval", "tropone", "--instance", "tropical")
        assert code == 2 and "binding" in err

    def test_slice_and_finite(self, capsys):
        code, out, _ = run(capsys, "eval", "astarb", "--instance", "slice:3")
        assert code == 0 and out.splitlines()[-1] == "x = {b, ab, aab}"
        code, out, _ = run(capsys, "eval", "loop", "--instance", "twoid")
        assert code == 0 and out.splitlines()[-1] == "x = bot"
        assert run(capsys, "eval", "loop", "--instance", "twoflip")[0] == 2
        assert run(capsys, "eval", "loop", "--instance", "nosuch")[0] == 2

    def test_records(self, capsys):
        code, out, _ = run(capsys, "--format", "records", "eval", "--graph", PATHS,
                           "--source", "A", "--target", "D")
        assert code == 0
        assert out.splitlines()[-1] == "var=x_A value=∞"


class TestEq:
    def test_examples(self, capsys):
        assert run(capsys, "eq", "loop", "loop")[:2] == (0, "equal\n")
        assert run(capsys, "eq", "loop", "loop2")[:2] == (0, "equal\n")
        code, out, _ = run(capsys, "eq", "fa", "fb")
        assert code == 1 and out.startswith("distinct at depth 1")

    def test_signature_mismatch(self, capsys):
        assert run(capsys, "eq", "loop", "anbn")[0] == 2


class TestSolve:
    def test_slices(self, capsys):
        assert run(capsys, "solve", "astarb", "--slices", "3")[:2] == (0, "b ab aab\n")
        assert run(capsys, "solve", "abstar", "--slices", "4")[:2] == (0, "ε ab abab\n")

    def test_cfg(self, capsys):
        assert run(capsys, "solve", "anbn", "--cfg", "4")[:2] == (0, "ε ab aabb\n")
        assert run(capsys, "solve", "growth", "--cfg", "0")[:2] == (0, "ε\n")

    def test_arden(self, capsys):
        code, out, _ = run(capsys, "solve", "astarb", "--arden", "--show-slice", "3")
        assert code == 0 and "0 -b-> " in out and out.splitlines()[-1] == "slice b ab aab"

    def test_arden_not_linear(self, capsys):
        code, _, err = run(capsys, "solve", "anbn", "--arden")
        assert code == 2 and "not linear" in err

    def test_mode_required(self, capsys):
        assert run(capsys, "solve", "anbn")[0] == 2


class TestLaws:
    def test_all_pass(self, capsys):
        code, out, _ = run(capsys, "laws", "all", "--poset-size", "2")
        assert code == 0 and out.count("PASS") == 4

    def test_size_one(self, capsys):
        assert run(capsys, "laws", "all", "--poset-size", "1")[0] == 0

    def test_mutated_fixture(self, capsys):
        code, out, _ = run(capsys, "laws", "em", "--poset", "Vbad")
        assert code == 1 and "violation unit" in out and "ideal=↓a" in out

    def test_bound(self, capsys):
        code, _, err = run(capsys, "laws", "monad", "--poset-size", "9")
        assert code == 2 and "poset-size" in err

    def test_algebra(self, capsys):
        assert run(capsys, "laws", "continuity", "--algebra", "twoid")[0] == 0
        assert run(capsys, "laws", "continuity", "--algebra", "twoflip")[0] == 1


class TestChecks:
    def test_ineq(self, capsys):
        idem = str(data_path("idempotent.ineq"))
        assert run(capsys, "check-ineq", idem, "--instance", "slice:2:a")[0] == 0
        assert run(capsys, "check-ineq", idem, "--instance", "tropical")[0] == 0
        code, out, _ = run(capsys, "check-ineq", str(data_path("square.ineq")), "--instance", "natinf")
        assert code == 1 and "FAIL" in out

    def test_morphism(self, capsys):
        assert run(capsys, "check-morphism", "truncate:4:2")[0] == 0
        assert run(capsys, "check-morphism", "identity:diamond")[0] == 0
        assert run(capsys, "check-morphism", "bottom:two-point:top")[0] == 1
        assert run(capsys, "check-morphism", "sideways:diamond")[0] == 2


def test_workspace_flag_and_out(tmp_path, capsys):
    ws = tmp_path / "w.ra"
    ws.write_text("sig H { h/1 }\nsys hh over H vars {x} gens {} root x { x = h(x) }\n")
    target = tmp_path / "out.txt"
    code, out, _ = run(capsys, "-w", str(ws), "--out", str(target), "unfold", "hh", "--depth", "1")
    assert code == 0 and out == "" and target.read_text() == "h(bot)\n"
    assert run(capsys, "--no-demo", "unfold", "loop")[0] == 2


def test_parse_error_reported(tmp_path, capsys):
    ws = tmp_path / "bad.ra"
    ws.write_text("sig H { h/1 }\nsys s over H vars {x} gens {} root x { x = h(x, x) }\n")
    code, _, err = run(capsys, "-w", str(ws), "unfold", "s")
    assert code == 2 and "error" in err


def test_deterministic(capsys):
    first = run(capsys, "check-ineq", str(data_path("square.ineq")), "--instance", "natinf", "--seed", "4")
    second = run(capsys, "check-ineq", str(data_path("square.ineq")), "--instance", "natinf", "--seed", "4")
    assert first == second


def test_usage_error_exit(capsys):
    assert main(["frobnicate"]) == 2
    assert main(["unfold"]) == 2
    assert main(["--help"]) == 0
