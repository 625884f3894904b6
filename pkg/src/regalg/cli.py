"""Command-line front end.

Exit status: 0 success, 1 a checked property was violated (or ``eq`` found
the systems distinct), 2 usage or input error, 3 evaluation unresolved.
"""
from __future__ import annotations

import argparse
import random
import re
import sys
from pathlib import Path
from typing import Callable

from ._syntax import ParseError
from .algebra import (
    DEFAULT_BUDGET, DEFAULT_CAP, AlgebraError, AlgebraSpec, CapAndFlag, Converged,
    StabilizeWithin, check_inequalities, check_morphism, kleene_eval, parse_inequalities,
    validate_algebra,
)
from .completion import BoundExceeded, check_continuity, check_em_laws, check_monad_laws, run_law_suites
from .coterms import NotLinear, RegSys, bisim_witness, classify, SysClass, unfold
from .instances import finite, languages, regular
from .instances.natinf import divergence_certificate_linear, natinf
from .instances.tropical import graph_to_linear_system, parse_graph, tropical
from .report import Report, _q
from .sampling import semiring_system
from .terms import Signature, TermError, format_term
from .workspace import Workspace, builtin_workspace, parse_env

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_UNRESOLVED = 0, 1, 2, 3
MAX_POSET_SIZE = 4


class UsageError(Exception):
    pass


class Output:
    """Buffered lines, written at the end so output is all-or-nothing and ordered."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[str] = []

    def text(self, line: str = "") -> None:
        if self.fmt == "text":
            self.lines.append(line)

    def record(self, **fields) -> None:
        if self.fmt == "records":
            self.lines.append(" ".join(f"{k}={_q(v)}" for k, v in fields.items()))

    def report(self, r: Report) -> None:
        self.lines.append(r.records() if self.fmt == "records" else r.text())


# -- instances ---------------------------------------------------------------

def resolve_instance(name: str, ws: Workspace, S: RegSys | None = None) -> AlgebraSpec:
    """Built-in instance names, or a finite algebra declared in the workspace."""
    if name == "tropical":
        A = tropical()
    elif name == "natinf":
        A = natinf()
    elif name.startswith("slice:"):
        parts = name.split(":")
        try:
            L = int(parts[1])
        except (IndexError, ValueError):
            raise UsageError(f"bad slice instance {name!r}; use slice:L or slice:L:letters") from None
        if len(parts) > 2:
            alphabet = parts[2]
        elif S is not None and S.gens:
            alphabet = "".join(S.gens)
        else:
            alphabet = "a"
        A = languages.lang_slice(alphabet, L)
    elif name == "diamond":
        A = finite.diamond().spec()
    elif re.fullmatch(r"chain\d+", name):
        A = finite.chain(int(name[5:])).spec()
    elif name.startswith("two-point"):
        f = name.split(":", 1)[1] if ":" in name else "id"
        if f not in ("id", "top", "bot"):
            raise UsageError("two-point takes :id, :top or :bot")
        A = finite.two_point(f).spec()
    elif name in ws.algebras:
        alg = ws.finite_algebra(name)
        report = alg.validate()
        if not report.ok:
            raise UsageError(f"algebra {name} is not an ordered algebra:\n{report.text()}")
        A = alg.spec()
    else:
        raise UsageError(f"unknown instance {name!r}")
    return A.bind(S.sig) if S is not None else A


def _env(args, A: AlgebraSpec, S: RegSys) -> dict:
    if args.env:
        return parse_env(Path(args.env).read_text(encoding="utf-8"), A, S.sig)
    if args.instance.startswith("slice:"):
        return languages.letter_env(S, L=int(args.instance.split(":")[1]))
    if S.gens:
        raise UsageError(f"no binding for generator(s) {', '.join(S.gens)}; pass --env")
    return {}


# -- verbs -------------------------------------------------------------------

def cmd_unfold(args, ws: Workspace, out: Output) -> int:
    S = ws.system(args.system)
    if args.depth < 0 or args.depth > args.max_depth:
        raise UsageError(f"depth must be between 0 and --max-depth ({args.max_depth})")
    t = unfold(S, args.depth)
    out.text(format_term(t))
    out.record(system=S.name, depth=args.depth, term=format_term(t))
    return EXIT_OK


def cmd_eval(args, ws: Workspace, out: Output) -> int:
    if args.graph:
        G = parse_graph(Path(args.graph).read_text(encoding="utf-8"))
        if not (args.source and args.target):
            raise UsageError("--graph needs --source and --target")
        S, env = graph_to_linear_system(G, args.source, args.target)
        args.instance = args.instance or "tropical"
        A = resolve_instance(args.instance, ws, S)
        if args.env:
            env.update(parse_env(Path(args.env).read_text(encoding="utf-8"), A, S.sig))
    else:
        if not args.system:
            raise UsageError("eval needs a system name or --graph")
        if not args.instance:
            raise UsageError("eval needs --instance")
        S = ws.system(args.system)
        A = resolve_instance(args.instance, ws, S)
        env = _env(args, A, S)
    strategy_name = args.strategy or ("cap" if args.instance == "natinf" else "stabilize")
    if strategy_name == "cap":
        strategy = CapAndFlag(args.cap, args.budget)
    else:
        strategy = StabilizeWithin(args.budget)
    outcome = kleene_eval(S, A, env, strategy)
    if not isinstance(outcome, Converged) and args.certify_linear:
        if args.instance != "natinf":
            raise UsageError("--certify-linear applies to the natinf instance")
        verdicts = divergence_certificate_linear(S, env)
        outcome = Converged({x: v.value for x, v in verdicts.items()}, outcome.iterations, S.root,
                            refined=True)
    names = S.sysvars if args.all else (S.root,)
    if isinstance(outcome, Converged):
        how = "refined by linear certificate" if outcome.refined else f"converged after {outcome.iterations} iterations"
        out.text(f"# {how}")
        out.record(status="refined" if outcome.refined else "converged", iterations=outcome.iterations,
                   root=S.root, instance=A.name)
        for x in names:
            out.text(f"{x} = {A.fmt(outcome.values[x])}")
            out.record(var=x, value=A.fmt(outcome.values[x]))
        return EXIT_OK
    flags = ", ".join(outcome.flags)
    out.text(f"# unresolved after {outcome.iterations} iterations: {flags}")
    out.record(status="unresolved", iterations=outcome.iterations, root=S.root, instance=A.name,
               flags=",".join(outcome.flags))
    for x in names:
        out.text(f"{x} >= {A.fmt(outcome.last[x])} (last iterate)")
        out.record(var=x, last=A.fmt(outcome.last[x]))
    return EXIT_UNRESOLVED


def cmd_eq(args, ws: Workspace, out: Output) -> int:
    S1, S2 = ws.system(args.left), ws.system(args.right)
    witness = bisim_witness(S1, S2)
    if witness is None:
        out.text("equal")
        out.record(result="equal", left=S1.name, right=S2.name)
        return EXIT_OK
    depth, pos = witness
    where = ".".join(str(i + 1) for i in pos) or "root"
    out.text(f"distinct at depth {depth} (position {where})")
    out.record(result="distinct", left=S1.name, right=S2.name, depth=depth, position=where)
    return EXIT_VIOLATION


def _words_line(ws_) -> str:
    words = languages.shortlex(ws_)
    return " ".join(w or "ε" for w in words) if words else "∅"


def cmd_solve(args, ws: Workspace, out: Output) -> int:
    S = ws.system(args.system)
    if S.sig.profile is None:
        raise UsageError(f"signature {S.sig.name} has no semiring profile")
    letters = dict(kv.split("=", 1) for kv in args.letters.split(",")) if args.letters else {}
    modes = [m for m in ("slices", "cfg") if getattr(args, m) is not None]
    if args.arden:
        modes.append("arden")
    if len(modes) != 1:
        raise UsageError("choose exactly one of --arden, --slices L, --cfg L")
    mode = modes[0]
    if mode == "arden":
        if classify(S, linear=True, left_linear=args.left) is SysClass.ALGEBRAIC:
            raise NotLinear(f"not linear: {S.name}")
        sol = regular.arden_solve_linear(S, letters, left=args.left)
        R = sol[S.root]
        n, start, finals, delta = R.determinize()
        out.text(f"# automaton for {S.root}: {n} states")
        out.text(f"start {start}")
        out.text("final " + " ".join(map(str, sorted(finals))))
        out.record(system=S.name, var=S.root, states=n, start=start,
                   final=",".join(map(str, sorted(finals))))
        for (q, a), t in sorted(delta.items()):
            out.text(f"{q} -{a}-> {t}")
            out.record(src=q, letter=a, dst=t)
        if args.show_slice is not None:
            out.text("slice " + _words_line(regular.regular_slice(R, args.show_slice)))
        return EXIT_OK
    L = getattr(args, mode)
    if L < 0:
        raise UsageError("length bound must be nonnegative")
    if mode == "slices":
        alphabet = "".join(dict.fromkeys(letters.get(g, g) for g in S.gens)) or "a"
        A = languages.lang_slice(alphabet, L).bind(S.sig)
        env = languages.letter_env(S, letters, L)
        outcome = kleene_eval(S, A, env, StabilizeWithin(args.budget))
        if not isinstance(outcome, Converged):
            out.text("# unresolved")
            return EXIT_UNRESOLVED
        words = outcome.value
    else:
        words = languages.cfg_slice_oracle(S, L, letters)
    out.text(_words_line(words))
    out.record(system=S.name, mode=mode, bound=L, words=",".join(w or "ε" for w in languages.shortlex(words)))
    return EXIT_OK


def cmd_laws(args, ws: Workspace, out: Output) -> int:
    suites = ["monad", "em", "distrib", "continuity"] if args.suite == "all" else [args.suite]
    reports: list[Report] = []
    if args.poset or args.algebra:
        if args.poset:
            decl = ws.poset(args.poset)
            P = decl.poset()
            if len(P) > 6:
                raise BoundExceeded(f"poset {P.name} has {len(P)} elements; bound is 6")
            if "monad" in suites:
                reports.append(check_monad_laws(P, max_size=6))
            if "em" in suites:
                reports.append(check_em_laws(P, decl.sup_table(), max_size=6))
        if args.algebra and ("continuity" in suites or "em" in suites):
            alg = ws.finite_algebra(args.algebra)
            reports.append(validate_algebra(alg.spec()))
            reports.append(check_continuity(alg.spec(), depth=args.depth))
    else:
        if not 1 <= args.poset_size <= MAX_POSET_SIZE:
            raise BoundExceeded(f"--poset-size must be between 1 and {MAX_POSET_SIZE}")
        if args.depth > 3:
            raise BoundExceeded("--depth must be at most 3")
        monad_size = args.monad_size or (4 if args.poset_size == 3 else args.poset_size)
        if monad_size > MAX_POSET_SIZE + 1:
            raise BoundExceeded(f"--monad-size must be at most {MAX_POSET_SIZE + 1}")
        reports = run_law_suites(suites, args.poset_size, monad_size, args.depth)
    for r in reports:
        out.report(r)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_VIOLATION


def cmd_check_ineq(args, ws: Workspace, out: Output) -> int:
    sig = ws.sigs[args.sig] if args.sig else Signature.semiring()
    A = resolve_instance(args.instance, ws).bind(sig)
    E = parse_inequalities(Path(args.file).read_text(encoding="utf-8"), sig)
    if args.samples is None and A.elements is not None:
        mode = "exhaustive"
    else:
        mode = ("sampled", args.samples or 200)
    report = check_inequalities(E, A, mode, seed=args.seed)
    out.report(report)
    return EXIT_OK if report.ok else EXIT_VIOLATION


def _morphism(spec: str, ws: Workspace) -> tuple[Callable, AlgebraSpec, AlgebraSpec]:
    kind, _, rest = spec.partition(":")
    if kind == "truncate":
        try:
            hi, lo = (int(x) for x in rest.split(":")[:2])
        except ValueError:
            raise UsageError("truncate needs truncate:L1:L2") from None
        alphabet = rest.split(":")[2] if rest.count(":") >= 2 else "a"
        A, B = languages.lang_slice(alphabet, hi), languages.lang_slice(alphabet, lo)
        return (lambda X: frozenset(w for w in X if len(w) <= lo)), A, B
    if kind == "identity":
        A = resolve_instance(rest, ws)
        return (lambda x: x), A, A
    if kind == "bottom":
        A = resolve_instance(rest, ws)
        return (lambda x: A.bottom), A, A
    raise UsageError(f"unknown morphism {spec!r}; use truncate:L1:L2[:letters], identity:I or bottom:I")


def cmd_check_morphism(args, ws: Workspace, out: Output) -> int:
    h, A, B = _morphism(args.map, ws)
    systems = []
    if {"plus", "times", "zero", "one"} <= set(A.ops) and A.sample is not None:
        rng = random.Random(args.seed)
        for _ in range(args.systems):
            S = semiring_system(rng, ("a", "b"))
            systems.append((S, {g: A.sample(rng) for g in S.gens}))
    report = check_morphism(h, A, B, systems, samples=args.samples, seed=args.seed)
    out.report(report)
    return EXIT_OK if report.ok else EXIT_VIOLATION


# -- parser ------------------------------------------------------------------

def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = parser.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=d(0), help="seed for sampled checks (default 0)")
    g.add_argument("--budget", type=int, default=d(DEFAULT_BUDGET), help="iteration budget")
    g.add_argument("--cap", type=int, default=d(DEFAULT_CAP), help="magnitude cap for capped iteration")
    g.add_argument("--max-depth", type=int, default=d(64), help="largest unfolding depth accepted")
    g.add_argument("--out", default=d(None), help="write output to this file")
    g.add_argument("--format", choices=("text", "records"), default=d("text"))
    g.add_argument("-w", "--workspace", action="append", default=d([]),
                   help="workspace file with sig/sys/poset/algebra blocks (repeatable)")
    g.add_argument("--no-demo", action="store_true", default=d(False), help="do not load the demo fixtures")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regalg", description="Regular coterms in ordered algebras.")
    _global_flags(p, suppress=False)
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        _global_flags(sp, suppress=True)
        sp.set_defaults(fn=fn)
        return sp

    sp = verb("unfold", cmd_unfold, "print the depth-d approximant of a system")
    sp.add_argument("system")
    sp.add_argument("--depth", type=int, default=3)

    sp = verb("eval", cmd_eval, "least solution of a system in an instance")
    sp.add_argument("system", nargs="?")
    sp.add_argument("--instance", help="tropical, natinf, slice:L[:letters], diamond, chainN, "
                                       "two-point[:f] or a workspace algebra")
    sp.add_argument("--env", help="bindings file: 'name = literal-or-term' lines")
    sp.add_argument("--strategy", choices=("stabilize", "cap"))
    sp.add_argument("--certify-linear", action="store_true",
                    help="refine an unresolved natinf run with the linear divergence certificate")
    sp.add_argument("--all", action="store_true", help="print every system variable")
    sp.add_argument("--graph", help="edge-list file; evaluates the shortest-path system")
    sp.add_argument("--source")
    sp.add_argument("--target")

    sp = verb("eq", cmd_eq, "decide whether two systems denote the same tree")
    sp.add_argument("left")
    sp.add_argument("right")

    sp = verb("solve", cmd_solve, "language solvers for semiring systems")
    sp.add_argument("system")
    sp.add_argument("--arden", action="store_true", help="exact automaton for a linear system")
    sp.add_argument("--left", action="store_true", help="left-linear reading for --arden")
    sp.add_argument("--show-slice", type=int, metavar="L", help="with --arden, also print words up to L")
    sp.add_argument("--slices", type=int, metavar="L", help="words up to length L by iteration")
    sp.add_argument("--cfg", type=int, metavar="L", help="words up to length L by grammar derivation")
    sp.add_argument("--letters", help="generator letters, e.g. a=x,b=y (default: the names)")

    sp = verb("laws", cmd_laws, "exhaustive monad, algebra, distributive-law and continuity checks")
    sp.add_argument("suite", choices=("monad", "em", "distrib", "continuity", "all"))
    sp.add_argument("--poset-size", type=int, default=3)
    sp.add_argument("--monad-size", type=int)
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--poset", help="check a workspace poset (with its sup overrides) instead")
    sp.add_argument("--algebra", help="check a workspace algebra instead")

    sp = verb("check-ineq", cmd_check_ineq, "check inequalities in an instance")
    sp.add_argument("file")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--sig", help="workspace signature for the terms (default: semiring)")
    sp.add_argument("--samples", type=int, help="sample environments instead of enumerating")

    sp = verb("check-morphism", cmd_check_morphism, "check that a map between instances is a morphism")
    sp.add_argument("map", help="truncate:L1:L2[:letters], identity:INSTANCE or bottom:INSTANCE")
    sp.add_argument("--samples", type=int, default=24)
    sp.add_argument("--systems", type=int, default=20, help="sampled systems for sup preservation")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    out = Output(args.format)
    try:
        if args.budget < 1:
            raise UsageError("--budget must be at least 1")
        if args.cap < 1:
            raise UsageError("--cap must be at least 1")
        ws = Workspace() if args.no_demo else builtin_workspace()
        for path in args.workspace:
            ws.load_file(path)
        code = args.fn(args, ws, out)
    except (UsageError, ParseError, TermError, AlgebraError, BoundExceeded, KeyError, ValueError,
            OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        if isinstance(exc, NotLinear):
            msg = f"not linear: {exc}" if not str(exc).startswith("not linear") else str(exc)
        print(f"regalg: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    text = "\n".join(out.lines) + ("\n" if out.lines else "")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
