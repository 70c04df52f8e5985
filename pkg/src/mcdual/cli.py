"""Command-line front end.

Subcommands: ``eval``, ``axioms``, ``poset {check,urysohn,quotient,product}``,
``dualize`` and ``approximate``.  Exit status is 0 on success, 1 when a
conformance check fails, 2 on input errors.  ``--format json`` switches to
JSON lines (one object per line, keys sorted).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import axioms as ax
from .algebra import Dual, FunctionAlgebra, SabotagedScalar, Scalar
from .duality import eta, max_of_generated, unit_epsilon, unit_eta
from .files import load_functions, read_json
from .posets import (
    FinPreorder,
    load_poset,
    load_preorder,
    product_poset,
    quotient_by_kernel,
    urysohn_separator,
)
from .stone_weierstrass import approximate, check_separation
from .terms import eval_exact, eval_with_precision, parse_term, render_term
from .unit_interval import format_rational, parse_rational, unit

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


class Output:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def emit(self, text: str, record: dict) -> None:
        if self.fmt == "json":
            self.stream.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
        else:
            self.stream.write(text + "\n")


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> Fraction:
    q = _rational(text)
    if q <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return q


def _read_poset(path: str, preorder: bool = False) -> FinPreorder:
    doc = read_json(path)
    return load_preorder(doc) if preorder else load_poset(doc)


# ------------------------------------------------------------------ eval


def cmd_eval(args, out: Output) -> int:
    if args.term is not None:
        text = args.term
    elif args.term_file is not None:
        text = Path(args.term_file).read_text()
    else:
        raise InputError("give --term or --term-file")
    t = parse_term(text)
    env = {}
    for binding in args.var or []:
        name, _, value = binding.partition("=")
        if not name.isdigit() or not value:
            raise InputError(f"bad binding {binding!r}; expected INDEX=RATIONAL")
        env[int(name)] = unit(value)
    if args.epsilon is not None:
        iv = eval_with_precision(t, env, args.epsilon)
        out.emit(
            f"{iv} width {format_rational(iv.width)} <= {format_rational(args.epsilon)}",
            {
                "lo": format_rational(iv.lo),
                "hi": format_rational(iv.hi),
                "width": format_rational(iv.width),
                "epsilon": format_rational(args.epsilon),
            },
        )
    else:
        v = eval_exact(t, env)
        out.emit(format_rational(v), {"value": format_rational(v)})
    return EXIT_OK


# ---------------------------------------------------------------- axioms


def _algebra(spec: str, dual: bool):
    if spec == "scalar":
        A, sampled = Scalar(), False
    elif spec == "sabotaged":
        A, sampled = SabotagedScalar(), False
    else:
        A, sampled = FunctionAlgebra(_read_poset(spec)), True
    return (Dual(A) if dual else A), sampled


def cmd_axioms(args, out: Output) -> int:
    A, sampled = _algebra(args.algebra, args.dual)
    if args.samples is not None:
        sampled = True
    if sampled:
        if args.seed is None:
            raise InputError("--seed is required for sampled checks")
        strategy = ax.Strategy.sampled(args.grid, args.samples or 200, args.seed)
    else:
        strategy = ax.Strategy(grid=args.grid, seed=args.seed or 0)
    reports: list[ax.ConformanceReport] = []
    groups: list[tuple[str, Callable[[], list]]] = []
    if args.schema in ("all", "mc"):
        groups.append(("mc", lambda: ax.check_all_mc(A, strategy, args.nm_bound)))
    if args.schema in ("all", "mcinf"):
        groups.append(("mcinf", lambda: ax.check_mc_infty(A, strategy, args.n_bound, args.spec_samples)))
    if args.schema in ("all", "derived"):
        groups.append(("derived", lambda: ax.check_derived(A, strategy)))
    for name, run in groups:
        for r in run():
            reports.append(r)
            out.emit(r.line(), {"schema": name, **r.to_json()})
    summary = {"algebra": A.name, **ax.summarize(reports)}
    out.emit(
        f"summary: {summary['passed']}/{summary['total']} passed, {summary['failed']} failed",
        {"summary": summary},
    )
    if args.summary:
        Path(args.summary).write_text(json.dumps(summary, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    return EXIT_OK if summary["failed"] == 0 else EXIT_FAIL


# ----------------------------------------------------------------- poset


def cmd_poset(args, out: Output) -> int:
    if args.action == "check":
        X = _read_poset(args.file, args.preorder)
        doc = X.to_doc()
        out.emit(json.dumps(doc, sort_keys=True), {"poset": doc, "antisymmetric": X.is_antisymmetric()})
        return EXIT_OK
    if args.action == "urysohn":
        X = _read_poset(args.file)
        psi = urysohn_separator(X, args.x, args.y)
        doc = psi.to_doc()["values"]
        out.emit(" ".join(f"{e}:{v}" for e, v in doc.items()), {"values": doc})
        return EXIT_OK
    if args.action == "quotient":
        X = _read_poset(args.file, args.preorder)
        maps = load_functions(args.maps, X, "maps")
        Q = quotient_by_kernel(X, maps)
        rec = {"poset": Q.poset.to_doc(), "projection": Q.projection}
        out.emit(json.dumps(rec, sort_keys=True), rec)
        return EXIT_OK
    if args.action == "product":
        P = product_poset(_read_poset(args.file), _read_poset(args.other))
        doc = P.to_doc()
        out.emit(json.dumps(doc, sort_keys=True), {"poset": doc})
        return EXIT_OK
    raise InputError(f"unknown poset action {args.action}")


# --------------------------------------------------------------- dualize


def cmd_dualize(args, out: Output) -> int:
    X = _read_poset(args.poset, args.preorder)
    if args.generators is None:
        report = unit_eta(X)
        D, h = eta(X)
        out.emit("max: " + json.dumps(D.to_doc(), sort_keys=True), {"max": D.to_doc()})
        out.emit(
            f"eta: injective={report.injective} surjective={report.surjective} order_iso={report.order_iso}",
            {"eta": report.to_json(), "map": h},
        )
        return EXIT_OK if report.order_iso else EXIT_FAIL
    gens = load_functions(args.generators, X, "generators")
    D = max_of_generated(X, gens)
    out.emit("max: " + json.dumps(D.to_doc(), sort_keys=True), {"max": D.to_doc()})
    if args.targets is None:
        return EXIT_OK
    if args.epsilon is None:
        raise InputError("--targets needs --epsilon")
    targets = load_functions(args.targets, D.points, "targets")
    report = unit_epsilon(X, gens, args.epsilon, targets)
    out.emit(
        f"epsilon: injective={report.injective} surjective_at_eps={report.surjective}",
        {"epsilon_unit": report.to_json()},
    )
    for t, err, cert in zip(targets, report.errors, report.certificates):
        out.emit(
            f"certificate error {format_rational(err)}: {render_term(cert)}",
            {"target": t.to_doc()["values"], "error": format_rational(err), "term": render_term(cert)},
        )
    return EXIT_OK if report.surjective and report.injective else EXIT_FAIL


# ----------------------------------------------------------- approximate


def cmd_approximate(args, out: Output) -> int:
    X = _read_poset(args.poset)
    gens = load_functions(args.generators, X, "generators")
    (target,) = load_functions(args.target, X, "targets")[:1]
    ok, pair = check_separation(X, gens)
    if not ok:
        out.emit(
            f"separation fails for pair {pair[0]} {pair[1]}",
            {"separated": False, "pair": list(pair)},
        )
        return EXIT_FAIL
    term, trace = approximate(X, gens, target, args.epsilon)
    out.emit(
        f"error {format_rational(trace.error)} <= {format_rational(args.epsilon)}\nterm {render_term(term)}",
        {"error": format_rational(trace.error), "epsilon": format_rational(args.epsilon), "term": render_term(term)},
    )
    if args.trace:
        Path(args.trace).write_text(json.dumps(trace.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    return EXIT_OK


# ------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="mcdual", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate a term exactly or to a given precision")
    e.add_argument("--term")
    e.add_argument("--term-file")
    e.add_argument("--var", action="append", metavar="I=R", help="bind var(I) to rational R")
    e.add_argument("--epsilon", type=_positive)
    e.set_defaults(func=cmd_eval)

    a = sub.add_parser("axioms", parents=[common], help="check the axioms on a carrier")
    a.add_argument("--algebra", default="scalar", help="scalar, sabotaged, or a poset file for C(X)")
    a.add_argument("--dual", action="store_true", help="check the order-dual algebra instead")
    a.add_argument("--grid", type=int, default=3, help="grid exponent k (step 2^-k)")
    a.add_argument("--nm-bound", type=int, default=3)
    a.add_argument("--n-bound", type=int, default=8, help="largest n for the δ sandwich")
    a.add_argument("--spec-samples", type=int, default=500)
    a.add_argument("--samples", type=int)
    a.add_argument("--seed", type=int)
    a.add_argument("--schema", choices=("all", "mc", "mcinf", "derived"), default="all")
    a.add_argument("--summary", help="write a JSON summary here")
    a.set_defaults(func=cmd_axioms)

    ps = sub.add_parser("poset", parents=[common], help="finite poset utilities")
    ps.add_argument("action", choices=("check", "urysohn", "quotient", "product"))
    ps.add_argument("file")
    ps.add_argument("other", nargs="?", help="second poset file (product)")
    ps.add_argument("--x")
    ps.add_argument("--y")
    ps.add_argument("--maps", help="function file (quotient)")
    ps.add_argument("--preorder", action="store_true", help="accept a preorder")
    ps.set_defaults(func=cmd_poset)

    d = sub.add_parser("dualize", parents=[common], help="compute Max and the unit maps")
    d.add_argument("--poset", required=True)
    d.add_argument("--preorder", action="store_true")
    d.add_argument("--generators")
    d.add_argument("--targets")
    d.add_argument("--epsilon", type=_positive)
    d.set_defaults(func=cmd_dualize)

    ap = sub.add_parser("approximate", parents=[common], help="Stone-Weierstrass approximation with certificate")
    ap.add_argument("--poset", required=True)
    ap.add_argument("--generators", required=True)
    ap.add_argument("--target", required=True)
    ap.add_argument("--epsilon", type=_positive, required=True)
    ap.add_argument("--trace")
    ap.set_defaults(func=cmd_approximate)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "poset":
        if args.action == "urysohn" and (args.x is None or args.y is None):
            print("error: urysohn needs --x and --y", file=sys.stderr)
            return EXIT_INPUT
        if args.action == "product" and args.other is None:
            print("error: product needs two poset files", file=sys.stderr)
            return EXIT_INPUT
        if args.action == "quotient" and args.maps is None:
            print("error: quotient needs --maps", file=sys.stderr)
            return EXIT_INPUT
    out = Output(getattr(args, "format", "text"))
    try:
        return args.func(args, out)
    except (InputError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
