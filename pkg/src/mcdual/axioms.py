"""The equational theory as an executable conformance suite.

Each axiom is a pair of terms over the variables a, b, c (``var(0..2)``).
Inequalities ``s ≤ t`` are encoded as the equation ``s ∧ t = s``.  The
suite checks an axiom on a carrier either on every tuple of grid elements
or on seeded random samples.

Grid checks are evidence that the axioms hold, not a proof; in particular
the schema of axiom 8 is only checked for ``n, m`` up to a bound.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterator, Optional, Sequence

from . import unit_interval as ui
from .algebra import Algebra, GeneratedElement, compile_term, interpret
from .posets import MonotoneMap
from .terms import (
    Const,
    Join,
    Meet,
    Odot,
    Oplus,
    Term,
    Var,
    balanced,
    free_vars,
    render_term,
    rho_term,
)
from .unit_interval import ONE, ZERO, DyadicGrid, format_rational

a, b, c = Var(0), Var(1), Var(2)
VAR_NAMES = ("a", "b", "c")


def le(s: Term, t: Term) -> tuple[Term, Term]:
    return Meet(s, t), s


def lam(q: Fraction) -> Const:
    return Const(q)


@dataclass(frozen=True)
class AxiomId:
    group: str
    params: tuple = ()

    def __str__(self) -> str:
        if not self.params:
            return self.group
        return f"{self.group}({','.join(_fmt_param(p) for p in self.params)})"


def _fmt_param(p) -> str:
    return format_rational(p) if isinstance(p, Fraction) else str(p)


@dataclass(frozen=True)
class Axiom:
    id: AxiomId
    lhs: Term
    rhs: Term
    nvars: int
    text: str


@dataclass(frozen=True)
class Strategy:
    """Exhaustive grid enumeration when ``samples`` is None, otherwise seeded sampling."""

    grid: int = 3
    samples: Optional[int] = None
    seed: int = 0

    @classmethod
    def exhaustive(cls, grid: int) -> "Strategy":
        return cls(grid=grid)

    @classmethod
    def sampled(cls, grid: int, samples: int, seed: int) -> "Strategy":
        return cls(grid=grid, samples=samples, seed=seed)

    @property
    def dyadic_grid(self) -> DyadicGrid:
        return DyadicGrid(self.grid)

    def describe(self) -> str:
        if self.samples is None:
            return f"grid 2^-{self.grid}, exhaustive"
        return f"grid 2^-{self.grid}, {self.samples} samples, seed {self.seed}"

    def rng(self, key: str) -> random.Random:
        return random.Random(f"{self.seed}/{key}")


@dataclass
class ConformanceReport:
    axiom: AxiomId
    text: str
    strategy: str
    passed: bool
    checked: int
    assignment: Optional[tuple] = None
    counterexample: Optional[dict] = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        s = f"{status} {str(self.axiom):<18} {self.text}  [{self.strategy}; {self.checked} checked]"
        if self.counterexample is not None:
            s += "  counterexample: " + ", ".join(f"{k}={v}" for k, v in self.counterexample.items())
        return s

    def to_json(self) -> dict:
        return {
            "axiom": str(self.axiom),
            "text": self.text,
            "strategy": self.strategy,
            "passed": self.passed,
            "checked": self.checked,
            "counterexample": self.counterexample,
        }


def render_element(x: Any) -> Any:
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, MonotoneMap):
        return {e: format_rational(v) for e, v in x.items()}
    if isinstance(x, GeneratedElement):
        return render_term(x.term)
    if isinstance(x, tuple):
        return [render_element(u) for u in x]
    return repr(x)


# ------------------------------------------------------------- catalogue


def _ax(group: str, lhs: Term, rhs: Term, text: str, params: tuple = ()) -> Axiom:
    nv = max(free_vars(lhs) | free_vars(rhs), default=-1) + 1
    return Axiom(AxiomId(group, params), lhs, rhs, nv, text)


def _leq_ax(group: str, s: Term, t: Term, text: str, params: tuple = ()) -> Axiom:
    lhs, rhs = le(s, t)
    return _ax(group, lhs, rhs, text, params)


def basic_axioms() -> list[Axiom]:
    """Groups 1-5: lattice, the two monoids, distributivity, axiom 5."""
    zero, one = lam(ZERO), lam(ONE)
    return [
        _ax("1a", Join(a, b), Join(b, a), "a∨b = b∨a"),
        _ax("1b", Meet(a, b), Meet(b, a), "a∧b = b∧a"),
        _ax("1c", Join(a, Join(b, c)), Join(Join(a, b), c), "a∨(b∨c) = (a∨b)∨c"),
        _ax("1d", Meet(a, Meet(b, c)), Meet(Meet(a, b), c), "a∧(b∧c) = (a∧b)∧c"),
        _ax("1e", Join(a, Meet(a, b)), a, "a∨(a∧b) = a"),
        _ax("1f", Meet(a, Join(a, b)), a, "a∧(a∨b) = a"),
        _ax("1g", Join(a, zero), a, "a∨0 = a"),
        _ax("1h", Meet(a, one), a, "a∧1 = a"),
        _ax("1i", Join(a, Meet(b, c)), Meet(Join(a, b), Join(a, c)), "a∨(b∧c) = (a∨b)∧(a∨c)"),
        _ax("1j", Meet(a, Join(b, c)), Join(Meet(a, b), Meet(a, c)), "a∧(b∨c) = (a∧b)∨(a∧c)"),
        _ax("2a", Oplus(Oplus(a, b), c), Oplus(a, Oplus(b, c)), "(a⊕b)⊕c = a⊕(b⊕c)"),
        _ax("2b", Oplus(a, b), Oplus(b, a), "a⊕b = b⊕a"),
        _ax("2c", Oplus(a, zero), a, "a⊕0 = a"),
        _ax("2d", Oplus(a, one), one, "a⊕1 = 1"),
        _ax("3a", Odot(Odot(a, b), c), Odot(a, Odot(b, c)), "(a⊙b)⊙c = a⊙(b⊙c)"),
        _ax("3b", Odot(a, b), Odot(b, a), "a⊙b = b⊙a"),
        _ax("3c", Odot(a, one), a, "a⊙1 = a"),
        _ax("3d", Odot(a, zero), zero, "a⊙0 = 0"),
        _ax("4a", Oplus(Join(a, b), c), Join(Oplus(a, c), Oplus(b, c)), "(a∨b)⊕c = (a⊕c)∨(b⊕c)"),
        _ax("4b", Oplus(Meet(a, b), c), Meet(Oplus(a, c), Oplus(b, c)), "(a∧b)⊕c = (a⊕c)∧(b⊕c)"),
        _ax("4c", Odot(Join(a, b), c), Join(Odot(a, c), Odot(b, c)), "(a∨b)⊙c = (a⊙c)∨(b⊙c)"),
        _ax("4d", Odot(Meet(a, b), c), Meet(Odot(a, c), Odot(b, c)), "(a∧b)⊙c = (a⊙c)∧(b⊙c)"),
        _leq_ax("5", Odot(Oplus(a, b), c), Oplus(a, Odot(b, c)), "(a⊕b)⊙c ≤ a⊕(b⊙c)"),
    ]


def axiom_6(q: Fraction) -> Axiom:
    t = f"a ≤ (a⊙{format_rational(ONE - q)})⊕{format_rational(q)}"
    return _leq_ax("6", a, Oplus(Odot(a, lam(ONE - q)), lam(q)), t, (q,))


def axiom_7(q: Fraction) -> Axiom:
    t = f"(a⊕{format_rational(q)})⊙{format_rational(ONE - q)} ≤ a"
    return _leq_ax("7", Odot(Oplus(a, lam(q)), lam(ONE - q)), a, t, (q,))


def axiom_8(n: int, m: int, q: Fraction) -> Axiom:
    """a ∧ (b ⊕ n·(c⊙λ)) ≤ (a ⊙ (c⊕λ)^m) ∨ b; empty sums/products are dropped."""
    left = b if n == 0 else Oplus(b, balanced(Oplus, [Odot(c, lam(q))] * n))
    right = a if m == 0 else Odot(a, balanced(Odot, [Oplus(c, lam(q))] * m))
    qs = format_rational(q)
    text = f"a∧(b⊕{n}·(c⊙{qs})) ≤ (a⊙(c⊕{qs})^{m})∨b"
    return _leq_ax("8", Meet(a, left), Join(right, b), text, (n, m, q))


TABLES: dict[str, tuple[str, Callable[[Fraction, Fraction], Fraction], type]] = {
    "9": ("join", ui.join, Join),
    "10": ("meet", ui.meet, Meet),
    "11": ("oplus", ui.oplus, Oplus),
    "12": ("odot", ui.odot, Odot),
}
_TABLE_SYMBOL = {"9": "∨", "10": "∧", "11": "⊕", "12": "⊙"}


def instantiate(axiom_id: AxiomId) -> Axiom:
    """The concrete axiom for an id (not available for the constant tables)."""
    g, p = axiom_id.group, axiom_id.params
    if g == "6":
        return axiom_6(*p)
    if g == "7":
        return axiom_7(*p)
    if g == "8":
        return axiom_8(*p)
    for ax in basic_axioms():
        if ax.id.group == g:
            return ax
    raise KeyError(f"unknown axiom {axiom_id}")


# --------------------------------------------------------------- checking


def _assignments(A: Algebra, nvars: int, strategy: Strategy, key: str) -> Iterator[tuple]:
    grid = strategy.dyadic_grid
    if strategy.samples is None:
        elems = list(A.elements(grid))
        yield from itertools.product(elems, repeat=nvars)
    else:
        rng = strategy.rng(key)
        for _ in range(strategy.samples):
            yield tuple(A.sample(rng, grid) for _ in range(nvars))


def check_equation(A: Algebra, ax: Axiom, strategy: Strategy) -> ConformanceReport:
    left = compile_term(A, ax.lhs)
    right = compile_term(A, ax.rhs)
    checked = 0
    for env in _assignments(A, ax.nvars, strategy, str(ax.id)):
        checked += 1
        if not A.eq(left(env), right(env)):
            return ConformanceReport(
                ax.id,
                ax.text,
                strategy.describe(),
                False,
                checked,
                env,
                {VAR_NAMES[i]: render_element(v) for i, v in enumerate(env)},
            )
    return ConformanceReport(ax.id, ax.text, strategy.describe(), True, checked)


def check_table(A: Algebra, group: str, strategy: Strategy) -> ConformanceReport:
    """Constant table: for all grid α, β, the algebra must agree with [0, 1]."""
    opname, scalar, _ = TABLES[group]
    sym = _TABLE_SYMBOL[group]
    grid = strategy.dyadic_grid.values()
    text = f"α{sym}β = γ whenever α{sym}β = γ in [0,1]"
    checked = 0
    for alpha, beta in itertools.product(grid, repeat=2):
        checked += 1
        gamma = scalar(alpha, beta)
        if not A.eq(A.op(opname, A.const(alpha), A.const(beta)), A.const(gamma)):
            return ConformanceReport(
                AxiomId(group),
                text,
                strategy.describe(),
                False,
                checked,
                (alpha, beta, gamma),
                {"α": format_rational(alpha), "β": format_rational(beta), "γ": format_rational(gamma)},
            )
    return ConformanceReport(AxiomId(group), text, strategy.describe(), True, checked)


def check_axiom(A: Algebra, axiom_id: AxiomId, strategy: Strategy) -> ConformanceReport:
    if axiom_id.group in TABLES:
        return check_table(A, axiom_id.group, strategy)
    return check_equation(A, instantiate(axiom_id), strategy)


def recheck(A: Algebra, report: ConformanceReport) -> bool:
    """True iff the stored counterexample really violates the axiom."""
    if report.passed or report.assignment is None:
        return False
    if report.axiom.group in TABLES:
        opname, _, _ = TABLES[report.axiom.group]
        alpha, beta, gamma = report.assignment
        return not A.eq(A.op(opname, A.const(alpha), A.const(beta)), A.const(gamma))
    ax = instantiate(report.axiom)
    env = dict(enumerate(report.assignment))
    return not A.eq(interpret(A, ax.lhs, env), interpret(A, ax.rhs, env))


def mc_axiom_ids(grid: int, nm_bound: int = 3) -> list[AxiomId]:
    ids = [ax.id for ax in basic_axioms()]
    qs = DyadicGrid(grid).values()
    ids += [AxiomId("6", (q,)) for q in qs]
    ids += [AxiomId("7", (q,)) for q in qs]
    ids += [
        AxiomId("8", (n, m, q))
        for n in range(nm_bound + 1)
        for m in range(nm_bound + 1)
        for q in qs
    ]
    ids += [AxiomId(g) for g in TABLES]
    return ids


def check_all_mc(A: Algebra, strategy: Strategy, nm_bound: int = 3) -> list[ConformanceReport]:
    return [check_axiom(A, i, strategy) for i in mc_axiom_ids(strategy.grid, nm_bound)]


# -------------------------------------------------------------- δ axioms


def _rho(A: Algebra, xs: Sequence) -> Any:
    return compile_term(A, rho_term(len(xs) - 1))(xs)


def _sandwich_ok(A: Algebra, xs: Sequence, value, n: int) -> bool:
    r = _rho(A, xs[: n + 1])
    # 1/2^(n-1) exceeds 1 at n = 0; ⊕ saturates, so cap the constant at 1
    slack = A.const(min(ONE, ui.dyadic(n - 1)))
    return A.leq(r, value) and A.leq(value, A.op("oplus", r, slack))


def _sequence(prefix: Sequence, tail, length: int) -> list:
    return [prefix[i] if i < len(prefix) else tail for i in range(length)]


def random_explicit(A: Algebra, rng: random.Random, grid: DyadicGrid, max_prefix: int):
    k = rng.randint(1, max_prefix)
    return [A.sample(rng, grid) for _ in range(k)], A.sample(rng, grid)


def check_mc_infty(
    A: Algebra, strategy: Strategy, n_bound: int = 8, spec_samples: int = 500
) -> list[ConformanceReport]:
    """Axioms D1-D4 for δ.

    D1 and D3 check that the closed-form δ equals x *and* that x lies in every
    sandwich [ρₙ, ρₙ ⊕ 1/2^(n-1)] of the raw sequence for n ≤ ``n_bound``,
    so the closed form is corroborated by the ρ iteration.  D2 and D4 run on
    ``spec_samples`` seeded random eventually-constant sequences.
    """
    grid = strategy.dyadic_grid
    desc = f"{strategy.describe()}; n ≤ {n_bound}"
    reports = []

    def xs_source(key: str):
        if strategy.samples is None:
            return [x for x in A.elements(grid)]
        rng = strategy.rng(key)
        return [A.sample(rng, grid) for _ in range(strategy.samples)]

    # D1
    checked, bad = 0, None
    for x in xs_source("D1"):
        checked += 1
        d = A.delta_explicit([x], x)
        seq = [x] * (n_bound + 1)
        if not A.eq(d, x) or not all(_sandwich_ok(A, seq, x, n) for n in range(n_bound + 1)):
            bad = x
            break
    reports.append(_mk("D1", "δ(x,x,x,…) = x", desc, bad is None, checked, None if bad is None else {"x": render_element(bad)}, (bad,)))

    # D3
    checked, bad = 0, None
    for x in xs_source("D3"):
        checked += 1
        d = A.delta_ominus_dyadic(x)
        seq = [A.ominus(x, ui.dyadic(i)) for i in range(n_bound + 1)]
        if not A.eq(d, x) or not all(_sandwich_ok(A, seq, x, n) for n in range(n_bound + 1)):
            bad = x
            break
    reports.append(
        _mk("D3", "δ(x⊖1/2⁰, x⊖1/2¹, …) = x", desc, bad is None, checked, None if bad is None else {"x": render_element(bad)}, (bad,))
    )

    # D2
    rng = strategy.rng("D2")
    checked, bad = 0, None
    for _ in range(spec_samples):
        checked += 1
        xp, xt = random_explicit(A, rng, grid, n_bound + 1)
        yp = [A.sample(rng, grid) for _ in xp]
        yt = A.sample(rng, grid)
        zp = [A.op("join", u, v) for u, v in zip(xp, yp)]
        zt = A.op("join", xt, yt)
        if not A.leq(A.delta_explicit(xp, xt), A.delta_explicit(zp, zt)):
            bad = {"x": render_element(tuple(xp) + (xt,)), "y": render_element(tuple(yp) + (yt,))}
            break
    reports.append(_mk("D2", "δ(x₀,x₁,…) ≤ δ(x₀∨y₀,x₁∨y₁,…)", desc, bad is None, checked, bad))

    # D4
    rng = strategy.rng("D4")
    checked, bad = 0, None
    for _ in range(spec_samples):
        xp, xt = random_explicit(A, rng, grid, n_bound + 1)
        d = A.delta_explicit(xp, xt)
        seq = _sequence(xp, xt, n_bound + 1)
        for n in range(n_bound + 1):
            checked += 1
            if not _sandwich_ok(A, seq, d, n):
                bad = {"n": n, "x": render_element(tuple(xp)), "tail": render_element(xt)}
                break
        if bad:
            break
    reports.append(_mk("D4", "ρₙ ≤ δ(x₀,x₁,…) ≤ ρₙ ⊕ 1/2^(n-1)", desc, bad is None, checked, bad))
    return reports


def _mk(group, text, desc, passed, checked, cex, assignment=None) -> ConformanceReport:
    return ConformanceReport(
        AxiomId(group), text, desc, passed, checked, None if passed else assignment, None if passed else cex
    )


# ------------------------------------------------------------ derived laws


def check_derived(A: Algebra, strategy: Strategy) -> list[ConformanceReport]:
    """Consequences of the axioms: monotonicity, residuation, triangle
    inequalities, the definition of d↑ as an infimum, and the ρ chain."""
    reports = []
    desc = strategy.describe()
    grid = strategy.dyadic_grid

    def run(name: str, text: str, nvars: int, pred: Callable[[tuple], bool]) -> None:
        checked = 0
        for env in _assignments(A, nvars, strategy, name):
            checked += 1
            if not pred(env):
                reports.append(
                    ConformanceReport(
                        AxiomId(name), text, desc, False, checked, env,
                        {VAR_NAMES[i] if i < 3 else f"x{i}": render_element(v) for i, v in enumerate(env)},
                    )
                )
                return
        reports.append(ConformanceReport(AxiomId(name), text, desc, True, checked))

    for op, sym in (("oplus", "⊕"), ("odot", "⊙"), ("join", "∨"), ("meet", "∧")):
        run(
            f"mono-{op}",
            f"a ≤ b ⇒ a{sym}c ≤ b{sym}c",
            3,
            lambda e, op=op: not A.leq(e[0], e[1]) or A.leq(A.op(op, e[0], e[2]), A.op(op, e[1], e[2])),
        )

    qs = grid.values()
    run(
        "residuation",
        "b ≤ a⊕λ ⇔ b⊖λ ≤ a (all grid λ)",
        2,
        lambda e: all(
            A.leq(e[1], A.op("oplus", e[0], A.const(q))) == A.leq(A.ominus(e[1], q), e[0]) for q in qs
        ),
    )
    run(
        "triangle-dup",
        "d↑(a,c) ≤ d↑(a,b) ⊕ d↑(b,c)",
        3,
        lambda e: A.dist_up(e[0], e[2]) <= ui.oplus(A.dist_up(e[0], e[1]), A.dist_up(e[1], e[2])),
    )
    run(
        "triangle-dist",
        "dist(a,c) ≤ dist(a,b) ⊕ dist(b,c)",
        3,
        lambda e: A.dist(e[0], e[2]).dist <= ui.oplus(A.dist(e[0], e[1]).dist, A.dist(e[1], e[2]).dist),
    )

    def definitional(e) -> bool:
        d = A.dist_up(e[0], e[1])
        for q in set(qs) | {d}:
            if A.leq(e[1], A.op("oplus", e[0], A.const(q))) != (q >= d):
                return False
        return True

    run("dup-infimum", "λ ∈ ↑ₐᵇ ⇔ λ ≥ d↑(a,b); the infimum is attained", 2, definitional)

    def rho_chain(e) -> bool:
        for n in range(len(e) - 1):
            r0 = _rho(A, e[: n + 1])
            r1 = _rho(A, e[: n + 2])
            if not (A.leq(r0, r1) and A.leq(r1, A.op("oplus", r0, A.const(ui.dyadic(n))))):
                return False
        return True

    n_rho = 3 if strategy.samples is None else 6
    if strategy.samples is None and len(grid) ** n_rho > 50_000:
        n_rho = 2
    run("rho-chain", "ρₙ ≤ ρₙ₊₁ ≤ ρₙ ⊕ 1/2ⁿ", n_rho, rho_chain)
    return reports


def summarize(reports: Sequence[ConformanceReport]) -> dict:
    failed = [r for r in reports if not r.passed]
    return {
        "total": len(reports),
        "passed": len(reports) - len(failed),
        "failed": len(failed),
        "failures": [r.to_json() for r in failed],
    }
