"""Constructive ordered Stone-Weierstrass approximation on finite posets.

Given monotone generators that order-separate a finite poset X and a monotone
target ψ, :func:`approximate` builds an explicit term φ over the generators
(variable ``i`` is generator ``i``) with ``max |ψ - φ| ≤ ε``:

1. for every anchor x, the points ``z`` with ``ψ(z) ≥ ψ(x) + ε`` are cut off
   by separators α_y with α_y(x) = 0 and α_y = 1 near y;
2. φ_x = α_{y1} ⊕ … ⊕ α_{yk} ⊕ ψ(x) matches ψ at x and never drops more
   than ε below ψ;
3. anchors are picked in element order until the sets
   ``V_x = {z : φ_x(z) < ψ(z) + ε}`` cover X, and φ is the meet of their φ_x.

When ψ is one of the generators the certificate is that variable itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import term_map
from .posets import FinPreorder, MonotoneMap, PosetError
from .terms import Const, Meet, OminusConst, Oplus, Term, Var, balanced, oplus_n, render_term
from .unit_interval import ZERO, format_rational, unit


class SeparationFailure(PosetError):
    def __init__(self, x: str, y: str):
        super().__init__(f"no generator separates {x} from {y} (need φ({x}) < φ({y}))")
        self.pair = (x, y)


def check_separation(
    X: FinPreorder, generators: Sequence[MonotoneMap]
) -> tuple[bool, Optional[tuple[str, str]]]:
    """Whenever ``x ≱ y`` some generator must satisfy ``φ(x) < φ(y)``."""
    for x in X.elements:
        for y in X.elements:
            if X.le(y, x):
                continue
            if not any(g(x) < g(y) for g in generators):
                return False, (x, y)
    return True, None


@dataclass(frozen=True)
class SeparatorStep:
    y: str
    generator: int
    c: Fraction
    n: int
    region: tuple[str, ...]
    term: Term

    def to_json(self) -> dict:
        return {
            "y": self.y,
            "generator": self.generator,
            "c": format_rational(self.c),
            "n": self.n,
            "region": list(self.region),
            "term": render_term(self.term),
        }


def separator_term(
    X: FinPreorder, generators: Sequence[MonotoneMap], x: str, y: str
) -> SeparatorStep:
    """Term ψ with ψ(x) = 0 and ψ = 1 on ``{z : φ(z) > c}`` (a region containing y).

    φ is the first generator with φ(x) < φ(y); c is the midpoint of
    φ(x) and φ(y) and ψ = n·(φ ⊖ φ(x)) with the least n such that
    n(c - φ(x)) ≥ 1.
    """
    for i, g in enumerate(generators):
        gx, gy = g(x), g(y)
        if gx < gy:
            c = (gx + gy) / 2
            n = math.ceil(1 / (c - gx))
            term = oplus_n(OminusConst(Var(i), gx), n)
            region = tuple(z for z in X.elements if g(z) > c)
            return SeparatorStep(y, i, c, n, region, term)
    raise SeparationFailure(x, y)


@dataclass
class AnchorTrace:
    anchor: str
    lam: Fraction
    U: tuple[str, ...]
    separators: list[SeparatorStep]
    term: Term
    values: MonotoneMap
    V: tuple[str, ...]
    a1: bool
    a2: bool

    def to_json(self) -> dict:
        return {
            "anchor": self.anchor,
            "lambda": format_rational(self.lam),
            "U": list(self.U),
            "separators": [s.to_json() for s in self.separators],
            "term": render_term(self.term),
            "values": {e: format_rational(v) for e, v in self.values.items()},
            "V": list(self.V),
            "a1": self.a1,
            "a2": self.a2,
        }


@dataclass
class ApproximationTrace:
    epsilon: Fraction
    target: MonotoneMap
    anchors: list[AnchorTrace] = field(default_factory=list)
    cover: list[str] = field(default_factory=list)
    term: Optional[Term] = None
    values: Optional[MonotoneMap] = None
    error: Optional[Fraction] = None

    def to_json(self) -> dict:
        return {
            "epsilon": format_rational(self.epsilon),
            "target": {e: format_rational(v) for e, v in self.target.items()},
            "anchors": [a.to_json() for a in self.anchors],
            "cover": list(self.cover),
            "term": render_term(self.term) if self.term is not None else None,
            "values": {e: format_rational(v) for e, v in self.values.items()} if self.values else None,
            "error": format_rational(self.error) if self.error is not None else None,
        }


def sup_error(f: MonotoneMap, g: MonotoneMap) -> Fraction:
    return max((abs(u - v) for u, v in zip(f.values, g.values)), default=ZERO)


def _anchor(
    X: FinPreorder, generators: Sequence[MonotoneMap], target: MonotoneMap, x: str, eps: Fraction
) -> AnchorTrace:
    lam = target(x)
    U = tuple(z for z in X.elements if target(z) < lam + eps)
    outside = [y for y in X.elements if y not in U]
    covered: set[str] = set()
    steps: list[SeparatorStep] = []
    for y in outside:
        if y in covered:
            continue
        # y ∉ U forces x ≱ y, since ψ is monotone
        step = separator_term(X, generators, x, y)
        steps.append(step)
        covered.update(step.region)
    term = balanced(Oplus, [s.term for s in steps] + [Const(lam)])
    values = term_map(X, generators, term)
    V = tuple(z for z in X.elements if values(z) < target(z) + eps)
    a1 = values(x) == lam
    a2 = all(values(z) > target(z) - eps for z in X.elements)
    return AnchorTrace(x, lam, U, steps, term, values, V, a1, a2)


def approximate(
    X: FinPreorder, generators: Sequence[MonotoneMap], target: MonotoneMap, eps
) -> tuple[Term, ApproximationTrace]:
    """Term over the generators within ``eps`` of ``target`` in the sup metric."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if target.domain != X or any(g.domain != X for g in generators):
        raise PosetError("target and generators must be maps on the given poset")
    for v in target.values:
        unit(v)
    trace = ApproximationTrace(eps, target)
    trace.anchors = [_anchor(X, generators, target, x, eps) for x in X.elements]

    covered: set[str] = set()
    chosen: list[AnchorTrace] = []
    for anc in trace.anchors:
        if len(covered) == len(X):
            break
        if not set(anc.V) <= covered:
            chosen.append(anc)
            covered.update(anc.V)
    trace.cover = [a.anchor for a in chosen]

    exact = next((i for i, g in enumerate(generators) if g == target), None)
    if exact is not None:
        # the anchor meet is only guaranteed within eps; a generator is exact
        term: Term = Var(exact)
    elif chosen:
        term = balanced(Meet, [a.term for a in chosen])
    else:
        term = Const(ZERO)  # empty poset: any term will do
    values = term_map(X, generators, term)
    err = sup_error(values, target)
    if err > eps:
        raise AssertionError(f"certificate failed: error {err} exceeds {eps}")
    trace.term, trace.values, trace.error = term, values, err
    return term, trace


def verify_certificate(
    X: FinPreorder, generators: Sequence[MonotoneMap], target: MonotoneMap, term: Term, eps
) -> Fraction:
    """Re-evaluate ``term`` on every point and return its sup error (must be ≤ eps)."""
    err = sup_error(term_map(X, generators, term), target)
    if err > Fraction(eps):
        raise AssertionError(f"error {err} exceeds {eps}")
    return err
