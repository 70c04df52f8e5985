"""The dual adjunction at desk scale.

``Max`` of a function algebra generated by finitely many maps on a finite
poset X is computed as the quotient of X by the kernel preorder of the
generators: each point of X gives the evaluation morphism ``ev_x`` and two
points give the same morphism exactly when every generator agrees on them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Optional, Sequence

from .algebra import term_map
from .posets import (
    FinPoset,
    FinPreorder,
    MonotoneMap,
    NotMonotone,
    PosetError,
    Quotient,
    is_monotone_between,
    quotient_by_kernel,
    up_set_indicators,
)
from .stone_weierstrass import ApproximationTrace, approximate, check_separation
from .terms import Term, render_term
from .unit_interval import format_rational


@dataclass(frozen=True)
class DualSpace:
    """Max of a generated algebra: the quotient poset, the projection from X,
    and for each point the element of X whose evaluation it is."""

    X: FinPreorder
    generators: tuple[MonotoneMap, ...]
    quotient: Quotient

    @property
    def points(self) -> FinPoset:
        return self.quotient.poset

    @property
    def projection(self) -> dict[str, str]:
        return self.quotient.projection

    def witness(self, point: str) -> str:
        """Representative of a point: the element of X it evaluates at."""
        return point

    def evaluate(self, point: str, f: MonotoneMap) -> Fraction:
        """``point(f)`` for an element f of the generated algebra."""
        return f(self.witness(point))

    def epsilon(self, f: MonotoneMap) -> MonotoneMap:
        """``ε(f) = ev_f``: the map on Max sending a point to its value at f."""
        for e, rep in self.projection.items():
            if f(e) != f(rep):
                raise PosetError("map does not factor through the kernel of the generators")
        return MonotoneMap(self.points, tuple(f(p) for p in self.points.elements))

    def induced_generators(self) -> list[MonotoneMap]:
        return [self.epsilon(g) for g in self.generators]

    def to_doc(self) -> dict:
        return {
            **self.points.to_doc(),
            "classes": {r: list(m) for r, m in self.quotient.classes().items()},
        }


def max_of_generated(X: FinPreorder, generators: Sequence[MonotoneMap]) -> DualSpace:
    for g in generators:
        if g.domain != X:
            raise PosetError("generator defined on a different poset")
    return DualSpace(X, tuple(generators), quotient_by_kernel(X, list(generators)))


@dataclass
class UnitReport:
    injective: bool
    surjective: bool
    order_iso: bool
    injective_counterexample: Optional[tuple] = None
    surjective_failure: Optional[str] = None
    order_counterexample: Optional[tuple] = None
    errors: list[Fraction] = field(default_factory=list)
    certificates: list[Term] = field(default_factory=list)
    traces: list[ApproximationTrace] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "injective": self.injective,
            "surjective": self.surjective,
            "order_iso": self.order_iso,
            "injective_counterexample": list(self.injective_counterexample)
            if self.injective_counterexample
            else None,
            "surjective_failure": self.surjective_failure,
            "order_counterexample": list(self.order_counterexample) if self.order_counterexample else None,
            "errors": [format_rational(e) for e in self.errors],
            "certificates": [render_term(t) for t in self.certificates],
        }


def eta(X: FinPreorder) -> tuple[DualSpace, dict[str, str]]:
    """``Max C(X)`` (computed from the separating up-set indicators) and η_X."""
    D = max_of_generated(X, up_set_indicators(X))
    return D, dict(D.projection)


def unit_eta(X: FinPreorder) -> UnitReport:
    """Is ``η_X : X → Max C(X)`` a bijective order-isomorphism?"""
    D, h = eta(X)
    inj_cex = None
    seen: dict[str, str] = {}
    for x in X.elements:
        if h[x] in seen:
            inj_cex = (seen[h[x]], x)
            break
        seen[h[x]] = x
    image = set(h.values())
    missing = [p for p in D.points.elements if p not in image]
    order_cex = None
    for x, y in itertools.product(X.elements, repeat=2):
        if X.le(x, y) != D.points.le(h[x], h[y]):
            order_cex = (x, y)
            break
    injective = inj_cex is None
    surjective = not missing
    return UnitReport(
        injective=injective,
        surjective=surjective,
        order_iso=injective and surjective and order_cex is None,
        injective_counterexample=inj_cex,
        surjective_failure=missing[0] if missing else None,
        order_counterexample=order_cex,
    )


def unit_epsilon(
    X: FinPreorder,
    generators: Sequence[MonotoneMap],
    eps,
    targets: Sequence[MonotoneMap],
) -> UnitReport:
    """Injectivity of ε and surjectivity at precision ``eps``.

    Each target (a monotone map on Max) is approximated by a term over the
    generators; the report carries the certificate terms and their errors.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    D = max_of_generated(X, generators)
    gens_on_max = D.induced_generators()
    ok, pair = check_separation(D.points, gens_on_max)
    assert ok, f"generators fail to separate Max points {pair}"

    report = UnitReport(injective=True, surjective=True, order_iso=True)
    for t in targets:
        if t.domain != D.points:
            raise PosetError("target is not a map on the computed dual space")
        term, trace = approximate(D.points, gens_on_max, t, eps)
        report.certificates.append(term)
        report.errors.append(trace.error)
        report.traces.append(trace)
        if trace.error > eps:
            report.surjective = False
            report.surjective_failure = repr(t)

    # distinct elements of the generated algebra stay distinct under ε
    elements = list(generators) + [term_map(X, generators, t) for t in report.certificates]
    for f, g in itertools.combinations(elements, 2):
        if (f != g) != (D.epsilon(f) != D.epsilon(g)):
            report.injective = False
            report.injective_counterexample = (repr(f), repr(g))
            break
    report.order_iso = report.injective and report.surjective
    return report


# ---------------------------------------------------------------- functors


def pullback_functor(X: FinPreorder, Y: FinPreorder, g: Mapping[str, str]) -> Callable[[MonotoneMap], MonotoneMap]:
    """``C(g): C(Y) → C(X)``, ``f ↦ f ∘ g``."""
    if not is_monotone_between(X, Y, g):
        raise NotMonotone("g is not a monotone map X → Y")

    def C_g(f: MonotoneMap) -> MonotoneMap:
        if f.domain != Y:
            raise PosetError("argument is not a map on the codomain of g")
        return MonotoneMap(X, tuple(f(g[x]) for x in X.elements))

    return C_g


def max_of_pullback(X: FinPreorder, Y: FinPreorder, g: Mapping[str, str]) -> dict[str, str]:
    """``Max(C(g)): Max C(X) → Max C(Y)``, ``φ ↦ φ ∘ C(g)``.

    A point of Max C(Y) is identified by its values on the separating family
    of Y; the image of ``ev_x`` is located by matching those values.
    """
    C_g = pullback_functor(X, Y, g)
    DX, _ = eta(X)
    DY, _ = eta(Y)
    family = list(DY.generators)
    signature = {q: tuple(f(q) for f in family) for q in DY.points.elements}
    lookup = {sig: q for q, sig in signature.items()}
    out = {}
    for p in DX.points.elements:
        sig = tuple(C_g(f)(DX.witness(p)) for f in family)
        out[p] = lookup[sig]
    return out


def eta_naturality_holds(X: FinPreorder, Y: FinPreorder, g: Mapping[str, str]) -> bool:
    """``Max(C(g)) ∘ η_X = η_Y ∘ g`` on every element of X."""
    _, eta_X = eta(X)
    _, eta_Y = eta(Y)
    m = max_of_pullback(X, Y, g)
    return all(m[eta_X[x]] == eta_Y[g[x]] for x in X.elements)


# ------------------------------------------------------------ adjunction


def monotone_functions(X: FinPreorder, Y: FinPreorder) -> Iterator[dict[str, str]]:
    """Every monotone function X → Y (brute force)."""
    for image in itertools.product(Y.elements, repeat=len(X)):
        g = dict(zip(X.elements, image))
        if is_monotone_between(X, Y, g):
            yield g


def hat(D: DualSpace, X: FinPreorder, g: Mapping[str, str]) -> Callable[[MonotoneMap], MonotoneMap]:
    """``ĝ: A → C(X)``, ``a ↦ (x ↦ g(x)(a))`` for monotone ``g: X → Max(A)``."""
    if not is_monotone_between(X, D.points, g):
        raise NotMonotone("g is not a monotone map into Max(A)")

    def g_hat(a: MonotoneMap) -> MonotoneMap:
        return MonotoneMap(X, tuple(D.evaluate(g[x], a) for x in X.elements))

    return g_hat


def check(D: DualSpace, X: FinPreorder, f: Callable[[MonotoneMap], MonotoneMap]) -> dict[str, str]:
    """``f̌: X → Max(A)``, ``x ↦ ev_x ∘ f``.

    A morphism out of the generated algebra is fixed by its generator values,
    so ``ev_x ∘ f`` is the point of Max agreeing with it on every generator.
    """
    images = [f(gen) for gen in D.generators]
    out = {}
    for x in X.elements:
        sig = tuple(img(x) for img in images)
        match = [p for p in D.points.elements if tuple(D.evaluate(p, gen) for gen in D.generators) == sig]
        if not match:
            raise PosetError(f"ev_{x} ∘ f is not an evaluation at a point of Max(A)")
        out[x] = match[0]
    return out
