"""Concrete carriers for the operations ⊕, ⊙, ∨, ∧ and rational constants.

Every carrier exposes the same small interface (:class:`Algebra`), so terms,
axioms, metrics and Cauchy-sequence utilities work on all of them:

``Scalar``            [0, 1] itself
``FunctionAlgebra``   monotone maps from a finite poset into [0, 1]
``Product``           finite products, componentwise
``Generated``         subalgebra of a function algebra generated by given maps
``Dual``              order-dual: ⊕ ↔ ⊙, ∨ ↔ ∧, constants λ ↦ 1 - λ
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterator, Mapping, Optional, Sequence

from . import unit_interval as ui
from .posets import FinPreorder, MonotoneMap, enumerate_monotone_maps, random_monotone_map
from .terms import (
    BINARY_NODES,
    Binary,
    Const,
    ConstantSeq,
    Delta,
    DeltaNotSupported,
    ExplicitThenConstant,
    OminusConst,
    OminusDyadic,
    SequenceSpec,
    Term,
    UnboundVariable,
    Var,
    delta_explicit,
    eval_delta_exact,
    eval_exact,
    free_vars,
    random_term,
)
from .unit_interval import ONE, ZERO, DyadicGrid

OPS = ("oplus", "odot", "join", "meet")


class AlgebraError(ValueError):
    pass


class CarrierMismatch(AlgebraError):
    pass


class NotEnumerable(AlgebraError):
    pass


class NotDefined(AlgebraError):
    """``ess`` requested for an element that is not close to a constant."""


@dataclass(frozen=True)
class DistanceReport:
    d_up_xy: Fraction
    d_up_yx: Fraction
    dist: Fraction
    witness: Any = None


class Algebra:
    """Common interface; subclasses implement the carrier-specific parts."""

    name = "algebra"

    # carrier-specific
    def op(self, name: str, a, b):
        raise NotImplementedError

    def const(self, lam: Fraction):
        raise NotImplementedError

    def contains(self, a) -> bool:
        raise NotImplementedError

    def dist_up(self, x, y) -> Fraction:
        raise NotImplementedError

    def elements(self, grid: DyadicGrid) -> Iterator:
        raise NotEnumerable(f"{self.name} has no finite grid enumeration")

    def sample(self, rng: random.Random, grid: DyadicGrid):
        raise NotImplementedError

    def delta_explicit(self, prefix: Sequence, tail):
        raise DeltaNotSupported(f"{self.name} has no δ")

    # derived
    def ominus(self, a, lam: Fraction):
        return self.op("odot", a, self.const(ONE - lam))

    def eq(self, a, b) -> bool:
        return a == b

    def leq(self, a, b) -> bool:
        return self.eq(self.op("meet", a, b), a)

    def witness(self, x, y) -> Any:
        return None

    def dist(self, x, y) -> DistanceReport:
        up_xy = self.dist_up(x, y)
        up_yx = self.dist_up(y, x)
        return DistanceReport(up_xy, up_yx, ui.join(up_xy, up_yx), self.witness(x, y))

    def delta_spec(self, spec: SequenceSpec, env: Mapping[int, Any]):
        """δ of a structured sequence whose entries are terms over ``env``."""
        if isinstance(spec, ConstantSeq):
            x = interpret(self, spec.x, env)
            return self.delta_explicit([x], x)
        if isinstance(spec, OminusDyadic):
            return self.delta_ominus_dyadic(interpret(self, spec.base, env))
        if isinstance(spec, ExplicitThenConstant):
            prefix = [interpret(self, p, env) for p in spec.prefix]
            return self.delta_explicit(prefix, interpret(self, spec.tail, env))
        raise DeltaNotSupported(f"no exact δ for {type(spec).__name__}")

    def delta_ominus_dyadic(self, x):
        raise DeltaNotSupported(f"{self.name} has no δ")

    def __repr__(self) -> str:
        return self.name


# ------------------------------------------------------------------ scalar

_SCALAR_OPS: dict[str, Callable[[Fraction, Fraction], Fraction]] = {
    "oplus": ui.oplus,
    "odot": ui.odot,
    "join": ui.join,
    "meet": ui.meet,
}


class Scalar(Algebra):
    name = "scalar"

    def op(self, name, a, b):
        return _SCALAR_OPS[name](a, b)

    def const(self, lam):
        return ui.unit(lam)

    def contains(self, a) -> bool:
        return isinstance(a, Fraction) and ZERO <= a <= ONE

    def dist_up(self, x, y):
        return ui.dist_up_scalar(x, y)

    def elements(self, grid):
        return iter(grid)

    def sample(self, rng, grid):
        return rng.choice(grid.values())

    def delta_explicit(self, prefix, tail):
        return delta_explicit(prefix, tail)

    def delta_ominus_dyadic(self, x):
        return x


class SabotagedScalar(Scalar):
    """[0, 1] with ⊕ replaced by max -- a negative control that must fail."""

    name = "sabotaged-scalar"

    def op(self, name, a, b):
        if name == "oplus":
            return ui.join(a, b)
        return super().op(name, a, b)


# ---------------------------------------------------------- function algebra


class FunctionAlgebra(Algebra):
    """Monotone maps ``X → [0, 1]`` with pointwise operations."""

    def __init__(self, X: FinPreorder):
        self.X = X
        self.name = f"C({len(X)}-point poset)"

    def _check(self, *maps: MonotoneMap) -> None:
        for f in maps:
            if not isinstance(f, MonotoneMap) or f.domain != self.X:
                raise CarrierMismatch("element is not a monotone map on this poset")

    def op(self, name, a, b):
        self._check(a, b)
        fn = _SCALAR_OPS[name]
        return MonotoneMap(self.X, tuple(fn(u, v) for u, v in zip(a.values, b.values)))

    def const(self, lam):
        return MonotoneMap.constant(self.X, lam)

    def contains(self, a) -> bool:
        return isinstance(a, MonotoneMap) and a.domain == self.X

    def dist_up(self, x, y):
        self._check(x, y)
        return max((ui.dist_up_scalar(u, v) for u, v in zip(x.values, y.values)), default=ZERO)

    def witness(self, x, y):
        best, where = None, None
        for e, u, v in zip(self.X.elements, x.values, y.values):
            d = abs(v - u)
            if best is None or d > best:
                best, where = d, e
        return where

    def elements(self, grid):
        return enumerate_monotone_maps(self.X, grid)

    def sample(self, rng, grid):
        return random_monotone_map(self.X, rng, grid)

    def delta_explicit(self, prefix, tail):
        self._check(*prefix, tail)
        vals = tuple(
            delta_explicit([p.values[i] for p in prefix], tail.values[i]) for i in range(len(self.X))
        )
        return MonotoneMap(self.X, vals)

    def delta_ominus_dyadic(self, x):
        self._check(x)
        return x


# ------------------------------------------------------------------ product


class Product(Algebra):
    def __init__(self, factors: Sequence[Algebra]):
        self.factors = tuple(factors)
        self.name = "product(" + ", ".join(f.name for f in self.factors) + ")"

    def _check(self, *xs) -> None:
        for x in xs:
            if not isinstance(x, tuple) or len(x) != len(self.factors):
                raise CarrierMismatch("element is not a tuple of the right length")

    def op(self, name, a, b):
        self._check(a, b)
        return tuple(F.op(name, u, v) for F, u, v in zip(self.factors, a, b))

    def const(self, lam):
        return tuple(F.const(lam) for F in self.factors)

    def contains(self, a) -> bool:
        return (
            isinstance(a, tuple)
            and len(a) == len(self.factors)
            and all(F.contains(u) for F, u in zip(self.factors, a))
        )

    def eq(self, a, b) -> bool:
        return all(F.eq(u, v) for F, u, v in zip(self.factors, a, b))

    def dist_up(self, x, y):
        self._check(x, y)
        return max((F.dist_up(u, v) for F, u, v in zip(self.factors, x, y)), default=ZERO)

    def witness(self, x, y):
        best, where = None, None
        for k, (F, u, v) in enumerate(zip(self.factors, x, y)):
            d = F.dist(u, v).dist
            if best is None or d > best:
                best, where = d, (k, F.witness(u, v))
        return where

    def elements(self, grid):
        return itertools.product(*(list(F.elements(grid)) for F in self.factors))

    def sample(self, rng, grid):
        return tuple(F.sample(rng, grid) for F in self.factors)

    def delta_explicit(self, prefix, tail):
        return tuple(
            F.delta_explicit([p[k] for p in prefix], tail[k]) for k, F in enumerate(self.factors)
        )

    def delta_ominus_dyadic(self, x):
        return tuple(F.delta_ominus_dyadic(u) for F, u in zip(self.factors, x))


# --------------------------------------------------------------- generated


@dataclass(frozen=True, eq=False)
class GeneratedElement:
    """A term over generator indices together with the map it induces.

    Equality is semantic: two elements are equal when their maps are.
    """

    term: Term
    map: MonotoneMap

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GeneratedElement):
            return NotImplemented
        return self.map == other.map

    def __hash__(self) -> int:
        return hash(self.map)


def term_map(X: FinPreorder, generators: Sequence[MonotoneMap], term: Term) -> MonotoneMap:
    """Pointwise evaluation of a term whose variable ``i`` is generator ``i``."""
    vals = []
    for k in range(len(X)):
        env = {i: g.values[k] for i, g in enumerate(generators)}
        vals.append(eval_exact(term, env))
    return MonotoneMap(X, tuple(vals))


class Generated(Algebra):
    """The subalgebra of ``C(X)`` generated by ``generators`` (constants included)."""

    def __init__(self, X: FinPreorder, generators: Sequence[MonotoneMap]):
        for g in generators:
            if g.domain != X:
                raise CarrierMismatch("generator defined on a different poset")
        self.X = X
        self.generators = tuple(generators)
        self.ambient = FunctionAlgebra(X)
        self.name = f"<{len(self.generators)} generators on {len(X)} points>"

    def generator(self, i: int) -> GeneratedElement:
        return GeneratedElement(Var(i), self.generators[i])

    def element(self, term: Term) -> GeneratedElement:
        for idx in free_vars(term):
            if idx >= len(self.generators):
                raise UnboundVariable(idx)
        return GeneratedElement(term, term_map(self.X, self.generators, term))

    def op(self, name, a, b):
        if not (isinstance(a, GeneratedElement) and isinstance(b, GeneratedElement)):
            raise CarrierMismatch("element is not a generated element")
        return GeneratedElement(BINARY_NODES[name](a.term, b.term), self.ambient.op(name, a.map, b.map))

    def const(self, lam):
        lam = ui.unit(lam)
        return GeneratedElement(Const(lam), self.ambient.const(lam))

    def ominus(self, a, lam):
        lam = ui.unit(lam)
        return GeneratedElement(
            OminusConst(a.term, lam), self.ambient.ominus(a.map, lam)
        )

    def contains(self, a) -> bool:
        return isinstance(a, GeneratedElement) and a.map.domain == self.X

    def dist_up(self, x, y):
        return self.ambient.dist_up(x.map, y.map)

    def witness(self, x, y):
        return self.ambient.witness(x.map, y.map)

    def sample(self, rng, grid, depth: int = 3):
        consts = tuple(grid.values())
        t = random_term(rng, depth, len(self.generators), consts)
        return self.element(t)


# -------------------------------------------------------------------- dual


class Dual(Algebra):
    """Same carrier, ⊕ ↔ ⊙ and ∨ ↔ ∧ swapped, constant λ read as 1 - λ."""

    _SWAP = {"oplus": "odot", "odot": "oplus", "join": "meet", "meet": "join"}

    def __init__(self, inner: Algebra):
        self.inner = inner
        self.name = f"dual({inner.name})"

    def op(self, name, a, b):
        return self.inner.op(self._SWAP[name], a, b)

    def const(self, lam):
        return self.inner.const(ONE - ui.unit(lam))

    def contains(self, a) -> bool:
        return self.inner.contains(a)

    def eq(self, a, b) -> bool:
        return self.inner.eq(a, b)

    def dist_up(self, x, y):
        return self.inner.dist_up(y, x)

    def witness(self, x, y):
        return self.inner.witness(x, y)

    def elements(self, grid):
        return self.inner.elements(grid)

    def sample(self, rng, grid):
        return self.inner.sample(rng, grid)


# -------------------------------------------------------------- operations


def apply_op(A: Algebra, op: str, *args):
    """Apply an operation symbol to elements of ``A``.

    ``op`` is one of ``oplus odot join meet`` (two arguments), ``const``
    (one rational) or ``ominus`` (element, rational).
    """
    if op in OPS:
        if len(args) != 2:
            raise AlgebraError(f"{op} takes 2 arguments, got {len(args)}")
        for a in args:
            if not A.contains(a):
                raise CarrierMismatch(f"argument {a!r} is not in {A.name}")
        return A.op(op, *args)
    if op == "const":
        (lam,) = args
        return A.const(lam)
    if op == "ominus":
        a, lam = args
        if not A.contains(a):
            raise CarrierMismatch(f"argument {a!r} is not in {A.name}")
        return A.ominus(a, ui.unit(lam))
    raise AlgebraError(f"unknown operation {op!r}")


def interpret(A: Algebra, t: Term, env: Mapping[int, Any]):
    """Value of ``t`` in ``A`` with variable ``i`` bound to ``env[i]``."""
    if isinstance(t, Var):
        try:
            return env[t.index]
        except (KeyError, IndexError):
            raise UnboundVariable(t.index) from None
    if isinstance(t, Const):
        return A.const(t.value)
    if isinstance(t, Binary):
        return A.op(t.symbol, interpret(A, t.left, env), interpret(A, t.right, env))
    if isinstance(t, OminusConst):
        return A.ominus(interpret(A, t.arg, env), t.lam)
    if isinstance(t, Delta):
        return A.delta_spec(t.spec, env)
    raise TypeError(f"not a term: {t!r}")


def compile_term(A: Algebra, t: Term) -> Callable[[Sequence[Any]], Any]:
    """Closure evaluating ``t`` in ``A`` on a positional assignment; constants
    are built once."""
    if isinstance(t, Var):
        i = t.index
        return lambda env: env[i]
    if isinstance(t, Const):
        c = A.const(t.value)
        return lambda env: c
    if isinstance(t, Binary):
        f, g, name, op = compile_term(A, t.left), compile_term(A, t.right), t.symbol, A.op
        return lambda env: op(name, f(env), g(env))
    if isinstance(t, OminusConst):
        f, lam = compile_term(A, t.arg), t.lam
        return lambda env: A.ominus(f(env), lam)
    return lambda env: interpret(A, t, dict(enumerate(env)))


def dist_up(A: Algebra, x, y) -> Fraction:
    return A.dist_up(x, y)


def dist(A: Algebra, x, y) -> DistanceReport:
    return A.dist(x, y)


def dist_up_definitional(A: Algebra, x, y, grid: DyadicGrid, candidates: Sequence[Fraction] = ()) -> Fraction:
    """inf {λ : y ≤ x ⊕ λ}, searched over grid values plus ``candidates``.

    Uses only the algebra's operations and order.  When the true infimum is
    among the candidates (it is attained), the result is exact.
    """
    best = ONE
    for lam in sorted(set(grid.values()) | {ui.unit(c) for c in candidates}):
        if A.leq(y, A.op("oplus", x, A.const(lam))):
            best = lam
            break
    return best


def _values_of(A: Algebra, x) -> tuple[Fraction, ...]:
    if isinstance(A, Scalar):
        return (x,)
    if isinstance(A, FunctionAlgebra):
        A._check(x)
        return x.values
    if isinstance(A, Generated):
        return x.map.values
    raise AlgebraError(f"essinf/esssup are not available on {A.name}")


def essinf(A: Algebra, x) -> Fraction:
    """Largest constant below ``x``; 1 on the trivial algebra."""
    vals = _values_of(A, x)
    return min(vals) if vals else ONE


def esssup(A: Algebra, x) -> Fraction:
    """Smallest constant above ``x``; 0 on the trivial algebra."""
    vals = _values_of(A, x)
    return max(vals) if vals else ZERO


def ess(A: Algebra, x) -> Fraction:
    lo, hi = essinf(A, x), esssup(A, x)
    if lo != hi:
        raise NotDefined(
            f"essinf {ui.format_rational(lo)} differs from esssup {ui.format_rational(hi)}"
        )
    return lo


def is_hnn_cauchy(A: Algebra, prefix: Sequence) -> tuple[bool, Optional[int]]:
    """Check ``a_n ≤ a_{n+1} ≤ a_n ⊕ 1/2^n`` for consecutive pairs.

    Returns ``(True, None)`` or ``(False, n)`` for the first failing ``n``.
    """
    if len(prefix) < 2:
        raise AlgebraError("need at least two terms")
    for n in range(len(prefix) - 1):
        a, b = prefix[n], prefix[n + 1]
        if not (A.leq(a, b) and A.leq(b, A.op("oplus", a, A.const(ui.dyadic(n))))):
            return False, n
    return True, None


def delta_on_function_algebra(
    A: FunctionAlgebra, specs: Mapping[str, SequenceSpec], env: Mapping[int, Fraction] | None = None
) -> MonotoneMap:
    """Pointwise exact δ: ``specs[p]`` describes the sequence of values at ``p``."""
    env = env or {}
    missing = [p for p in A.X.elements if p not in specs]
    if missing:
        raise AlgebraError(f"no sequence given for {', '.join(missing)}")
    vals = tuple(eval_delta_exact(specs[p], env) for p in A.X.elements)
    return MonotoneMap(A.X, vals)


def pointwise_specs(prefix: Sequence[MonotoneMap], tail: MonotoneMap) -> dict[str, SequenceSpec]:
    """Per-point explicit specs for an eventually constant sequence of maps."""
    X = tail.domain
    return {
        p: ExplicitThenConstant(tuple(Const(f(p)) for f in prefix), Const(tail(p)))
        for p in X.elements
    }
