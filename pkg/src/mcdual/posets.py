"""Finite preorders and posets, monotone maps into [0, 1], separators and quotients.

A finite compact ordered space carries the discrete topology, so a finite
poset is all the structure there is.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .unit_interval import ONE, ZERO, DyadicGrid, format_rational, unit


class PosetError(ValueError):
    pass


class UnknownElement(PosetError):
    pass


class AntisymmetryError(PosetError):
    def __init__(self, cycle: Sequence[str]):
        super().__init__("antisymmetry violated: cycle " + ",".join(cycle))
        self.cycle = tuple(cycle)


class NotMonotone(PosetError):
    pass


class NoSeparator(PosetError):
    pass


class BudgetExceeded(PosetError):
    pass


@dataclass(frozen=True, eq=False)
class FinPreorder:
    """Finite set with a reflexive, transitive relation.

    ``elements`` fixes the deterministic element order used everywhere.
    ``matrix[i][j]`` is true iff ``elements[i] ≤ elements[j]``.
    """

    elements: tuple[str, ...]
    matrix: tuple[tuple[bool, ...], ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.elements)) != len(self.elements):
            raise PosetError("duplicate element names")
        object.__setattr__(self, "index", {e: i for i, e in enumerate(self.elements)})

    @classmethod
    def from_pairs(cls, elements: Iterable[str], pairs: Iterable[Sequence[str]]):
        elements = tuple(str(e) for e in elements)
        idx = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        m = [[i == j for j in range(n)] for i in range(n)]
        for pair in pairs:
            a, b = (str(p) for p in pair)
            for e in (a, b):
                if e not in idx:
                    raise UnknownElement(f"unknown element {e!r}")
            m[idx[a]][idx[b]] = True
        for k in range(n):
            mk = m[k]
            for i in range(n):
                if m[i][k]:
                    row = m[i]
                    for j in range(n):
                        if mk[j]:
                            row[j] = True
        return cls(elements, tuple(tuple(r) for r in m))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)

    def __contains__(self, x: object) -> bool:
        return x in self.index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinPreorder):
            return NotImplemented
        return self.elements == other.elements and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash((self.elements, self.matrix))

    def _i(self, x: str) -> int:
        try:
            return self.index[x]
        except KeyError:
            raise UnknownElement(f"unknown element {x!r}") from None

    def le(self, x: str, y: str) -> bool:
        return self.matrix[self._i(x)][self._i(y)]

    def pairs(self) -> list[tuple[str, str]]:
        """All related pairs, reflexive ones included."""
        es = self.elements
        return [(es[i], es[j]) for i, row in enumerate(self.matrix) for j, v in enumerate(row) if v]

    def cover_pairs(self) -> list[tuple[str, str]]:
        """Strict pairs with nothing strictly in between (equivalent points aside)."""
        out = []
        n = len(self)
        m = self.matrix
        for i in range(n):
            for j in range(n):
                if i == j or not m[i][j] or m[j][i]:
                    continue
                between = any(
                    k not in (i, j) and m[i][k] and m[k][j] and not m[k][i] and not m[j][k]
                    for k in range(n)
                )
                if not between:
                    out.append((self.elements[i], self.elements[j]))
        return out

    def is_antisymmetric(self) -> bool:
        return self.find_cycle() is None

    def find_cycle(self) -> tuple[str, str] | None:
        n = len(self)
        for i in range(n):
            for j in range(i + 1, n):
                if self.matrix[i][j] and self.matrix[j][i]:
                    return self.elements[i], self.elements[j]
        return None

    def to_doc(self) -> dict:
        return {"elements": list(self.elements), "leq": [list(p) for p in self.cover_pairs()]}


class FinPoset(FinPreorder):
    """A finite partially ordered set (antisymmetry validated)."""

    def __post_init__(self) -> None:
        super().__post_init__()
        cycle = self.find_cycle()
        if cycle is not None:
            raise AntisymmetryError(cycle)


# ------------------------------------------------------------------ loading


def load_preorder(doc: Mapping) -> FinPreorder:
    return FinPreorder.from_pairs(doc["elements"], doc.get("leq", []))


def load_poset(doc: Mapping) -> FinPoset:
    """Build a poset from ``{"elements": [...], "leq": [[a, b], ...]}``.

    The ``leq`` pairs only generate the order; the reflexive-transitive
    closure is taken before antisymmetry is checked.
    """
    if "elements" not in doc:
        raise PosetError("poset document needs an 'elements' list")
    return FinPoset.from_pairs(doc["elements"], doc.get("leq", []))


def read_poset(path: str | Path, allow_preorder: bool = False) -> FinPreorder:
    doc = json.loads(Path(path).read_text())
    return load_preorder(doc) if allow_preorder else load_poset(doc)


def chain(n: int, prefix: str = "") -> FinPoset:
    names = [f"{prefix}{chr(ord('a') + i)}" if n <= 26 else f"{prefix}{i}" for i in range(n)]
    return FinPoset.from_pairs(names, zip(names, names[1:]))


def antichain(n: int, prefix: str = "") -> FinPoset:
    names = [f"{prefix}{chr(ord('a') + i)}" if n <= 26 else f"{prefix}{i}" for i in range(n)]
    return FinPoset.from_pairs(names, [])


# ------------------------------------------------------------ order basics


def down_set(X: FinPreorder, x: str) -> frozenset[str]:
    j = X._i(x)
    return frozenset(e for i, e in enumerate(X.elements) if X.matrix[i][j])


def up_set(X: FinPreorder, x: str) -> frozenset[str]:
    i = X._i(x)
    return frozenset(e for j, e in enumerate(X.elements) if X.matrix[i][j])


def is_up_set(X: FinPreorder, subset: Iterable[str]) -> bool:
    s = set(subset)
    return all(up_set(X, x) <= s for x in s)


def product_poset(X: FinPreorder, Y: FinPreorder) -> FinPoset:
    """Componentwise order on ``X × Y``; elements are named ``(x,y)``."""
    P, _, _ = product_with_projections(X, Y)
    return P


def product_with_projections(X: FinPreorder, Y: FinPreorder):
    names = {}
    for x in X.elements:
        for y in Y.elements:
            names[(x, y)] = f"({x},{y})"
    pairs = [
        (names[(x1, y1)], names[(x2, y2)])
        for (x1, y1), (x2, y2) in itertools.product(names, repeat=2)
        if X.le(x1, x2) and Y.le(y1, y2)
    ]
    cls = FinPoset if X.is_antisymmetric() and Y.is_antisymmetric() else FinPreorder
    P = cls.from_pairs(names.values(), pairs)
    first = {n: xy[0] for xy, n in names.items()}
    second = {n: xy[1] for xy, n in names.items()}
    return P, first, second


def is_monotone_between(X: FinPreorder, Y: FinPreorder, g: Mapping[str, str]) -> bool:
    if set(g) != set(X.elements) or not all(v in Y for v in g.values()):
        return False
    return all(Y.le(g[a], g[b]) for a, b in X.pairs())


# ---------------------------------------------------------- monotone maps


@dataclass(frozen=True, eq=False)
class MonotoneMap:
    """Exact monotone function from a finite preorder to [0, 1].

    ``values`` is aligned with ``domain.elements``.
    """

    domain: FinPreorder
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.domain):
            raise PosetError("map is not total on its domain")
        vals = tuple(unit(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        bad = violation(self.domain, vals)
        if bad is not None:
            a, b = bad
            raise NotMonotone(
                f"not monotone: {a} <= {b} but "
                f"{format_rational(vals[self.domain.index[a]])} > {format_rational(vals[self.domain.index[b]])}"
            )

    @classmethod
    def from_dict(cls, domain: FinPreorder, values: Mapping[str, object]) -> "MonotoneMap":
        missing = [e for e in domain.elements if e not in values]
        if missing:
            raise PosetError(f"map has no value for {', '.join(missing)}")
        extra = [e for e in values if e not in domain]
        if extra:
            raise UnknownElement(f"unknown element {extra[0]!r}")
        return cls(domain, tuple(unit(values[e]) for e in domain.elements))

    @classmethod
    def constant(cls, domain: FinPreorder, value) -> "MonotoneMap":
        return cls(domain, (unit(value),) * len(domain))

    def __call__(self, x: str) -> Fraction:
        return self.values[self.domain._i(x)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MonotoneMap):
            return NotImplemented
        return self.values == other.values and self.domain == other.domain

    def __hash__(self) -> int:
        return hash(self.values)

    def __repr__(self) -> str:
        inner = ", ".join(f"{e}: {format_rational(v)}" for e, v in self.items())
        return f"MonotoneMap({{{inner}}})"

    def items(self) -> list[tuple[str, Fraction]]:
        return list(zip(self.domain.elements, self.values))

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.items())

    def to_doc(self) -> dict:
        return {"values": {e: format_rational(v) for e, v in self.items()}}


def violation(X: FinPreorder, values: Sequence[Fraction]) -> tuple[str, str] | None:
    n = len(X)
    for i in range(n):
        for j in range(n):
            if X.matrix[i][j] and values[i] > values[j]:
                return X.elements[i], X.elements[j]
    return None


def urysohn_separator(X: FinPreorder, x: str, y: str) -> MonotoneMap:
    """Monotone ψ with ψ(x) = 0 and ψ(y) = 1, for ``x ≱ y``.

    ψ is the indicator of the up-set ``X ∖ ↓x``.
    """
    below = down_set(X, x)
    if y in below:
        raise NoSeparator(f"{x} >= {y}: no monotone map sends {x} to 0 and {y} to 1")
    return MonotoneMap(X, tuple(ZERO if e in below else ONE for e in X.elements))


def up_set_indicators(X: FinPreorder) -> list[MonotoneMap]:
    """One indicator of ``X ∖ ↓x`` per element; together they order-separate X."""
    out = []
    for x in X.elements:
        below = down_set(X, x)
        out.append(MonotoneMap(X, tuple(ZERO if e in below else ONE for e in X.elements)))
    return out


def pullback_map(f: MonotoneMap, g: Mapping[str, str], X: FinPreorder) -> MonotoneMap:
    """``f ∘ g`` for a monotone ``g: X → dom(f)``."""
    if not is_monotone_between(X, f.domain, g):
        raise NotMonotone("precomposition along a map that is not monotone")
    return MonotoneMap(X, tuple(f(g[e]) for e in X.elements))


# ------------------------------------------------------------------ quotient


@dataclass(frozen=True)
class Quotient:
    poset: FinPoset
    projection: dict[str, str]

    def classes(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {r: [] for r in self.poset.elements}
        for e, r in self.projection.items():
            out[r].append(e)
        return {r: tuple(v) for r, v in out.items()}


def quotient_by_kernel(X: FinPreorder, maps: Sequence[MonotoneMap]) -> Quotient:
    """Quotient of X by the preorder ``x ⊑ y iff f(x) ≤ f(y) for every f``.

    Each class is named after its least member in string order; classes are
    listed in the order of their first member in ``X``.
    """
    for f in maps:
        if f.domain != X:
            raise PosetError("map is defined on a different domain")
    n = len(X)
    cols = [f.values for f in maps]
    le = [[all(v[i] <= v[j] for v in cols) for j in range(n)] for i in range(n)]
    rep: dict[str, str] = {}
    order: list[tuple[int, str]] = []
    for i, e in enumerate(X.elements):
        if e in rep:
            continue
        members = [X.elements[j] for j in range(n) if le[i][j] and le[j][i]]
        name = min(members)
        for m in members:
            rep[m] = name
        order.append((i, name))
    first = {name: i for i, name in order}
    names = [name for _, name in order]
    pairs = [(a, b) for a in names for b in names if le[first[a]][first[b]]]
    return Quotient(FinPoset.from_pairs(names, pairs), rep)


# ------------------------------------------------------------ enumeration


def enumerate_monotone_maps(
    X: FinPreorder, grid: DyadicGrid, budget: int = 1_000_000
) -> Iterator[MonotoneMap]:
    """Every grid-valued monotone map on X exactly once, in lexicographic order
    of value tuples (following ``X.elements``).

    Raises :class:`BudgetExceeded` once more than ``budget`` maps were produced.
    """
    vals = grid.values()
    n = len(X)
    m = X.matrix
    current: list[int] = [0] * n
    produced = 0

    def rec(i: int) -> Iterator[tuple[int, ...]]:
        if i == n:
            yield tuple(current)
            return
        lo = max((current[k] for k in range(i) if m[k][i]), default=0)
        hi = min((current[k] for k in range(i) if m[i][k]), default=len(vals) - 1)
        for v in range(lo, hi + 1):
            current[i] = v
            yield from rec(i + 1)

    for idxs in rec(0):
        produced += 1
        if produced > budget:
            raise BudgetExceeded(f"more than {budget} monotone maps")
        yield MonotoneMap(X, tuple(vals[k] for k in idxs))


def random_monotone_map(X: FinPreorder, rng: random.Random, grid: DyadicGrid) -> MonotoneMap:
    """Random grid-valued monotone map: each value is drawn within the bounds
    already imposed by previously assigned comparable points."""
    vals = grid.values()
    n = len(X)
    m = X.matrix
    out: list[int] = [0] * n
    assigned: list[int] = []
    for i in rng.sample(range(n), n):
        lo = max((out[k] for k in assigned if m[k][i]), default=0)
        hi = min((out[k] for k in assigned if m[i][k]), default=len(vals) - 1)
        out[i] = rng.randint(lo, hi)
        assigned.append(i)
    return MonotoneMap(X, tuple(vals[k] for k in out))


def _labeled_posets(n: int) -> Iterator[tuple[tuple[bool, ...], ...]]:
    """All posets on {0..n-1} whose order extends the integer order."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for mask in range(1 << len(pairs)):
        m = [[i == j for j in range(n)] for i in range(n)]
        for b, (i, j) in enumerate(pairs):
            if mask >> b & 1:
                m[i][j] = True
        closed = all(
            not (m[i][k] and m[k][j]) or m[i][j]
            for i in range(n)
            for k in range(n)
            for j in range(n)
        )
        if closed:
            yield tuple(tuple(r) for r in m)


def _canonical(m: tuple[tuple[bool, ...], ...]) -> tuple:
    n = len(m)
    return min(
        tuple(m[p[i]][p[j]] for i in range(n) for j in range(n))
        for p in itertools.permutations(range(n))
    )


def enumerate_posets(n: int) -> list[FinPoset]:
    """All posets with ``n`` elements up to isomorphism (brute force, n ≤ 6)."""
    seen: dict[tuple, tuple] = {}
    for m in _labeled_posets(n):
        key = _canonical(m)
        if key not in seen:
            seen[key] = m
    names = [chr(ord("a") + i) for i in range(n)]
    out = []
    for m in seen.values():
        pairs = [(names[i], names[j]) for i in range(n) for j in range(n) if m[i][j]]
        out.append(FinPoset.from_pairs(names, pairs))
    return out


def random_poset(rng: random.Random, n: int, density: float = 0.4) -> FinPoset:
    """Random poset: a random DAG on a shuffled labelling, transitively closed."""
    names = [chr(ord("a") + i) for i in range(n)]
    order = rng.sample(names, n)
    pairs = [
        (order[i], order[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < density
    ]
    return FinPoset.from_pairs(names, pairs)


def is_isomorphism(X: FinPreorder, Y: FinPreorder, h: Mapping[str, str]) -> bool:
    """True iff ``h`` is a bijection X → Y that preserves and reflects order."""
    if set(h) != set(X.elements) or sorted(h.values()) != sorted(Y.elements):
        return False
    return all(X.le(a, b) == Y.le(h[a], h[b]) for a in X.elements for b in X.elements)
