import itertools
import random
from fractions import Fraction as F

import pytest

from mcdual.posets import (
    AntisymmetryError,
    BudgetExceeded,
    MonotoneMap,
    NoSeparator,
    NotMonotone,
    UnknownElement,
    antichain,
    chain,
    down_set,
    enumerate_monotone_maps,
    enumerate_posets,
    is_isomorphism,
    is_up_set,
    load_poset,
    load_preorder,
    product_poset,
    product_with_projections,
    pullback_map,
    quotient_by_kernel,
    random_monotone_map,
    random_poset,
    up_set,
    up_set_indicators,
    urysohn_separator,
    violation,
)
from mcdual.unit_interval import DyadicGrid

CHAIN2 = {"elements": ["a", "b"], "leq": [["a", "b"]]}
DIAMOND = {"elements": ["a", "b", "c", "d"], "leq": [["a", "b"], ["a", "c"], ["b", "d"], ["c", "d"]]}


def test_load():
    X = load_poset(CHAIN2)
    assert X == chain(2) and X.le("a", "b") and not X.le("b", "a")
    with pytest.raises(AntisymmetryError, match="cycle a,b"):
        load_poset({"elements": ["a", "b"], "leq": [["a", "b"], ["b", "a"]]})
    Y = load_poset({"elements": ["a", "b", "c"], "leq": [["a", "b"]]})
    assert not Y.le("a", "c") and not Y.le("c", "a")
    with pytest.raises(UnknownElement):
        load_poset({"elements": ["a"], "leq": [["a", "z"]]})
    P = load_preorder({"elements": ["a", "b"], "leq": [["a", "b"], ["b", "a"]]})
    assert not P.is_antisymmetric() and P.find_cycle() == ("a", "b")


def test_closure_and_covers():
    X = load_poset({"elements": ["a", "b", "c"], "leq": [["a", "b"], ["b", "c"]]})
    assert X.le("a", "c")
    assert X.cover_pairs() == [("a", "b"), ("b", "c")]
    assert load_poset(X.to_doc()) == X


def test_down_up_sets():
    assert down_set(chain(2), "b") == {"a", "b"}
    assert down_set(antichain(3), "a") == {"a"}
    D = load_poset(DIAMOND)
    assert up_set(D, "b") == {"b", "d"}
    assert is_up_set(D, {"b", "d"}) and not is_up_set(D, {"b"})


def test_urysohn():
    X = load_poset({"elements": ["a", "b", "c"], "leq": [["a", "b"]]})
    assert urysohn_separator(X, "a", "b").as_dict() == {"a": 0, "b": 1, "c": 1}
    assert urysohn_separator(antichain(2), "a", "b").as_dict() == {"a": 0, "b": 1}
    with pytest.raises(NoSeparator):
        urysohn_separator(chain(2), "b", "a")


def test_quotient():
    A = antichain(2)
    Q = quotient_by_kernel(A, [MonotoneMap.constant(A, F(1, 2))])
    assert Q.classes() == {"a": ("a", "b")}
    Q = quotient_by_kernel(A, [MonotoneMap.from_dict(A, {"a": 0, "b": 1})])
    assert Q.poset == chain(2)
    C = chain(2)
    Q = quotient_by_kernel(C, up_set_indicators(C))
    assert is_isomorphism(C, Q.poset, Q.projection)


def test_products():
    D = product_poset(chain(2), chain(2))
    assert len(D) == 4 and D.le("(a,a)", "(b,b)") and not D.le("(a,b)", "(b,a)")
    assert is_isomorphism(load_poset(DIAMOND), D, {"a": "(a,a)", "b": "(a,b)", "c": "(b,a)", "d": "(b,b)"})
    S = product_poset(chain(3), chain(1))
    assert is_isomorphism(chain(3), S, {x: f"({x},a)" for x in "abc"})
    A4 = product_poset(antichain(2), antichain(2))
    assert not any(A4.le(x, y) for x, y in itertools.permutations(A4.elements, 2))
    P, p1, p2 = product_with_projections(chain(2), antichain(2))
    assert p1["(b,a)"] == "b" and p2["(b,a)"] == "a"


def test_monotone_maps():
    C = chain(2)
    maps = list(enumerate_monotone_maps(C, DyadicGrid(1)))
    assert len(maps) == 6
    assert [m.values for m in maps] == sorted(m.values for m in maps)
    assert len(list(enumerate_monotone_maps(chain(1), DyadicGrid(0)))) == 2
    assert len(list(enumerate_monotone_maps(antichain(2), DyadicGrid(0)))) == 4
    with pytest.raises(BudgetExceeded):
        list(enumerate_monotone_maps(antichain(4), DyadicGrid(3), budget=10))
    with pytest.raises(NotMonotone):
        MonotoneMap.from_dict(C, {"a": 1, "b": 0})
    assert violation(C, [F(1), F(0)]) == ("a", "b")


def test_random_monotone_maps_are_monotone():
    rng = random.Random(5)
    for _ in range(200):
        X = random_poset(rng, rng.randint(0, 6))
        f = random_monotone_map(X, rng, DyadicGrid(3))
        assert violation(X, f.values) is None


def test_enumerate_posets_counts():
    assert [len(enumerate_posets(n)) for n in range(6)] == [1, 1, 2, 5, 16, 63]


def test_pullback():
    f = MonotoneMap.from_dict(chain(2), {"a": "1/4", "b": "3/4"})
    g = {"a": "b", "b": "b", "c": "b"}
    assert pullback_map(f, g, antichain(3)).as_dict() == {x: F(3, 4) for x in "abc"}
    with pytest.raises(NotMonotone):
        pullback_map(f, {"a": "b", "b": "a"}, chain(2))
