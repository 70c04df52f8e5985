"""Terms over the signature {⊕, ⊙, ∨, ∧, λ} extended with the infinitary δ.

Terms are immutable dataclass trees.  ``δ`` nodes carry a finite description
of their argument sequence (:class:`SequenceSpec`).  Three evaluators are
provided:

* :func:`eval_finitary` -- exact, rejects δ;
* :func:`eval_exact` -- exact, handles δ over the structured sequence kinds
  through a closed form;
* :func:`eval_with_precision` -- returns a guaranteed enclosing
  :class:`Interval` of requested width, for any sequence kind.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

from .unit_interval import (
    ONE,
    ZERO,
    dyadic,
    format_rational,
    join,
    meet,
    odot,
    ominus_const,
    oplus,
    parse_rational,
    unit,
)

Environment = Mapping[int, Fraction]


class TermError(ValueError):
    pass


class TermSyntaxError(TermError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class EvaluationError(TermError):
    pass


class UnboundVariable(EvaluationError):
    def __init__(self, index: int):
        super().__init__(f"unbound variable x{index}")
        self.index = index


class DeltaNotSupported(EvaluationError):
    pass


class SequenceExhausted(EvaluationError):
    pass


# --------------------------------------------------------------------- AST


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        return render_term(self)


@dataclass(frozen=True)
class Var(Term):
    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise TermError("variable index must be nonnegative")


@dataclass(frozen=True)
class Const(Term):
    value: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", unit(self.value))


@dataclass(frozen=True)
class Binary(Term):
    left: Term
    right: Term

    symbol = ""
    scalar = staticmethod(lambda a, b: a)


@dataclass(frozen=True)
class Oplus(Binary):
    symbol = "oplus"
    scalar = staticmethod(oplus)


@dataclass(frozen=True)
class Odot(Binary):
    symbol = "odot"
    scalar = staticmethod(odot)


@dataclass(frozen=True)
class Join(Binary):
    symbol = "join"
    scalar = staticmethod(join)


@dataclass(frozen=True)
class Meet(Binary):
    symbol = "meet"
    scalar = staticmethod(meet)


BINARY_NODES: dict[str, type[Binary]] = {cls.symbol: cls for cls in (Oplus, Odot, Join, Meet)}


@dataclass(frozen=True)
class OminusConst(Term):
    """``arg ⊖ lam``; ``lam`` is always a constant, never a variable."""

    arg: Term
    lam: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lam", unit(self.lam))


class SequenceSpec:
    """Finite description of an infinite argument sequence for δ."""

    __slots__ = ()

    def term_at(self, i: int) -> Term:
        raise NotImplementedError


@dataclass(frozen=True)
class ExplicitThenConstant(SequenceSpec):
    prefix: tuple[Term, ...]
    tail: Term

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(self.prefix))
        if not self.prefix:
            raise TermError("explicit sequence needs a nonempty prefix")

    def term_at(self, i: int) -> Term:
        return self.prefix[i] if i < len(self.prefix) else self.tail


@dataclass(frozen=True)
class OminusDyadic(SequenceSpec):
    """The sequence ``base ⊖ 1/2**0, base ⊖ 1/2**1, ...``."""

    base: Term

    def term_at(self, i: int) -> Term:
        return OminusConst(self.base, dyadic(i))


@dataclass(frozen=True)
class ConstantSeq(SequenceSpec):
    x: Term

    def term_at(self, i: int) -> Term:
        return self.x


@dataclass(frozen=True, eq=False)
class Generator(SequenceSpec):
    """Opaque ``index -> Term`` rule, optionally able to supply only ``limit`` items."""

    rule: Callable[[int], Term]
    limit: Optional[int] = None
    name: str = "generator"

    def term_at(self, i: int) -> Term:
        if self.limit is not None and i >= self.limit:
            raise SequenceExhausted(
                f"{self.name} supplies {self.limit} elements, element {i} requested"
            )
        return self.rule(i)


@dataclass(frozen=True)
class Delta(Term):
    spec: SequenceSpec


# ------------------------------------------------------------ construction


def const(value) -> Const:
    return Const(unit(value))


def balanced(cls: type[Binary], terms: Sequence[Term]) -> Term:
    """Fold ``terms`` with an associative binary node into a balanced tree."""
    if not terms:
        raise TermError("cannot fold an empty list of terms")
    if len(terms) == 1:
        return terms[0]
    mid = len(terms) // 2
    return cls(balanced(cls, terms[:mid]), balanced(cls, terms[mid:]))


def oplus_n(t: Term, n: int) -> Term:
    """n-fold ``t ⊕ ... ⊕ t``; the empty sum is the constant 0."""
    if n <= 0:
        return Const(ZERO)
    return balanced(Oplus, [t] * n)


def rho_term(n: int) -> Term:
    """The term ρₙ in variables x₀…xₙ.

    ρ₀ = x₀ and ρ_{k+1} = (x₀ ∨ … ∨ x_{k+1}) ∧ (ρ_k ⊕ 1/2^k).
    """
    if n < 0:
        raise TermError("rho index must be nonnegative")
    rho: Term = Var(0)
    running: Term = Var(0)
    for k in range(n):
        running = Join(running, Var(k + 1))
        rho = Meet(running, Oplus(rho, Const(dyadic(k))))
    return rho


# ----------------------------------------------------------------- queries


def subterms(t: Term) -> Iterator[Term]:
    """Pre-order traversal; δ nodes yield the finitely many terms of their spec."""
    stack = [t]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Binary):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, OminusConst):
            stack.append(node.arg)
        elif isinstance(node, Delta):
            stack.extend(reversed(_spec_children(node.spec)))


def _spec_children(spec: SequenceSpec) -> list[Term]:
    if isinstance(spec, ExplicitThenConstant):
        return [*spec.prefix, spec.tail]
    if isinstance(spec, OminusDyadic):
        return [spec.base]
    if isinstance(spec, ConstantSeq):
        return [spec.x]
    return []


def free_vars(t: Term) -> frozenset[int]:
    return frozenset(n.index for n in subterms(t) if isinstance(n, Var))


def arity(t: Term) -> int:
    fv = free_vars(t)
    return max(fv) + 1 if fv else 0


def has_delta(t: Term) -> bool:
    return any(isinstance(n, Delta) for n in subterms(t))


# ------------------------------------------------------------------ render


def render_term(t: Term) -> str:
    if isinstance(t, Var):
        return f"var({t.index})"
    if isinstance(t, Const):
        return f"const({format_rational(t.value)})"
    if isinstance(t, Binary):
        return f"{t.symbol}({render_term(t.left)}, {render_term(t.right)})"
    if isinstance(t, OminusConst):
        return f"ominus({render_term(t.arg)}, {format_rational(t.lam)})"
    if isinstance(t, Delta):
        return f"delta({render_spec(t.spec)})"
    raise TypeError(f"not a term: {t!r}")


def render_spec(spec: SequenceSpec) -> str:
    if isinstance(spec, ConstantSeq):
        return f"constant({render_term(spec.x)})"
    if isinstance(spec, OminusDyadic):
        return f"ominus_dyadic({render_term(spec.base)})"
    if isinstance(spec, ExplicitThenConstant):
        items = ", ".join(render_term(p) for p in spec.prefix)
        return f"explicit[{items}; tail={render_term(spec.tail)}]"
    raise TypeError(f"{type(spec).__name__} has no textual form")


# ------------------------------------------------------------------- parse

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<rat>-?\d+(?:\s*/\s*-?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<punct>[()\[\],;=]))"
)


@dataclass
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(_Token("eof", "", end))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            shown = tok.text or "end of input"
            raise TermSyntaxError(f"expected {text!r}, found {shown!r}", tok.pos)
        return tok

    def rational(self) -> Fraction:
        tok = self.next()
        if tok.kind != "rat":
            raise TermSyntaxError(f"expected a rational, found {tok.text or 'end of input'!r}", tok.pos)
        try:
            return unit(parse_rational(tok.text))
        except ValueError as exc:
            raise TermSyntaxError(str(exc), tok.pos) from None

    def natural(self) -> int:
        tok = self.next()
        if tok.kind != "rat" or not tok.text.isdigit():
            raise TermSyntaxError(f"expected a variable index, found {tok.text!r}", tok.pos)
        return int(tok.text)

    def term(self) -> Term:
        tok = self.next()
        name = tok.text
        if tok.kind != "name":
            raise TermSyntaxError(f"expected a term, found {name or 'end of input'!r}", tok.pos)
        if name == "var":
            self.expect("(")
            idx = self.natural()
            self.expect(")")
            return Var(idx)
        if name == "const":
            self.expect("(")
            value = self.rational()
            self.expect(")")
            return Const(value)
        if name in BINARY_NODES:
            self.expect("(")
            left = self.term()
            self.expect(",")
            right = self.term()
            self.expect(")")
            return BINARY_NODES[name](left, right)
        if name == "ominus":
            self.expect("(")
            arg = self.term()
            self.expect(",")
            lam = self.rational()
            self.expect(")")
            return OminusConst(arg, lam)
        if name == "delta":
            self.expect("(")
            spec = self.spec()
            self.expect(")")
            return Delta(spec)
        raise TermSyntaxError(f"unknown operation {name!r}", tok.pos)

    def spec(self) -> SequenceSpec:
        tok = self.next()
        if tok.text in ("constant", "ominus_dyadic"):
            self.expect("(")
            inner = self.term()
            self.expect(")")
            return ConstantSeq(inner) if tok.text == "constant" else OminusDyadic(inner)
        if tok.text == "explicit":
            self.expect("[")
            prefix = [self.term()]
            while self.peek().text == ",":
                self.next()
                prefix.append(self.term())
            self.expect(";")
            self.expect("tail")
            self.expect("=")
            tail = self.term()
            self.expect("]")
            return ExplicitThenConstant(tuple(prefix), tail)
        raise TermSyntaxError(f"expected a sequence spec, found {tok.text or 'end of input'!r}", tok.pos)


def parse_term(text: str) -> Term:
    parser = _Parser(text)
    t = parser.term()
    tok = parser.peek()
    if tok.kind != "eof":
        raise TermSyntaxError(f"trailing input {tok.text!r}", tok.pos)
    return t


# -------------------------------------------------------------- evaluation


def _lookup(env: Environment, index: int) -> Fraction:
    try:
        return env[index]
    except (KeyError, IndexError):
        raise UnboundVariable(index) from None


def eval_finitary(t: Term, env: Environment) -> Fraction:
    """Exact value of a δ-free term."""
    if isinstance(t, Var):
        return _lookup(env, t.index)
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Binary):
        return t.scalar(eval_finitary(t.left, env), eval_finitary(t.right, env))
    if isinstance(t, OminusConst):
        return ominus_const(eval_finitary(t.arg, env), t.lam)
    if isinstance(t, Delta):
        raise DeltaNotSupported("delta node in finitary evaluation")
    raise TypeError(f"not a term: {t!r}")


def eval_exact(t: Term, env: Environment) -> Fraction:
    """Exact value of a term whose δ nodes all use structured sequence specs."""
    if isinstance(t, Var):
        return _lookup(env, t.index)
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Binary):
        return t.scalar(eval_exact(t.left, env), eval_exact(t.right, env))
    if isinstance(t, OminusConst):
        return ominus_const(eval_exact(t.arg, env), t.lam)
    if isinstance(t, Delta):
        return eval_delta_exact(t.spec, env)
    raise TypeError(f"not a term: {t!r}")


def rho_values(xs: Iterable[Fraction]) -> list[Fraction]:
    """``[ρ₀(x₀), ρ₁(x₀, x₁), ...]`` for a finite sequence of scalars."""
    out: list[Fraction] = []
    running = ZERO
    for k, x in enumerate(xs):
        if k == 0:
            running = x
            out.append(x)
        else:
            running = join(running, x)
            out.append(meet(running, oplus(out[-1], dyadic(k - 1))))
    return out


def rho(xs: Sequence[Fraction]) -> Fraction:
    """ρₙ(x₀, …, xₙ) with n = len(xs) - 1."""
    if not xs:
        raise TermError("rho needs at least one argument")
    return rho_values(xs)[-1]


def delta_explicit(prefix: Sequence[Fraction], tail: Fraction) -> Fraction:
    """Exact δ(p₀, …, p_{k-1}, tail, tail, …) on [0, 1].

    Once the running join reaches its final value M at step N, every later
    step is ρ_{n+1} = M ∧ (ρ_n ⊕ 1/2^n), so the limit is M ∧ (ρ_N + 1/2^(N-1)).
    """
    values = [*prefix, tail]
    top = max(values)
    settle = next(i for i, v in enumerate(values) if v == top)
    rho_settle = rho_values(values[: settle + 1])[-1]
    return min(top, rho_settle + dyadic(settle - 1))


def eval_delta_exact(spec: SequenceSpec, env: Environment) -> Fraction:
    if isinstance(spec, ConstantSeq):
        return eval_exact(spec.x, env)
    if isinstance(spec, OminusDyadic):
        return eval_exact(spec.base, env)
    if isinstance(spec, ExplicitThenConstant):
        prefix = [eval_exact(p, env) for p in spec.prefix]
        return delta_explicit(prefix, eval_exact(spec.tail, env))
    raise DeltaNotSupported(
        f"no closed form for {type(spec).__name__}; use eval_with_precision"
    )


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, value: Fraction) -> bool:
        return self.lo <= value <= self.hi

    def __str__(self) -> str:
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


def rho_depth_for(eps: Fraction) -> int:
    """Least n ≥ 0 with 1/2^(n-1) ≤ eps."""
    if eps <= 0:
        raise ValueError("precision must be positive")
    n = 0
    while dyadic(n - 1) > eps:
        n += 1
    return n


def eval_with_precision(t: Term, env: Environment, eps) -> Interval:
    """Interval ``[lo, hi]`` containing the value of ``t`` with ``hi - lo ≤ eps``.

    Every primitive is monotone, so intervals propagate endpoint-wise.  The
    width budget halves across ⊕ and ⊙ (widths add there) and is passed
    through unchanged for ∨, ∧ and ⊖ (widths do not grow).  A δ node spends
    half of its budget on its entries and half on the ρ truncation.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("precision must be positive")
    lo, hi = _enclose(t, env, eps)
    return Interval(lo, hi)


def _enclose(t: Term, env: Environment, eps: Fraction) -> tuple[Fraction, Fraction]:
    if isinstance(t, Var):
        v = _lookup(env, t.index)
        return v, v
    if isinstance(t, Const):
        return t.value, t.value
    if isinstance(t, Binary):
        sub = eps / 2 if isinstance(t, (Oplus, Odot)) else eps
        a_lo, a_hi = _enclose(t.left, env, sub)
        b_lo, b_hi = _enclose(t.right, env, sub)
        return t.scalar(a_lo, b_lo), t.scalar(a_hi, b_hi)
    if isinstance(t, OminusConst):
        lo, hi = _enclose(t.arg, env, eps)
        return ominus_const(lo, t.lam), ominus_const(hi, t.lam)
    if isinstance(t, Delta):
        return _enclose_delta(t.spec, env, eps)
    raise TypeError(f"not a term: {t!r}")


def _enclose_delta(spec: SequenceSpec, env: Environment, eps: Fraction) -> tuple[Fraction, Fraction]:
    n = rho_depth_for(eps / 2)
    inner = eps / 2
    if isinstance(spec, OminusDyadic):
        b_lo, b_hi = _enclose(spec.base, env, inner)
        los = [ominus_const(b_lo, dyadic(i)) for i in range(n + 1)]
        his = [ominus_const(b_hi, dyadic(i)) for i in range(n + 1)]
    else:
        tail_bounds = None
        los, his = [], []
        for i in range(n + 1):
            if isinstance(spec, ConstantSeq) or (
                isinstance(spec, ExplicitThenConstant) and i >= len(spec.prefix)
            ):
                if tail_bounds is None:
                    tail_bounds = _enclose(spec.term_at(i), env, inner)
                lo, hi = tail_bounds
            else:
                lo, hi = _enclose(spec.term_at(i), env, inner)
            los.append(lo)
            his.append(hi)
    return rho(los), oplus(rho(his), dyadic(n - 1))


# -------------------------------------------------------------- generation


def random_term(
    rng: random.Random,
    depth: int,
    nvars: int,
    constants: Sequence[Fraction] = (ZERO, Fraction(1, 4), Fraction(1, 2), ONE),
    delta: bool = False,
) -> Term:
    """Random term of bounded depth, for tests and sampling."""
    if depth <= 0 or rng.random() < 0.2:
        if nvars and rng.random() < 0.7:
            return Var(rng.randrange(nvars))
        return Const(rng.choice(constants))
    kinds = ["bin"] * 4 + ["ominus"] + (["delta"] if delta else [])
    kind = rng.choice(kinds)
    sub = lambda: random_term(rng, depth - 1, nvars, constants, delta)  # noqa: E731
    if kind == "bin":
        cls = rng.choice(list(BINARY_NODES.values()))
        return cls(sub(), sub())
    if kind == "ominus":
        return OminusConst(sub(), rng.choice(constants))
    which = rng.randrange(3)
    if which == 0:
        return Delta(ConstantSeq(sub()))
    if which == 1:
        return Delta(OminusDyadic(sub()))
    return Delta(ExplicitThenConstant(tuple(sub() for _ in range(rng.randint(1, 3))), sub()))
