"""ATL formulas: abstract syntax, parsing, rendering, alpha/beta classification
and closure computation.

Concrete syntax::

    true  false  p  ~f  f & g  f | g  f -> g
    <<1,2>>X f   <<1>>G f   <<>>F f   <<2>>(f U g)

``~`` and the modal operators bind tightest, then ``&``, ``|`` and finally the
right-associative ``->``.  ``&`` and ``|`` associate to the left.  ``false`` is
read as ``~true`` and ``<<A>>F f`` as ``<<A>>(true U f)``.  With ``ctl=True``
the path quantifiers ``E``/``A`` are accepted as ``<<1>>``/``<<>>``
(``EX f``, ``AG f``, ``E(f U g)`` ...).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

__all__ = [
    "Formula", "Top", "Atom", "Not", "Implies", "And", "Or",
    "CoalNext", "CoalBox", "CoalUntil", "TOP", "FALSE",
    "Primitive", "Alpha", "Beta", "ParseError",
    "coalition", "parse", "render", "classify", "is_eventuality",
    "is_next_time", "is_patently_inconsistent", "closure",
    "extended_closure", "agents_of", "atoms_of", "length", "sort_key",
    "subformulas",
]


def coalition(agents: Iterable[int]) -> tuple[int, ...]:
    """Canonical (sorted, duplicate-free) form of a set of agents."""
    return tuple(sorted(set(int(a) for a in agents)))


class Formula:
    """Base class of all formula nodes.  Nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self) -> str:
        return "Top()"


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    f: Formula


@dataclass(frozen=True)
class Implies(Formula):
    f: Formula
    g: Formula


@dataclass(frozen=True)
class And(Formula):
    f: Formula
    g: Formula


@dataclass(frozen=True)
class Or(Formula):
    f: Formula
    g: Formula


@dataclass(frozen=True)
class CoalNext(Formula):
    agents: tuple[int, ...]
    f: Formula

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", coalition(self.agents))


@dataclass(frozen=True)
class CoalBox(Formula):
    agents: tuple[int, ...]
    f: Formula

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", coalition(self.agents))


@dataclass(frozen=True)
class CoalUntil(Formula):
    agents: tuple[int, ...]
    f: Formula
    g: Formula

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", coalition(self.agents))


TOP = Top()
FALSE = Not(TOP)


# ---------------------------------------------------------------- classification

@dataclass(frozen=True)
class Primitive:
    pass


@dataclass(frozen=True)
class Alpha:
    a1: Formula
    a2: Formula


@dataclass(frozen=True)
class Beta:
    b1: Formula
    b2: Formula


Classification = Union[Primitive, Alpha, Beta]
_PRIMITIVE = Primitive()


def classify(f: Formula, ambient: Iterable[int]) -> Classification:
    """Smullyan-style classification of ``f`` relative to the agent set ``ambient``.

    ``ambient`` matters only for negated next-time formulas: ``~<<A>>X g`` is
    an alpha-formula when ``A`` is the whole agent set and primitive otherwise.
    """
    if isinstance(f, (Top, Atom, CoalNext)):
        return _PRIMITIVE
    if isinstance(f, And):
        return Alpha(f.f, f.g)
    if isinstance(f, Or):
        return Beta(f.f, f.g)
    if isinstance(f, Implies):
        return Beta(Not(f.f), f.g)
    if isinstance(f, CoalBox):
        return Alpha(f.f, CoalNext(f.agents, f))
    if isinstance(f, CoalUntil):
        return Beta(f.g, And(f.f, CoalNext(f.agents, f)))
    if not isinstance(f, Not):
        raise TypeError(f"not a formula: {f!r}")
    g = f.f
    if isinstance(g, (Top, Atom)):
        return _PRIMITIVE
    if isinstance(g, Not):
        return Alpha(g.f, g.f)
    if isinstance(g, And):
        return Beta(Not(g.f), Not(g.g))
    if isinstance(g, Or):
        return Alpha(Not(g.f), Not(g.g))
    if isinstance(g, Implies):
        return Alpha(g.f, Not(g.g))
    if isinstance(g, CoalNext):
        if g.agents == coalition(ambient):
            reduct = CoalNext((), Not(g.f))
            return Alpha(reduct, reduct)
        return _PRIMITIVE
    if isinstance(g, CoalBox):
        return Beta(Not(g.f), Not(CoalNext(g.agents, g)))
    if isinstance(g, CoalUntil):
        unfold = CoalNext(g.agents, g)
        return Beta(And(Not(g.g), Not(g.f)), And(Not(g.g), Not(unfold)))
    raise TypeError(f"not a formula: {g!r}")


def is_eventuality(f: Formula) -> bool:
    return isinstance(f, CoalUntil) or (isinstance(f, Not) and isinstance(f.f, CoalBox))


def is_next_time(f: Formula, ambient: Iterable[int]) -> bool:
    """True for positive next-time formulas and *proper* negative ones."""
    if isinstance(f, CoalNext):
        return True
    return (isinstance(f, Not) and isinstance(f.f, CoalNext)
            and f.f.agents != coalition(ambient))


def is_patently_inconsistent(formulas: Iterable[Formula]) -> bool:
    fs = formulas if isinstance(formulas, (set, frozenset)) else set(formulas)
    for f in fs:
        if isinstance(f, Not) and (f.f in fs or isinstance(f.f, Top)):
            return True
    return False


# ---------------------------------------------------------------- structure

def _children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Top, Atom)):
        return ()
    if isinstance(f, (Not, CoalNext, CoalBox)):
        return (f.f,)
    return (f.f, f.g)


def subformulas(f: Formula) -> Iterator[Formula]:
    """All subformulas of ``f`` (with repetitions), pre-order."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(_children(g)))


def agents_of(f: Formula) -> tuple[int, ...]:
    """The agents mentioned anywhere in ``f``."""
    found: set[int] = set()
    for g in subformulas(f):
        if isinstance(g, (CoalNext, CoalBox, CoalUntil)):
            found.update(g.agents)
    return coalition(found)


def atoms_of(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def length(f: Formula) -> int:
    """Symbol count; a coalition is lumped with its temporal operator and each
    agent name counts once, so ``|<<1,2>>X p| = 4``."""
    if isinstance(f, (Top, Atom)):
        return 1
    if isinstance(f, Not):
        return 1 + length(f.f)
    if isinstance(f, (And, Or, Implies)):
        return 1 + length(f.f) + length(f.g)
    if isinstance(f, (CoalNext, CoalBox)):
        return 1 + len(f.agents) + length(f.f)
    return 1 + len(f.agents) + length(f.f) + length(f.g)


def closure(theta: Formula) -> frozenset[Formula]:
    """Least set containing ``theta``, closed under subformulas and the
    unfoldings of until/box (positive and negated until)."""
    result: set[Formula] = set()
    stack = [theta]
    while stack:
        f = stack.pop()
        if f in result:
            continue
        result.add(f)
        stack.extend(_children(f))
        if isinstance(f, CoalUntil):
            stack.append(And(f.f, CoalNext(f.agents, f)))
        elif isinstance(f, CoalBox):
            stack.append(And(f.f, CoalNext(f.agents, f)))
        elif isinstance(f, Not) and isinstance(f.f, CoalUntil):
            g = f.f
            stack.append(And(Not(g.g), Not(g.f)))
            stack.append(And(Not(g.g), Not(CoalNext(g.agents, g))))
    return frozenset(result)


def extended_closure(theta: Formula, ambient: Optional[Iterable[int]] = None) -> frozenset[Formula]:
    """Closure plus negations, the ``<<>>X ~f`` rewrites of ``~<<S>>X f``,
    ``true`` and ``<<S>>X true`` (S the ambient agent set, default: agents of theta)."""
    sigma = agents_of(theta) if ambient is None else coalition(ambient)
    cl = closure(theta)
    result = set(cl)
    for f in cl:
        result.add(Not(f))
        if isinstance(f, Not) and isinstance(f.f, CoalNext) and f.f.agents == sigma:
            result.add(CoalNext((), Not(f.f.f)))
    result.add(TOP)
    result.add(CoalNext(sigma, TOP))
    return frozenset(result)


# ---------------------------------------------------------------- rendering

# Binding strength: higher binds tighter.
_PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4


def _coal(agents: tuple[int, ...]) -> str:
    return "<<" + ",".join(str(a) for a in agents) + ">>"


def _render(f: Formula, ctx: int) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "~" + _render(f.f, _PREC_UNARY)
    if isinstance(f, CoalNext):
        return f"{_coal(f.agents)}X " + _render(f.f, _PREC_UNARY)
    if isinstance(f, CoalBox):
        return f"{_coal(f.agents)}G " + _render(f.f, _PREC_UNARY)
    if isinstance(f, CoalUntil):
        return f"{_coal(f.agents)}({_render(f.f, _PREC_IMP)} U {_render(f.g, _PREC_IMP)})"
    if isinstance(f, Implies):
        # right-associative: a left operand that is itself an implication needs parens
        s = f"{_render(f.f, _PREC_IMP + 1)} -> {_render(f.g, _PREC_IMP)}"
        prec = _PREC_IMP
    elif isinstance(f, Or):
        s = f"{_render(f.f, _PREC_OR)} | {_render(f.g, _PREC_OR + 1)}"
        prec = _PREC_OR
    elif isinstance(f, And):
        s = f"{_render(f.f, _PREC_AND)} & {_render(f.g, _PREC_AND + 1)}"
        prec = _PREC_AND
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({s})" if prec < ctx else s


def render(f: Formula) -> str:
    """Concrete syntax for ``f``; ``parse(render(f)) == f``."""
    return _render(f, 0)


_KEYS: dict[Formula, tuple[int, str]] = {}


def sort_key(f: Formula) -> tuple[int, str]:
    """Canonical ordering key: length first, then rendering.  Cached."""
    key = _KEYS.get(f)
    if key is None:
        if len(_KEYS) > 500_000:
            _KEYS.clear()
        key = _KEYS[f] = (length(f), render(f))
    return key


# ---------------------------------------------------------------- parsing

class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")

    def diagnostic(self) -> str:
        if not self.text:
            return str(self)
        return f"{self}\n  {self.text}\n  {' ' * self.position}^"


_TOKEN_RE = re.compile(r"\s*(?:(<<)|(>>)|(->)|([A-Za-z_][A-Za-z0-9_]*)|(\d+)|(.))")
_CTL_UNARY = {"EX", "AX", "EG", "AG", "EF", "AF"}
_RESERVED = {"true", "false", "U"}


@dataclass
class _Tok:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else pos
        lt, gt, arrow, ident, num, other = m.groups()
        if lt:
            toks.append(_Tok("<<", lt, start))
        elif gt:
            toks.append(_Tok(">>", gt, start))
        elif arrow:
            toks.append(_Tok("->", arrow, start))
        elif ident:
            toks.append(_Tok("id", ident, start))
        elif num:
            toks.append(_Tok("num", num, start))
        elif other:
            if other not in "~&|(),":
                raise ParseError(f"unexpected character {other!r}", start, text)
            toks.append(_Tok(other, other, start))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ambient_agents: Optional[int], ctl: bool):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.ambient = ambient_agents
        self.ctl = ctl

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: Optional[_Tok] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.pos, self.text)

    def expect(self, kind: str, value: Optional[str] = None) -> _Tok:
        tok = self.tok
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value or kind
            got = tok.value or "end of input"
            raise self.error(f"expected {want!r}, got {got!r}")
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.implication()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.value!r}")
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.tok.kind == "->":
            self.i += 1
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.tok.kind == "|":
            self.i += 1
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.tok.kind == "&":
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.tok
        if tok.kind == "~":
            self.i += 1
            return Not(self.unary())
        if tok.kind == "(":
            self.i += 1
            f = self.implication()
            self.expect(")")
            return f
        if tok.kind == "<<":
            self.i += 1
            agents = self.agent_list()
            return self.temporal(agents)
        if tok.kind == "id":
            if self.ctl and tok.value in _CTL_UNARY:
                self.i += 1
                agents = (1,) if tok.value[0] == "E" else ()
                return self.apply_temporal(agents, tok.value[1], self.unary())
            if self.ctl and tok.value in ("E", "A") and self.toks[self.i + 1].kind == "(":
                self.i += 1
                return self.until((1,) if tok.value == "E" else ())
            if tok.value == "true":
                self.i += 1
                return TOP
            if tok.value == "false":
                self.i += 1
                return FALSE
            if tok.value == "U":
                raise self.error("unexpected 'U'")
            self.i += 1
            return Atom(tok.value)
        got = tok.value or "end of input"
        raise self.error(f"expected a formula, got {got!r}")

    def agent_list(self) -> tuple[int, ...]:
        agents: list[int] = []
        if self.tok.kind != ">>":
            while True:
                tok = self.expect("num")
                a = int(tok.value)
                if a < 1 or (self.ambient is not None and a > self.ambient):
                    raise ParseError(f"agent {a} out of range", tok.pos, self.text)
                agents.append(a)
                if self.tok.kind != ",":
                    break
                self.i += 1
        self.expect(">>")
        return coalition(agents)

    def temporal(self, agents: tuple[int, ...]) -> Formula:
        tok = self.tok
        if tok.kind == "(":
            return self.until(agents)
        if tok.kind == "id" and tok.value in ("X", "G", "F"):
            self.i += 1
            return self.apply_temporal(agents, tok.value, self.unary())
        raise self.error("expected X, G, F or '(' after coalition")

    @staticmethod
    def apply_temporal(agents: tuple[int, ...], op: str, body: Formula) -> Formula:
        if op == "X":
            return CoalNext(agents, body)
        if op == "G":
            return CoalBox(agents, body)
        return CoalUntil(agents, TOP, body)

    def until(self, agents: tuple[int, ...]) -> Formula:
        self.expect("(")
        left = self.implication()
        self.expect("id", "U")
        right = self.implication()
        self.expect(")")
        return CoalUntil(agents, left, right)


def parse(text: str, ambient_agents: Optional[int] = None, ctl: bool = False) -> Formula:
    """Parse ``text``; agent indices must lie in ``1..ambient_agents`` when given."""
    return _Parser(text, ambient_agents, ctl).parse()
