"""Formula corpora for testing and benchmarking: a curated list and a seeded
random generator."""
from __future__ import annotations

import random
from typing import Optional, Sequence

from .formula import (
    TOP, And, Atom, CoalBox, CoalNext, CoalUntil, Formula, Implies, Not, Or,
    length, parse,
)

__all__ = ["CURATED", "curated", "random_formula", "random_corpus"]

CURATED: tuple[str, ...] = (
    "~<<1>>G p & <<1,2>>X p & ~<<2>>X ~p",
    "<<1>>G ~q & <<2>>(p U q)",
    "~<<1>>X p & ~<<1>>X ~p",
    "<<1>>X p & <<2>>X ~p",
    "<<1>>X p & <<2>>X q",
    "<<1>>F p & <<2>>G ~p",
    "<<1,2>>G (p -> <<1>>X ~p) & <<1,2>>G (~p -> <<2>>X p)",
    "<<>>G <<1>>F p",
    "~<<1>>G p & ~<<2>>G ~p",
    "<<1>>(p U q) & ~<<1,2>>F q",
    "<<1,2>>X p & ~<<1>>X p",
    "~<<1,2>>X p & <<>>X (p | q)",
    "<<2>>G (p | q) & <<1>>F ~p",
    "<<1>>(p U (q & <<2>>X r))",
    "<<>>G (p -> <<1>>X q) & <<>>F p",
    "~<<3>>G p & <<1,2>>G p",
    "<<1>>G <<2>>F p & <<2>>G <<1>>F ~p",
    "~(<<1>>G p -> p & <<1>>X <<1>>G p)",
    "<<1,2>>(p U q) & <<>>G ~q",
    "<<1>>X <<2>>X <<3>>X p & ~<<1,2,3>>X true",
)


def curated() -> list[Formula]:
    return [parse(s) for s in CURATED]


_ATOMS = ("p", "q", "r")


def _coalition(rng: random.Random, agents: int) -> tuple[int, ...]:
    return tuple(a for a in range(1, agents + 1) if rng.random() < 0.5)


def random_formula(rng: random.Random, size: int, agents: int = 3, atoms: int = 3) -> Formula:
    """A random formula of length at most ``size`` (and at least 1)."""
    names = _ATOMS[:atoms] if atoms <= len(_ATOMS) else tuple(f"p{i}" for i in range(atoms))

    def gen(budget: int) -> Formula:
        if budget <= 1:
            return Atom(rng.choice(names)) if rng.random() < 0.9 else TOP
        choices = ["not", "and", "or", "imp"]
        if agents:
            choices += ["next", "box", "until"] * 2
        op = rng.choice(choices)
        if op == "not":
            return Not(gen(budget - 1))
        if op in ("and", "or", "imp"):
            if budget < 3:
                return Not(gen(budget - 1))
            left = rng.randint(1, budget - 2)
            a, b = gen(left), gen(budget - 1 - left)
            return {"and": And, "or": Or, "imp": Implies}[op](a, b)
        coal = _coalition(rng, agents)
        rest = budget - 1 - len(coal)
        if rest < 1:
            return Atom(rng.choice(names))
        if op == "next":
            return CoalNext(coal, gen(rest))
        if op == "box":
            return CoalBox(coal, gen(rest))
        if rest < 2:
            return CoalNext(coal, gen(rest))
        left = rng.randint(1, rest - 1)
        return CoalUntil(coal, gen(left), gen(rest - left))

    f = gen(rng.randint(1, size))
    assert length(f) <= size
    return f


def random_corpus(n: int, max_size: int = 12, agents: int = 3, atoms: int = 3,
                  seed: int = 0, exclude: Optional[Sequence[Formula]] = None) -> list[Formula]:
    """``n`` distinct random formulas from a fixed seed."""
    rng = random.Random(seed)
    seen = set(exclude or ())
    out: list[Formula] = []
    while len(out) < n:
        f = random_formula(rng, max_size, agents, atoms)
        if f not in seen:
            seen.add(f)
            out.append(f)
    return out
