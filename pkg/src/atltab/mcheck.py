"""Explicit-state ATL model checking by fixpoint iteration, plus verification
of the Hintikka conditions on formula-labelled structures.

This module does not depend on the tableau code, so it can serve as an
independent oracle for the models the solver synthesizes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .cgm import CGM, MoveVector
from .formula import (
    Alpha, And, Atom, Beta, CoalBox, CoalNext, CoalUntil, Formula, Implies, Not,
    Or, Top, classify, coalition, render, sort_key,
)

__all__ = [
    "pre_coalition", "extension", "check", "a_moves", "co_moves",
    "co_move_check", "HintikkaReport", "verify_hintikka", "ComoveLimit",
]


def a_moves(m: CGM, s: int, agents: Iterable[int]) -> dict[tuple[int, ...], list[MoveVector]]:
    """A-moves at ``s`` mapped to the move vectors extending them."""
    idx = [m.agent_position(a) for a in coalition(agents)]
    classes: dict[tuple[int, ...], list[MoveVector]] = {}
    for v in m.vectors(s):
        classes.setdefault(tuple(v[i] for i in idx), []).append(v)
    return classes


def pre_coalition(m: CGM, agents: Iterable[int], target: Iterable[int]) -> frozenset[int]:
    """States where ``agents`` have a joint action forcing the next state into ``target``."""
    x = set(target)
    result = set()
    for s in m.states:
        delta = m.delta[s]
        for vs in a_moves(m, s, agents).values():
            if all(delta[v] in x for v in vs):
                result.add(s)
                break
    return frozenset(result)


def extension(m: CGM, phi: Formula, _memo: Optional[dict] = None) -> frozenset[int]:
    """The set of states satisfying ``phi``.  Atoms not used by the model are false."""
    memo = {} if _memo is None else _memo
    got = memo.get(phi)
    if got is not None:
        return got
    everything = frozenset(m.states)
    if isinstance(phi, Top):
        out = everything
    elif isinstance(phi, Atom):
        out = frozenset(s for s in m.states if phi.name in m.labels[s])
    elif isinstance(phi, Not):
        out = everything - extension(m, phi.f, memo)
    elif isinstance(phi, And):
        out = extension(m, phi.f, memo) & extension(m, phi.g, memo)
    elif isinstance(phi, Or):
        out = extension(m, phi.f, memo) | extension(m, phi.g, memo)
    elif isinstance(phi, Implies):
        out = (everything - extension(m, phi.f, memo)) | extension(m, phi.g, memo)
    elif isinstance(phi, CoalNext):
        out = pre_coalition(m, phi.agents, extension(m, phi.f, memo))
    elif isinstance(phi, CoalBox):
        out = _box_set(m, phi.agents, extension(m, phi.f, memo))
    elif isinstance(phi, CoalUntil):
        out = _until_set(m, phi.agents, extension(m, phi.f, memo), extension(m, phi.g, memo))
    else:
        raise TypeError(f"not a formula: {phi!r}")
    memo[phi] = out
    return out


def check(m: CGM, s: int, phi: Formula) -> bool:
    if s not in m.states:
        raise KeyError(f"unknown state {s}")
    return s in extension(m, phi)


# ---------------------------------------------------------------- co-moves

class ComoveLimit(RuntimeError):
    """The co-move space is too large to enumerate."""


def co_moves(m: CGM, s: int, agents: Iterable[int], limit: int = 100_000,
             ) -> Iterator[dict[tuple[int, ...], MoveVector]]:
    """All co-A-moves at ``s``: functions choosing, for each A-move, one
    move vector extending it."""
    classes = a_moves(m, s, agents)
    keys = sorted(classes)
    size = 1
    for k in keys:
        size *= len(classes[k])
        if size > limit:
            raise ComoveLimit(f"{size}+ co-moves at state {s}")
    for choice in itertools.product(*(classes[k] for k in keys)):
        yield dict(zip(keys, choice))


def co_move_check(m: CGM, s: int, agents: Iterable[int], target: Iterable[int],
                  limit: int = 100_000) -> bool:
    """Brute force: is there a co-A-move at ``s`` whose outcomes all lie in ``target``?"""
    x = set(target)
    return any(all(m.delta[s][v] in x for v in cm.values())
               for cm in co_moves(m, s, agents, limit))


# ---------------------------------------------------------------- Hintikka conditions

@dataclass
class HintikkaReport:
    """Failures per condition, as ``(state, formula, detail)`` triples."""

    failures: dict[str, list[tuple[int, str, str]]] = field(
        default_factory=lambda: {f"H{i}": [] for i in range(1, 8)})

    @property
    def ok(self) -> bool:
        return not any(self.failures.values())

    def passed(self, condition: str) -> bool:
        return not self.failures[condition]

    def fail(self, condition: str, s: int, f: Formula, detail: str = "") -> None:
        self.failures[condition].append((s, render(f), detail))

    def summary(self) -> str:
        return " ".join(f"{c}:{'ok' if not v else len(v)}" for c, v in self.failures.items())


def verify_hintikka(m: CGM) -> HintikkaReport:
    """Check conditions H1-H7 on a formula-labelled structure."""
    if m.hintikka is None:
        raise ValueError("structure carries no formula labels")
    h = m.hintikka
    report = HintikkaReport()
    ambient = m.agents

    def holding(f: Formula) -> frozenset[int]:
        return frozenset(s for s in m.states if f in h[s])

    for s in m.states:
        for f in sorted(h[s], key=sort_key):
            if isinstance(f, Not) and (f.f in h[s] or isinstance(f.f, Top)):
                report.fail("H1", s, f, "complementary pair")
            kind = classify(f, ambient)
            if isinstance(kind, Alpha) and not (kind.a1 in h[s] and kind.a2 in h[s]):
                report.fail("H2", s, f)
            if isinstance(kind, Beta) and not (kind.b1 in h[s] or kind.b2 in h[s]):
                report.fail("H3", s, f)
            if isinstance(f, CoalNext):
                if s not in pre_coalition(m, f.agents, holding(f.f)):
                    report.fail("H4", s, f, "no forcing A-move")
            if isinstance(f, Not) and isinstance(f.f, CoalNext):
                # a co-move exists iff every A-move has a completion into the target
                target = holding(Not(f.f.f))
                if not all(any(m.delta[s][v] in target for v in vs)
                           for vs in a_moves(m, s, f.f.agents).values()):
                    report.fail("H5", s, f, "no co-move")
            if isinstance(f, CoalUntil):
                if s not in _until_set(m, f.agents, holding(f.f), holding(f.g)):
                    report.fail("H6", s, f, "not fulfilled")
            if isinstance(f, Not) and isinstance(f.f, CoalBox):
                avoid = frozenset(m.states) - holding(Not(f.f.f))
                if s in _box_set(m, f.f.agents, avoid):
                    report.fail("H7", s, f, "not fulfilled")
    return report


def _until_set(m: CGM, agents, left: frozenset[int], right: frozenset[int]) -> frozenset[int]:
    """Least fixpoint of X = right | (left & pre(X))."""
    out: frozenset[int] = frozenset()
    while True:
        nxt = right | (left & pre_coalition(m, agents, out))
        if nxt == out:
            return out
        out = nxt


def _box_set(m: CGM, agents, body: frozenset[int]) -> frozenset[int]:
    """Greatest fixpoint of X = body & pre(X)."""
    out = frozenset(m.states)
    while True:
        nxt = body & pre_coalition(m, agents, out)
        if nxt == out:
            return out
        out = nxt
