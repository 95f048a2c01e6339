"""Shared helpers for the test suite: worked-example formulas, state lookup,
brute-force model enumeration and an independent naive CTL evaluator."""
from __future__ import annotations

import itertools
from typing import Iterable, Iterator

from atltab.cgm import CGM
from atltab.formula import (
    And, Atom, CoalBox, CoalNext, CoalUntil, Formula, Implies, Not, Or, Top, parse,
)

THETA1_TEXT = "~<<1>>G p & <<1,2>>X p & ~<<2>>X ~p"
THETA2_TEXT = "<<1>>G ~q & <<2>>(p U q)"
THETA1 = parse(THETA1_TEXT)
THETA2 = parse(THETA2_TEXT)

P = lambda text: parse(text)  # noqa: E731

def fs(*texts: str) -> frozenset[Formula]:
    return frozenset(parse(t) for t in texts)

def find_states(nodes, *texts: str, exclude: Iterable[str] = ()) -> list:
    """States containing all formulas in ``texts`` and none in ``exclude``."""
    need = fs(*texts)
    avoid = fs(*exclude) if exclude else frozenset()
    return [n for n in nodes if n.is_state and need <= n.formulas and not (avoid & n.formulas)]

THETA1_INNER = THETA1.f
UNTIL2_STEP = parse("p & <<2>>X <<2>>(p U q)")

def same_modulo(actual: frozenset[Formula], expected: frozenset[Formula],
                implicit: Iterable[Formula] = (THETA1_INNER, UNTIL2_STEP)) -> bool:
    """Equality up to the intermediate conjunctions that worked examples
    leave implicit."""
    return expected <= actual and actual - expected <= set(implicit)

# ---------------------------------------------------------------- brute-force models

def all_cgms(agents: tuple[int, ...], max_states: int, max_moves: int,
             atoms: tuple[str, ...]) -> Iterator[CGM]:
    """Every model with at most ``max_states`` states and at most ``max_moves``
    actions per agent, each state designated in turn."""
    for n in range(1, max_states + 1):
        move_options = list(itertools.product(range(1, max_moves + 1), repeat=len(agents)))
        for moves in itertools.product(move_options, repeat=n):
            vec_lists = [list(itertools.product(*(range(d) for d in ms))) for ms in moves]
            delta_options = [
                [dict(zip(vs, targets)) for targets in itertools.product(range(n), repeat=len(vs))]
                for vs in vec_lists
            ]
            for delta in itertools.product(*delta_options):
                for labels in itertools.product(
                        [frozenset(c) for r in range(len(atoms) + 1)
                         for c in itertools.combinations(atoms, r)], repeat=n):
                    for d in range(n):
                        yield CGM(agents, tuple(moves), tuple(delta), tuple(labels), d)

def random_cgm(rng, agents: tuple[int, ...], n: int, max_moves: int, atoms: tuple[str, ...]) -> CGM:
    moves = tuple(tuple(rng.randint(1, max_moves) for _ in agents) for _ in range(n))
    delta = tuple(
        {v: rng.randrange(n) for v in itertools.product(*(range(d) for d in ms))}
        for ms in moves
    )
    labels = tuple(frozenset(a for a in atoms if rng.random() < 0.5) for _ in range(n))
    return CGM(agents, moves, delta, labels, 0)

# ---------------------------------------------------------------- naive CTL

def naive_ctl(m: CGM, s: int, f: Formula) -> bool:
    """Textbook CTL evaluation by path search on the successor graph.
    ``<<1>>`` reads as E and ``<<>>`` as A (one-agent models only)."""
    succ = {t: sorted(m.successors(t)) for t in m.states}

    def ev(t: int, g: Formula) -> bool:
        if isinstance(g, Top):
            return True
        if isinstance(g, Atom):
            return g.name in m.labels[t]
        if isinstance(g, Not):
            return not ev(t, g.f)
        if isinstance(g, And):
            return ev(t, g.f) and ev(t, g.g)
        if isinstance(g, Or):
            return ev(t, g.f) or ev(t, g.g)
        if isinstance(g, Implies):
            return (not ev(t, g.f)) or ev(t, g.g)
        exists = bool(g.agents)
        if isinstance(g, CoalNext):
            results = [ev(u, g.f) for u in succ[t]]
            return any(results) if exists else all(results)
        if isinstance(g, CoalUntil):
            return _eu(t, g) if exists else _au(t, g, len(m.states))
        if isinstance(g, CoalBox):
            return _eg(t, g) if exists else not _eu(t, CoalUntil((1,), Top(), Not(g.f)))
        raise TypeError(g)

    def _eu(t: int, g: CoalUntil) -> bool:
        # search along left-satisfying states for a right-satisfying one
        seen, stack = set(), [t]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            if ev(u, g.g):
                return True
            if ev(u, g.f):
                stack.extend(succ[u])
        return False

    def _au(t: int, g: CoalUntil, depth: int) -> bool:
        # on a finite model every path fulfils it within |S| steps or never
        if ev(t, g.g):
            return True
        if depth == 0 or not ev(t, g.f):
            return False
        return all(_au(u, g, depth - 1) for u in succ[t])

    def _eg(t: int, g: CoalBox) -> bool:
        # a path staying in body states forever must reach a cycle of them
        good = {u for u in m.states if ev(u, g.f)}
        if t not in good:
            return False
        reach, stack = set(), [t]
        while stack:
            u = stack.pop()
            if u in reach:
                continue
            reach.add(u)
            stack.extend(v for v in succ[u] if v in good)
        for u in reach:
            seen, stack = set(), [v for v in succ[u] if v in good]
            while stack:
                v = stack.pop()
                if v == u:
                    return True
                if v in seen:
                    continue
                seen.add(v)
                stack.extend(w for w in succ[v] if w in good)
        return False

    return ev(s, f)
