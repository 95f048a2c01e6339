"""State elimination: removal of prestates (PR), the elimination rules E1
(patent inconsistency), E2 (missing successors) and E3 (unrealized
eventualities), and the dovetailed loop deciding satisfiability.

Eliminated states are tombstoned rather than deleted, so the trace of which
rule removed which state stays available for reporting.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

import networkx as nx

from .formula import (
    CoalBox, CoalNext, CoalUntil, Formula, Not, coalition, is_eventuality,
    is_patently_inconsistent, sort_key,
)
from .tableau import (
    DEFAULT_NODE_CAP, Mode, MoveVector, NextList, Pretableau, TableauNode,
    build_pretableau,
)

__all__ = [
    "Group", "Removal", "Tableau", "Verdict", "eliminate_prestates",
    "apply_e1", "apply_e2", "apply_e3", "mark_realization", "obligation",
    "seed_formula", "eventualities", "run_elimination", "decide",
]


@dataclass(frozen=True)
class Group:
    """The move vectors leading from a state to one prestate, and that
    prestate's states.  Groups of a state partition its move vectors."""

    prestate: int
    labels: frozenset[MoveVector]
    targets: tuple[int, ...]


@dataclass(frozen=True)
class Removal:
    rule: str
    stage: int


@dataclass(frozen=True)
class Tableau:
    """States and labelled state-to-state edges; no prestates.

    ``groups`` keeps the prestate structure induced by Next so that E2 and the
    synthesis phase can reason per move vector.  ``removed`` records
    tombstones.
    """

    theta: Formula
    mode: Mode
    agents: tuple[int, ...]
    states: Mapping[int, TableauNode]
    groups: Mapping[int, tuple[Group, ...]]
    next_lists: Mapping[int, NextList]
    removed: Mapping[int, Removal] = field(default_factory=lambda: MappingProxyType({}))

    def alive(self) -> list[int]:
        return [i for i in self.states if i not in self.removed]

    def is_alive(self, i: int) -> bool:
        return i in self.states and i not in self.removed

    def edges(self, i: int) -> list[tuple[int, frozenset[MoveVector]]]:
        """Outgoing edges of ``i`` to all states, parallel labels merged."""
        merged: dict[int, set[MoveVector]] = {}
        for g in self.groups.get(i, ()):
            for t in g.targets:
                merged.setdefault(t, set()).update(g.labels)
        return [(t, frozenset(v)) for t, v in merged.items()]

    def successors(self, i: int, sigma: MoveVector) -> tuple[int, ...]:
        for g in self.groups.get(i, ()):
            if sigma in g.labels:
                return g.targets
        return ()

    def designated(self) -> list[int]:
        return [i for i in self.alive() if self.theta in self.states[i].formulas]

    @property
    def is_open(self) -> bool:
        return bool(self.designated())

    def with_removed(self, removed: Mapping[int, Removal]) -> "Tableau":
        return replace(self, removed=MappingProxyType(dict(removed)))


@dataclass(frozen=True)
class Verdict:
    satisfiable: bool
    mode: Mode
    pretableau: Pretableau
    initial: Tableau
    final: Tableau
    trace: tuple[tuple[int, str, int], ...]
    stats: Mapping[str, object]

    @property
    def designated(self) -> list[int]:
        return self.final.designated()


# ---------------------------------------------------------------- PR

def eliminate_prestates(pt: Pretableau) -> Tableau:
    """Replace every state-to-prestate edge by edges to the prestate's states."""
    states = {n.id: n for n in pt.states}
    groups = {
        s: tuple(Group(g, labels, pt.unwind[g]) for g, labels in pt.moves.get(s, ()))
        for s in states
    }
    return Tableau(pt.theta, pt.mode, pt.agents, MappingProxyType(states),
                   MappingProxyType(groups), MappingProxyType(dict(pt.next_lists)))


# ---------------------------------------------------------------- rules

def _e1_victims(t: Tableau) -> list[int]:
    return [i for i in t.alive() if is_patently_inconsistent(t.states[i].formulas)]


def apply_e1(t: Tableau, stage: int = 0) -> Tableau:
    removed = dict(t.removed)
    for i in _e1_victims(t):
        removed[i] = Removal("E1", stage)
    return t.with_removed(removed)


def _e2_fixpoint(t: Tableau, removed: dict[int, Removal], stage: int) -> list[int]:
    """Remove states lacking a surviving successor for some move vector."""
    victims = []
    changed = True
    while changed:
        changed = False
        for i in t.states:
            if i in removed:
                continue
            for g in t.groups[i]:
                if all(x in removed for x in g.targets):
                    removed[i] = Removal("E2", stage)
                    victims.append(i)
                    changed = True
                    break
    return victims


def apply_e2(t: Tableau, stage: int = 0) -> Tableau:
    removed = dict(t.removed)
    _e2_fixpoint(t, removed, stage)
    return t.with_removed(removed)


def obligation(xi: Formula, ambient: Iterable[int]) -> Formula:
    """The next-time formula through which ``xi`` is postponed."""
    if isinstance(xi, CoalUntil):
        return CoalNext(xi.agents, xi)
    if isinstance(xi, Not) and isinstance(xi.f, CoalBox):
        box = xi.f
        if box.agents == coalition(ambient):
            return CoalNext((), Not(box))
        return Not(CoalNext(box.agents, box))
    raise ValueError(f"not an eventuality: {xi}")


def seed_formula(xi: Formula) -> Formula:
    """The formula whose presence fulfils ``xi`` immediately."""
    if isinstance(xi, CoalUntil):
        return xi.g
    if isinstance(xi, Not) and isinstance(xi.f, CoalBox):
        return Not(xi.f.f)
    raise ValueError(f"not an eventuality: {xi}")


def _postpones(t: Tableau, i: int, xi: Formula, chi: Formula) -> bool:
    fs = t.states[i].formulas
    if xi not in fs or chi not in t.next_lists[i].items:
        return False
    return not isinstance(xi, CoalUntil) or xi.f in fs


def _relevant_groups(t: Tableau, i: int, chi: Formula) -> list[Group]:
    sigmas = t.next_lists[i].moves_for(chi)
    return [g for g in t.groups[i] if g.labels & sigmas]


def mark_realization(t: Tableau, xi: Formula, removed: Optional[Mapping[int, Removal]] = None) -> set[int]:
    """States of ``t`` at which ``xi`` is realized (least fixpoint marking)."""
    if not is_eventuality(xi):
        raise ValueError(f"not an eventuality: {xi}")
    removed = t.removed if removed is None else removed
    alive = [i for i in t.states if i not in removed]
    seed = seed_formula(xi)
    chi = obligation(xi, t.agents)
    marked = {i for i in alive if seed in t.states[i].formulas}
    candidates = [i for i in alive if i not in marked and _postpones(t, i, xi, chi)]
    relevant = {i: _relevant_groups(t, i, chi) for i in candidates}
    changed = True
    while changed:
        changed = False
        for i in candidates:
            if i in marked:
                continue
            if all(any(x in marked and x not in removed for x in g.targets) for g in relevant[i]):
                marked.add(i)
                changed = True
    return marked


def _e3_victims(t: Tableau, xi: Formula, removed: Mapping[int, Removal]) -> list[int]:
    marked = mark_realization(t, xi, removed)
    return [i for i in t.states
            if i not in removed and i not in marked and xi in t.states[i].formulas]


def _apply_e3(t: Tableau, xi: Formula, removed: dict[int, Removal], stage: int,
              cascade: bool) -> list[tuple[int, str]]:
    victims = _e3_victims(t, xi, removed)
    if not cascade:
        for i in victims:
            removed[i] = Removal("E3", stage)
        return [(i, "E3") for i in victims]
    # Remove the unrealized states one strongly connected component at a
    # time, sinks first, letting E2 take any state whose successors all go.
    events: list[tuple[int, str]] = []
    pending = set(victims)
    while pending:
        graph = nx.DiGraph()
        graph.add_nodes_from(pending)
        for i in pending:
            for g in t.groups[i]:
                graph.add_edges_from((i, x) for x in g.targets if x in pending)
        cond = nx.condensation(graph)
        sinks = [c for c in cond.nodes if cond.out_degree(c) == 0]
        comp = min((cond.nodes[c]["members"] for c in sinks), key=min)
        for i in sorted(comp):
            removed[i] = Removal("E3", stage)
            events.append((i, "E3"))
        pending -= comp
        for i in _e2_fixpoint(t, removed, stage):
            events.append((i, "E2"))
            pending.discard(i)
    return events


def apply_e3(t: Tableau, xi: Formula, stage: int = 0, cascade: bool = False) -> Tableau:
    """Remove every state containing ``xi`` at which ``xi`` is not realized.

    With ``cascade=True`` the removals are interleaved with E2, which is then
    credited with states it removes first.  The surviving set is the same as
    that of a plain E3 step followed by E2.
    """
    removed = dict(t.removed)
    _apply_e3(t, xi, removed, stage, cascade)
    return t.with_removed(removed)


def eventualities(t: Tableau) -> list[Formula]:
    """Eventualities occurring in surviving states, in canonical order."""
    found = {f for i in t.alive() for f in t.states[i].formulas if is_eventuality(f)}
    return sorted(found, key=sort_key)


def run_elimination(t0: Tableau, order: Optional[Iterable[Formula]] = None,
                    ) -> tuple[Tableau, tuple[tuple[int, str, int], ...]]:
    """E1 once, then E3/E2 cycles over the eventualities until a whole cycle
    removes nothing.  Returns the final tableau and the trace of removals as
    ``(state, rule, stage)`` triples."""
    removed = dict(t0.removed)
    trace: list[tuple[int, str, int]] = []
    for i in _e1_victims(t0):
        removed[i] = Removal("E1", 0)
        trace.append((i, "E1", 0))
    stage = 1
    for i in _e2_fixpoint(t0, removed, stage):
        trace.append((i, "E2", stage))
    after_e1 = t0.with_removed(removed)
    evs = list(order) if order is not None else eventualities(after_e1)
    while True:
        changed = False
        for xi in evs:
            stage += 1
            events = _apply_e3(t0, xi, removed, stage, cascade=True)
            events += [(i, "E2") for i in _e2_fixpoint(t0, removed, stage)]
            trace.extend((i, rule, stage) for i, rule in events)
            changed = changed or bool(events)
        if not changed:
            break
    return t0.with_removed(removed), tuple(trace)


# ---------------------------------------------------------------- decision

def _count(trace: Iterable[tuple[int, str, int]], rule: str) -> int:
    return sum(1 for _, r, _ in trace if r == rule)


def decide(theta: Formula, mode: Mode | str = Mode.TIGHT,
           node_cap: int = DEFAULT_NODE_CAP,
           agents: Optional[Iterable[int]] = None) -> Verdict:
    """Decide satisfiability of ``theta``.  ``mode`` may also be ``"general"``:
    tight satisfiability first, then loose if that fails.  ``agents``
    overrides the agent set of tight and turn-based runs."""
    if str(getattr(mode, "value", mode)) == "general":
        tight = decide(theta, Mode.TIGHT, node_cap, agents)
        if tight.satisfiable or agents is not None:
            return tight
        return decide(theta, Mode.LOOSE, node_cap)
    mode = Mode(mode)
    if agents is not None and mode is Mode.LOOSE:
        raise ValueError("an explicit agent set cannot be combined with loose mode")
    t_start = time.perf_counter()
    pt = build_pretableau(theta, mode, node_cap, agents)
    t_built = time.perf_counter()
    initial = eliminate_prestates(pt)
    final, trace = run_elimination(initial)
    t_done = time.perf_counter()
    stats = {
        "prestates": len(pt.prestates),
        "states": len(pt.states),
        "eliminated_e1": _count(trace, "E1"),
        "eliminated_e2": _count(trace, "E2"),
        "eliminated_e3": _count(trace, "E3"),
        "final_states": len(final.alive()),
        "time_construction": t_built - t_start,
        "time_elimination": t_done - t_built,
    }
    return Verdict(final.is_open, mode, pt, initial, final, trace, MappingProxyType(stats))
