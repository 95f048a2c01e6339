"""Pretableau construction: the SR rule (prestates to minimal downward-saturated
states) and the Next rule (states to move-vector-labelled successor prestates).

Three construction modes are supported.  ``tight`` uses exactly the agents
occurring in the input formula, ``loose`` adds one fresh agent, and
``turn_based`` restricts frames so that a single owner agent acts at each state.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional

from .formula import (
    TOP, Alpha, Beta, CoalNext, Formula, Not, agents_of, classify, coalition,
    is_next_time, is_patently_inconsistent, sort_key,
)

__all__ = [
    "Mode", "ResourceLimit", "TableauNode", "NextList", "Pretableau",
    "ambient_agents", "saturate", "neg_index", "next_list", "next_prestates",
    "moves_for", "build_pretableau", "DEFAULT_NODE_CAP",
]

DEFAULT_NODE_CAP = 1_000_000

MoveVector = tuple[int, ...]


class Mode(str, Enum):
    TIGHT = "tight"
    LOOSE = "loose"
    TURN_BASED = "turn_based"


class ResourceLimit(RuntimeError):
    """Raised when construction would exceed the configured node cap."""


def ambient_agents(theta: Formula, mode: Mode | str) -> tuple[int, ...]:
    """Agent set the tableau works over.

    Tight mode uses the agents of ``theta`` (possibly none).  Loose mode adds
    one agent not occurring in ``theta``.  Turn-based mode needs an owner for
    every state, so a formula without agents is treated as a one-agent formula.
    """
    mode = Mode(mode)
    own = agents_of(theta)
    if mode is Mode.TIGHT:
        return own
    if mode is Mode.LOOSE:
        return own + ((own[-1] + 1) if own else 1,)
    return own or (1,)


@dataclass(frozen=True)
class TableauNode:
    """A state or prestate.  Identity within a pretableau is
    ``(formulas, kind, owner)``; ``id`` records creation order."""

    id: int
    formulas: frozenset[Formula]
    kind: str
    owner: Optional[int] = None

    @property
    def is_state(self) -> bool:
        return self.kind == "state"

    def sorted_formulas(self) -> list[Formula]:
        return sorted(self.formulas, key=sort_key)


# ---------------------------------------------------------------- SR

def saturate(gamma: Iterable[Formula], ambient: Iterable[int]) -> list[frozenset[Formula]]:
    """All minimal downward-saturated extensions of ``gamma`` (SR steps 1-2).

    Extensions without a next-time formula receive ``<<S>>X true``.  The
    result is deduplicated and returned in a canonical order.
    """
    ambient = coalition(ambient)
    start = frozenset(gamma)
    if not start:
        raise ValueError("cannot saturate an empty set")
    found: set[frozenset[Formula]] = set()
    # Depth-first over beta choices; alpha reducts are added eagerly.  A beta
    # formula that already has a reduct present does not branch: any
    # saturated superset of the current set contains a result of this search.
    stack = [(start, tuple(sorted(start, key=sort_key)))]
    while stack:
        current, pending = stack.pop()
        branched = False
        pending = list(pending)
        cur = set(current)
        while pending:
            f = pending.pop()
            kind = classify(f, ambient)
            if isinstance(kind, Alpha):
                for g in (kind.a1, kind.a2):
                    if g not in cur:
                        cur.add(g)
                        pending.append(g)
            elif isinstance(kind, Beta):
                if kind.b1 in cur or kind.b2 in cur:
                    continue
                options = (kind.b1,) if kind.b1 == kind.b2 else (kind.b2, kind.b1)
                for g in options:
                    stack.append((frozenset(cur | {g}), tuple(pending) + (g,)))
                branched = True
                break
        if not branched:
            found.add(frozenset(cur))
    minimal = [s for s in found if not any(t < s for t in found)]
    top_next = CoalNext(ambient, TOP)
    result = []
    for s in minimal:
        if not any(is_next_time(f, ambient) for f in s):
            s = s | {top_next}
        result.append(s)
    return sorted(set(result), key=_set_key)


def _set_key(s: frozenset[Formula]) -> tuple:
    return (len(s), sorted(sort_key(f) for f in s))


# ---------------------------------------------------------------- Next

def neg_index(sigma: MoveVector, m: int, l: int) -> Optional[int]:
    """Index of the negative next-time formula selected by ``sigma``, or
    ``None`` when there are no negative ones."""
    if l == 0:
        return None
    return sum(x - m for x in sigma if x >= m) % l


@dataclass(frozen=True)
class NextList:
    """The ordered next-time formulas of a state and the move structure they
    induce.  ``owner`` is set in turn-based mode only."""

    agents: tuple[int, ...]
    positives: tuple[CoalNext, ...]
    negatives: tuple[Not, ...]
    owner: Optional[int] = None

    @property
    def m(self) -> int:
        return len(self.positives)

    @property
    def l(self) -> int:
        return len(self.negatives)

    @property
    def r(self) -> int:
        return self.m + self.l

    @property
    def items(self) -> tuple[Formula, ...]:
        return self.positives + self.negatives

    @property
    def bounds(self) -> tuple[int, ...]:
        """Per-agent number of actions."""
        if self.owner is None:
            return (self.r,) * len(self.agents)
        return tuple(self.r if a == self.owner else 1 for a in self.agents)

    def vectors(self) -> Iterator[MoveVector]:
        """D of the state, in lexicographic order."""
        return itertools.product(*(range(b) for b in self.bounds))

    def _pos(self, agent: int) -> int:
        return self.agents.index(agent)

    def _n_set(self, sigma: MoveVector) -> frozenset[int]:
        return frozenset(a for a, x in zip(self.agents, sigma) if x >= self.m)

    def prestate(self, sigma: MoveVector) -> frozenset[Formula]:
        """The successor prestate for ``sigma``."""
        if self.owner is not None:
            return self._prestate_turn_based(sigma)
        out = [chi.f for p, chi in enumerate(self.positives)
               if all(sigma[self._pos(a)] == p for a in chi.agents)]
        q = neg_index(sigma, self.m, self.l)
        if q is not None:
            chi = self.negatives[q]
            if set(self.agents) - set(chi.f.agents) <= self._n_set(sigma):
                out.append(Not(chi.f.f))
        return frozenset(out) or frozenset({TOP})

    def _prestate_turn_based(self, sigma: MoveVector) -> frozenset[Formula]:
        a = self.owner
        choice = sigma[self._pos(a)]
        out = []
        for p, chi in enumerate(self.positives):
            if a not in chi.agents or choice == p:
                out.append(chi.f)
        for q, chi in enumerate(self.negatives):
            # the owner's vote for a negative formula is its position in L
            if a in chi.f.agents or choice == self.m + q:
                out.append(Not(chi.f.f))
        return frozenset(out) or frozenset({TOP})

    def moves_for(self, chi: Formula) -> frozenset[MoveVector]:
        """Move vectors witnessing ``chi`` (an A-move or co-A-move class)."""
        if chi in self.positives:
            p = self.positives.index(chi)
            if self.owner is not None:
                if self.owner not in chi.agents:
                    return frozenset(self.vectors())
                i = self._pos(self.owner)
                return frozenset(s for s in self.vectors() if s[i] == p)
            idx = [self._pos(a) for a in chi.agents]
            return frozenset(s for s in self.vectors() if all(s[i] == p for i in idx))
        if chi in self.negatives:
            q = self.negatives.index(chi)
            if self.owner is not None:
                if self.owner in chi.f.agents:
                    return frozenset(self.vectors())
                i = self._pos(self.owner)
                return frozenset(s for s in self.vectors() if s[i] == self.m + q)
            need = set(self.agents) - set(chi.f.agents)
            return frozenset(s for s in self.vectors()
                             if neg_index(s, self.m, self.l) == q and need <= self._n_set(s))
        raise KeyError(f"{chi} is not a next-time formula of this state")


def next_list(delta: Iterable[Formula], ambient: Iterable[int],
              owner: Optional[int] = None) -> NextList:
    """Order the next-time formulas of ``delta``: positives, then proper
    negatives, each block by (length, rendering)."""
    ambient = coalition(ambient)
    fs = [f for f in delta if is_next_time(f, ambient)]
    pos = tuple(sorted((f for f in fs if isinstance(f, CoalNext)), key=sort_key))
    neg = tuple(sorted((f for f in fs if isinstance(f, Not)), key=sort_key))
    return NextList(ambient, pos, neg, owner)


def next_prestates(delta: Iterable[Formula], ambient: Iterable[int],
                   owner: Optional[int] = None) -> dict[MoveVector, frozenset[Formula]]:
    """Apply Next to a state: the successor prestate of every move vector,
    in lexicographic order of vectors."""
    nl = next_list(delta, ambient, owner)
    return {sigma: nl.prestate(sigma) for sigma in nl.vectors()}


def moves_for(delta: Iterable[Formula], chi: Formula, ambient: Iterable[int],
              owner: Optional[int] = None) -> frozenset[MoveVector]:
    return next_list(delta, ambient, owner).moves_for(chi)


# ---------------------------------------------------------------- construction

@dataclass
class Pretableau:
    """Result of the construction phase.

    ``unwind`` maps a prestate id to its state ids; ``moves`` maps a state id
    to ``(prestate id, vector set)`` pairs in order of their least vector.
    Inconsistent states have no outgoing moves.
    """

    theta: Formula
    mode: Mode
    agents: tuple[int, ...]
    nodes: list[TableauNode] = field(default_factory=list)
    root: int = 0
    unwind: dict[int, tuple[int, ...]] = field(default_factory=dict)
    moves: dict[int, tuple[tuple[int, frozenset[MoveVector]], ...]] = field(default_factory=dict)
    next_lists: dict[int, NextList] = field(default_factory=dict)

    @property
    def states(self) -> list[TableauNode]:
        return [n for n in self.nodes if n.is_state]

    @property
    def prestates(self) -> list[TableauNode]:
        return [n for n in self.nodes if not n.is_state]

    def node(self, i: int) -> TableauNode:
        return self.nodes[i]


def build_pretableau(theta: Formula, mode: Mode | str = Mode.TIGHT,
                     node_cap: int = DEFAULT_NODE_CAP,
                     agents: Optional[Iterable[int]] = None) -> Pretableau:
    """Alternate SR and Next from the prestate ``{theta}`` until no new
    prestates appear.  ``agents`` overrides the mode's agent set; it must
    contain every agent of ``theta``."""
    mode = Mode(mode)
    if agents is None:
        agents = ambient_agents(theta, mode)
    else:
        agents = coalition(agents)
        missing = set(agents_of(theta)) - set(agents)
        if missing:
            raise ValueError(f"agents {sorted(missing)} missing from the agent set")
        if mode is Mode.TURN_BASED and not agents:
            raise ValueError("turn-based mode needs at least one agent")
    owners: tuple[Optional[int], ...] = agents if mode is Mode.TURN_BASED else (None,)
    pt = Pretableau(theta, mode, agents)
    index: dict[tuple[frozenset[Formula], str, Optional[int]], int] = {}

    def intern(formulas: frozenset[Formula], kind: str, owner: Optional[int]) -> tuple[int, bool]:
        key = (formulas, kind, owner)
        i = index.get(key)
        if i is not None:
            return i, False
        if len(pt.nodes) >= node_cap:
            raise ResourceLimit(f"node cap of {node_cap} exceeded")
        i = len(pt.nodes)
        pt.nodes.append(TableauNode(i, formulas, kind, owner))
        index[key] = i
        return i, True

    pt.root, _ = intern(frozenset({theta}), "prestate", None)
    frontier = [pt.root]
    while frontier:
        new_states = []
        for g in frontier:
            targets = []
            for ext in saturate(pt.nodes[g].formulas, agents):
                for owner in owners:
                    s, fresh = intern(ext, "state", owner)
                    targets.append(s)
                    if fresh:
                        new_states.append(s)
            pt.unwind[g] = tuple(targets)
        frontier = []
        for s in new_states:
            node = pt.nodes[s]
            nl = next_list(node.formulas, agents, node.owner)
            pt.next_lists[s] = nl
            if is_patently_inconsistent(node.formulas):
                pt.moves[s] = ()
                continue
            grouped: dict[int, list[MoveVector]] = {}
            for sigma in nl.vectors():
                g, fresh = intern(nl.prestate(sigma), "prestate", None)
                if fresh:
                    frontier.append(g)
                grouped.setdefault(g, []).append(sigma)
            pt.moves[s] = tuple((g, frozenset(v)) for g, v in grouped.items())
    return pt
