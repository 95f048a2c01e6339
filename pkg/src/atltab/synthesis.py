"""Model synthesis from an open final tableau.

Each eventuality gets finite witness trees certifying its realization.  These
are padded into tree components and stitched together in a grid indexed by
(eventuality, state).  The result is a Hintikka structure, which expands to a
concurrent game model.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .cgm import CGM, MoveVector
from .elimination import Group, Tableau, obligation, seed_formula
from .formula import Atom, CoalUntil, Formula, is_eventuality, sort_key

__all__ = [
    "TreeNode", "RealizationError", "realization_rank", "witness_tree",
    "simple_tree", "final_tree_component", "build_hintikka", "to_cgm",
    "make_bijective", "synthesize",
]


class RealizationError(RuntimeError):
    """An eventuality is not realized where the final tableau says it is."""


@dataclass(frozen=True)
class TreeNode:
    """A node of a coloured tree: ``color`` is a tableau state id; each child
    edge carries a set of move vectors.  Subtrees may be shared."""

    color: int
    children: tuple[tuple[frozenset[MoveVector], "TreeNode"], ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self):
        """Distinct nodes reachable from here, depth first."""
        seen: set[int] = set()
        stack = [self]
        while stack:
            n = stack.pop()
            if id(n) in seen:
                continue
            seen.add(id(n))
            yield n
            stack.extend(c for _, c in reversed(n.children))


def _least_alive(t: Tableau, g: Group) -> int:
    return min(x for x in g.targets if t.is_alive(x))


def _relevant(t: Tableau, i: int, xi: Formula) -> Optional[list[Group]]:
    """Groups of ``i`` covering the moves that postpone ``xi``, or ``None``
    when ``i`` does not postpone ``xi``."""
    fs = t.states[i].formulas
    chi = obligation(xi, t.agents)
    nl = t.next_lists[i]
    if xi not in fs or chi not in nl.items:
        return None
    if isinstance(xi, CoalUntil) and xi.f not in fs:
        return None
    sigmas = nl.moves_for(chi)
    return [g for g in t.groups[i] if g.labels & sigmas]


def realization_rank(t: Tableau, xi: Formula) -> dict[int, int]:
    """Rank of every surviving state at which ``xi`` is realized: 0 when the
    fulfilling formula is present, otherwise one more than the worst best
    successor over the postponing moves."""
    if not is_eventuality(xi):
        raise ValueError(f"not an eventuality: {xi}")
    seed = seed_formula(xi)
    alive = t.alive()
    rank = {i: 0 for i in alive if seed in t.states[i].formulas}
    pending = {}
    for i in alive:
        if i not in rank:
            groups = _relevant(t, i, xi)
            if groups is not None:
                pending[i] = groups
    r = 0
    while pending:
        r += 1
        new = [i for i, groups in pending.items()
               if all(any(x in rank and t.is_alive(x) for x in g.targets) for g in groups)]
        if not new:
            break
        for i in new:
            rank[i] = r
            del pending[i]
    unrealized = [i for i in alive if i not in rank and xi in t.states[i].formulas]
    if unrealized:
        raise RealizationError(f"{xi} unrealized at states {unrealized}")
    return rank


def simple_tree(t: Tableau, i: int) -> TreeNode:
    """Root coloured ``i`` with one leaf per successor prestate, coloured by
    the least surviving state of that prestate."""
    if not t.is_alive(i):
        raise ValueError(f"state {i} has been eliminated")
    return TreeNode(i, tuple((g.labels, TreeNode(_least_alive(t, g))) for g in t.groups[i]))


def _best_child(t: Tableau, g: Group, rank: dict[int, int]) -> int:
    return min((x for x in g.targets if t.is_alive(x) and x in rank),
               key=lambda x: (rank[x], x))


def witness_tree(t: Tableau, i: int, xi: Formula, rank: Optional[dict[int, int]] = None,
                 _cache: Optional[dict[int, TreeNode]] = None) -> TreeNode:
    """Realization witness tree for ``xi`` rooted at ``i``.  Interior nodes
    have one child per postponing successor prestate, coloured by a least-rank
    state; rank-0 nodes are leaves."""
    if xi not in t.states[i].formulas or not t.is_alive(i):
        raise ValueError(f"state {i} does not contain {xi}")
    rank = realization_rank(t, xi) if rank is None else rank
    cache = {} if _cache is None else _cache
    return _witness(t, i, xi, rank, cache, pad=False)


def _witness(t: Tableau, i: int, xi: Formula, rank: dict[int, int],
             cache: dict[int, TreeNode], pad: bool) -> TreeNode:
    node = cache.get(i)
    if node is not None:
        return node
    if rank[i] == 0:
        node = TreeNode(i)
    else:
        relevant = {g.prestate for g in _relevant(t, i, xi) or ()}
        children = []
        for g in t.groups[i]:
            if g.prestate in relevant:
                child = _witness(t, _best_child(t, g, rank), xi, rank, cache, pad)
            elif pad:
                child = TreeNode(_least_alive(t, g))
            else:
                continue
            children.append((g.labels, child))
        node = TreeNode(i, tuple(children))
    cache[i] = node
    return node


def final_tree_component(t: Tableau, xi: Optional[Formula], i: int,
                         rank: Optional[dict[int, int]] = None,
                         _cache: Optional[dict[int, TreeNode]] = None) -> TreeNode:
    """Witness tree for ``xi`` at ``i`` padded to cover every move vector, or
    the simple tree when ``xi`` is absent or already fulfilled at ``i``."""
    if xi is None or xi not in t.states[i].formulas:
        return simple_tree(t, i)
    rank = realization_rank(t, xi) if rank is None else rank
    if rank[i] == 0:
        return simple_tree(t, i)
    return _witness(t, i, xi, rank, {} if _cache is None else _cache, pad=True)


# ---------------------------------------------------------------- grid

def build_hintikka(t: Tableau) -> CGM:
    """Stitch final tree components into a Hintikka structure.

    Cell ``(r, j)`` holds the component for eventuality ``r`` rooted at state
    ``j``.  Interior nodes become structure states; a leaf coloured ``j`` in
    row ``r`` is replaced by the root of cell ``(r + 1 mod rows, j)``.  Cells
    are built on demand from the start cell and shared once built.
    """
    if not t.is_open:
        raise ValueError("tableau is closed")
    alive = sorted(t.alive())
    evs = sorted({f for i in alive for f in t.states[i].formulas if is_eventuality(f)},
                 key=sort_key)
    rows = max(len(evs), 1)
    ranks = [realization_rank(t, xi) for xi in evs]
    caches: list[dict[int, TreeNode]] = [{} for _ in evs]
    theta = t.theta
    start_row = evs.index(theta) if theta in evs else 0
    start = (start_row, min(t.designated()))

    def component(cell: tuple[int, int]) -> TreeNode:
        r, j = cell
        if not evs:
            return simple_tree(t, j)
        return final_tree_component(t, evs[r], j, ranks[r], caches[r])

    ids: dict[tuple[int, int, int], int] = {}
    colors: list[int] = []
    # per structure state: (labels, target) where target is an interior key
    # or a cell whose root is meant
    pending_edges: list[list[tuple[frozenset[MoveVector], tuple]]] = []
    roots: dict[tuple[int, int], int] = {}
    queue = deque([start])
    queued = {start}
    while queue:
        cell = queue.popleft()
        r, _ = cell
        tree = component(cell)
        for node in tree.walk():
            if node.is_leaf:
                continue
            key = (cell[0], cell[1], node.color)
            ids[key] = len(colors)
            colors.append(node.color)
            edges = []
            for labels, child in node.children:
                if child.is_leaf:
                    nxt = ((r + 1) % rows, child.color)
                    edges.append((labels, ("cell", nxt)))
                    if nxt not in queued:
                        queued.add(nxt)
                        queue.append(nxt)
                else:
                    edges.append((labels, ("node", (cell[0], cell[1], child.color))))
            pending_edges.append(edges)
        roots[cell] = ids[(cell[0], cell[1], tree.color)]

    delta: list[dict[MoveVector, int]] = []
    for edges in pending_edges:
        d: dict[MoveVector, int] = {}
        for labels, (kind, ref) in edges:
            target = roots[ref] if kind == "cell" else ids[ref]
            for v in labels:
                d[v] = target
        delta.append(d)
    hintikka = tuple(t.states[c].formulas for c in colors)
    return CGM(
        agents=t.agents,
        moves=tuple(t.next_lists[c].bounds for c in colors),
        delta=tuple(delta),
        labels=tuple(_atoms(h) for h in hintikka),
        designated=roots[start],
        hintikka=hintikka,
    )


def _atoms(fs: frozenset[Formula]) -> frozenset[str]:
    return frozenset(f.name for f in fs if isinstance(f, Atom))


def to_cgm(h: CGM) -> CGM:
    """Forget formula labels, keeping the atoms true at each state."""
    labels = h.labels if h.hintikka is None else tuple(_atoms(fs) for fs in h.hintikka)
    return CGM(h.agents, h.moves, h.delta, labels, h.designated)


def make_bijective(m: CGM) -> CGM:
    """Unfold ``m`` one step so that different move vectors at a state always
    lead to different states.  A copy of state ``t`` is identified by the
    state and move vector it was entered from, so the designated state gets
    a copy of its own."""
    index: dict[tuple, int] = {}
    origin: list[int] = []
    queue: deque[tuple] = deque()

    def intern(key: tuple) -> int:
        i = index.get(key)
        if i is None:
            i = index[key] = len(origin)
            origin.append(key[0])
            queue.append(key)
        return i

    root = intern((m.designated, None, None))
    delta: list[dict[MoveVector, int]] = []
    while queue:
        key = queue.popleft()
        s = key[0]
        d = {v: intern((m.delta[s][v], s, v)) for v in m.vectors(s)}
        delta.append(d)
    return CGM(
        agents=m.agents,
        moves=tuple(m.moves[s] for s in origin),
        delta=tuple(delta),
        labels=tuple(m.labels[s] for s in origin),
        designated=root,
        hintikka=None if m.hintikka is None else tuple(m.hintikka[s] for s in origin),
    )


def synthesize(t: Tableau, bijective: bool = False) -> tuple[CGM, CGM]:
    """Hintikka structure and the model derived from it."""
    h = build_hintikka(t)
    model = to_cgm(h)
    if bijective:
        model = make_bijective(model)
    return h, model
