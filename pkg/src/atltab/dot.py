"""Graphviz DOT export for pretableaux, tableaux and models.  Output is
deterministic: nodes in id order, edges in creation order."""
from __future__ import annotations

from typing import Iterable

from .cgm import CGM, MoveVector
from .elimination import Tableau
from .formula import Formula, render, sort_key
from .tableau import Pretableau

__all__ = ["pretableau_dot", "tableau_dot", "model_dot"]


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _formulas(fs: Iterable[Formula]) -> str:
    return "\n".join(render(f) for f in sorted(fs, key=sort_key))


def _vectors(vs: Iterable[MoveVector]) -> str:
    return "\n".join(",".join(map(str, v)) or "()" for v in sorted(vs))


def _header(name: str) -> list[str]:
    return [f"digraph {name} {{", '  node [fontname="monospace", shape=box];',
            '  edge [fontname="monospace", fontsize=10];']


def pretableau_dot(pt: Pretableau) -> str:
    """Prestates dashed, states solid, unwinding edges double-lined."""
    lines = _header("pretableau")
    for n in pt.nodes:
        label = _formulas(n.formulas)
        if n.owner is not None:
            label = f"[owner {n.owner}]\n{label}"
        style = "" if n.is_state else ", style=dashed"
        lines.append(f"  n{n.id} [label={_quote(label)}{style}];")
    for n in pt.nodes:
        if n.is_state:
            for g, labels in pt.moves.get(n.id, ()):
                lines.append(f"  n{n.id} -> n{g} [label={_quote(_vectors(labels))}];")
        else:
            for s in pt.unwind.get(n.id, ()):
                lines.append(f'  n{n.id} -> n{s} [color="black:black"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def tableau_dot(t: Tableau, name: str = "tableau") -> str:
    """States of a tableau; eliminated ones greyed out and tagged with the
    removing rule, states containing the input formula drawn with a double
    border."""
    lines = _header(name)
    for i, n in t.states.items():
        label = _formulas(n.formulas)
        if n.owner is not None:
            label = f"[owner {n.owner}]\n{label}"
        attrs = []
        gone = t.removed.get(i)
        if gone is not None:
            label = f"[{gone.rule}]\n{label}"
            attrs.append('style=filled, fillcolor=gray80, fontcolor=gray40')
        if t.theta in n.formulas:
            attrs.append("peripheries=2")
        extra = "".join(", " + a for a in attrs)
        lines.append(f"  n{i} [label={_quote(label)}{extra}];")
    for i in t.states:
        for target, labels in t.edges(i):
            dim = "" if t.is_alive(i) and t.is_alive(target) else ", color=gray60"
            lines.append(f"  n{i} -> n{target} [label={_quote(_vectors(labels))}{dim}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def model_dot(m: CGM) -> str:
    lines = ["digraph model {", '  node [fontname="monospace", shape=ellipse];',
             '  edge [fontname="monospace", fontsize=10];']
    for s in m.states:
        label = f"s{s}\n" + (",".join(sorted(m.labels[s])) or "-")
        extra = ", peripheries=2" if s == m.designated else ""
        lines.append(f"  s{s} [label={_quote(label)}{extra}];")
    for s in m.states:
        by_target: dict[int, list[MoveVector]] = {}
        for v in m.vectors(s):
            by_target.setdefault(m.delta[s][v], []).append(v)
        for target, vs in by_target.items():
            lines.append(f"  s{s} -> s{target} [label={_quote(_vectors(vs))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
