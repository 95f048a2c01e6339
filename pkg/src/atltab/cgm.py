"""Explicit concurrent game models and their JSON serialization.

A model has states ``0..n-1``.  State ``s`` gives agent ``agents[i]`` the
actions ``0..moves[s][i]-1``; ``delta[s]`` maps every move vector allowed at
``s`` to a successor.  A Hintikka structure is a model that also carries a
formula set per state in ``hintikka``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Any, Iterator, Mapping, Optional

import jsonschema

from .formula import Formula, parse, render, sort_key

__all__ = ["CGM", "MODEL_SCHEMA", "ModelFormatError", "to_json", "from_json", "dumps", "loads"]

MoveVector = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class CGM:
    agents: tuple[int, ...]
    moves: tuple[tuple[int, ...], ...]
    delta: tuple[Mapping[MoveVector, int], ...]
    labels: tuple[frozenset[str], ...]
    designated: int = 0
    hintikka: Optional[tuple[frozenset[Formula], ...]] = None

    def __post_init__(self) -> None:
        n = len(self.moves)
        if not (len(self.delta) == len(self.labels) == n):
            raise ValueError("moves, delta and labels must cover the same states")
        if n and not 0 <= self.designated < n:
            raise ValueError(f"designated state {self.designated} out of range")
        for s in range(n):
            if len(self.moves[s]) != len(self.agents) or min(self.moves[s], default=1) < 1:
                raise ValueError(f"bad move counts at state {s}")
            if set(self.delta[s]) != set(self.vectors(s)):
                raise ValueError(f"transition function at state {s} is not total")
            if any(not 0 <= t < n for t in self.delta[s].values()):
                raise ValueError(f"transition target out of range at state {s}")

    @property
    def states(self) -> range:
        return range(len(self.moves))

    def vectors(self, s: int) -> Iterator[MoveVector]:
        return itertools.product(*(range(d) for d in self.moves[s]))

    def successors(self, s: int) -> set[int]:
        return set(self.delta[s].values())

    def agent_position(self, a: int) -> int:
        try:
            return self.agents.index(a)
        except ValueError:
            raise ValueError(f"agent {a} does not belong to the model") from None


# ---------------------------------------------------------------- serialization

FORMAT = "atltab-cgm"
VERSION = 1

MODEL_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Concurrent game model",
    "type": "object",
    "required": ["format", "version", "agents", "designated", "states", "transitions"],
    "additionalProperties": False,
    "properties": {
        "format": {"const": FORMAT},
        "version": {"const": VERSION},
        "agents": {"type": "array", "items": {"type": "integer", "minimum": 1}, "uniqueItems": True},
        "designated": {"type": "integer", "minimum": 0},
        "states": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "labels", "moves"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "labels": {"type": "array", "items": {"type": "string"}},
                    "moves": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                    "formulas": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
        "transitions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["from", "vector", "to"],
                "additionalProperties": False,
                "properties": {
                    "from": {"type": "integer", "minimum": 0},
                    "vector": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "to": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}


class ModelFormatError(ValueError):
    pass


def to_json(m: CGM) -> dict[str, Any]:
    states = []
    for s in m.states:
        entry: dict[str, Any] = {"id": s, "labels": sorted(m.labels[s]), "moves": list(m.moves[s])}
        if m.hintikka is not None:
            entry["formulas"] = [render(f) for f in sorted(m.hintikka[s], key=sort_key)]
        states.append(entry)
    transitions = [
        {"from": s, "vector": list(v), "to": m.delta[s][v]}
        for s in m.states for v in m.vectors(s)
    ]
    return {
        "format": FORMAT, "version": VERSION, "agents": list(m.agents),
        "designated": m.designated, "states": states, "transitions": transitions,
    }


def from_json(doc: Any) -> CGM:
    try:
        jsonschema.validate(doc, MODEL_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ModelFormatError(f"invalid model: {exc.message}") from None
    n = len(doc["states"])
    if sorted(st["id"] for st in doc["states"]) != list(range(n)):
        raise ModelFormatError("state ids must be 0..n-1")
    by_id = {st["id"]: st for st in doc["states"]}
    delta: list[dict[MoveVector, int]] = [{} for _ in range(n)]
    for tr in doc["transitions"]:
        s = tr["from"]
        if s >= n:
            raise ModelFormatError(f"transition from unknown state {s}")
        v = tuple(tr["vector"])
        if v in delta[s]:
            raise ModelFormatError(f"duplicate transition {s} {list(v)}")
        delta[s][v] = tr["to"]
    has_formulas = all("formulas" in by_id[s] for s in range(n))
    try:
        return CGM(
            agents=tuple(doc["agents"]),
            moves=tuple(tuple(by_id[s]["moves"]) for s in range(n)),
            delta=tuple(delta),
            labels=tuple(frozenset(by_id[s]["labels"]) for s in range(n)),
            designated=doc["designated"],
            hintikka=tuple(frozenset(parse(f) for f in by_id[s]["formulas"]) for s in range(n))
            if has_formulas else None,
        )
    except ValueError as exc:
        raise ModelFormatError(f"invalid model: {exc}") from None


def dumps(m: CGM) -> str:
    return json.dumps(to_json(m), indent=1, sort_keys=True) + "\n"


def loads(text: str) -> CGM:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not JSON: {exc}") from None
    return from_json(doc)
