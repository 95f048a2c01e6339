"""Constructive satisfiability checking for Alternating-time Temporal Logic.

Typical use::

    from atltab import parse, decide, synthesize, check

    theta = parse("<<1>>F p & <<2>>G ~q")
    verdict = decide(theta)
    if verdict.satisfiable:
        hintikka, model = synthesize(verdict.final)
        assert check(model, model.designated, theta)
"""
from .elimination import Verdict, decide
from .formula import ParseError, parse, render
from .mcheck import check, extension, verify_hintikka
from .synthesis import synthesize
from .tableau import Mode, ResourceLimit

__all__ = [
    "Mode", "ParseError", "ResourceLimit", "Verdict", "check", "decide",
    "extension", "parse", "render", "synthesize", "verify_hintikka",
]
__version__ = "0.1.0"
