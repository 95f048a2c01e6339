import random

import pytest

from atltab.corpus import curated, random_corpus
from atltab.elimination import (
    apply_e1, apply_e2, apply_e3, decide, eliminate_prestates, eventualities,
    mark_realization, run_elimination,
)
from atltab.formula import Not, atoms_of, is_patently_inconsistent, parse
from atltab.mcheck import check
from atltab.tableau import build_pretableau

from util import THETA1, THETA2, all_cgms, fs, random_cgm, same_modulo


def initial(theta, mode="tight"):
    return eliminate_prestates(build_pretableau(theta, mode))


def state_id(t, expected):
    ids = [i for i, n in t.states.items() if same_modulo(n.formulas, expected)]
    assert len(ids) == 1
    return ids[0]


XI1 = parse("~<<1>>G p")
XI2 = parse("<<2>>(p U q)")

D1 = fs("~<<1>>G p & <<1,2>>X p & ~<<2>>X ~p", "~<<1>>G p", "<<1,2>>X p",
        "~<<2>>X ~p", "~<<1>>X <<1>>G p")
D2 = fs("~<<1>>G p & <<1,2>>X p & ~<<2>>X ~p", "~<<1>>G p", "<<1,2>>X p", "~<<2>>X ~p", "~p")
D3 = fs("~<<1>>G p", "~<<1>>X <<1>>G p")
D4 = fs("~<<1>>G p", "~p", "<<1,2>>X true")

E1 = fs("<<1>>G ~q & <<2>>(p U q)", "<<1>>G ~q", "<<2>>(p U q)", "~q",
        "<<1>>X <<1>>G ~q", "p", "<<2>>X <<2>>(p U q)")
E2 = fs("<<1>>G ~q & <<2>>(p U q)", "<<1>>G ~q", "<<2>>(p U q)", "~q", "<<1>>X <<1>>G ~q", "q")
E3 = fs("<<1>>G ~q", "~q", "<<1>>X <<1>>G ~q", "<<2>>(p U q)", "q")
E4 = fs("<<1>>G ~q", "~q", "<<1>>X <<1>>G ~q", "<<2>>(p U q)", "p", "<<2>>X <<2>>(p U q)")


class TestPrestateElimination:
    def test_theta1(self):
        t = initial(THETA1)
        assert len(t.states) == 7
        d1 = state_id(t, D1)
        targets = {t.states[x].formulas: labels for x, labels in t.edges(d1)}
        box = {(0, 2), (1, 2), (2, 1)}
        assert targets[next(f for f in targets if same_modulo(f, D3))] == box
        assert targets[next(f for f in targets if same_modulo(f, D4))] == box

    def test_theta2(self):
        assert len(initial(THETA2).states) == 8

    def test_atom(self):
        t = initial(parse("p"))
        assert [n.formulas for n in t.states.values()] == [fs("p", "<<>>X true"),
                                                           fs("true", "<<>>X true")]
        a, b = t.states
        assert t.edges(a) == [(b, {()})]
        assert t.edges(b) == [(b, {()})]


class TestRules:
    def test_e1_theta2(self):
        t = apply_e1(initial(THETA2))
        gone = {t.states[i].formulas for i in t.removed}
        assert len(gone) == 2
        assert any(same_modulo(g, E2) for g in gone)
        assert any(same_modulo(g, E3) for g in gone)
        assert all(r.rule == "E1" for r in t.removed.values())

    def test_e1_theta1_noop(self):
        assert not apply_e1(initial(THETA1)).removed

    def test_e1_contradiction(self):
        theta = parse("p & ~p")
        t = apply_e1(initial(theta))
        assert not t.designated()

    def test_e2_theta1_noop(self):
        assert not apply_e2(initial(THETA1)).removed

    def test_e2_self_loop(self):
        assert not apply_e2(initial(parse("p"))).removed

    def test_e2_after_e1_and_e3(self):
        t = apply_e3(apply_e1(initial(THETA2)), XI2)
        d1 = state_id(t, E1)
        assert d1 in t.removed
        after = apply_e2(t)
        assert d1 in after.removed

    def test_marking_theta1(self):
        t = initial(THETA1)
        marked = mark_realization(t, XI1)
        holders = {i for i, n in t.states.items() if XI1 in n.formulas}
        assert len(holders) == 4
        assert holders <= marked
        assert {state_id(t, D) for D in (D1, D2, D3, D4)} == holders

    def test_marking_theta2(self):
        t = apply_e1(initial(THETA2))
        assert state_id(t, E4) not in mark_realization(t, XI2)

    def test_seed_state_marked(self):
        t = initial(parse("<<1>>(p U q) & q"))
        assert all(i in mark_realization(t, parse("<<1>>(p U q)"))
                   for i in t.alive() if parse("q") in t.states[i].formulas)

    def test_marking_rejects_non_eventuality(self):
        with pytest.raises(ValueError):
            mark_realization(initial(THETA1), parse("p"))

    def test_e3(self):
        t = apply_e3(apply_e1(initial(THETA2)), XI2)
        assert t.removed[state_id(t, E4)].rule == "E3"
        assert not apply_e3(initial(THETA1), XI1).removed
        assert not apply_e3(initial(THETA1), parse("<<1>>(p U q)")).removed

    def test_e3_cascade_same_survivors(self):
        for theta in curated() + random_corpus(40, seed=3):
            t = apply_e1(initial(theta))
            for xi in eventualities(t):
                bulk = apply_e2(apply_e3(t, xi))
                cascade = apply_e2(apply_e3(t, xi, cascade=True))
                assert set(bulk.removed) == set(cascade.removed)


class TestLoop:
    def test_theta1(self):
        v = decide(THETA1)
        assert v.satisfiable
        assert not v.trace
        assert len(v.final.alive()) == 7
        assert len(v.designated) == 2

    def test_theta2_trace(self):
        v = decide(THETA2)
        assert not v.satisfiable
        t = v.initial
        by_rule = {i: rule for i, rule, _ in v.trace}
        assert by_rule[state_id(t, E2)] == "E1"
        assert by_rule[state_id(t, E3)] == "E1"
        assert by_rule[state_id(t, E4)] == "E3"
        assert by_rule[state_id(t, E1)] == "E2"

    def test_contradiction(self):
        v = decide(parse("p & ~p"))
        assert not v.satisfiable
        assert {r for _, r, _ in v.trace} == {"E1"}

    def test_tight_loose(self):
        theta = parse("~<<1>>X p & ~<<1>>X ~p")
        assert not decide(theta, "tight").satisfiable
        assert decide(theta, "loose").satisfiable
        v = decide(theta, "general")
        assert v.satisfiable and v.mode.value == "loose"

    def test_general_prefers_tight(self):
        assert decide(THETA1, "general").mode.value == "tight"

    def test_explicit_agents_with_loose_rejected(self):
        with pytest.raises(ValueError):
            decide(THETA1, "loose", agents=(1, 2, 3))


CORPUS = curated() + random_corpus(150, seed=5)


class TestProperties:
    def test_final_tableau_is_fixpoint(self):
        for theta in CORPUS:
            v = decide(theta)
            t = v.final
            assert not apply_e1(t).removed.keys() - t.removed.keys()
            assert not apply_e2(t).removed.keys() - t.removed.keys()
            for xi in eventualities(t):
                assert not apply_e3(t, xi).removed.keys() - t.removed.keys()
            for i in t.alive():
                assert not is_patently_inconsistent(t.states[i].formulas)

    def test_monotone_trace(self):
        for theta in CORPUS:
            v = decide(theta)
            ids = [i for i, _, _ in v.trace]
            assert len(ids) == len(set(ids))
            assert len(ids) <= len(v.initial.states)

    def test_order_independent(self):
        rng = random.Random(0)
        for theta in CORPUS:
            t0 = initial(theta)
            reference, _ = run_elimination(t0)
            evs = eventualities(apply_e1(t0))
            for _ in range(3):
                rng.shuffle(evs)
                final, _ = run_elimination(t0, evs)
                assert set(final.alive()) == set(reference.alive())

    def test_never_both_unsat(self):
        for theta in CORPUS:
            assert decide(theta).satisfiable or decide(Not(theta)).satisfiable

    def test_unsat_has_no_small_model(self):
        # an UNSAT verdict must not be refuted by any one-state model
        # or by a sample of random two- and three-state models
        rng = random.Random(1)
        for theta in CORPUS:
            v = decide(theta)
            if v.satisfiable:
                continue
            agents, atoms = v.final.agents, tuple(sorted(atoms_of(theta)))
            models = list(all_cgms(agents, 1, 2, atoms)) if len(agents) <= 2 else []
            models += [random_cgm(rng, agents, rng.randint(2, 3), 2, atoms) for _ in range(200)]
            for m in models:
                assert not check(m, 0, theta)
