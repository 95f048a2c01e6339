import pytest
from hypothesis import given, settings, strategies as st

from atltab.formula import (
    TOP, Alpha, And, Atom, Beta, CoalBox, CoalNext, CoalUntil, Implies, Not, Or,
    ParseError, Primitive, agents_of, classify, closure, extended_closure,
    is_eventuality, length, parse, render, subformulas,
)

from util import THETA1, THETA2

p, q, r = Atom("p"), Atom("q"), Atom("r")


class TestParse:
    def test_theta1(self):
        expected = And(And(Not(CoalBox((1,), p)), CoalNext((1, 2), p)),
                       Not(CoalNext((2,), Not(p))))
        assert parse("~<<1>>G p & <<1,2>>X p & ~<<2>>X ~p", 2) == expected

    def test_constants(self):
        assert parse("true") == TOP
        assert parse("false") == Not(TOP)

    def test_eventually_is_until(self):
        assert parse("<<1>>F q") == CoalUntil((1,), TOP, q)

    def test_empty_coalition(self):
        assert parse("<<>>X p") == CoalNext((), p)

    def test_coalition_is_canonical(self):
        assert parse("<<2,1,2>>G p") == CoalBox((1, 2), p)

    def test_precedence(self):
        assert parse("p | q & r") == Or(p, And(q, r))
        assert parse("p -> q -> r") == Implies(p, Implies(q, r))
        assert parse("~p & q") == And(Not(p), q)
        assert parse("p & q & r") == And(And(p, q), r)
        assert parse("<<1>>X p & q") == And(CoalNext((1,), p), q)

    def test_until_operands(self):
        assert parse("<<1,2>>(p -> q U ~r)") == CoalUntil((1, 2), Implies(p, q), Not(r))

    @pytest.mark.parametrize("text,ast", [
        ("EX p", CoalNext((1,), p)),
        ("AX p", CoalNext((), p)),
        ("EG p", CoalBox((1,), p)),
        ("AG p", CoalBox((), p)),
        ("EF p", CoalUntil((1,), TOP, p)),
        ("AF p", CoalUntil((), TOP, p)),
        ("E(p U q)", CoalUntil((1,), p, q)),
        ("A(p U q)", CoalUntil((), p, q)),
    ])
    def test_ctl_sugar(self, text, ast):
        assert parse(text, ctl=True) == ast

    def test_ctl_names_are_atoms_without_flag(self):
        assert parse("EX") == Atom("EX")

    @pytest.mark.parametrize("text,pos", [
        ("p &", 3), ("<<1>>Y p", 5), ("(p", 2), ("p q", 2), ("<<a>>X p", 2), ("p $ q", 2),
    ])
    def test_syntax_error_position(self, text, pos):
        with pytest.raises(ParseError) as err:
            parse(text)
        assert err.value.position == pos

    def test_agent_out_of_range(self):
        with pytest.raises(ParseError, match="agent 3 out of range"):
            parse("<<1,3>>X p", 2)
        with pytest.raises(ParseError):
            parse("<<0>>X p")

    def test_diagnostic_has_caret(self):
        with pytest.raises(ParseError) as err:
            parse("p & & q")
        assert err.value.diagnostic().splitlines()[-1] == "      ^"


class TestRender:
    def test_trivial(self):
        assert render(TOP) == "true"
        assert render(CoalNext((1, 2), p)) == "<<1,2>>X p"

    def test_theta1_roundtrip(self):
        assert parse(render(THETA1)) == THETA1

    def test_parenthesises_when_needed(self):
        assert render(And(p, And(q, r))) == "p & (q & r)"
        assert render(Implies(Implies(p, q), r)) == "(p -> q) -> r"
        assert render(Not(And(p, q))) == "~(p & q)"


atoms = st.sampled_from([p, q, r, TOP])
coal = st.lists(st.integers(1, 3), max_size=3).map(tuple)
formulas = st.recursive(
    atoms,
    lambda sub: st.one_of(
        sub.map(Not),
        st.tuples(sub, sub).map(lambda t: And(*t)),
        st.tuples(sub, sub).map(lambda t: Or(*t)),
        st.tuples(sub, sub).map(lambda t: Implies(*t)),
        st.tuples(coal, sub).map(lambda t: CoalNext(*t)),
        st.tuples(coal, sub).map(lambda t: CoalBox(*t)),
        st.tuples(coal, sub, sub).map(lambda t: CoalUntil(*t)),
    ),
    max_leaves=12,
)


class TestProperties:
    @given(formulas)
    @settings(max_examples=300)
    def test_roundtrip(self, f):
        assert parse(render(f)) == f

    @given(formulas, st.sampled_from([(), (1,), (1, 2), (1, 2, 3)]))
    @settings(max_examples=300)
    def test_alpha_single_reduct_cases(self, f, ambient):
        kind = classify(f, ambient)
        assert isinstance(kind, (Primitive, Alpha, Beta))
        if isinstance(f, Not) and isinstance(f.f, (Not, CoalNext)) and isinstance(kind, Alpha):
            assert kind.a1 == kind.a2

    @given(formulas)
    @settings(max_examples=200)
    def test_closure_properties(self, f):
        cl = closure(f)
        assert f in cl
        for g in cl:
            assert set(subformulas(g)) <= cl
            if isinstance(g, CoalUntil):
                assert And(g.f, CoalNext(g.agents, g)) in cl
            if isinstance(g, CoalBox):
                assert And(g.f, CoalNext(g.agents, g)) in cl
            if isinstance(g, Not) and isinstance(g.f, CoalUntil):
                u = g.f
                assert And(Not(u.g), Not(u.f)) in cl
                assert And(Not(u.g), Not(CoalNext(u.agents, u))) in cl
        ecl = extended_closure(f)
        assert cl <= ecl
        assert all(Not(g) in ecl for g in cl)


class TestClassify:
    def test_negated_full_next_is_alpha(self):
        f = Not(CoalNext((1, 2), p))
        reduct = CoalNext((), Not(p))
        assert classify(f, (1, 2)) == Alpha(reduct, reduct)

    def test_negated_proper_next_is_primitive(self):
        assert classify(Not(CoalNext((2,), p)), (1, 2)) == Primitive()
        # the same formula is alpha once agent 1 is absent from the frame
        assert isinstance(classify(Not(CoalNext((2,), p)), (2,)), Alpha)

    def test_until_is_beta(self):
        f = CoalUntil((1,), p, q)
        assert classify(f, (1,)) == Beta(q, And(p, CoalNext((1,), f)))

    def test_negated_box_is_beta(self):
        box = CoalBox((1,), p)
        assert classify(Not(box), (1, 2)) == Beta(Not(p), Not(CoalNext((1,), box)))

    def test_box_is_alpha(self):
        box = CoalBox((2,), p)
        assert classify(box, (1, 2)) == Alpha(p, CoalNext((2,), box))

    def test_negated_until_is_beta(self):
        u = CoalUntil((1,), p, q)
        assert classify(Not(u), (1,)) == Beta(And(Not(q), Not(p)),
                                              And(Not(q), Not(CoalNext((1,), u))))

    @pytest.mark.parametrize("f,kind", [
        (And(p, q), Alpha(p, q)),
        (Not(And(p, q)), Beta(Not(p), Not(q))),
        (Or(p, q), Beta(p, q)),
        (Not(Or(p, q)), Alpha(Not(p), Not(q))),
        (Implies(p, q), Beta(Not(p), q)),
        (Not(Implies(p, q)), Alpha(p, Not(q))),
        (Not(Not(p)), Alpha(p, p)),
    ])
    def test_boolean(self, f, kind):
        assert classify(f, (1,)) == kind

    @pytest.mark.parametrize("f", [TOP, p, Not(p), Not(TOP), CoalNext((1,), p)])
    def test_primitive(self, f):
        assert classify(f, (1, 2)) == Primitive()


class TestEventualities:
    def test_detection(self):
        assert is_eventuality(CoalUntil((2,), p, q))
        assert is_eventuality(Not(CoalBox((1,), p)))
        assert not is_eventuality(p)
        assert not is_eventuality(CoalBox((1,), p))
        assert not is_eventuality(Not(CoalUntil((1,), p, q)))


class TestMeasures:
    def test_length_counts_agents(self):
        assert length(CoalNext((1, 2), p)) == 4
        assert length(THETA1) == 15

    def test_agents_of(self):
        assert agents_of(THETA1) == (1, 2)
        assert agents_of(p) == ()
        assert agents_of(THETA2) == (1, 2)

    def test_ecl_of_atom(self):
        assert extended_closure(p) == {p, Not(p), TOP, CoalNext((), TOP)}
        assert extended_closure(p, (1, 2)) == {p, Not(p), TOP, CoalNext((1, 2), TOP)}

    def test_ecl_of_theta1_contains_listed_positives(self):
        positives = [
            THETA1, THETA1.f, CoalNext((2,), Not(p)), CoalBox((1,), p),
            CoalNext((1,), CoalBox((1,), p)), CoalNext((1, 2), p), p,
        ]
        ecl = extended_closure(THETA1)
        assert all(f in ecl for f in positives)
        assert len(ecl) <= 23 * length(THETA1)

    def test_ecl_full_coalition_rewrite(self):
        f = Not(CoalNext((1,), p))
        assert CoalNext((), Not(p)) in extended_closure(f)
        assert CoalNext((), Not(p)) not in extended_closure(f, (1, 2))
