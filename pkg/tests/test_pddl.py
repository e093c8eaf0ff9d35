import pytest

from conftest import fixture_paths, load_fixture
from noveltyplan.pddl import (
    PDDLSyntaxError,
    ResolutionError,
    UnsupportedFeatureError,
    ground,
    load,
    parse_domain,
    parse_problem,
)

MINI_DOMAIN = """
(define (domain tiny)
  (:requirements :strips)
  (:predicates (on) (off))
  (:action flip :parameters () :precondition (off) :effect (and (on) (not (off)))))
"""

MINI_PROBLEM = """
(define (problem t1) (:domain tiny) (:init (off)) (:goal (and (on))))
"""


def _text(domain, problem):
    d, p = fixture_paths(domain, problem)
    return d.read_text(), p.read_text()


class TestParseDomain:
    def test_minimal(self):
        dom = parse_domain(MINI_DOMAIN)
        assert dom.name == "tiny"
        assert len(dom.actions) == 1
        assert dom.actions[0].add == [("on", ())]
        assert dom.actions[0].delete == [("off", ())]

    def test_gripper_schemas(self):
        dom = parse_domain(_text("gripper", "p02")[0])
        assert sorted(a.name for a in dom.actions) == ["drop", "move", "pick"]

    def test_conditional_effect_rejected(self):
        text = MINI_DOMAIN.replace("(and (on) (not (off)))", "(when (off) (on))")
        with pytest.raises(UnsupportedFeatureError) as err:
            parse_domain(text)
        assert "conditional" in str(err.value)

    @pytest.mark.parametrize("snippet, needle", [
        ("(not (on))", "negative"),
        ("(or (on) (off))", "or"),
        ("(forall (?x) (on))", "universal"),
    ])
    def test_other_unsupported_preconditions(self, snippet, needle):
        text = MINI_DOMAIN.replace(":precondition (off)", f":precondition {snippet}")
        with pytest.raises(UnsupportedFeatureError) as err:
            parse_domain(text)
        assert needle in str(err.value)

    def test_unsupported_requirement(self):
        with pytest.raises(UnsupportedFeatureError):
            parse_domain(MINI_DOMAIN.replace(":strips", ":strips :adl"))

    def test_syntax_error_has_position(self):
        with pytest.raises(PDDLSyntaxError) as err:
            parse_domain("(define (domain x)\n  (:predicates (p)")
        assert err.value.line >= 1

    def test_comments_and_case(self):
        dom = parse_domain("; header\n" + MINI_DOMAIN.upper())
        assert dom.name == "tiny"


class TestParseProblem:
    def test_gripper2(self):
        dtext, ptext = _text("gripper", "p02")
        dom = parse_domain(dtext)
        prob = parse_problem(ptext, dom)
        kinds = {}
        for obj, typ in prob.objects:
            kinds.setdefault(typ, []).append(obj)
        assert len(kinds["ball"]) + len(kinds["gripper"]) == 4
        assert len(kinds["room"]) == 2
        assert len(prob.goal) == 2

    def test_unknown_object_in_goal(self):
        dom = parse_domain(_text("gripper", "p02")[0])
        ptext = _text("gripper", "p02")[1].replace("(at ball2 roomb)", "(at ball9 roomb)")
        with pytest.raises(ResolutionError):
            parse_problem(ptext, dom)

    def test_empty_goal_flagged(self):
        dom = parse_domain(MINI_DOMAIN)
        prob = parse_problem(MINI_PROBLEM.replace("(and (on))", "(and)"), dom)
        assert prob.goal == [] and prob.empty_goal

    def test_metric_rejected(self):
        dom = parse_domain(MINI_DOMAIN)
        text = MINI_PROBLEM.rstrip()[:-1] + " (:metric minimize (total-cost)))"
        with pytest.raises(UnsupportedFeatureError):
            parse_problem(text, dom)


class TestGround:
    def test_gripper2_sizes(self, gripper2):
        assert (gripper2.num_atoms, gripper2.num_actions) == (12, 20)

    def test_chain_sizes(self, chain):
        assert (chain.num_atoms, chain.num_actions) == (4, 3)
        assert chain.atom_names == ("(p0)", "(p1)", "(p2)", "(p3)")

    def test_goal_in_init(self):
        gp = load(MINI_DOMAIN, MINI_PROBLEM.replace("(and (on))", "(and (off))"))
        assert gp.is_goal(gp.init)

    def test_unreachable_goal_flagged(self):
        dom = MINI_DOMAIN.replace("(:predicates (on) (off))", "(:predicates (on) (off) (never))")
        gp = load(dom, MINI_PROBLEM.replace("(and (on))", "(and (never))"))
        assert gp.unsolvable

    def test_deterministic_indices(self):
        a = load_fixture("blocksworld", "p04")
        b = load_fixture("blocksworld", "p04")
        assert a == b

    def test_unreachable_actions_dropped(self, twochains):
        names = {a.name for a in twochains.actions}
        # next is static, so only forward steps are grounded
        assert "(advance-a n0 n1)" in names
        assert "(advance-a n1 n0)" not in names
