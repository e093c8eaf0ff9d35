import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import GOLDEN, load_fixture
from noveltyplan.heuristics import (
    PathRelevance,
    RelaxedUnreachable,
    extend_path_relevance,
    goal_count,
    relaxed_layers,
    relaxed_plan,
    relevance_set,
)
from noveltyplan.strips import GroundAction, GroundProblem, applicable_actions, successor


class TestGoalCount:
    def test_chain(self, chain):
        assert goal_count(chain, chain.init) == 1
        assert goal_count(chain, 0b1000) == 0

    def test_gripper2(self, gripper2):
        assert goal_count(gripper2, gripper2.init) == 2


class TestRelaxedPlan:
    def test_chain(self, chain):
        assert relaxed_plan(chain, chain.init) == (0, 1, 2)

    def test_from_goal(self, chain):
        assert relaxed_plan(chain, 0b1000) == ()

    def test_unreachable(self):
        gp = GroundProblem(("(a)", "(b)", "(c)"), (GroundAction("(x)", (0,), (1,), ()),), 1, (2,))
        assert relaxed_plan(gp, gp.init) is None
        with pytest.raises(RelaxedUnreachable):
            relevance_set(gp)

    def test_layers_chain(self, chain):
        atoms, actions = relaxed_layers(chain, chain.init)
        assert atoms == {0: 0, 1: 1, 2: 2, 3: 3}
        assert actions == {0: 0, 1: 1, 2: 2}

    @pytest.mark.parametrize("domain, problem", [("gripper", "p04"), ("blocksworld", "p05"), ("logistics", "p01")])
    def test_relaxed_plan_reaches_goal_ignoring_deletes(self, domain, problem):
        gp = load_fixture(domain, problem)
        plan = set(relaxed_plan(gp, gp.init))
        reached = gp.init
        changed = True
        while changed:
            changed = False
            for a in plan:
                act = gp.actions[a]
                if reached & act.pre_mask == act.pre_mask and reached | act.add_mask != reached:
                    reached |= act.add_mask
                    changed = True
        assert gp.is_goal(reached)


class TestRelevance:
    def test_chain(self, chain):
        rel = relevance_set(chain)
        assert rel.atoms == {1, 2, 3} and len(rel) == 3

    def test_goal_in_init(self):
        gp = GroundProblem(("(a)",), (), 1, (0,))
        assert len(relevance_set(gp)) == 0

    def test_gripper2_golden(self, gripper2):
        golden = json.loads((GOLDEN / "gripper2.json").read_text())
        rel = relevance_set(gripper2)
        assert len(rel) == golden["relevance_size"]
        assert sorted(gripper2.atom_names[p] for p in rel.atoms) == golden["relevance_atoms"]

    def test_path_count_chain(self, chain):
        rel = relevance_set(chain)
        path = PathRelevance.initial(chain.init, rel)
        assert path.count == 0
        state = chain.init
        counts = []
        for a in (0, 1, 2):
            state = successor(chain, state, a)
            path = extend_path_relevance(path, state, rel)
            counts.append(path.count)
        assert counts == [1, 2, 3]

    def test_no_new_relevant_atom(self, chain):
        rel = relevance_set(chain)
        path = PathRelevance.initial(0b0011, rel)
        assert extend_path_relevance(path, 0b0001, rel) is path

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(0, 50), max_size=12))
    def test_path_count_monotone(self, choices):
        gp = load_fixture("gripper", "p02")
        rel = relevance_set(gp)
        state = gp.init
        path = PathRelevance.initial(state, rel)
        for c in choices:
            acts = applicable_actions(gp, state)
            state = successor(gp, state, acts[c % len(acts)])
            nxt = extend_path_relevance(path, state, rel)
            assert path.count <= nxt.count <= len(rel)
            path = nxt
