import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import GOLDEN
from oracles import bfs_plan_length
from noveltyplan.strips import (
    GroundAction,
    GroundProblem,
    InapplicableActionError,
    applicable,
    applicable_actions,
    atoms_to_state,
    format_plan,
    parse_plan,
    state_atoms,
    successor,
    validate_plan,
)


def _bits(gp, names):
    return atoms_to_state(gp.atom_names.index(n) for n in names)


class TestApplicable:
    def test_chain(self, chain):
        assert applicable(chain, chain.init, 0)
        assert not applicable(chain, chain.init, 1)
        assert applicable_actions(chain, chain.init) == [0]

    @given(st.integers(0, 15))
    def test_empty_precondition(self, state):
        gp = GroundProblem(("(a)", "(b)", "(c)", "(d)"), (GroundAction("(free)", (), (), ()),), 0, ())
        assert applicable(gp, state, 0)


class TestSuccessor:
    def test_chain(self, chain):
        assert state_atoms(successor(chain, chain.init, 0)) == (0, 1)

    def test_inapplicable(self, chain):
        with pytest.raises(InapplicableActionError):
            successor(chain, chain.init, 2)

    @given(st.integers(0, 15))
    def test_identity(self, state):
        gp = GroundProblem(("(a)", "(b)", "(c)", "(d)"), (GroundAction("(noop)", (), (), ()),), 0, ())
        assert successor(gp, state, 0) == state

    def test_gripper_pick_golden(self, gripper2):
        golden = json.loads((GOLDEN / "gripper2.json").read_text())
        assert gripper2.init == _bits(gripper2, golden["init_atoms"])
        s = successor(gripper2, gripper2.init, gripper2.action_index(golden["pick"]))
        assert s == golden["pick_successor_bits"]
        assert s == _bits(gripper2, golden["pick_successor_atoms"])

    def test_add_delete_overlap_rejected(self):
        with pytest.raises(ValueError):
            GroundAction("(bad)", (), (0,), (0,))


class TestValidate:
    def test_chain_plan(self, chain):
        assert bfs_plan_length(chain) == 3
        result = validate_plan(chain, [0, 1, 2])
        assert result.valid and chain.is_goal(result.final_state)

    def test_chain_invalid(self, chain):
        result = validate_plan(chain, [1])
        assert not result and result.step == 0 and "inapplicable" in result.reason

    def test_goal_not_reached(self, chain):
        result = validate_plan(chain, [0])
        assert not result and result.step == 1

    def test_empty_plan_goal_in_init(self):
        gp = GroundProblem(("(a)",), (), 1, (0,))
        assert validate_plan(gp, []).valid

    def test_plan_text_round_trip(self, chain):
        text = format_plan(chain, [0, 1, 2])
        assert text == "(a0)\n(a1)\n(a2)\n"
        assert parse_plan(chain, "; comment\n(A0)\n( a1 )\na2\n") == [0, 1, 2]
