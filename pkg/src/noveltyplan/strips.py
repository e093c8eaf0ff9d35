"""Grounded STRIPS model and its transition semantics.

States are plain Python ints used as fixed-width bit-vectors: bit ``i`` is
set iff atom ``i`` is true. Ints are immutable, hash over every bit and make
applicability and successor generation a couple of mask operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

StateBits = int
Plan = list[int]


class InapplicableActionError(ValueError):
    """Raised when an action is applied in a state that lacks its precondition."""


def atoms_to_state(atoms: Iterable[int]) -> StateBits:
    state = 0
    for a in atoms:
        state |= 1 << a
    return state


def state_atoms(state: StateBits) -> tuple[int, ...]:
    """Indices of the true atoms of ``state`` in increasing order."""
    out = []
    while state:
        low = state & -state
        out.append(low.bit_length() - 1)
        state ^= low
    return tuple(out)


def popcount(state: StateBits) -> int:
    return state.bit_count()


@dataclass(frozen=True)
class GroundAction:
    name: str
    pre: tuple[int, ...]
    add: tuple[int, ...]
    delete: tuple[int, ...]
    pre_mask: int = field(init=False, repr=False, compare=False)
    add_mask: int = field(init=False, repr=False, compare=False)
    del_mask: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for label in ("pre", "add", "delete"):
            vals = tuple(sorted(set(getattr(self, label))))
            object.__setattr__(self, label, vals)
        if set(self.add) & set(self.delete):
            raise ValueError(f"action {self.name}: add and delete lists overlap")
        object.__setattr__(self, "pre_mask", atoms_to_state(self.pre))
        object.__setattr__(self, "add_mask", atoms_to_state(self.add))
        object.__setattr__(self, "del_mask", atoms_to_state(self.delete))


@dataclass(frozen=True)
class GroundProblem:
    """The STRIPS tuple with atoms as dense indices.

    ``unsolvable`` is set by the grounder when some goal atom is not reachable
    under the delete relaxation.
    """

    atom_names: tuple[str, ...]
    actions: tuple[GroundAction, ...]
    init: StateBits
    goal: tuple[int, ...]
    name: str = ""
    unsolvable: bool = False
    goal_mask: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "atom_names", tuple(self.atom_names))
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "goal", tuple(sorted(set(self.goal))))
        n = len(self.atom_names)
        if self.init >> n:
            raise ValueError("initial state references atoms outside F")
        for g in self.goal:
            if not 0 <= g < n:
                raise ValueError(f"goal atom index {g} out of range")
        for a in self.actions:
            for idx in a.pre + a.add + a.delete:
                if not 0 <= idx < n:
                    raise ValueError(f"action {a.name}: atom index {idx} out of range")
        object.__setattr__(self, "goal_mask", atoms_to_state(self.goal))

    @property
    def num_atoms(self) -> int:
        return len(self.atom_names)

    @property
    def num_actions(self) -> int:
        return len(self.actions)

    def is_goal(self, state: StateBits) -> bool:
        return state & self.goal_mask == self.goal_mask

    def action_index(self, name: str) -> int:
        try:
            return self._action_lookup[_normalize_name(name)]
        except KeyError:
            raise KeyError(f"unknown ground action {name!r}") from None

    @property
    def _action_lookup(self) -> dict[str, int]:
        lookup = self.__dict__.get("_lookup")
        if lookup is None:
            lookup = {_normalize_name(a.name): i for i, a in enumerate(self.actions)}
            object.__setattr__(self, "_lookup", lookup)
        return lookup


def _normalize_name(name: str) -> str:
    name = name.strip().lower()
    if not name.startswith("("):
        name = f"({name})"
    return "(" + " ".join(name[1:-1].split()) + ")"


def applicable(gp: GroundProblem, state: StateBits, a: int) -> bool:
    pre = gp.actions[a].pre_mask
    return state & pre == pre


def applicable_actions(gp: GroundProblem, state: StateBits) -> list[int]:
    return [i for i, act in enumerate(gp.actions) if state & act.pre_mask == act.pre_mask]


def successor(gp: GroundProblem, state: StateBits, a: int) -> StateBits:
    act = gp.actions[a]
    if state & act.pre_mask != act.pre_mask:
        raise InapplicableActionError(f"{act.name} is not applicable")
    return (state & ~act.del_mask) | act.add_mask


@dataclass(frozen=True)
class PlanValidation:
    valid: bool
    final_state: StateBits | None = None
    step: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


def validate_plan(gp: GroundProblem, plan: Sequence[int]) -> PlanValidation:
    """Replay ``plan`` from the initial state; invalidity is reported, not raised."""
    state = gp.init
    for step, a in enumerate(plan):
        if not 0 <= a < gp.num_actions:
            return PlanValidation(False, step=step, reason=f"unknown action index {a}")
        if not applicable(gp, state, a):
            missing = [gp.atom_names[p] for p in gp.actions[a].pre if not state >> p & 1]
            return PlanValidation(
                False, step=step, reason=f"inapplicable: {gp.actions[a].name} lacks {' '.join(missing)}"
            )
        state = successor(gp, state, a)
    if not gp.is_goal(state):
        return PlanValidation(False, final_state=state, step=len(plan), reason="goal not satisfied")
    return PlanValidation(True, final_state=state)


def format_plan(gp: GroundProblem, plan: Sequence[int]) -> str:
    """IPC-style plan text, one ``(name args)`` per line."""
    return "".join(gp.actions[a].name + "\n" for a in plan)


def parse_plan(gp: GroundProblem, text: str) -> Plan:
    plan = []
    for line in text.splitlines():
        line = line.split(";", 1)[0].strip()
        if line:
            plan.append(gp.action_index(line))
    return plan
