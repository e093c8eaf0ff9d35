"""Goal counting, relaxed-plan relevance and the path relevance count.

These supply the tie-breaker ``#g`` and the two partition functions
``(#g, #r)`` used by the novelty measures.
"""

from __future__ import annotations

from dataclasses import dataclass

from .strips import GroundProblem, StateBits, atoms_to_state, state_atoms


class RelaxedUnreachable(Exception):
    """Some goal atom cannot be reached even when deletes are ignored."""


def goal_count(gp: GroundProblem, state: StateBits) -> int:
    """Number of goal atoms not true in ``state``."""
    return (gp.goal_mask & ~state).bit_count()


def relaxed_layers(gp: GroundProblem, state: StateBits) -> tuple[dict[int, int], dict[int, int]]:
    """Relaxed planning graph to fixpoint.

    Returns (atom -> first layer it appears, action -> first layer it is
    applicable). Unreached atoms and actions are absent.
    """
    atom_level = {p: 0 for p in state_atoms(state)}
    action_level: dict[int, int] = {}
    reached = state
    layer = 0
    pending = list(range(gp.num_actions))
    while True:
        fired = [a for a in pending if reached & gp.actions[a].pre_mask == gp.actions[a].pre_mask]
        if not fired:
            break
        new = reached
        for a in fired:
            action_level[a] = layer
            new |= gp.actions[a].add_mask
        fired_set = set(fired)
        pending = [a for a in pending if a not in fired_set]
        for p in state_atoms(new & ~reached):
            atom_level[p] = layer + 1
        if new == reached:
            break
        reached = new
        layer += 1
    return atom_level, action_level


def relaxed_plan(gp: GroundProblem, state: StateBits) -> tuple[int, ...] | None:
    """FF-style relaxed plan from ``state``; None when the goal is relaxed-unreachable.

    Subgoals are backchained from the deepest layer; each is supported by an
    achiever from the layer just below its own (the first layer it could be
    added), lowest action index first.
    """
    atom_level, action_level = relaxed_layers(gp, state)
    if any(g not in atom_level for g in gp.goal):
        return None
    achievers: dict[int, list[int]] = {}
    for a in sorted(action_level):
        for p in gp.actions[a].add:
            achievers.setdefault(p, []).append(a)

    depth = max((atom_level[g] for g in gp.goal), default=0)
    goals_at: list[set[int]] = [set() for _ in range(depth + 1)]
    for g in gp.goal:
        goals_at[atom_level[g]].add(g)
    # atoms made true at layer L by actions already chosen at layer L-1
    marked: list[set[int]] = [set() for _ in range(depth + 1)]
    chosen: set[int] = set()
    for level in range(depth, 0, -1):
        for g in sorted(goals_at[level]):
            if g in marked[level]:
                continue
            a = next(a for a in achievers[g] if action_level[a] == level - 1)
            chosen.add(a)
            for p in gp.actions[a].pre:
                lp = atom_level[p]
                if lp > 0:
                    goals_at[lp].add(p)
            for p in gp.actions[a].add:
                marked[level].add(p)
                marked[level - 1].add(p)
    return tuple(sorted(chosen))


@dataclass(frozen=True)
class RelevanceSet:
    atoms: frozenset[int]
    mask: int

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, p: int) -> bool:
        return p in self.atoms


def relevance_set(gp: GroundProblem) -> RelevanceSet:
    """Atoms added by the relaxed plan computed once from the initial state."""
    plan = relaxed_plan(gp, gp.init)
    if plan is None:
        raise RelaxedUnreachable(f"goal of {gp.name or 'problem'} is relaxed-unreachable")
    atoms = frozenset(p for a in plan for p in gp.actions[a].add)
    return RelevanceSet(atoms, atoms_to_state(atoms))


@dataclass(frozen=True)
class PathRelevance:
    achieved: int
    count: int

    @classmethod
    def initial(cls, state: StateBits, rel: RelevanceSet) -> "PathRelevance":
        hit = state & rel.mask
        return cls(hit, hit.bit_count())


def extend_path_relevance(parent: PathRelevance, state: StateBits, rel: RelevanceSet) -> PathRelevance:
    achieved = parent.achieved | (state & rel.mask)
    if achieved == parent.achieved:
        return parent
    return PathRelevance(achieved, achieved.bit_count())
