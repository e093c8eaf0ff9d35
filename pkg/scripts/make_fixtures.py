"""Regenerate the bundled mini-suite PDDL fixtures."""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "noveltyplan" / "data" / "mini"

CHAIN_DOMAIN = """(define (domain chain)
  (:requirements :strips)
  (:predicates (p0) (p1) (p2) (p3))
  (:action a0 :parameters () :precondition (p0) :effect (p1))
  (:action a1 :parameters () :precondition (p1) :effect (p2))
  (:action a2 :parameters () :precondition (p2) :effect (p3)))
"""

CHAIN_PROBLEM = """(define (problem chain1)
  (:domain chain)
  (:init (p0))
  (:goal (and (p3))))
"""

TWOCHAINS_DOMAIN = """; Two counters that advance independently; the goal needs both at the top.
; A relaxed shortcut through the exclusive modes keeps the counters out of
; the relevance set, so every state after the start shares one partition.
(define (domain twochains)
  (:requirements :strips :typing)
  (:types step)
  (:predicates (fresh) (started) (mode-x) (mode-y) (done)
               (at-a ?s - step) (at-b ?s - step) (next ?s ?t - step) (top ?s - step))
  (:action begin-x :parameters ()
    :precondition (fresh)
    :effect (and (not (fresh)) (started) (mode-x)))
  (:action begin-y :parameters ()
    :precondition (fresh)
    :effect (and (not (fresh)) (started) (mode-y)))
  (:action advance-a :parameters (?s ?t - step)
    :precondition (and (started) (at-a ?s) (next ?s ?t))
    :effect (and (not (at-a ?s)) (at-a ?t)))
  (:action advance-b :parameters (?s ?t - step)
    :precondition (and (started) (at-b ?s) (next ?s ?t))
    :effect (and (not (at-b ?s)) (at-b ?t)))
  (:action finish :parameters (?s - step)
    :precondition (and (top ?s) (at-a ?s) (at-b ?s))
    :effect (done))
  (:action certify :parameters ()
    :precondition (and (mode-x) (mode-y))
    :effect (done)))
"""

TWOCHAINS_PROBLEM = """(define (problem twochains1)
  (:domain twochains)
  (:objects n0 n1 n2 - step)
  (:init (fresh) (at-a n0) (at-b n0) (next n0 n1) (next n1 n2) (top n2))
  (:goal (done)))
"""

GRIPPER_DOMAIN = """(define (domain gripper-strips)
  (:requirements :strips :typing)
  (:types room ball gripper)
  (:predicates (at-robby ?r - room) (at ?b - ball ?r - room)
               (free ?g - gripper) (carry ?o - ball ?g - gripper))
  (:action move
    :parameters (?from ?to - room)
    :precondition (at-robby ?from)
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?obj - ball ?room - room ?gripper - gripper)
    :precondition (and (at ?obj ?room) (at-robby ?room) (free ?gripper))
    :effect (and (carry ?obj ?gripper) (not (at ?obj ?room)) (not (free ?gripper))))
  (:action drop
    :parameters (?obj - ball ?room - room ?gripper - gripper)
    :precondition (and (carry ?obj ?gripper) (at-robby ?room))
    :effect (and (at ?obj ?room) (free ?gripper) (not (carry ?obj ?gripper)))))
"""


def gripper_problem(n):
    balls = " ".join(f"ball{i}" for i in range(1, n + 1))
    at = " ".join(f"(at ball{i} rooma)" for i in range(1, n + 1))
    goal = " ".join(f"(at ball{i} roomb)" for i in range(1, n + 1))
    return f"""(define (problem gripper-{n})
  (:domain gripper-strips)
  (:objects rooma roomb - room {balls} - ball left right - gripper)
  (:init (at-robby rooma) (free left) (free right) {at})
  (:goal (and {goal})))
"""


BLOCKS_DOMAIN = """(define (domain blocksworld)
  (:requirements :strips :typing)
  (:types block)
  (:predicates (on ?x - block ?y - block) (ontable ?x - block) (clear ?x - block)
               (handempty) (holding ?x - block))
  (:action pick-up
    :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x)))
  (:action put-down
    :parameters (?x - block)
    :precondition (holding ?x)
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y)))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty)) (not (on ?x ?y)))))
"""

# (initial towers bottom-to-top, goal towers bottom-to-top)
BLOCKS = {
    4: ([["b", "c"], ["a", "d"]], [["d", "c", "b", "a"]]),
    5: ([["e", "a", "c"], ["b", "d"]], [["a", "b", "c", "d", "e"]]),
    6: ([["f", "b"], ["a", "e", "c"], ["d"]], [["c", "a"], ["b", "f", "d", "e"]]),
}


def towers_atoms(towers, with_clear=True):
    atoms = []
    for tower in towers:
        atoms.append(f"(ontable {tower[0]})")
        for below, above in zip(tower, tower[1:]):
            atoms.append(f"(on {above} {below})")
        if with_clear:
            atoms.append(f"(clear {tower[-1]})")
    return atoms


def blocks_problem(n):
    init, goal = BLOCKS[n]
    blocks = sorted({b for t in init for b in t})
    goal_atoms = [a for a in towers_atoms(goal, with_clear=False) if not a.startswith("(ontable")]
    return f"""(define (problem blocks-{n})
  (:domain blocksworld)
  (:objects {' '.join(blocks)} - block)
  (:init (handempty) {' '.join(towers_atoms(init))})
  (:goal (and {' '.join(goal_atoms)})))
"""


LOGISTICS_DOMAIN = """(define (domain logistics)
  (:requirements :strips :typing)
  (:types truck airplane - vehicle
          package vehicle - physobj
          airport location - place
          city place physobj - object)
  (:predicates (in-city ?loc - place ?city - city)
               (at ?obj - physobj ?loc - place)
               (in ?pkg - package ?veh - vehicle))
  (:action load-truck
    :parameters (?pkg - package ?truck - truck ?loc - place)
    :precondition (and (at ?truck ?loc) (at ?pkg ?loc))
    :effect (and (not (at ?pkg ?loc)) (in ?pkg ?truck)))
  (:action load-airplane
    :parameters (?pkg - package ?airplane - airplane ?loc - place)
    :precondition (and (at ?pkg ?loc) (at ?airplane ?loc))
    :effect (and (not (at ?pkg ?loc)) (in ?pkg ?airplane)))
  (:action unload-truck
    :parameters (?pkg - package ?truck - truck ?loc - place)
    :precondition (and (at ?truck ?loc) (in ?pkg ?truck))
    :effect (and (not (in ?pkg ?truck)) (at ?pkg ?loc)))
  (:action unload-airplane
    :parameters (?pkg - package ?airplane - airplane ?loc - place)
    :precondition (and (in ?pkg ?airplane) (at ?airplane ?loc))
    :effect (and (not (in ?pkg ?airplane)) (at ?pkg ?loc)))
  (:action drive-truck
    :parameters (?truck - truck ?loc-from - place ?loc-to - place ?city - city)
    :precondition (and (at ?truck ?loc-from) (in-city ?loc-from ?city) (in-city ?loc-to ?city))
    :effect (and (not (at ?truck ?loc-from)) (at ?truck ?loc-to)))
  (:action fly-airplane
    :parameters (?airplane - airplane ?loc-from - airport ?loc-to - airport)
    :precondition (at ?airplane ?loc-from)
    :effect (and (not (at ?airplane ?loc-from)) (at ?airplane ?loc-to))))
"""

LOGISTICS_PROBLEM = """(define (problem logistics-2-2)
  (:domain logistics)
  (:objects c1 c2 - city
            ap1 ap2 - airport
            post1 post2 - location
            t1 t2 - truck
            plane - airplane
            p1 p2 - package)
  (:init (in-city ap1 c1) (in-city post1 c1) (in-city ap2 c2) (in-city post2 c2)
         (at t1 post1) (at t2 ap2) (at plane ap1)
         (at p1 post1) (at p2 ap2))
  (:goal (and (at p1 post2) (at p2 post1))))
"""


def main():
    files = {
        "chain/domain.pddl": CHAIN_DOMAIN,
        "chain/p01.pddl": CHAIN_PROBLEM,
        "twochains/domain.pddl": TWOCHAINS_DOMAIN,
        "twochains/p01.pddl": TWOCHAINS_PROBLEM,
        "gripper/domain.pddl": GRIPPER_DOMAIN,
        "blocksworld/domain.pddl": BLOCKS_DOMAIN,
        "logistics/domain.pddl": LOGISTICS_DOMAIN,
        "logistics/p01.pddl": LOGISTICS_PROBLEM,
    }
    instances = [
        {"id": "chain-1", "domain": "chain/domain.pddl", "problem": "chain/p01.pddl", "solvable": True, "width": 1},
        {"id": "twochains-1", "domain": "twochains/domain.pddl", "problem": "twochains/p01.pddl",
         "solvable": True, "width": 2},
    ]
    for n in range(2, 7):
        files[f"gripper/p{n:02d}.pddl"] = gripper_problem(n)
        instances.append({"id": f"gripper-{n}", "domain": "gripper/domain.pddl",
                          "problem": f"gripper/p{n:02d}.pddl", "solvable": True})
    for n in sorted(BLOCKS):
        files[f"blocksworld/p{n:02d}.pddl"] = blocks_problem(n)
        instances.append({"id": f"blocks-{n}", "domain": "blocksworld/domain.pddl",
                          "problem": f"blocksworld/p{n:02d}.pddl", "solvable": True})
    instances.append({"id": "logistics-1", "domain": "logistics/domain.pddl",
                      "problem": "logistics/p01.pddl", "solvable": True})
    for rel, text in files.items():
        path = OUT / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    manifest = {"version": 1, "instances": instances}
    (OUT / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
