"""Plain-text grounded STRIPS format (``gstrips 1``).

Layout, one record per line; blank lines and ``#`` comments are ignored::

    gstrips 1
    name <problem name>            (optional)
    unsolvable                     (optional flag)
    atoms <N>
    <atom name>                    (N lines, atom i is the i-th line)
    actions <M>
    <action name> | pre <i>* | add <i>* | del <i>*     (M lines)
    init <i>*
    goal <i>*

Sections appear in exactly this order. Indices are decimal and must be
below N.
"""

from __future__ import annotations

from .strips import GroundAction, GroundProblem, atoms_to_state, state_atoms

HEADER = "gstrips 1"


class GStripsFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def write_ground_strips(gp: GroundProblem) -> str:
    out = [HEADER]
    if gp.name:
        out.append(f"name {gp.name}")
    if gp.unsolvable:
        out.append("unsolvable")
    out.append(f"atoms {gp.num_atoms}")
    out.extend(gp.atom_names)
    out.append(f"actions {gp.num_actions}")
    for a in gp.actions:
        fields = [a.name] + [
            " ".join([label, *map(str, vals)]) for label, vals in (("pre", a.pre), ("add", a.add), ("del", a.delete))
        ]
        out.append(" | ".join(fields))
    out.append(" ".join(["init", *map(str, state_atoms(gp.init))]))
    out.append(" ".join(["goal", *map(str, gp.goal)]))
    return "\n".join(out) + "\n"


def _records(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _indices(tokens: list[str], n: int, lineno: int) -> tuple[int, ...]:
    out = []
    for tok in tokens:
        try:
            idx = int(tok)
        except ValueError:
            raise GStripsFormatError(f"expected atom index, got {tok!r}", lineno) from None
        if not 0 <= idx < n:
            raise GStripsFormatError(f"atom index {idx} out of range [0, {n})", lineno)
        out.append(idx)
    return tuple(out)


def _count(line: str, keyword: str, lineno: int) -> int:
    parts = line.split()
    if len(parts) != 2 or parts[0] != keyword:
        raise GStripsFormatError(f"expected '{keyword} <count>' section header", lineno)
    try:
        return int(parts[1])
    except ValueError:
        raise GStripsFormatError(f"bad {keyword} count {parts[1]!r}", lineno) from None


def read_ground_strips(text: str) -> GroundProblem:
    records = list(_records(text))
    pos = 0

    def take(expect: str):
        nonlocal pos
        if pos >= len(records):
            raise GStripsFormatError(f"unexpected end of file, expected {expect}", len(text.splitlines()) + 1)
        rec = records[pos]
        pos += 1
        return rec

    lineno, line = take("header")
    if line != HEADER:
        raise GStripsFormatError(f"expected header {HEADER!r}", lineno)
    name, unsolvable = "", False
    lineno, line = take("atoms section")
    if line.startswith("name ") or line == "name":
        name = line[5:].strip()
        lineno, line = take("atoms section")
    if line == "unsolvable":
        unsolvable = True
        lineno, line = take("atoms section")
    n = _count(line, "atoms", lineno)
    atoms = [take("atom name")[1] for _ in range(n)]

    lineno, line = take("actions section")
    m = _count(line, "actions", lineno)
    actions = []
    for _ in range(m):
        lineno, line = take("action record")
        fields = [f.strip() for f in line.split("|")]
        if len(fields) != 4:
            raise GStripsFormatError("action record needs 'name | pre ... | add ... | del ...'", lineno)
        lists = []
        for label, field_text in zip(("pre", "add", "del"), fields[1:]):
            toks = field_text.split()
            if not toks or toks[0] != label:
                raise GStripsFormatError(f"expected '{label}' field", lineno)
            lists.append(_indices(toks[1:], n, lineno))
        try:
            actions.append(GroundAction(fields[0], *lists))
        except ValueError as exc:
            raise GStripsFormatError(str(exc), lineno) from None

    lineno, line = take("init section")
    toks = line.split()
    if toks[0] != "init":
        raise GStripsFormatError("expected 'init' section", lineno)
    init = atoms_to_state(_indices(toks[1:], n, lineno))
    lineno, line = take("goal section")
    toks = line.split()
    if toks[0] != "goal":
        raise GStripsFormatError("expected 'goal' section", lineno)
    goal = _indices(toks[1:], n, lineno)
    if pos != len(records):
        raise GStripsFormatError("trailing content after goal section", records[pos][0])
    return GroundProblem(tuple(atoms), tuple(actions), init, goal, name=name, unsolvable=unsolvable)
