"""PDDL frontend for the STRIPS fragment with typing.

Accepted grammar (case-insensitive, ``;`` starts a comment)::

    domain  := (define (domain NAME) [(:requirements REQ*)] [(:types TLIST)]
                [(:constants OLIST)] [(:predicates (PRED VLIST)*)] ACTION*)
    ACTION  := (:action NAME [:parameters (VLIST)] [:precondition COND]
                [:effect EFFECT])
    COND    := () | ATOM | (and ATOM*)
    EFFECT  := () | LIT | (and LIT*)
    LIT     := ATOM | (not ATOM)
    problem := (define (problem NAME) (:domain NAME) [(:objects OLIST)]
                (:init GROUND_ATOM*) (:goal COND))

``TLIST``/``VLIST``/``OLIST`` are typed lists ``x y - t z``; untyped names get
type ``object``. Requirements other than ``:strips`` and ``:typing`` and any
construct outside the grammar (``when``, ``forall``, ``or``, negative
preconditions, ``=``, numeric effects) raise :class:`UnsupportedFeatureError`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .strips import GroundAction, GroundProblem, atoms_to_state

SUPPORTED_REQUIREMENTS = {":strips", ":typing"}
_UNSUPPORTED_KEYWORDS = {
    "when": ":conditional-effects",
    "forall": ":universal-preconditions",
    "exists": ":existential-preconditions",
    "or": ":disjunctive-preconditions",
    "imply": ":disjunctive-preconditions",
    "=": ":equality",
    "increase": ":action-costs",
    "decrease": ":numeric-fluents",
    "assign": ":numeric-fluents",
    "either": "either-types",
}


class PDDLError(Exception):
    pass


class PDDLSyntaxError(PDDLError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.col = col


class UnsupportedFeatureError(PDDLError):
    def __init__(self, construct: str, line: int = 0, col: int = 0):
        super().__init__(f"unsupported PDDL feature {construct} at line {line}, column {col}")
        self.construct = construct
        self.line = line
        self.col = col


class ResolutionError(PDDLError):
    """Undeclared predicate, object, type or variable, or an arity mismatch."""


# -- s-expressions -----------------------------------------------------------


@dataclass
class Sym:
    value: str
    line: int
    col: int


@dataclass
class SList:
    items: list
    line: int
    col: int

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]


def _tokenize(text: str):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
        elif ch.isspace():
            i += 1
            col += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            i += 1
            col += 1
        else:
            start = i
            while i < n and not text[i].isspace() and text[i] not in "();":
                i += 1
            yield text[start:i].lower(), line, col
            col += i - start


def read_sexpr(text: str) -> SList:
    stack: list[SList] = []
    result = None
    for tok, line, col in _tokenize(text):
        if tok == "(":
            node = SList([], line, col)
            if stack:
                stack[-1].items.append(node)
            elif result is not None:
                raise PDDLSyntaxError("unexpected content after top-level expression", line, col)
            stack.append(node)
        elif tok == ")":
            if not stack:
                raise PDDLSyntaxError("unbalanced ')'", line, col)
            node = stack.pop()
            if not stack:
                result = node
        else:
            if not stack:
                raise PDDLSyntaxError(f"unexpected symbol {tok!r} outside any expression", line, col)
            stack[-1].items.append(Sym(tok, line, col))
    if stack:
        raise PDDLSyntaxError("unexpected end of input, missing ')'", stack[-1].line, stack[-1].col)
    if result is None:
        raise PDDLSyntaxError("empty input", 1, 1)
    return result


def _sym(node, what: str) -> str:
    if not isinstance(node, Sym):
        raise PDDLSyntaxError(f"expected {what}", node.line, node.col)
    return node.value


def _head(node: SList) -> str | None:
    if len(node) and isinstance(node[0], Sym):
        return node[0].value
    return None


def _typed_list(items: list, allow_vars: bool | None) -> list[tuple[str, str]]:
    """Parse ``a b - t c`` into [(a, t), (b, t), (c, object)]."""
    out: list[tuple[str, str]] = []
    pending: list[Sym] = []
    it = iter(items)
    for node in it:
        if isinstance(node, SList):
            if _head(node) == "either":
                raise UnsupportedFeatureError("either-types", node.line, node.col)
            raise PDDLSyntaxError("unexpected list in typed list", node.line, node.col)
        if node.value == "-":
            if not pending:
                raise PDDLSyntaxError("'-' without names before it", node.line, node.col)
            tnode = next(it, None)
            if tnode is None:
                raise PDDLSyntaxError("missing type after '-'", node.line, node.col)
            if isinstance(tnode, SList) and _head(tnode) == "either":
                raise UnsupportedFeatureError("either-types", tnode.line, tnode.col)
            tname = _sym(tnode, "type name")
            out.extend((p.value, tname) for p in pending)
            pending = []
        else:
            if allow_vars is True and not node.value.startswith("?"):
                raise PDDLSyntaxError(f"expected variable, got {node.value!r}", node.line, node.col)
            if allow_vars is False and node.value.startswith("?"):
                raise PDDLSyntaxError(f"unexpected variable {node.value!r}", node.line, node.col)
            pending.append(node)
    out.extend((p.value, "object") for p in pending)
    return out


# -- ASTs ----------------------------------------------------------------------

Atom = tuple[str, tuple[str, ...]]


@dataclass
class ActionSchema:
    name: str
    parameters: list[tuple[str, str]]
    precondition: list[Atom]
    add: list[Atom]
    delete: list[Atom]


@dataclass
class DomainAst:
    name: str
    requirements: list[str] = field(default_factory=list)
    types: list[tuple[str, str]] = field(default_factory=list)
    constants: list[tuple[str, str]] = field(default_factory=list)
    predicates: dict[str, list[tuple[str, str]]] = field(default_factory=dict)
    actions: list[ActionSchema] = field(default_factory=list)

    def type_parents(self) -> dict[str, str]:
        parents = {"object": ""}
        parents.update(dict(self.types))
        return parents


@dataclass
class ProblemAst:
    name: str
    domain_name: str
    objects: list[tuple[str, str]]
    init: set[Atom]
    goal: list[Atom]

    @property
    def empty_goal(self) -> bool:
        return not self.goal


def _parse_atom(node, variables: set[str] | None, what: str) -> Atom:
    if not isinstance(node, SList) or not len(node):
        raise PDDLSyntaxError(f"expected {what}", node.line, node.col)
    head = _head(node)
    if head is None:
        raise PDDLSyntaxError(f"expected predicate name in {what}", node.line, node.col)
    if head in _UNSUPPORTED_KEYWORDS:
        raise UnsupportedFeatureError(_UNSUPPORTED_KEYWORDS[head], node.line, node.col)
    if head == "not":
        raise UnsupportedFeatureError(":negative-preconditions", node.line, node.col)
    if head == "and":
        raise PDDLSyntaxError(f"nested 'and' in {what}", node.line, node.col)
    args = []
    for arg in node.items[1:]:
        if isinstance(arg, SList):
            raise UnsupportedFeatureError("function terms", arg.line, arg.col)
        if arg.value.startswith("?"):
            if variables is None:
                raise PDDLSyntaxError(f"variable {arg.value} in ground atom", arg.line, arg.col)
            if arg.value not in variables:
                raise ResolutionError(f"undeclared variable {arg.value} at line {arg.line}")
        args.append(arg.value)
    return head, tuple(args)


def _conjunction(node, variables, what: str) -> list[Atom]:
    if isinstance(node, Sym):
        raise PDDLSyntaxError(f"expected {what}", node.line, node.col)
    if not len(node):
        return []
    if _head(node) == "and":
        return [_parse_atom(c, variables, what) for c in node.items[1:]]
    return [_parse_atom(node, variables, what)]


def _effects(node, variables) -> tuple[list[Atom], list[Atom]]:
    if isinstance(node, Sym):
        raise PDDLSyntaxError("expected effect", node.line, node.col)
    if not len(node):
        return [], []
    literals = node.items[1:] if _head(node) == "and" else [node]
    add, delete = [], []
    for lit in literals:
        if isinstance(lit, SList) and _head(lit) == "not":
            if len(lit) != 2:
                raise PDDLSyntaxError("malformed (not ...)", lit.line, lit.col)
            delete.append(_parse_atom(lit[1], variables, "effect atom"))
        elif isinstance(lit, SList) and _head(lit) == "and":
            raise PDDLSyntaxError("nested 'and' in effect", lit.line, lit.col)
        else:
            add.append(_parse_atom(lit, variables, "effect atom"))
    return add, delete


def _check_header(root: SList, kind: str) -> str:
    if _head(root) != "define" or len(root) < 2:
        raise PDDLSyntaxError("expected (define ...)", root.line, root.col)
    hdr = root[1]
    if not isinstance(hdr, SList) or len(hdr) != 2 or _head(hdr) != kind:
        raise PDDLSyntaxError(f"expected ({kind} NAME)", hdr.line, hdr.col)
    return _sym(hdr[1], f"{kind} name")


def parse_domain(text: str) -> DomainAst:
    root = read_sexpr(text)
    dom = DomainAst(name=_check_header(root, "domain"))
    for section in root.items[2:]:
        if not isinstance(section, SList) or not len(section):
            raise PDDLSyntaxError("expected domain section", section.line, section.col)
        key = _head(section)
        if key == ":requirements":
            for req in section.items[1:]:
                r = _sym(req, "requirement")
                if r not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeatureError(r, req.line, req.col)
                dom.requirements.append(r)
        elif key == ":types":
            dom.types.extend(_typed_list(section.items[1:], allow_vars=False))
        elif key == ":constants":
            dom.constants.extend(_typed_list(section.items[1:], allow_vars=False))
        elif key == ":predicates":
            for pred in section.items[1:]:
                if not isinstance(pred, SList) or _head(pred) is None:
                    raise PDDLSyntaxError("expected predicate declaration", pred.line, pred.col)
                pname = pred[0].value
                if pname in dom.predicates:
                    raise ResolutionError(f"predicate {pname} declared twice")
                dom.predicates[pname] = _typed_list(pred.items[1:], allow_vars=True)
        elif key == ":action":
            dom.actions.append(_parse_action(section))
        elif key in (":functions", ":derived", ":durative-action", ":process", ":event"):
            raise UnsupportedFeatureError(key, section.line, section.col)
        else:
            raise PDDLSyntaxError(f"unknown domain section {key!r}", section.line, section.col)
    _check_domain(dom)
    return dom


def _parse_action(section: SList) -> ActionSchema:
    name = _sym(section[1], "action name") if len(section) > 1 else None
    if name is None:
        raise PDDLSyntaxError("action without name", section.line, section.col)
    params: list[tuple[str, str]] = []
    pre: list[Atom] = []
    add: list[Atom] = []
    delete: list[Atom] = []
    items = section.items[2:]
    if len(items) % 2:
        raise PDDLSyntaxError(f"action {name}: keyword without value", section.line, section.col)
    body = []
    for kw, value in zip(items[::2], items[1::2]):
        k = _sym(kw, "action keyword")
        if k == ":parameters":
            if not isinstance(value, SList):
                raise PDDLSyntaxError("expected parameter list", value.line, value.col)
            params = _typed_list(value.items, allow_vars=True)
        elif k in (":precondition", ":effect"):
            body.append((k, value))
        else:
            raise PDDLSyntaxError(f"unknown action keyword {k!r}", kw.line, kw.col)
    variables = {p for p, _ in params}
    for k, value in body:
        if k == ":precondition":
            pre = _conjunction(value, variables, "precondition")
        else:
            add, delete = _effects(value, variables)
    return ActionSchema(name, params, pre, add, delete)


def _check_domain(dom: DomainAst) -> None:
    parents = dom.type_parents()
    for t, parent in dom.types:
        if parent not in parents:
            raise ResolutionError(f"type {t} has undeclared parent {parent}")
    for t in parents:
        seen = set()
        while t:
            if t in seen:
                raise ResolutionError(f"cyclic type hierarchy through {t}")
            seen.add(t)
            t = parents[t]
    for pname, params in dom.predicates.items():
        for _, t in params:
            if t not in parents:
                raise ResolutionError(f"predicate {pname}: undeclared type {t}")
    consts = {c for c, _ in dom.constants}
    for act in dom.actions:
        for _, t in act.parameters:
            if t not in parents:
                raise ResolutionError(f"action {act.name}: undeclared type {t}")
        for pred, args in act.precondition + act.add + act.delete:
            if pred not in dom.predicates:
                raise ResolutionError(f"action {act.name}: undeclared predicate {pred}")
            if len(args) != len(dom.predicates[pred]):
                raise ResolutionError(
                    f"action {act.name}: predicate {pred} used with {len(args)} arguments, "
                    f"declared with {len(dom.predicates[pred])}"
                )
            for arg in args:
                if not arg.startswith("?") and arg not in consts:
                    raise ResolutionError(f"action {act.name}: undeclared constant {arg}")


def parse_problem(text: str, dom: DomainAst) -> ProblemAst:
    root = read_sexpr(text)
    name = _check_header(root, "problem")
    domain_name = None
    objects: list[tuple[str, str]] = list(dom.constants)
    init: set[Atom] = set()
    goal: list[Atom] = []
    have_goal = False
    for section in root.items[2:]:
        if not isinstance(section, SList) or not len(section):
            raise PDDLSyntaxError("expected problem section", section.line, section.col)
        key = _head(section)
        if key == ":domain":
            domain_name = _sym(section[1], "domain name")
        elif key == ":requirements":
            for req in section.items[1:]:
                if _sym(req, "requirement") not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeatureError(req.value, req.line, req.col)
        elif key == ":objects":
            objects.extend(_typed_list(section.items[1:], allow_vars=False))
        elif key == ":init":
            for atom in section.items[1:]:
                if isinstance(atom, SList) and _head(atom) == "=":
                    raise UnsupportedFeatureError(":numeric-fluents", atom.line, atom.col)
                init.add(_parse_atom(atom, None, "initial atom"))
        elif key == ":goal":
            if len(section) != 2:
                raise PDDLSyntaxError("expected a single goal formula", section.line, section.col)
            goal = _conjunction(section[1], None, "goal")
            have_goal = True
        elif key == ":metric":
            raise UnsupportedFeatureError(":action-costs", section.line, section.col)
        else:
            raise PDDLSyntaxError(f"unknown problem section {key!r}", section.line, section.col)
    if domain_name is None:
        raise PDDLSyntaxError("problem lacks (:domain NAME)", root.line, root.col)
    if domain_name != dom.name:
        raise ResolutionError(f"problem is for domain {domain_name}, not {dom.name}")
    if not have_goal:
        raise PDDLSyntaxError("problem lacks (:goal ...)", root.line, root.col)
    prob = ProblemAst(name, domain_name, objects, init, list(dict.fromkeys(goal)))
    _check_problem(prob, dom)
    return prob


def _check_problem(prob: ProblemAst, dom: DomainAst) -> None:
    parents = dom.type_parents()
    names = set()
    for obj, t in prob.objects:
        if t not in parents:
            raise ResolutionError(f"object {obj}: undeclared type {t}")
        if obj in names:
            raise ResolutionError(f"object {obj} declared twice")
        names.add(obj)
    for what, atoms in (("init", prob.init), ("goal", prob.goal)):
        for pred, args in atoms:
            if pred not in dom.predicates:
                raise ResolutionError(f"{what}: undeclared predicate {pred}")
            if len(args) != len(dom.predicates[pred]):
                raise ResolutionError(f"{what}: predicate {pred} has wrong arity")
            for arg in args:
                if arg not in names:
                    raise ResolutionError(f"{what}: undeclared object {arg}")


# -- grounding -----------------------------------------------------------------


def atom_name(pred: str, args: tuple[str, ...]) -> str:
    return "(" + " ".join((pred,) + tuple(args)) + ")"


def _objects_by_type(dom: DomainAst, prob: ProblemAst) -> dict[str, list[str]]:
    parents = dom.type_parents()
    by_type: dict[str, list[str]] = {t: [] for t in parents}
    for obj, t in prob.objects:
        while t:
            by_type[t].append(obj)
            t = parents[t]
    return {t: sorted(objs) for t, objs in by_type.items()}


def ground(dom: DomainAst, prob: ProblemAst) -> GroundProblem:
    """Instantiate schemas over typed objects, then keep the relaxed-reachable part.

    Indices follow the lexicographic order of atom and action names, so the
    output is independent of declaration order.
    """
    by_type = _objects_by_type(dom, prob)
    candidates = []
    for schema in dom.actions:
        names = [p for p, _ in schema.parameters]
        domains = [by_type[t] for _, t in schema.parameters]
        for combo in itertools.product(*domains):
            binding = dict(zip(names, combo))

            def inst(atoms):
                return [atom_name(p, tuple(binding.get(a, a) for a in args)) for p, args in atoms]

            candidates.append(
                (atom_name(schema.name, combo), inst(schema.precondition), inst(schema.add), inst(schema.delete))
            )

    reached = {atom_name(p, args) for p, args in prob.init}
    remaining = candidates
    kept = []
    changed = True
    while changed:
        changed = False
        pending = []
        for cand in remaining:
            if all(p in reached for p in cand[1]):
                kept.append(cand)
                for a in cand[2]:
                    if a not in reached:
                        reached.add(a)
                        changed = True
            else:
                pending.append(cand)
        remaining = pending

    goal_names = [atom_name(p, args) for p, args in prob.goal]
    unsolvable = any(g not in reached for g in goal_names)
    atoms = sorted(reached | set(goal_names))
    index = {a: i for i, a in enumerate(atoms)}
    actions = []
    for name, pre, add, delete in sorted(kept, key=lambda c: c[0]):
        add_idx = {index[a] for a in add}
        # delete effects on atoms that are also added or never reachable are no-ops
        del_idx = {index[a] for a in delete if a in index} - add_idx
        actions.append(GroundAction(name, tuple(index[p] for p in pre), tuple(add_idx), tuple(del_idx)))
    init = atoms_to_state(index[atom_name(p, args)] for p, args in prob.init)
    return GroundProblem(
        atom_names=tuple(atoms),
        actions=tuple(actions),
        init=init,
        goal=tuple(index[g] for g in goal_names),
        name=prob.name,
        unsolvable=unsolvable,
    )


def load(domain_text: str, problem_text: str) -> GroundProblem:
    dom = parse_domain(domain_text)
    return ground(dom, parse_problem(problem_text, dom))


def load_files(domain_path, problem_path) -> GroundProblem:
    with open(domain_path) as fd, open(problem_path) as fp:
        return load(fd.read(), fp.read())
