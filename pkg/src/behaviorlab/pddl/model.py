"""Core data model for the planning subset: domains, problems, states, actions.

Atoms and fluent terms are plain tuples ``(name, arg1, arg2, ...)``; lifted
arguments are ``?``-prefixed variable names, ground arguments are object
names. Numeric expressions are nested tuples:

    ("num", 3.0)                      literal
    ("fluent", ("balance", "acc1"))   fluent lookup
    ("+", e1, e2), ("-", e1, e2), ("*", e1, e2)

All model types are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

Atom = tuple  # (name, *args)

ROOT_TYPE = "object"

COMPARISON_OPS = ("<", "<=", "=", ">=", ">")
NUMERIC_EFFECT_OPS = ("increase", "decrease", "assign")


class ModelError(Exception):
    """A domain or problem failed validation."""


class Comparison(NamedTuple):
    op: str  # one of COMPARISON_OPS
    lhs: tuple
    rhs: tuple


class NumericEffect(NamedTuple):
    op: str  # one of NUMERIC_EFFECT_OPS
    term: Atom
    expr: tuple


@dataclass(frozen=True)
class Condition:
    """A conjunction of positive literals, negative literals and comparisons."""

    pos: frozenset = frozenset()
    neg: frozenset = frozenset()
    num: tuple = ()

    def is_empty(self) -> bool:
        return not self.pos and not self.neg and not self.num

    def size(self) -> int:
        return len(self.pos) + len(self.neg) + len(self.num)


EMPTY_CONDITION = Condition()


@dataclass(frozen=True)
class PredicateSchema:
    name: str
    params: tuple  # ((var, type), ...)

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class FunctionSchema:
    name: str
    params: tuple

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple  # ((var, type), ...)
    pre: Condition = EMPTY_CONDITION
    add: tuple = ()
    delete: tuple = ()
    num_effects: tuple = ()
    cost: float = 1.0

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class State:
    """A full (or projected) state: ground atoms plus fluent valuations.

    ``fluents`` maps ground fluent terms to floats. Reading a fluent that has
    no value is an error (see :mod:`behaviorlab.pddl.semantics`): a silent
    zero default would mask modeling bugs.
    """

    atoms: frozenset = frozenset()
    fluents: Mapping = field(default_factory=dict)

    def key(self):
        """Hashable identity used by search closed lists."""
        return (self.atoms, tuple(sorted(self.fluents.items())))

    def holds_atom(self, atom: Atom) -> bool:
        return atom in self.atoms

    def with_changes(
        self,
        add: Iterable[Atom] = (),
        remove: Iterable[Atom] = (),
        fluents: Iterable[tuple] = (),
    ) -> "State":
        atoms = (self.atoms - frozenset(remove)) | frozenset(add)
        if fluents:
            values = dict(self.fluents)
            values.update(fluents)
        else:
            values = self.fluents
        return State(atoms, values)


@dataclass(frozen=True)
class GroundAction:
    """An action schema instantiated with a type-correct binding."""

    name: str
    args: tuple
    pre: Condition
    add: frozenset
    delete: frozenset
    num_effects: tuple = ()
    cost: float = 1.0

    @property
    def atom(self) -> Atom:
        """The action rendered as a flat tuple, as it appears in traces."""
        return (self.name, *self.args)

    def __str__(self) -> str:
        return "(" + " ".join((self.name,) + self.args) + ")"


@dataclass(frozen=True)
class DomainModel:
    name: str
    types: Mapping  # type name -> parent type name (ROOT_TYPE's parent is None)
    predicates: Mapping  # name -> PredicateSchema
    functions: Mapping  # name -> FunctionSchema
    actions: Mapping  # name -> ActionSchema
    requirements: tuple = ()

    def is_subtype(self, t: str, ancestor: str) -> bool:
        """True if t equals ancestor or is (transitively) derived from it."""
        while t is not None:
            if t == ancestor:
                return True
            t = self.types.get(t)
        return False


@dataclass(frozen=True)
class ProblemModel:
    name: str
    domain_name: str
    objects: Mapping  # object name -> type name
    init: State
    goals: Condition


def format_atom(atom: Atom) -> str:
    return "(" + " ".join(atom) + ")"


def _collect_condition_vars(cond: Condition) -> set:
    seen = set()
    for atom in list(cond.pos) + list(cond.neg):
        seen.update(a for a in atom[1:] if a.startswith("?"))
    for cmp in cond.num:
        for side in (cmp.lhs, cmp.rhs):
            seen.update(_expr_vars(side))
    return seen


def _expr_vars(expr: tuple) -> set:
    kind = expr[0]
    if kind == "num":
        return set()
    if kind == "fluent":
        return {a for a in expr[1][1:] if a.startswith("?")}
    return _expr_vars(expr[1]) | _expr_vars(expr[2])


def _expr_fluent_names(expr: tuple) -> set:
    kind = expr[0]
    if kind == "num":
        return set()
    if kind == "fluent":
        return {expr[1][0]}
    return _expr_fluent_names(expr[1]) | _expr_fluent_names(expr[2])


def validate_domain(dom: DomainModel) -> None:
    """Check name uniqueness, type declarations and variable scoping.

    Raises :class:`ModelError` on the first violation found.
    """
    if ROOT_TYPE not in dom.types:
        raise ModelError(f"type hierarchy must contain the root type {ROOT_TYPE!r}")
    for t, parent in dom.types.items():
        if t == ROOT_TYPE:
            continue
        if parent not in dom.types:
            raise ModelError(f"type {t!r} has undeclared parent {parent!r}")
    names = list(dom.predicates) + list(dom.functions) + list(dom.actions)
    dupes = {n for n in names if names.count(n) > 1}
    if dupes:
        raise ModelError(f"duplicate declaration names: {sorted(dupes)}")

    for schema in list(dom.predicates.values()) + list(dom.functions.values()):
        for var, t in schema.params:
            if t not in dom.types:
                raise ModelError(f"{schema.name!r}: undeclared parameter type {t!r}")

    for act in dom.actions.values():
        param_vars = [v for v, _ in act.params]
        if len(set(param_vars)) != len(param_vars):
            raise ModelError(f"action {act.name!r}: duplicate parameter names")
        for var, t in act.params:
            if t not in dom.types:
                raise ModelError(f"action {act.name!r}: undeclared parameter type {t!r}")
        declared = set(param_vars)
        used = _collect_condition_vars(act.pre)
        for atom in act.add + act.delete:
            used.update(a for a in atom[1:] if a.startswith("?"))
        for eff in act.num_effects:
            used.update(a for a in eff.term[1:] if a.startswith("?"))
            used.update(_expr_vars(eff.expr))
        free = used - declared
        if free:
            raise ModelError(f"action {act.name!r}: unbound variables {sorted(free)}")

        for atom in act.add + act.delete:
            _check_literal_schema(dom, act, atom, dom.predicates, "effect")
        for atom in act.pre.pos | act.pre.neg:
            _check_literal_schema(dom, act, atom, dom.predicates, "precondition")
        for cmp in act.pre.num:
            for name in _expr_fluent_names(cmp.lhs) | _expr_fluent_names(cmp.rhs):
                if name not in dom.functions:
                    raise ModelError(f"action {act.name!r}: unknown function {name!r}")
        for eff in act.num_effects:
            if eff.term[0] not in dom.functions:
                raise ModelError(f"action {act.name!r}: unknown function {eff.term[0]!r}")
        overlap = set(act.add) & set(act.delete)
        if overlap:
            raise ModelError(
                f"action {act.name!r}: literals both added and deleted: {sorted(overlap)}"
            )
        if act.cost < 0:
            raise ModelError(f"action {act.name!r}: negative cost")


def _check_literal_schema(dom, act, atom, predicates, where) -> None:
    schema = predicates.get(atom[0])
    if schema is None:
        raise ModelError(f"action {act.name!r}: unknown predicate {atom[0]!r} in {where}")
    if schema.arity != len(atom) - 1:
        raise ModelError(
            f"action {act.name!r}: {atom[0]!r} expects {schema.arity} arguments, "
            f"got {len(atom) - 1}"
        )


def validate_problem(prob: ProblemModel, dom: DomainModel) -> None:
    """Check that a problem is ground and schema-conformant against dom."""
    if prob.domain_name != dom.name:
        raise ModelError(
            f"problem {prob.name!r} is for domain {prob.domain_name!r}, "
            f"not {dom.name!r}"
        )
    for obj, t in prob.objects.items():
        if t not in dom.types:
            raise ModelError(f"object {obj!r} has undeclared type {t!r}")

    def check_ground_atom(atom: Atom, where: str) -> None:
        schema = dom.predicates.get(atom[0])
        if schema is None:
            raise ModelError(f"unknown predicate {atom[0]!r} in {where}")
        if schema.arity != len(atom) - 1:
            raise ModelError(f"arity mismatch for {atom[0]!r} in {where}")
        for arg, (_, t) in zip(atom[1:], schema.params):
            if arg.startswith("?"):
                raise ModelError(f"non-ground atom {atom} in {where}")
            obj_type = prob.objects.get(arg)
            if obj_type is None:
                raise ModelError(f"undeclared object {arg!r} in {where}")
            if not dom.is_subtype(obj_type, t):
                raise ModelError(
                    f"object {arg!r} of type {obj_type!r} is not a {t!r} in {where}"
                )

    def check_ground_term(term: Atom, where: str) -> None:
        schema = dom.functions.get(term[0])
        if schema is None:
            raise ModelError(f"unknown function {term[0]!r} in {where}")
        if schema.arity != len(term) - 1:
            raise ModelError(f"arity mismatch for {term[0]!r} in {where}")
        for arg in term[1:]:
            if arg.startswith("?") or arg not in prob.objects:
                raise ModelError(f"undeclared object {arg!r} in {where}")

    for atom in prob.init.atoms:
        check_ground_atom(atom, "init")
    for term in prob.init.fluents:
        check_ground_term(term, "init")
    for atom in prob.goals.pos | prob.goals.neg:
        check_ground_atom(atom, "goal")
    for cmp in prob.goals.num:
        for side in (cmp.lhs, cmp.rhs):
            for term in _expr_terms(side):
                check_ground_term(term, "goal")


def _expr_terms(expr: tuple):
    kind = expr[0]
    if kind == "num":
        return
    if kind == "fluent":
        yield expr[1]
        return
    yield from _expr_terms(expr[1])
    yield from _expr_terms(expr[2])
