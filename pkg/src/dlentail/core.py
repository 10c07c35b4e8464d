"""Domain types for ALCHOIQb knowledge bases and their model-theoretic semantics.

Concepts, roles, and axioms are immutable trees; interpretations are finite
labeled directed graphs.  Everything in this module is a pure function of its
inputs and safe to call concurrently.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping


class ReasonerError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ReasonerError):
    """Ill-formed input (unknown names, malformed trees, bad declarations)."""


class MissingNominalError(ReasonerError):
    """A nominal concept was evaluated against an interpretation that does
    not assign the individual to any element."""


class DialectError(ReasonerError):
    """An operation required the simplified dialect but got a raw knowledge
    base (or vice versa)."""


class UnsupportedInputError(ReasonerError):
    """Input is syntactically fine but outside the supported fragment
    (e.g. transitivity axioms, unsafe universal guards)."""


# ---------------------------------------------------------------------------
# Roles and Boolean role expressions


@dataclass(frozen=True, order=True)
class Role:
    base: str
    inverted: bool = False

    def inv(self) -> "Role":
        return Role(self.base, not self.inverted)

    def __str__(self) -> str:
        return self.base + ("-" if self.inverted else "")


class RoleExpr:
    """Base class for Boolean role expressions."""

    __slots__ = ()


@dataclass(frozen=True)
class RoleLeaf(RoleExpr):
    role: Role

    def __str__(self) -> str:
        return str(self.role)


@dataclass(frozen=True)
class RoleNot(RoleExpr):
    sub: RoleExpr

    def __str__(self) -> str:
        return f"(not {self.sub})"


@dataclass(frozen=True)
class RoleAnd(RoleExpr):
    left: RoleExpr
    right: RoleExpr

    def __str__(self) -> str:
        return f"(and {self.left} {self.right})"


@dataclass(frozen=True)
class RoleOr(RoleExpr):
    left: RoleExpr
    right: RoleExpr

    def __str__(self) -> str:
        return f"(or {self.left} {self.right})"


def roles_in_expr(expr: RoleExpr) -> set[Role]:
    if isinstance(expr, RoleLeaf):
        return {expr.role}
    if isinstance(expr, RoleNot):
        return roles_in_expr(expr.sub)
    if isinstance(expr, (RoleAnd, RoleOr)):
        return roles_in_expr(expr.left) | roles_in_expr(expr.right)
    raise InputError(f"not a role expression: {expr!r}")


def role_set_entails(roles: Iterable[Role], expr: RoleExpr) -> bool:
    """Boolean entailment between a set of roles and a role expression."""
    rs = set(roles)
    if isinstance(expr, RoleLeaf):
        return expr.role in rs
    if isinstance(expr, RoleNot):
        return not role_set_entails(rs, expr.sub)
    if isinstance(expr, RoleAnd):
        return role_set_entails(rs, expr.left) and role_set_entails(rs, expr.right)
    if isinstance(expr, RoleOr):
        return role_set_entails(rs, expr.left) or role_set_entails(rs, expr.right)
    raise InputError(f"not a role expression: {expr!r}")


def is_safe(expr: RoleExpr) -> bool:
    """A role expression is safe when the empty role set does not entail it.

    Safe expressions can only relate elements already joined by some
    positive role edge.
    """
    return not role_set_entails(frozenset(), expr)


def role_dnf(expr: RoleExpr) -> list[list[tuple[bool, Role]]]:
    """Disjunctive normal form as a list of disjuncts, each a list of
    (positive, role) literals.  Structural recursion, no simplification."""

    def neg(e: RoleExpr) -> RoleExpr:
        return RoleNot(e)

    if isinstance(expr, RoleLeaf):
        return [[(True, expr.role)]]
    if isinstance(expr, RoleOr):
        return role_dnf(expr.left) + role_dnf(expr.right)
    if isinstance(expr, RoleAnd):
        return [
            dl + dr for dl in role_dnf(expr.left) for dr in role_dnf(expr.right)
        ]
    if isinstance(expr, RoleNot):
        sub = expr.sub
        if isinstance(sub, RoleLeaf):
            return [[(False, sub.role)]]
        if isinstance(sub, RoleNot):
            return role_dnf(sub.sub)
        if isinstance(sub, RoleAnd):
            return role_dnf(RoleOr(neg(sub.left), neg(sub.right)))
        if isinstance(sub, RoleOr):
            return role_dnf(RoleAnd(neg(sub.left), neg(sub.right)))
    raise InputError(f"not a role expression: {expr!r}")


def role_cnf(expr: RoleExpr) -> list[list[tuple[bool, Role]]]:
    """Conjunctive normal form, same literal encoding as role_dnf."""
    negated = role_dnf(RoleNot(expr))
    return [[(not pos, r) for (pos, r) in disj] for disj in negated]


def is_safe_dnf(expr: RoleExpr) -> bool:
    """Alternative safeness characterization: every DNF disjunct must
    contain at least one non-negated role."""
    return all(any(pos for (pos, _) in disj) for disj in role_dnf(expr))


# ---------------------------------------------------------------------------
# Concepts


class Concept:
    __slots__ = ()


@dataclass(frozen=True)
class Top(Concept):
    def __str__(self) -> str:
        return "top"


@dataclass(frozen=True)
class Bottom(Concept):
    def __str__(self) -> str:
        return "bot"


@dataclass(frozen=True)
class ConceptName(Concept):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Nominal(Concept):
    individual: str

    def __str__(self) -> str:
        return "{%s}" % self.individual


@dataclass(frozen=True)
class Placeholder(Concept):
    """Concept standing in for a nominal in quasi-structures, where several
    elements may carry the same individual tag."""

    individual: str

    def __str__(self) -> str:
        return "ph:%s" % self.individual


@dataclass(frozen=True)
class Not(Concept):
    sub: Concept

    def __str__(self) -> str:
        return f"(not {self.sub})"


@dataclass(frozen=True)
class And(Concept):
    left: Concept
    right: Concept

    def __str__(self) -> str:
        return f"(and {self.left} {self.right})"


@dataclass(frozen=True)
class Or(Concept):
    left: Concept
    right: Concept

    def __str__(self) -> str:
        return f"(or {self.left} {self.right})"


@dataclass(frozen=True)
class Forall(Concept):
    guard: RoleExpr
    filler: Concept

    def __str__(self) -> str:
        return f"(all {self.guard} {self.filler})"


@dataclass(frozen=True)
class Exists(Concept):
    guard: RoleExpr
    filler: Concept

    def __str__(self) -> str:
        return f"(some {self.guard} {self.filler})"


@dataclass(frozen=True)
class AtMost(Concept):
    bound: int
    role: Role
    filler: Concept

    def __str__(self) -> str:
        return f"(atmost {self.bound} {self.role} {self.filler})"


@dataclass(frozen=True)
class AtLeast(Concept):
    bound: int
    role: Role
    filler: Concept

    def __str__(self) -> str:
        return f"(atleast {self.bound} {self.role} {self.filler})"


TOP = Top()
BOTTOM = Bottom()

_ATOMIC = (Top, Bottom, ConceptName, Nominal, Placeholder)


def nnf(c: Concept) -> Concept:
    """Negation normal form: negation only in front of atomic concepts."""
    if isinstance(c, _ATOMIC):
        return c
    if isinstance(c, Not):
        s = c.sub
        if isinstance(s, Top):
            return BOTTOM
        if isinstance(s, Bottom):
            return TOP
        if isinstance(s, (ConceptName, Nominal, Placeholder)):
            return c
        if isinstance(s, Not):
            return nnf(s.sub)
        if isinstance(s, And):
            return Or(nnf(Not(s.left)), nnf(Not(s.right)))
        if isinstance(s, Or):
            return And(nnf(Not(s.left)), nnf(Not(s.right)))
        if isinstance(s, Forall):
            return Exists(s.guard, nnf(Not(s.filler)))
        if isinstance(s, Exists):
            return Forall(s.guard, nnf(Not(s.filler)))
        if isinstance(s, AtMost):
            return AtLeast(s.bound + 1, s.role, nnf(s.filler))
        if isinstance(s, AtLeast):
            if s.bound == 0:
                return BOTTOM
            return AtMost(s.bound - 1, s.role, nnf(s.filler))
        raise InputError(f"not a concept: {s!r}")
    if isinstance(c, And):
        return And(nnf(c.left), nnf(c.right))
    if isinstance(c, Or):
        return Or(nnf(c.left), nnf(c.right))
    if isinstance(c, Forall):
        return Forall(c.guard, nnf(c.filler))
    if isinstance(c, Exists):
        return Exists(c.guard, nnf(c.filler))
    if isinstance(c, AtMost):
        return AtMost(c.bound, c.role, nnf(c.filler))
    if isinstance(c, AtLeast):
        return AtLeast(c.bound, c.role, nnf(c.filler))
    raise InputError(f"not a concept: {c!r}")


def subconcepts(c: Concept) -> Iterator[Concept]:
    """All subconcepts of c, including c itself."""
    yield c
    if isinstance(c, Not):
        yield from subconcepts(c.sub)
    elif isinstance(c, (And, Or)):
        yield from subconcepts(c.left)
        yield from subconcepts(c.right)
    elif isinstance(c, (Forall, Exists, AtMost, AtLeast)):
        yield from subconcepts(c.filler)


# ---------------------------------------------------------------------------
# Axioms and knowledge bases


class Axiom:
    __slots__ = ()


@dataclass(frozen=True)
class GCI(Axiom):
    lhs: Concept
    rhs: Concept

    def __str__(self) -> str:
        return f"{self.lhs} <= {self.rhs}"


@dataclass(frozen=True)
class Func(Axiom):
    role: Role

    def __str__(self) -> str:
        return f"func({self.role})"


@dataclass(frozen=True)
class RoleIncl(Axiom):
    sub: Role
    sup: Role

    def __str__(self) -> str:
        return f"{self.sub} <= {self.sup}"


@dataclass(frozen=True)
class TransAxiom(Axiom):
    """Parsed for diagnostics only; rejected by every validator."""

    role: Role


@dataclass(frozen=True)
class ConceptAssertion(Axiom):
    concept: Concept
    individual: str


@dataclass(frozen=True)
class RoleAssertion(Axiom):
    role: Role
    subject: str
    object: str


@dataclass(frozen=True)
class NegRoleAssertion(Axiom):
    role: Role
    subject: str
    object: str


@dataclass(frozen=True)
class SameIndividual(Axiom):
    first: str
    second: str


@dataclass(frozen=True)
class DifferentIndividuals(Axiom):
    first: str
    second: str


ASSERTION_KINDS = (
    ConceptAssertion,
    RoleAssertion,
    NegRoleAssertion,
    SameIndividual,
    DifferentIndividuals,
)

RAW = "raw"
SIMPLIFIED = "simplified"


@dataclass(frozen=True)
class Signature:
    concept_names: tuple[str, ...] = ()
    role_names: tuple[str, ...] = ()
    individual_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        pools = [self.concept_names, self.role_names, self.individual_names]
        for pool in pools:
            if len(set(pool)) != len(pool):
                raise InputError(f"duplicate declaration in {pool}")
        union = set(self.concept_names) | set(self.role_names) | set(
            self.individual_names
        )
        if len(union) != sum(len(p) for p in pools):
            raise InputError("concept, role, and individual names must be disjoint")

    def individual_index(self, name: str) -> int:
        return self.individual_names.index(name)

    def extend(
        self,
        concepts: Iterable[str] = (),
        roles: Iterable[str] = (),
        individuals: Iterable[str] = (),
    ) -> "Signature":
        return Signature(
            self.concept_names + tuple(c for c in concepts if c not in self.concept_names),
            self.role_names + tuple(r for r in roles if r not in self.role_names),
            self.individual_names
            + tuple(i for i in individuals if i not in self.individual_names),
        )


@dataclass(frozen=True)
class KnowledgeBase:
    signature: Signature
    axioms: tuple[Axiom, ...]
    dialect: str = RAW

    def concept_names(self) -> tuple[str, ...]:
        return self.signature.concept_names

    def role_names(self) -> tuple[str, ...]:
        return self.signature.role_names

    def nominals(self) -> tuple[str, ...]:
        """Individual names occurring in the knowledge base, in signature order."""
        used: set[str] = set()
        for ax in self.axioms:
            for c in _axiom_concepts(ax):
                for sc in subconcepts(c):
                    if isinstance(sc, (Nominal, Placeholder)):
                        used.add(sc.individual)
            if isinstance(ax, ConceptAssertion):
                used.add(ax.individual)
            elif isinstance(ax, (RoleAssertion, NegRoleAssertion)):
                used.update((ax.subject, ax.object))
            elif isinstance(ax, (SameIndividual, DifferentIndividuals)):
                used.update((ax.first, ax.second))
        return tuple(i for i in self.signature.individual_names if i in used)

    def roles(self) -> tuple[Role, ...]:
        """All roles occurring in the knowledge base, inverses included."""
        found: set[Role] = set()
        for ax in self.axioms:
            if isinstance(ax, Func):
                found.add(ax.role)
            elif isinstance(ax, (RoleIncl,)):
                found.update((ax.sub, ax.sup))
            elif isinstance(ax, TransAxiom):
                found.add(ax.role)
            elif isinstance(ax, (RoleAssertion, NegRoleAssertion)):
                found.add(ax.role)
            for c in _axiom_concepts(ax):
                for sc in subconcepts(c):
                    if isinstance(sc, (Forall, Exists)):
                        found.update(roles_in_expr(sc.guard))
                    elif isinstance(sc, (AtMost, AtLeast)):
                        found.add(sc.role)
        ordered = []
        for base in self.signature.role_names:
            for inverted in (False, True):
                r = Role(base, inverted)
                if r in found:
                    ordered.append(r)
        return tuple(ordered)

    def functional_roles(self) -> set[Role]:
        return {ax.role for ax in self.axioms if isinstance(ax, Func)}

    def inverse_functional_roles(self) -> set[Role]:
        """Roles whose inverse is declared functional: each element has at
        most one predecessor through such a role."""
        return {ax.role.inv() for ax in self.axioms if isinstance(ax, Func)}


def _axiom_concepts(ax: Axiom) -> tuple[Concept, ...]:
    if isinstance(ax, GCI):
        return (ax.lhs, ax.rhs)
    if isinstance(ax, ConceptAssertion):
        return (ax.concept,)
    return ()


def closure(k: KnowledgeBase) -> set[Concept]:
    """Concept closure: NNF-ed GCI material, closed under subconcepts and
    NNF negation."""
    work: list[Concept] = []
    for ax in k.axioms:
        if isinstance(ax, GCI):
            work.append(nnf(Or(Not(ax.lhs), ax.rhs)))
    seen: set[Concept] = set()
    while work:
        c = work.pop()
        if c in seen:
            continue
        seen.add(c)
        for sc in subconcepts(c):
            if sc not in seen:
                work.append(sc)
        neg = nnf(Not(c))
        if neg not in seen:
            work.append(neg)
    return seen


def existential_concepts(k: KnowledgeBase) -> list[Exists]:
    """Existential closure concepts with concept-name fillers, in a stable
    order.  These are the witness triggers for unraveling."""
    named = [
        c
        for c in closure(k)
        if isinstance(c, Exists) and isinstance(c.filler, (ConceptName, Placeholder))
    ]
    return sorted(named, key=str)


# ---------------------------------------------------------------------------
# Interpretations


@dataclass(frozen=True)
class Interpretation:
    """A finite labeled directed graph.

    ``elements`` fixes the stable iteration order used everywhere.
    ``nominal_map`` assigns individuals to single elements (real nominals);
    ``placeholder_ext`` holds the possibly-many-element tag sets used by
    quasi-structures.
    """

    elements: tuple
    concept_ext: Mapping[str, frozenset] = field(default_factory=dict)
    role_ext: Mapping[str, frozenset] = field(default_factory=dict)
    nominal_map: Mapping[str, Any] = field(default_factory=dict)
    placeholder_ext: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self) -> None:
        dom = set(self.elements)
        if len(dom) != len(self.elements):
            raise InputError("duplicate element ids")
        for name, ext in self.concept_ext.items():
            if not ext <= dom:
                raise InputError(f"concept {name} references undeclared elements")
        for name, pairs in self.role_ext.items():
            for a, b in pairs:
                if a not in dom or b not in dom:
                    raise InputError(f"role {name} references undeclared elements")
        for o, e in self.nominal_map.items():
            if e not in dom:
                raise InputError(f"nominal {o} assigned to undeclared element")
        for o, ext in self.placeholder_ext.items():
            if not ext <= dom:
                raise InputError(f"placeholder {o} references undeclared elements")

    def order_index(self) -> dict:
        return {e: i for i, e in enumerate(self.elements)}

    def concept_members(self, name: str) -> frozenset:
        return self.concept_ext.get(name, frozenset())

    def role_pairs(self, role: Role) -> frozenset:
        raw = self.role_ext.get(role.base, frozenset())
        if role.inverted:
            return frozenset((b, a) for (a, b) in raw)
        return raw

    def placeholder_members(self, individual: str) -> frozenset:
        return self.placeholder_ext.get(individual, frozenset())

    def edge_roles(self, a, b, roles: Iterable[Role]) -> frozenset:
        """All roles (from the given pool) connecting a to b."""
        return frozenset(r for r in roles if (a, b) in self.role_pairs(r))

    def sorted_elements(self, items: Iterable) -> list:
        idx = self.order_index()
        return sorted(items, key=idx.__getitem__)


def eval_role_expr(i: Interpretation, expr: RoleExpr) -> frozenset:
    """Extension of a Boolean role expression as a set of ordered pairs."""
    if isinstance(expr, RoleLeaf):
        return i.role_pairs(expr.role)
    if isinstance(expr, RoleNot):
        full = frozenset((a, b) for a in i.elements for b in i.elements)
        return full - eval_role_expr(i, expr.sub)
    if isinstance(expr, RoleAnd):
        return eval_role_expr(i, expr.left) & eval_role_expr(i, expr.right)
    if isinstance(expr, RoleOr):
        return eval_role_expr(i, expr.left) | eval_role_expr(i, expr.right)
    raise InputError(f"not a role expression: {expr!r}")


def eval_concept(i: Interpretation, c: Concept) -> frozenset:
    """Extension of a concept under the standard semantics."""
    if isinstance(c, Top):
        return frozenset(i.elements)
    if isinstance(c, Bottom):
        return frozenset()
    if isinstance(c, ConceptName):
        return i.concept_members(c.name)
    if isinstance(c, Nominal):
        if c.individual not in i.nominal_map:
            raise MissingNominalError(
                f"individual {c.individual} has no element assigned"
            )
        return frozenset({i.nominal_map[c.individual]})
    if isinstance(c, Placeholder):
        return i.placeholder_members(c.individual)
    if isinstance(c, Not):
        return frozenset(i.elements) - eval_concept(i, c.sub)
    if isinstance(c, And):
        return eval_concept(i, c.left) & eval_concept(i, c.right)
    if isinstance(c, Or):
        return eval_concept(i, c.left) | eval_concept(i, c.right)
    if isinstance(c, Forall):
        pairs = eval_role_expr(i, c.guard)
        filler = eval_concept(i, c.filler)
        return frozenset(
            d for d in i.elements if all(e in filler for (x, e) in pairs if x == d)
        )
    if isinstance(c, Exists):
        pairs = eval_role_expr(i, c.guard)
        filler = eval_concept(i, c.filler)
        return frozenset(d for (d, e) in pairs if e in filler)
    if isinstance(c, (AtMost, AtLeast)):
        pairs = i.role_pairs(c.role)
        filler = eval_concept(i, c.filler)
        counts: dict[Any, int] = {d: 0 for d in i.elements}
        for (d, e) in pairs:
            if e in filler:
                counts[d] += 1
        if isinstance(c, AtMost):
            return frozenset(d for d in i.elements if counts[d] <= c.bound)
        return frozenset(d for d in i.elements if counts[d] >= c.bound)
    raise InputError(f"not a concept: {c!r}")


def is_model(i: Interpretation, k: KnowledgeBase) -> bool:
    """Full semantic model check, axiom by axiom."""
    for ax in k.axioms:
        if isinstance(ax, GCI):
            if not eval_concept(i, ax.lhs) <= eval_concept(i, ax.rhs):
                return False
        elif isinstance(ax, Func):
            pairs = i.role_pairs(ax.role)
            succ: dict[Any, set] = {}
            for (a, b) in pairs:
                succ.setdefault(a, set()).add(b)
            if any(len(s) > 1 for s in succ.values()):
                return False
        elif isinstance(ax, RoleIncl):
            if not i.role_pairs(ax.sub) <= i.role_pairs(ax.sup):
                return False
        elif isinstance(ax, TransAxiom):
            raise UnsupportedInputError(
                "transitivity not supported; pre-eliminate trans axioms"
            )
        elif isinstance(ax, ConceptAssertion):
            if ax.individual not in i.nominal_map:
                raise MissingNominalError(ax.individual)
            if i.nominal_map[ax.individual] not in eval_concept(i, ax.concept):
                return False
        elif isinstance(ax, RoleAssertion):
            a, b = _assertion_pair(i, ax.subject, ax.object)
            if (a, b) not in i.role_pairs(ax.role):
                return False
        elif isinstance(ax, NegRoleAssertion):
            a, b = _assertion_pair(i, ax.subject, ax.object)
            if (a, b) in i.role_pairs(ax.role):
                return False
        elif isinstance(ax, SameIndividual):
            a, b = _assertion_pair(i, ax.first, ax.second)
            if a != b:
                return False
        elif isinstance(ax, DifferentIndividuals):
            a, b = _assertion_pair(i, ax.first, ax.second)
            if a == b:
                return False
        else:
            raise InputError(f"unknown axiom kind: {ax!r}")
    return True


def _assertion_pair(i: Interpretation, a: str, b: str):
    for name in (a, b):
        if name not in i.nominal_map:
            raise MissingNominalError(name)
    return i.nominal_map[a], i.nominal_map[b]


# ---------------------------------------------------------------------------
# Simplified-dialect classification and local consistency


@dataclass(frozen=True)
class ClauseShape:
    """Conjunction of atoms entails disjunction of atoms; atoms are concept
    names or placeholders.  Empty lhs reads as top, empty rhs as bottom."""

    lhs: tuple[Concept, ...]
    rhs: tuple[Concept, ...]


@dataclass(frozen=True)
class NominalShape:
    """One inclusion between a concept name and a nominal; which/direction
    is given by ``concept_first``."""

    name: Concept
    individual: str
    concept_first: bool


@dataclass(frozen=True)
class GuardedShape:
    """A <= all U.B or A <= some U.B with atomic sides."""

    name: Concept
    existential: bool
    guard: RoleExpr
    filler: Concept


@dataclass(frozen=True)
class FuncShape:
    role: Role


def _atom_list(c: Concept, op: type) -> list[Concept] | None:
    """Flatten nested binary ops into a list of name/placeholder atoms, or
    None if anything else appears."""
    if isinstance(c, (ConceptName, Placeholder)):
        return [c]
    if isinstance(c, op):
        left = _atom_list(c.left, op)
        right = _atom_list(c.right, op)
        if left is None or right is None:
            return None
        return left + right
    return None


def classify_simplified(ax: Axiom):
    """Classify an axiom into one of the simplified shapes, or None."""
    if isinstance(ax, Func):
        return FuncShape(ax.role)
    if not isinstance(ax, GCI):
        return None
    lhs, rhs = ax.lhs, ax.rhs
    if isinstance(lhs, (ConceptName, Placeholder)) and isinstance(rhs, Nominal):
        return NominalShape(lhs, rhs.individual, True)
    if isinstance(lhs, Nominal) and isinstance(rhs, (ConceptName, Placeholder)):
        return NominalShape(rhs, lhs.individual, False)
    if isinstance(lhs, (ConceptName, Placeholder)) and isinstance(
        rhs, (Forall, Exists)
    ):
        if isinstance(rhs.filler, (ConceptName, Placeholder)) and is_safe(rhs.guard):
            return GuardedShape(
                lhs, isinstance(rhs, Exists), rhs.guard, rhs.filler
            )
        return None
    left = [] if isinstance(lhs, Top) else _atom_list(lhs, And)
    right = [] if isinstance(rhs, Bottom) else _atom_list(rhs, Or)
    if left is None or right is None:
        return None
    return ClauseShape(tuple(left), tuple(right))


def _atom_members(i: Interpretation, atom: Concept) -> frozenset:
    if isinstance(atom, ConceptName):
        return i.concept_members(atom.name)
    if isinstance(atom, Placeholder):
        return i.placeholder_members(atom.individual)
    raise InputError(f"not an atomic concept: {atom!r}")


@dataclass(frozen=True)
class LocalReport:
    element: Any
    violations: tuple[tuple[Axiom, str], ...]

    def ok(self) -> bool:
        return not self.violations


def local_consistency(
    i: Interpretation, e, k: KnowledgeBase
) -> LocalReport:
    """Check one element against every simplified axiom, looking only at the
    element and its direct neighborhood."""
    if k.dialect != SIMPLIFIED:
        raise DialectError("local consistency needs the simplified dialect")
    violations: list[tuple[Axiom, str]] = []
    for ax in k.axioms:
        shape = classify_simplified(ax)
        if shape is None:
            raise DialectError(f"axiom is not in simplified form: {ax}")
        reason = _local_violation(i, e, shape)
        if reason is not None:
            violations.append((ax, reason))
    return LocalReport(e, tuple(violations))


def _local_violation(i: Interpretation, e, shape) -> str | None:
    if isinstance(shape, ClauseShape):
        if all(e in _atom_members(i, a) for a in shape.lhs) and not any(
            e in _atom_members(i, b) for b in shape.rhs
        ):
            return "conjunction holds but no disjunct does"
        return None
    if isinstance(shape, NominalShape):
        target = i.nominal_map.get(shape.individual)
        in_name = e in _atom_members(i, shape.name)
        if shape.concept_first:
            if in_name and e != target:
                return f"member of {shape.name} but not the {shape.individual} element"
        else:
            if e == target and not in_name:
                return f"is the {shape.individual} element but not in {shape.name}"
        return None
    if isinstance(shape, GuardedShape):
        if e not in _atom_members(i, shape.name):
            return None
        filler = _atom_members(i, shape.filler)
        neighbors = [
            y for (x, y) in eval_role_expr(i, shape.guard) if x == e
        ]
        if shape.existential:
            if not any(y in filler for y in neighbors):
                return f"no {shape.guard}-neighbor in {shape.filler}"
        else:
            bad = [y for y in neighbors if y not in filler]
            if bad:
                return f"{shape.guard}-neighbor outside {shape.filler}"
        return None
    if isinstance(shape, FuncShape):
        succ = {b for (a, b) in i.role_pairs(shape.role) if a == e}
        if len(succ) > 1:
            return f"{len(succ)} successors through functional {shape.role}"
        return None
    raise InputError(f"unknown shape: {shape!r}")


def all_locally_consistent(i: Interpretation, k: KnowledgeBase) -> bool:
    return all(local_consistency(i, e, k).ok() for e in i.elements)


def nominal_assignment_total(i: Interpretation, k: KnowledgeBase) -> bool:
    """Every individual of the knowledge base is interpreted by exactly one
    element (the global side condition complementing local checks)."""
    return all(o in i.nominal_map for o in k.nominals())


def nom_free(k: KnowledgeBase) -> KnowledgeBase:
    """Replace every nominal concept with its placeholder; the result is
    evaluated against quasi-structures."""

    def conv(c: Concept) -> Concept:
        if isinstance(c, Nominal):
            return Placeholder(c.individual)
        if isinstance(c, Not):
            return Not(conv(c.sub))
        if isinstance(c, And):
            return And(conv(c.left), conv(c.right))
        if isinstance(c, Or):
            return Or(conv(c.left), conv(c.right))
        if isinstance(c, Forall):
            return Forall(c.guard, conv(c.filler))
        if isinstance(c, Exists):
            return Exists(c.guard, conv(c.filler))
        if isinstance(c, AtMost):
            return AtMost(c.bound, c.role, conv(c.filler))
        if isinstance(c, AtLeast):
            return AtLeast(c.bound, c.role, conv(c.filler))
        return c

    axioms = []
    for ax in k.axioms:
        if isinstance(ax, GCI):
            axioms.append(GCI(conv(ax.lhs), conv(ax.rhs)))
        else:
            axioms.append(ax)
    return KnowledgeBase(k.signature, tuple(axioms), k.dialect)
