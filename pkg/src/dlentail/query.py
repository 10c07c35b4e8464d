"""Conjunctive queries and unions: preprocessing and evaluation over finite
interpretations, plus certain-answer computation by grounding."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .core import (
    ConceptName,
    GCI,
    InputError,
    Interpretation,
    KnowledgeBase,
    Nominal,
    ReasonerError,
)


@dataclass(frozen=True)
class ConceptAtom:
    concept: str
    term: str

    def terms(self) -> tuple[str, ...]:
        return (self.term,)

    def __str__(self) -> str:
        return f"{self.concept}({self.term})"


@dataclass(frozen=True)
class RoleAtom:
    role: str
    subject: str
    object: str

    def terms(self) -> tuple[str, ...]:
        return (self.subject, self.object)

    def __str__(self) -> str:
        return f"{self.role}({self.subject},{self.object})"


@dataclass(frozen=True)
class ConjunctiveQuery:
    atoms: frozenset
    constants: frozenset = frozenset()

    def __post_init__(self) -> None:
        if not self.atoms:
            raise InputError("a conjunctive query needs at least one atom")

    def terms(self) -> tuple[str, ...]:
        out = sorted({t for a in self.atoms for t in a.terms()})
        return tuple(out)

    def variables(self) -> tuple[str, ...]:
        return tuple(t for t in self.terms() if t not in self.constants)

    def role_atoms(self) -> tuple[RoleAtom, ...]:
        return tuple(
            sorted((a for a in self.atoms if isinstance(a, RoleAtom)), key=str)
        )

    def concept_atoms(self) -> tuple[ConceptAtom, ...]:
        return tuple(
            sorted((a for a in self.atoms if isinstance(a, ConceptAtom)), key=str)
        )

    def atom_count(self) -> int:
        return len(self.atoms)

    def size(self) -> int:
        """Symbol count: predicate plus one per term position."""
        return sum(1 + len(a.terms()) for a in self.atoms)

    def rename(self, table: dict[str, str]) -> "ConjunctiveQuery":
        atoms = set()
        for a in self.atoms:
            if isinstance(a, ConceptAtom):
                atoms.add(ConceptAtom(a.concept, table.get(a.term, a.term)))
            else:
                atoms.add(
                    RoleAtom(
                        a.role,
                        table.get(a.subject, a.subject),
                        table.get(a.object, a.object),
                    )
                )
        constants = frozenset(table.get(c, c) for c in self.constants)
        return ConjunctiveQuery(frozenset(atoms), constants)

    def __str__(self) -> str:
        return "{" + ", ".join(str(a) for a in sorted(self.atoms, key=str)) + "}"


@dataclass(frozen=True)
class UnionQuery:
    disjuncts: tuple[ConjunctiveQuery, ...]
    answer_vars: tuple[str, ...] = ()
    constants: frozenset = frozenset()

    def __post_init__(self) -> None:
        if not self.disjuncts:
            raise InputError("a union query needs at least one disjunct")

    def max_atom_count(self) -> int:
        return max(q.atom_count() for q in self.disjuncts)

    def max_size(self) -> int:
        return max(q.size() for q in self.disjuncts)

    def __str__(self) -> str:
        return " or ".join(str(q) for q in self.disjuncts)


class ExpansionCapError(ReasonerError):
    """The conjunctive-normal-form expansion exceeded the configured cap."""


# ---------------------------------------------------------------------------
# Preprocessing


def partition(q: ConjunctiveQuery) -> list[ConjunctiveQuery]:
    """Finest split into connected parts.  Terms are connected through role
    atoms; every atom lands in the part owning its terms."""
    parent: dict[str, str] = {t: t for t in q.terms()}

    def find(t: str) -> str:
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    for a in q.atoms:
        if isinstance(a, RoleAtom):
            ra, rb = find(a.subject), find(a.object)
            if ra != rb:
                parent[rb] = ra
    groups: dict[str, set] = {}
    for a in q.atoms:
        root = find(a.terms()[0])
        groups.setdefault(root, set()).add(a)
    parts = [
        ConjunctiveQuery(frozenset(atoms), q.constants) for atoms in groups.values()
    ]
    return sorted(parts, key=str)


def is_connected(q: ConjunctiveQuery) -> bool:
    return len(partition(q)) == 1


def eliminate_constants(
    q: ConjunctiveQuery, k: KnowledgeBase
) -> tuple[ConjunctiveQuery, tuple[GCI, ...]]:
    """Replace each constant with a fresh variable guarded by a fresh concept
    name defined to be that individual's singleton."""
    if not q.constants:
        return q, ()
    table = {}
    extra_atoms = set()
    axioms: list[GCI] = []
    for a in sorted(q.constants):
        if a not in k.signature.individual_names:
            raise InputError(f"undeclared constant {a} in query")
        fresh_concept = f"_N@{a}"
        fresh_var = f"_v@{a}"
        table[a] = fresh_var
        extra_atoms.add(ConceptAtom(fresh_concept, fresh_var))
        axioms.append(GCI(ConceptName(fresh_concept), Nominal(a)))
        axioms.append(GCI(Nominal(a), ConceptName(fresh_concept)))
    renamed = q.rename(table)
    out = ConjunctiveQuery(renamed.atoms | extra_atoms, frozenset())
    return out, tuple(axioms)


def rename_apart(u: UnionQuery) -> UnionQuery:
    """Give each disjunct its own variable namespace."""
    seen: set[str] = set()
    out = []
    for n, q in enumerate(u.disjuncts):
        table = {}
        for v in q.variables():
            if v in seen or v in table.values():
                fresh = f"{v}@{n}"
                while fresh in seen or fresh in table.values():
                    fresh += "x"
                table[v] = fresh
        renamed = q.rename(table)
        seen.update(renamed.variables())
        out.append(renamed)
    return UnionQuery(tuple(out), u.answer_vars, u.constants)


def normalize_ucq(u: UnionQuery, cap: int = 64) -> list[UnionQuery]:
    """Split disconnected disjuncts and expand to conjunctive normal form:
    the input is entailed exactly when every output union is."""
    u = rename_apart(u)
    component_lists = [partition(q) for q in u.disjuncts]
    total = 1
    for parts in component_lists:
        total *= len(parts)
        if total > cap:
            raise ExpansionCapError(
                f"normal form needs {total}+ unions, cap is {cap}"
            )
    if all(len(parts) == 1 for parts in component_lists):
        return [u]
    outputs: list[UnionQuery] = []
    choices = [0] * len(component_lists)
    while True:
        disjuncts = tuple(
            component_lists[i][choices[i]] for i in range(len(choices))
        )
        outputs.append(UnionQuery(disjuncts, u.answer_vars, u.constants))
        for i in range(len(choices) - 1, -1, -1):
            choices[i] += 1
            if choices[i] < len(component_lists[i]):
                break
            choices[i] = 0
        else:
            break
    return outputs


# ---------------------------------------------------------------------------
# Evaluation


def _candidates(i: Interpretation, q: ConjunctiveQuery, term: str):
    if term in q.constants:
        e = i.nominal_map.get(term)
        return [] if e is None else [e]
    out = set(i.elements)
    for a in q.concept_atoms():
        if a.term == term:
            out &= i.concept_members(a.concept)
    return i.sorted_elements(out)


def find_matches(
    i: Interpretation, q: ConjunctiveQuery, first_only: bool = False
) -> list[dict]:
    """All evaluations satisfying every atom, in a deterministic order
    (lexicographic over sorted terms, then element order)."""
    terms = q.terms()
    cands = {t: _candidates(i, q, t) for t in terms}
    role_atoms = q.role_atoms()
    # most-constrained-first ordering keeps the search small
    order = sorted(terms, key=lambda t: (len(cands[t]), t))
    pos_of = {t: n for n, t in enumerate(order)}
    results: list[dict] = []

    def atoms_ready(assigned: dict) -> bool:
        for a in role_atoms:
            if a.subject in assigned and a.object in assigned:
                if (assigned[a.subject], assigned[a.object]) not in i.role_pairs(
                    _role_of(a)
                ):
                    return False
        return True

    def extend(pos: int, assigned: dict) -> bool:
        if pos == len(order):
            results.append({t: assigned[t] for t in terms})
            return True
        t = order[pos]
        for e in cands[t]:
            assigned[t] = e
            if atoms_ready(assigned) and extend(pos + 1, assigned):
                if first_only:
                    return True
            del assigned[t]
        return False

    extend(0, {})
    idx = i.order_index()
    results.sort(key=lambda m: tuple(idx[m[t]] for t in terms))
    if first_only:
        return results[:1]
    return results


def _role_of(a: RoleAtom):
    from .core import Role

    return Role(a.role)


def has_match(i: Interpretation, q: ConjunctiveQuery) -> bool:
    return bool(find_matches(i, q, first_only=True))


def satisfies_union(i: Interpretation, u: UnionQuery) -> bool:
    return any(has_match(i, q) for q in u.disjuncts)


def certain_answers(
    decider: Callable,
    k: KnowledgeBase,
    u: UnionQuery,
) -> tuple[set[tuple], list[tuple]]:
    """Ground the answer variables over the knowledge base's individuals and
    delegate each grounding.  Returns (answers, undecided groundings)."""
    from itertools import product

    names = k.nominals()
    m = len(u.answer_vars)
    answers: set[tuple] = set()
    unknown: list[tuple] = []
    if m == 0:
        outcome = decider(k, u)
        if outcome.kind == "entailed":
            answers.add(())
        elif outcome.kind == "unknown":
            unknown.append(())
        return answers, unknown
    for combo in product(names, repeat=m):
        table = dict(zip(u.answer_vars, combo))
        disjuncts = tuple(
            ConjunctiveQuery(
                q.rename(table).atoms, q.constants | frozenset(combo)
            )
            for q in u.disjuncts
        )
        grounded = UnionQuery(disjuncts, (), u.constants | frozenset(combo))
        outcome = decider(k, grounded)
        if outcome.kind == "entailed":
            answers.add(combo)
        elif outcome.kind == "unknown":
            unknown.append(combo)
    return answers, unknown
