"""Shared generators for brute-force and randomized checks."""
from __future__ import annotations

import itertools
import random

from dlentail.core import (
    And,
    Bottom,
    Concept,
    ConceptName,
    Exists,
    Forall,
    GCI,
    Interpretation,
    KnowledgeBase,
    Not,
    Nominal,
    Or,
    Role,
    RoleAnd,
    RoleExpr,
    RoleLeaf,
    RoleNot,
    RoleOr,
    SIMPLIFIED,
    Signature,
    Top,
)


def all_role_exprs(roles: list[Role], depth: int):
    """Every role expression of the given depth budget (exhaustive)."""
    if depth == 0:
        for r in roles:
            yield RoleLeaf(r)
        return
    for sub in all_role_exprs(roles, depth - 1):
        yield RoleNot(sub)
    for left in all_role_exprs(roles, depth - 1):
        for right in all_role_exprs(roles, depth - 1):
            yield RoleAnd(left, right)
            yield RoleOr(left, right)
    yield from all_role_exprs(roles, 0)


def all_interpretations(
    n_elems: int,
    concept_names: tuple[str, ...],
    role_names: tuple[str, ...],
    nominals: tuple[str, ...] = (),
):
    """Exhaustively enumerate interpretations over a fixed small domain."""
    elems = tuple(range(n_elems))
    pairs = [(a, b) for a in elems for b in elems]
    concept_subsets = list(itertools.product([False, True], repeat=n_elems))
    pair_subsets = itertools.product([False, True], repeat=len(pairs))
    role_choices = list(pair_subsets)
    for c_choice in itertools.product(concept_subsets, repeat=len(concept_names)):
        for r_choice in itertools.product(role_choices, repeat=len(role_names)):
            for n_choice in itertools.product(elems, repeat=len(nominals)):
                concept_ext = {
                    name: frozenset(e for e, on in zip(elems, bits) if on)
                    for name, bits in zip(concept_names, c_choice)
                }
                role_ext = {
                    name: frozenset(
                        p for p, on in zip(pairs, bits) if on
                    )
                    for name, bits in zip(role_names, r_choice)
                }
                nominal_map = dict(zip(nominals, n_choice))
                yield Interpretation(
                    elems, concept_ext, role_ext, nominal_map, {}
                )


def random_interpretation(
    rng: random.Random,
    n_elems: int,
    concept_names: tuple[str, ...],
    role_names: tuple[str, ...],
    nominals: tuple[str, ...] = (),
    edge_prob: float = 0.35,
) -> Interpretation:
    elems = tuple(range(n_elems))
    concept_ext = {
        name: frozenset(e for e in elems if rng.random() < 0.5)
        for name in concept_names
    }
    role_ext = {
        name: frozenset(
            (a, b) for a in elems for b in elems if rng.random() < edge_prob
        )
        for name in role_names
    }
    nominal_map = {o: rng.choice(elems) for o in nominals}
    return Interpretation(elems, concept_ext, role_ext, nominal_map, {})


def random_concept(
    rng: random.Random,
    concept_names: tuple[str, ...],
    roles: list[Role],
    depth: int,
) -> Concept:
    if depth == 0 or rng.random() < 0.3:
        kind = rng.randrange(3)
        if kind == 0:
            return ConceptName(rng.choice(concept_names))
        if kind == 1:
            return Top()
        return Bottom()
    kind = rng.randrange(5)
    if kind == 0:
        return Not(random_concept(rng, concept_names, roles, depth - 1))
    if kind == 1:
        return And(
            random_concept(rng, concept_names, roles, depth - 1),
            random_concept(rng, concept_names, roles, depth - 1),
        )
    if kind == 2:
        return Or(
            random_concept(rng, concept_names, roles, depth - 1),
            random_concept(rng, concept_names, roles, depth - 1),
        )
    guard = RoleLeaf(rng.choice(roles))
    if kind == 3:
        return Forall(guard, random_concept(rng, concept_names, roles, depth - 1))
    return Exists(guard, random_concept(rng, concept_names, roles, depth - 1))


def random_simplified_kb(
    rng: random.Random,
    concept_names: tuple[str, ...] = ("A", "B"),
    role_names: tuple[str, ...] = ("r", "s"),
    nominals: tuple[str, ...] = (),
    n_axioms: int = 3,
    allow_func: bool = True,
) -> KnowledgeBase:
    """A random knowledge base already in the simplified shapes."""
    sig = Signature(concept_names, role_names, nominals)
    names = [ConceptName(c) for c in concept_names]
    roles = [Role(r, inv) for r in role_names for inv in (False, True)]
    axioms = []
    for o in nominals:
        name = rng.choice(names)
        axioms.append(GCI(name, Nominal(o)))
        axioms.append(GCI(Nominal(o), name))
    for _ in range(n_axioms):
        kind = rng.randrange(4 if allow_func else 3)
        if kind == 0:
            lhs = rng.sample(names, rng.randint(0, len(names)))
            rhs = rng.sample(names, rng.randint(0, len(names)))
            left: Concept = Top()
            for a in lhs:
                left = a if isinstance(left, Top) else And(left, a)
            right: Concept = Bottom()
            for b in rhs:
                right = b if isinstance(right, Bottom) else Or(right, b)
            axioms.append(GCI(left, right))
        elif kind in (1, 2):
            guard = RoleLeaf(rng.choice(roles))
            ctor = Exists if kind == 1 else Forall
            axioms.append(GCI(rng.choice(names), ctor(guard, rng.choice(names))))
        else:
            from dlentail.core import Func

            axioms.append(Func(rng.choice(roles)))
    return KnowledgeBase(sig, tuple(axioms), SIMPLIFIED)
