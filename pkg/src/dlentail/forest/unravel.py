"""Bounded unraveling of a model into a strict forest quasi-structure."""
from __future__ import annotations

from dataclasses import dataclass

from ..core import (
    Exists,
    InputError,
    Interpretation,
    KnowledgeBase,
    Role,
    SIMPLIFIED,
    DialectError,
    eval_concept,
    eval_role_expr,
    existential_concepts,
    is_model,
)
from .structures import ForestAddress, ForestInterpretation


@dataclass
class TailMap:
    """Maps every forest node back to the base-model element it copies."""

    tail: dict[ForestAddress, object]

    def __getitem__(self, addr: ForestAddress):
        return self.tail[addr]

    def __contains__(self, addr: ForestAddress) -> bool:
        return addr in self.tail


class _Chooser:
    """Deterministic witness selection.

    For each source element, eligible neighbors falling into the same
    pair-isomorphism class share one chosen representative, so witnesses are
    reused whenever the local picture cannot tell them apart.
    """

    def __init__(self, i: Interpretation, roles: tuple[Role, ...]):
        self.i = i
        self.roles = roles
        self.order = i.order_index()
        self.by_class: dict = {}
        self.memo: dict = {}

    def _pair_class(self, d, e):
        i = self.i
        concepts = frozenset(c for c, ext in i.concept_ext.items() if e in ext)
        noms = frozenset(o for o, v in i.nominal_map.items() if v == e)
        return (i.edge_roles(d, e, self.roles), concepts, noms)

    def choose(self, concept: Exists, d):
        key = (concept, d)
        if key in self.memo:
            return self.memo[key]
        guard_pairs = eval_role_expr(self.i, concept.guard)
        filler = eval_concept(self.i, concept.filler)
        eligible = self.i.sorted_elements(
            {e for (x, e) in guard_pairs if x == d and e in filler}
        )
        if not eligible:
            raise InputError(f"no witness for {concept} at {d}")
        classes = self.by_class.setdefault(d, {})
        chosen = None
        for e in eligible:
            cls = self._pair_class(d, e)
            if cls in classes:
                chosen = classes[cls]
                break
        if chosen is None:
            chosen = eligible[0]
            classes[self._pair_class(d, chosen)] = chosen
        self.memo[key] = chosen
        return chosen


def unravel(
    i: Interpretation, k: KnowledgeBase, depth: int
) -> tuple[ForestInterpretation, TailMap]:
    """Trace witness sequences from each nominal element of a model, building
    one tree per nominal root, truncated at the given depth with the frontier
    marked."""
    if depth < 1:
        raise InputError("unraveling depth must be at least 1")
    if k.dialect != SIMPLIFIED:
        raise DialectError("unraveling expects a simplified knowledge base")
    if not is_model(i, k):
        raise InputError("cannot unravel: the structure is not a model")

    roles = k.roles()
    functional = k.functional_roles()
    existentials = existential_concepts(k)
    chooser = _Chooser(i, roles)
    nominal_order = [o for o in k.signature.individual_names if o in k.nominals()]

    root_of: dict = {}
    for o in nominal_order:
        e = i.nominal_map.get(o)
        if e is None:
            raise InputError(f"model does not interpret nominal {o}")
        root_of.setdefault(e, o)

    elements: list[ForestAddress] = []
    tails: dict[ForestAddress, object] = {}
    frontier: set[ForestAddress] = set()
    seqs: dict[ForestAddress, tuple] = {}

    order = i.order_index()
    queue: list[ForestAddress] = []
    for e in i.sorted_elements(root_of):
        addr = ForestAddress(root_of[e])
        elements.append(addr)
        tails[addr] = e
        seqs[addr] = (e,)
        queue.append(addr)

    while queue:
        addr = queue.pop(0)
        if addr.depth() >= depth:
            frontier.add(addr)
            continue
        seq = seqs[addr]
        tail = seq[-1]
        children: list = []
        for concept in existentials:
            if tail not in eval_concept(i, concept):
                continue
            nxt = chooser.choose(concept, tail)
            if len(seq) > 2 and nxt == seq[-2]:
                back = i.edge_roles(tail, seq[-2], roles)
                if any(f in functional for f in back):
                    continue
            if nxt not in children:
                children.append(nxt)
        children.sort(key=order.__getitem__)
        for c, nxt in enumerate(children):
            child = addr.child(c)
            elements.append(child)
            tails[child] = nxt
            seqs[child] = seq + (nxt,)
            queue.append(child)

    concept_ext = {
        name: frozenset(a for a in elements if tails[a] in ext)
        for name, ext in i.concept_ext.items()
    }
    placeholder_ext = {
        o: frozenset(a for a in elements if tails[a] == i.nominal_map[o])
        for o in nominal_order
    }
    role_ext: dict[str, set] = {name: set() for name in i.role_ext}
    for a in elements:
        for b in elements:
            if not a.is_neighbor_of(b):
                continue
            for name, pairs in i.role_ext.items():
                if (tails[a], tails[b]) in pairs:
                    role_ext[name].add((a, b))

    j = ForestInterpretation(
        elements=tuple(elements),
        concept_ext=concept_ext,
        role_ext={n: frozenset(v) for n, v in role_ext.items()},
        nominal_map={},
        placeholder_ext=placeholder_ext,
        quasi=True,
        strict=True,
        frontier=frozenset(frontier),
    )
    return j, TailMap(tails)
