"""Turning forest quasi-structures into proper models: the focus-driven
collapse traversal, its pruning/factorization characterization, and the
admissibility test that guards it."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..core import (
    Exists,
    InputError,
    Interpretation,
    KnowledgeBase,
    Role,
    eval_concept,
    eval_role_expr,
    existential_concepts,
    nom_free,
)
from .structures import (
    CountingPath,
    ForestAddress,
    ForestInterpretation,
    bcp_equiv,
    find_descending_bcps,
    order_key,
    pair_isomorphic,
    sketch_sets,
)


@dataclass
class CollapseStep:
    focus: ForestAddress
    focus_origin: ForestAddress
    case: int
    merged_into: ForestAddress | None
    deleted_origins: frozenset
    new_root: str | None


@dataclass
class CollapseTrace:
    steps: list[CollapseStep] = field(default_factory=list)
    survivor_origins: frozenset = frozenset()

    def focus_origins(self) -> list[ForestAddress]:
        return [s.focus_origin for s in self.steps]


class _State:
    """Mutable working copy of a forest structure plus origin tracking."""

    def __init__(self, j: ForestInterpretation):
        self.elements: list[ForestAddress] = list(j.elements)
        self.concept_ext = {c: set(v) for c, v in j.concept_ext.items()}
        self.placeholder_ext = {o: set(v) for o, v in j.placeholder_ext.items()}
        self.role_ext = {r: set(v) for r, v in j.role_ext.items()}
        self.origins = {e: e for e in j.elements}

    def snapshot(self, quasi: bool, strict: bool) -> ForestInterpretation:
        return ForestInterpretation(
            elements=tuple(self.elements),
            concept_ext={c: frozenset(v) for c, v in self.concept_ext.items()},
            role_ext={r: frozenset(v) for r, v in self.role_ext.items()},
            nominal_map={},
            placeholder_ext={o: frozenset(v) for o, v in self.placeholder_ext.items()},
            quasi=quasi,
            strict=strict,
        )

    def delete(self, nodes: set[ForestAddress]) -> None:
        self.elements = [e for e in self.elements if e not in nodes]
        for ext in self.concept_ext.values():
            ext -= nodes
        for ext in self.placeholder_ext.values():
            ext -= nodes
        for pairs in self.role_ext.values():
            pairs -= {p for p in pairs if p[0] in nodes or p[1] in nodes}
        for n in nodes:
            del self.origins[n]

    def rename_subtree(self, top: ForestAddress, new_root: str) -> None:
        moved = [e for e in self.elements if top.is_ancestor_of(e)]
        ren = {
            e: ForestAddress(new_root, e.word[len(top.word):]) for e in moved
        }
        self.elements = [ren.get(e, e) for e in self.elements]
        for ext in list(self.concept_ext.values()) + list(
            self.placeholder_ext.values()
        ):
            for old, new in ren.items():
                if old in ext:
                    ext.discard(old)
                    ext.add(new)
        for name, pairs in self.role_ext.items():
            self.role_ext[name] = {
                (ren.get(a, a), ren.get(b, b)) for (a, b) in pairs
            }
        for old, new in ren.items():
            self.origins[new] = self.origins.pop(old)


def collapse(
    j: ForestInterpretation,
    k: KnowledgeBase,
    individual_order: Iterable[str] | None = None,
    alt_orientation: bool = False,
) -> tuple[ForestInterpretation, CollapseTrace]:
    """Promote or merge every counting-path starter, then read the surviving
    placeholder roots as real nominals.

    At each step the smallest unprocessed non-root starter becomes the focus:
    with no smaller same-sketch root it is promoted to a fresh root (case 1);
    otherwise its subtree is deleted, its incoming edge is redirected to the
    smallest such root, and the root sheds subtrees that would break inverse
    functionality (case 2).  ``alt_orientation`` flips the printed direction
    of that shedding test (property suites only).
    """
    if not j.strict:
        raise InputError("collapse expects a strict forest quasi-structure")
    state = _State(j)
    trace = CollapseTrace()
    ifr = sorted(k.inverse_functional_roles(), key=str)
    if individual_order is None:
        individual_order = sorted(j.placeholder_ext)
    last_key = None

    while True:
        current = state.snapshot(quasi=True, strict=False)
        keys = {}
        starters = []
        sketches = sketch_sets(current, k)
        for e in state.elements:
            if e.is_root() or not sketches[e]:
                continue
            keys[e] = order_key(e, current, individual_order, state.origins)
            if last_key is None or keys[e] > last_key:
                starters.append(e)
        if not starters:
            break
        focus = min(starters, key=keys.__getitem__)
        last_key = keys[focus]
        focus_origin = state.origins[focus]

        classes = bcp_equiv(current, k)
        cls = next(c for c in classes if focus in c)
        smaller_roots = [
            r
            for r in cls
            if r.is_root()
            and order_key(r, current, individual_order, state.origins)
            < keys[focus]
        ]
        if not smaller_roots:
            new_root = focus.label()
            if any(e.root == new_root for e in state.elements):
                raise InputError(f"root name collision at {new_root}")
            state.rename_subtree(focus, new_root)
            trace.steps.append(
                CollapseStep(focus, focus_origin, 1, None, frozenset(), new_root)
            )
            continue

        target = min(
            smaller_roots,
            key=lambda r: order_key(r, current, individual_order, state.origins),
        )
        pred = focus.parent()
        pred_in = pred in state.origins
        doomed = set(current.subtree(focus))
        entering = [
            f
            for f in ifr
            if pred_in and (pred, focus) in current.role_pairs(f)
        ]
        for f in entering:
            for child in current.successors(target):
                edge = (
                    (target, child) if alt_orientation else (child, target)
                )
                if edge in current.role_pairs(f):
                    doomed.update(current.subtree(child))
        deleted_origins = frozenset(state.origins[e] for e in doomed)
        redirect = []
        if pred_in:
            for name, pairs in state.role_ext.items():
                if (pred, focus) in pairs:
                    redirect.append((name, pred, target))
                if (focus, pred) in pairs:
                    redirect.append((name, target, pred))
        state.delete(doomed)
        alive = set(state.origins)
        for name, a, b in redirect:
            if a in alive and b in alive:
                state.role_ext.setdefault(name, set()).add((a, b))
        trace.steps.append(
            CollapseStep(focus, focus_origin, 2, target, deleted_origins, None)
        )

    trace.survivor_origins = frozenset(state.origins.values())
    nominal_map: dict[str, ForestAddress] = {}
    for o, ext in state.placeholder_ext.items():
        roots = [e for e in ext if e.is_root()]
        if len(roots) != 1:
            raise InputError(
                f"collapse left {len(roots)} roots tagged {o}; "
                "input was not a well-formed quasi-structure"
            )
        nominal_map[o] = roots[0]
    result = ForestInterpretation(
        elements=tuple(state.elements),
        concept_ext={c: frozenset(v) for c, v in state.concept_ext.items()},
        role_ext={r: frozenset(v) for r, v in state.role_ext.items()},
        nominal_map=nominal_map,
        placeholder_ext={},
        quasi=False,
        strict=False,
    )
    return result, trace


def prune(
    j: ForestInterpretation,
    k: KnowledgeBase,
    individual_order: Iterable[str] | None = None,
) -> ForestInterpretation:
    """Restriction of the input to nodes that survive the collapse or serve
    as a focus, computed by replaying the collapse trace."""
    _, trace = collapse(j, k, individual_order)
    keep = set(trace.survivor_origins) | set(trace.focus_origins())
    elements = tuple(e for e in j.elements if e in keep)
    return ForestInterpretation(
        elements=elements,
        concept_ext={c: v & keep for c, v in j.concept_ext.items()},
        role_ext={
            r: frozenset(p for p in v if p[0] in keep and p[1] in keep)
            for r, v in j.role_ext.items()
        },
        nominal_map={},
        placeholder_ext={o: v & keep for o, v in j.placeholder_ext.items()},
        quasi=True,
        strict=j.strict,
        frontier=j.frontier & keep,
        pruned=True,
    )


class NotFactorizableError(InputError):
    pass


def factorize(
    l: ForestInterpretation,
    k: KnowledgeBase,
    equiv: list[frozenset] | None = None,
) -> ForestInterpretation:
    """Quotient by the sketch equivalence.  Classes holding counting-path
    starters become roots; every other class is a singleton sitting below
    its member's parent class.  Fresh addresses are assigned deterministically
    (isomorphism ignores child numbering)."""
    if equiv is None:
        equiv = bcp_equiv(l, k)
    cls_of = {}
    for cls in equiv:
        for e in cls:
            cls_of[e] = cls
    for o, ext in l.placeholder_ext.items():
        classes = {id(cls_of[e]) for e in ext}
        if len(classes) > 1:
            raise NotFactorizableError(
                f"placeholder {o} instances span several equivalence classes"
            )
    sketches = sketch_sets(l, k)
    idx = l.order_index()

    def cls_key(cls):
        return min(idx[e] for e in cls)

    root_classes = []
    child_classes = []
    for cls in equiv:
        if any(sketches[e] for e in cls):
            root_classes.append(cls)
        else:
            if len(cls) != 1:
                raise NotFactorizableError(
                    "non-singleton class without counting paths"
                )
            child_classes.append(cls)
    root_classes.sort(key=cls_key)
    child_classes.sort(key=cls_key)

    addr: dict[int, ForestAddress] = {}
    for n, cls in enumerate(root_classes):
        addr[id(cls)] = ForestAddress(f"c{n}")
    counters: dict[ForestAddress, int] = {}
    pending = list(child_classes)
    while pending:
        progressed = False
        rest = []
        for cls in pending:
            (e,) = cls
            if e.is_root() or e.parent() not in cls_of:
                raise NotFactorizableError(f"node {e} has no parent class")
            parent_cls = cls_of[e.parent()]
            if id(parent_cls) not in addr:
                rest.append(cls)
                continue
            p = addr[id(parent_cls)]
            c = counters.get(p, 0)
            counters[p] = c + 1
            addr[id(cls)] = p.child(c)
            progressed = True
        if not progressed and rest:
            raise NotFactorizableError("detached class(es) in factorization")
        pending = rest

    def conv(e: ForestAddress) -> ForestAddress:
        return addr[id(cls_of[e])]

    elements = tuple(
        addr[id(cls)] for cls in sorted(equiv, key=cls_key)
    )
    concept_ext = {
        c: frozenset(conv(e) for e in v) for c, v in l.concept_ext.items()
    }
    role_ext = {
        r: frozenset((conv(a), conv(b)) for (a, b) in v)
        for r, v in l.role_ext.items()
    }
    nominal_map = {
        o: conv(next(iter(ext)))
        for o, ext in l.placeholder_ext.items()
        if ext
    }
    return ForestInterpretation(
        elements=elements,
        concept_ext=concept_ext,
        role_ext=role_ext,
        nominal_map=nominal_map,
        placeholder_ext={},
        quasi=False,
        strict=False,
    )


# ---------------------------------------------------------------------------
# Collapsing admissibility


@dataclass(frozen=True)
class Refusal:
    condition: int
    detail: str


def check_admissibility(
    j: ForestInterpretation, k: KnowledgeBase
):
    """Search for a witness-selection function choosing, for every satisfied
    existential concept, a neighbor that (a) realizes it and is a successor
    unless reached through a functional edge, and (b) looks the same across
    all elements starting counting paths with a shared sketch.

    Returns the selection as a dict keyed by (concept, element), or a Refusal
    naming the condition that cannot be met.  Frontier nodes are exempt.
    """
    kq = nom_free(k)
    existentials = existential_concepts(kq)
    roles = k.roles()
    functional = k.functional_roles()
    sketches = sketch_sets(j, k)
    idx = j.order_index()

    variables = []
    domains = {}
    for concept in existentials:
        ext = eval_concept(j, concept)
        guard_pairs = eval_role_expr(j, concept.guard)
        filler = eval_concept(j, concept.filler)
        for e in j.elements:
            if e in j.frontier or e not in ext:
                continue
            cands = []
            for (x, y) in guard_pairs:
                if x != e or y not in filler:
                    continue
                through_func = any(
                    f in functional for f in j.edge_roles(e, y, roles)
                )
                if y.is_successor_of(e) or through_func:
                    cands.append(y)
            cands.sort(key=idx.__getitem__)
            if not cands:
                return Refusal(
                    1, f"{concept} at {e}: no admissible witness neighbor"
                )
            variables.append((concept, e))
            domains[(concept, e)] = cands

    # condition 2 couples same-concept variables whose elements share a sketch
    coupled: dict[tuple, list[tuple]] = {}
    for concept, e in variables:
        peers = []
        for concept2, e2 in variables:
            if concept2 != concept or e2 == e:
                continue
            if sketches[e] & sketches[e2]:
                peers.append((concept2, e2))
        coupled[(concept, e)] = peers

    assignment: dict = {}

    def consistent(var, value) -> bool:
        concept, e = var
        for peer in coupled[var]:
            if peer not in assignment:
                continue
            e2, v2 = peer[1], assignment[peer]
            if not pair_isomorphic(j, e, value, j, e2, v2, roles):
                return False
        return True

    order = sorted(variables, key=lambda v: (str(v[0]), idx[v[1]]))

    def solve(pos: int):
        if pos == len(order):
            return True
        var = order[pos]
        for value in domains[var]:
            if consistent(var, value):
                assignment[var] = value
                if solve(pos + 1):
                    return True
                del assignment[var]
        return False

    if solve(0):
        return dict(assignment)
    return Refusal(2, "no sketch-uniform witness selection exists")
