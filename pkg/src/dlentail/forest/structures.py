"""Forest-addressed interpretations, descending counting paths, node
ordering, the sketch equivalence, and isomorphism checking."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..core import (
    InputError,
    Interpretation,
    KnowledgeBase,
    Role,
)


@dataclass(frozen=True, order=True)
class ForestAddress:
    root: str
    word: tuple[int, ...] = ()

    def is_root(self) -> bool:
        return not self.word

    def depth(self) -> int:
        return len(self.word)

    def parent(self) -> "ForestAddress":
        if not self.word:
            raise InputError(f"root {self} has no parent")
        return ForestAddress(self.root, self.word[:-1])

    def child(self, c: int) -> "ForestAddress":
        return ForestAddress(self.root, self.word + (c,))

    def is_ancestor_of(self, other: "ForestAddress") -> bool:
        return (
            self.root == other.root
            and len(self.word) <= len(other.word)
            and other.word[: len(self.word)] == self.word
        )

    def is_successor_of(self, other: "ForestAddress") -> bool:
        return (
            self.root == other.root
            and len(self.word) == len(other.word) + 1
            and self.word[:-1] == other.word
        )

    def is_neighbor_of(self, other: "ForestAddress") -> bool:
        return self.is_successor_of(other) or other.is_successor_of(self)

    def label(self) -> str:
        if not self.word:
            return self.root
        return self.root + "." + ".".join(str(c) for c in self.word)

    def __str__(self) -> str:
        return self.label()


@dataclass(frozen=True)
class ForestInterpretation(Interpretation):
    """An interpretation whose elements are forest addresses.

    ``quasi`` structures tag elements with nominal placeholders instead of
    interpreting nominals as singletons; ``strict`` forbids edges other than
    between tree neighbors.  ``frontier`` marks truncated leaves of bounded
    unravelings.  ``pruned`` relaxes prefix-closure (the result of pruning
    may lack interior nodes that only survived as renamed copies).
    """

    quasi: bool = False
    strict: bool = False
    frontier: frozenset = frozenset()
    pruned: bool = False

    def __post_init__(self) -> None:
        super().__post_init__()
        dom = set(self.elements)
        for e in self.elements:
            if not isinstance(e, ForestAddress):
                raise InputError(f"element {e!r} is not a forest address")
        if not self.pruned:
            for e in self.elements:
                if e.word and e.parent() not in dom:
                    raise InputError(f"address {e} is not prefix-closed")
        for pairs in self.role_ext.values():
            for (a, b) in pairs:
                if a.is_root() or b.is_root():
                    if self.strict and not a.is_neighbor_of(b):
                        raise InputError(
                            f"strict structure has non-neighbor edge {a} -> {b}"
                        )
                    continue
                if not a.is_neighbor_of(b):
                    raise InputError(f"edge {a} -> {b} is neither root-incident "
                                     "nor between neighbors")
        for o, e in self.nominal_map.items():
            if not e.is_root():
                raise InputError(f"nominal {o} sits at non-root {e}")

    def roots(self) -> tuple[ForestAddress, ...]:
        return tuple(e for e in self.elements if e.is_root())

    def successors(self, e: ForestAddress) -> tuple[ForestAddress, ...]:
        return tuple(x for x in self.elements if x.is_successor_of(e))

    def subtree(self, e: ForestAddress) -> tuple[ForestAddress, ...]:
        return tuple(x for x in self.elements if e.is_ancestor_of(x))

    def max_depth(self) -> int:
        return max((e.depth() for e in self.elements), default=0)

    def root_labeling(self) -> dict[str, ForestAddress]:
        """Map each nominal tag to the unique root carrying it."""
        out: dict[str, ForestAddress] = {}
        if self.quasi:
            for o, ext in self.placeholder_ext.items():
                tagged = [e for e in ext if e.is_root()]
                if len(tagged) > 1:
                    raise InputError(f"placeholder {o} tags several roots")
                if tagged:
                    out[o] = tagged[0]
        else:
            out.update(self.nominal_map)
        return out

    def node_tags(self, e: ForestAddress) -> frozenset:
        """Nominal/placeholder tags carried by a node."""
        tags = {o for o, ext in self.placeholder_ext.items() if e in ext}
        tags.update(o for o, v in self.nominal_map.items() if v == e)
        return frozenset(tags)


def word_order_key(word: tuple[int, ...]):
    return (len(word), word)


def order_key(
    node: ForestAddress,
    j: ForestInterpretation,
    individual_order: Iterable[str] | None = None,
    origins: Mapping[ForestAddress, ForestAddress] | None = None,
):
    """Sort key realizing the depth-first-by-level node order.

    Nodes compare by depth, then by the smallest nominal of their root, then
    lexicographically on words.  Renamed nodes (tracked through ``origins``)
    compare by the address they came from.
    """
    resolved = origins.get(node, node) if origins else node
    labeling = j.root_labeling()
    root_tags = {}
    for o, root in labeling.items():
        root_tags.setdefault(root.root, set()).add(o)
    order = list(individual_order) if individual_order else sorted(labeling)
    tag_index = {o: k for k, o in enumerate(order)}

    root_name = resolved.root
    tags = root_tags.get(root_name)
    if not tags:
        raise InputError(f"root {root_name} carries no nominal tag; cannot order")
    nominal_rank = min(tag_index[o] for o in tags)
    return (len(resolved.word), nominal_rank, resolved.word)


def order_less(
    a: ForestAddress,
    b: ForestAddress,
    j: ForestInterpretation,
    individual_order: Iterable[str] | None = None,
    origins: Mapping[ForestAddress, ForestAddress] | None = None,
) -> bool:
    return order_key(a, j, individual_order, origins) < order_key(
        b, j, individual_order, origins
    )


# ---------------------------------------------------------------------------
# Descending counting paths (chains of inverse-functional edges down to a
# nominal-tagged node; such chains pin their start to a unique element)


@dataclass(frozen=True)
class CountingPath:
    nodes: tuple[ForestAddress, ...]
    roles: tuple[Role, ...]
    nominal: str

    def sketch(self) -> tuple:
        return tuple(str(r) for r in self.roles) + (self.nominal,)

    def length(self) -> int:
        return len(self.roles)

    def suffix_from(self, k: int) -> "CountingPath":
        return CountingPath(self.nodes[k:], self.roles[k:], self.nominal)


def find_descending_bcps(
    j: ForestInterpretation,
    node: ForestAddress,
    k: KnowledgeBase,
    max_len: int | None = None,
) -> tuple[CountingPath, ...]:
    """All descending counting paths from a node, shortest first.

    Steps go strictly downward within one tree through roles whose inverse
    is functional; the last node carries a nominal tag.
    """
    if max_len is None:
        max_len = j.max_depth() + 1
    ifr = sorted(k.inverse_functional_roles(), key=str)
    out: list[CountingPath] = []

    def steps(at: ForestAddress):
        for f in ifr:
            for (a, b) in j.role_pairs(f):
                if a == at and b.root == at.root and b.depth() > at.depth():
                    yield f, b

    def walk(at: ForestAddress, nodes: tuple, roles: tuple) -> None:
        for o in sorted(j.node_tags(at)):
            out.append(CountingPath(nodes, roles, o))
        if len(roles) >= max_len:
            return
        for f, nxt in steps(at):
            walk(nxt, nodes + (nxt,), roles + (f,))

    walk(node, (node,), ())
    return tuple(sorted(out, key=lambda p: (p.length(), p.sketch())))


def sketch_sets(
    j: ForestInterpretation, k: KnowledgeBase, max_len: int | None = None
) -> dict[ForestAddress, frozenset]:
    """Map each node to the sketches of the descending counting paths it
    starts."""
    return {
        e: frozenset(p.sketch() for p in find_descending_bcps(j, e, k, max_len))
        for e in j.elements
    }


def bcp_equiv(
    j: ForestInterpretation, k: KnowledgeBase
) -> list[frozenset]:
    """Partition of the domain under the smallest equivalence merging nodes
    that start counting paths with identical sketches."""
    sketches = sketch_sets(j, k)
    parent: dict[ForestAddress, ForestAddress] = {e: e for e in j.elements}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    by_sketch: dict[tuple, list] = {}
    for e, sk in sketches.items():
        for s in sk:
            by_sketch.setdefault(s, []).append(e)
    for members in by_sketch.values():
        for other in members[1:]:
            union(members[0], other)
    classes: dict[ForestAddress, set] = {}
    for e in j.elements:
        classes.setdefault(find(e), set()).add(e)
    idx = j.order_index()
    return [
        frozenset(cls)
        for _, cls in sorted(
            classes.items(), key=lambda kv: min(idx[e] for e in kv[1])
        )
    ]


# ---------------------------------------------------------------------------
# Isomorphism between forest structures


def _pair_key(i: Interpretation, a, b, roles: tuple[Role, ...]):
    """Invariant of an ordered pair: edge labels plus both endpoint labels."""
    return (
        i.edge_roles(a, b, roles),
        _node_key(i, a),
        _node_key(i, b),
    )


def _node_key(i: Interpretation, e):
    concepts = frozenset(c for c, ext in i.concept_ext.items() if e in ext)
    tags = frozenset(o for o, ext in i.placeholder_ext.items() if e in ext)
    noms = frozenset(o for o, v in i.nominal_map.items() if v == e)
    return (concepts, tags, noms)


def pair_isomorphic(
    i1: Interpretation, a1, b1, i2: Interpretation, a2, b2, roles: tuple[Role, ...]
) -> bool:
    return _pair_key(i1, a1, b1, roles) == _pair_key(i2, a2, b2, roles)


def iso_check(
    i1: ForestInterpretation,
    i2: ForestInterpretation,
    mode: str = "forest",
    roles: tuple[Role, ...] | None = None,
) -> dict | None:
    """Search for a bijection preserving roles, concept labels, nominal or
    placeholder tags, and the successor relation.

    mode "quasi" compares placeholder tags and ignores nominal assignments;
    mode "forest" compares nominal assignments; mode "tagged" additionally
    pins every root to the root with the same name (shared-host semantics).
    """
    if len(i1.elements) != len(i2.elements):
        return None
    if roles is None:
        names = sorted(set(i1.role_ext) | set(i2.role_ext))
        roles = tuple(
            Role(n, inv) for n in names for inv in (False, True)
        )

    def sig(i: Interpretation, e) -> tuple:
        concepts = frozenset(c for c, ext in i.concept_ext.items() if e in ext)
        key: list = [e.depth(), concepts]
        if mode == "quasi":
            key.append(frozenset(o for o, ext in i.placeholder_ext.items() if e in ext))
        else:
            key.append(frozenset(o for o, v in i.nominal_map.items() if v == e))
            key.append(
                frozenset(o for o, ext in i.placeholder_ext.items() if e in ext)
            )
        return tuple(key)

    elems1 = sorted(i1.elements, key=lambda e: (e.depth(), e))
    elems2 = sorted(i2.elements, key=lambda e: (e.depth(), e))
    sig2: dict = {}
    for e in elems2:
        sig2.setdefault(sig(i2, e), []).append(e)

    mapping: dict = {}
    used: set = set()

    def compatible(e1, e2) -> bool:
        if mode == "tagged" and e1.is_root():
            if not e2.is_root() or e1.root != e2.root:
                return False
        if e1.is_root() != e2.is_root():
            return False
        if e1.word and e1.parent() in mapping:
            if not e2.is_successor_of(mapping[e1.parent()]):
                return False
        # every edge to an already-mapped node must be mirrored exactly
        for prev1, prev2 in mapping.items():
            if i1.edge_roles(e1, prev1, roles) != i2.edge_roles(e2, prev2, roles):
                return False
            if i1.edge_roles(prev1, e1, roles) != i2.edge_roles(prev2, e2, roles):
                return False
        if i1.edge_roles(e1, e1, roles) != i2.edge_roles(e2, e2, roles):
            return False
        return True

    def extend(k: int) -> bool:
        if k == len(elems1):
            return True
        e1 = elems1[k]
        for e2 in sig2.get(sig(i1, e1), []):
            if e2 in used or not compatible(e1, e2):
                continue
            mapping[e1] = e2
            used.add(e2)
            if extend(k + 1):
                return True
            del mapping[e1]
            used.discard(e2)
        return False

    if extend(0):
        # successor preservation holds by construction for parents mapped
        # before children (depth-sorted order); verify the other direction
        for e1, e2 in mapping.items():
            if e1.word and e1.parent() in mapping:
                if not e2.is_successor_of(mapping[e1.parent()]):
                    return None
        return dict(mapping)
    return None
