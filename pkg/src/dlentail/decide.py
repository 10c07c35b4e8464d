"""The dovetailed decision procedure: enumerate candidate countermodel
representations in size order while stepping the saturation loop; whichever
side succeeds first decides."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .blocking import NRepresentation, validate_nrep
from .core import KnowledgeBase, Signature
from .forest import ForestAddress, ForestInterpretation
from .normalize import normalize_pipeline
from .prover import ProofLog, SaturationLoop, translate
from .query import (
    ConjunctiveQuery,
    UnionQuery,
    eliminate_constants,
    has_match,
    normalize_ucq,
)


@dataclass
class DecideConfig:
    n: int | None = None  # blocking depth; default 1 + max disjunct size
    prover_slice: int = 200
    enum_slice: int = 50
    rounds: int = 500
    max_roots: int = 3
    max_size: int = 4
    max_depth: int = 2
    max_branching: int = 2
    ucq_cap: int = 64
    quiet: bool = True

    def blocking_depth(self, u: UnionQuery) -> int:
        if self.n is not None:
            return self.n
        return 1 + u.max_size()


@dataclass
class Outcome:
    kind: str  # "entailed" | "not-entailed" | "unknown"
    certificate: str = ""  # "refutation" | "countermodel" | "saturation"
    witness: NRepresentation | None = None
    proofs: list[ProofLog] = field(default_factory=list)
    parts: list["Outcome"] = field(default_factory=list)
    knowledge_base: KnowledgeBase | None = None


# ---------------------------------------------------------------------------
# Candidate enumeration


def _tree_shapes(size: int, depth: int, branching: int):
    """Unordered rooted tree shapes with `size` nodes, as canonically sorted
    tuples of child shapes."""
    if size == 1:
        yield ()
        return
    if depth == 0:
        return
    for split in _child_splits(size - 1, branching, depth - 1):
        yield split


def _child_splits(total: int, max_children: int, depth: int):
    """All canonically ordered tuples of child shapes using `total` nodes."""
    if total == 0:
        yield ()
        return
    if max_children == 0:
        return
    for first_size in range(1, total + 1):
        for first in _tree_shapes(first_size, depth, max_children):
            for rest in _child_splits(total - first_size, max_children - 1, depth):
                combo = (first,) + rest
                if tuple(sorted(combo, key=repr)) == combo:
                    yield combo


def _addresses(shape, root: str) -> list[ForestAddress]:
    out = [ForestAddress(root)]

    def walk(prefix: ForestAddress, children):
        for i, sub in enumerate(children):
            child = prefix.child(i)
            out.append(child)
            walk(child, sub)

    walk(ForestAddress(root), shape)
    return out


def _admissible_pairs(elements: list[ForestAddress]):
    for a in elements:
        for b in elements:
            if a.is_root() or b.is_root() or a.is_neighbor_of(b):
                if a == b and not a.is_root():
                    continue
                yield (a, b)


def _canonical_form(i: ForestInterpretation) -> tuple:
    """Canonical encoding under root-pinned isomorphism: per tree, a label
    tree with children sorted by encoding; trees sorted by (nominal tags,
    encoding)."""
    roots = sorted(i.roots(), key=lambda r: r.root)
    out = []

    def node_label(e):
        concepts = tuple(sorted(c for c, v in i.concept_ext.items() if e in v))
        noms = tuple(sorted(o for o, v in i.nominal_map.items() if v == e))
        root_edges = []
        for r, pairs in i.role_ext.items():
            for (a, b) in pairs:
                if a == e and b.is_root() and b != e:
                    root_edges.append((r, b.root, "out"))
                if b == e and a.is_root() and a != e:
                    root_edges.append((r, a.root, "in"))
        return (concepts, noms, tuple(sorted(root_edges)))

    def encode_with_edges(e) -> tuple:
        kids = []
        for s in i.successors(e):
            up = tuple(
                sorted(
                    r for r, pairs in i.role_ext.items() if (e, s) in pairs
                )
            )
            down = tuple(
                sorted(
                    r for r, pairs in i.role_ext.items() if (s, e) in pairs
                )
            )
            kids.append((up, down, encode_with_edges(s)))
        kids.sort(key=repr)
        return (node_label(e), tuple(kids))

    for r in roots:
        out.append((r.root, encode_with_edges(r)))
    root_pairs = tuple(
        sorted(
            (r, a.root, b.root)
            for r, pairs in i.role_ext.items()
            for (a, b) in pairs
            if a.is_root() and b.is_root()
        )
    )
    return (tuple(out), root_pairs)


def enumerate_candidates(
    sig: Signature, k: KnowledgeBase, n: int, config: DecideConfig
):
    """Deterministic stream of candidate forest interpretations up to the
    caps, one representative per isomorphism class, nominal assignments
    covering every individual of the knowledge base."""
    nominals = list(k.nominals())
    concepts = list(sig.concept_names)
    roles = list(sig.role_names)
    seen: set = set()

    for root_count in range(1, config.max_roots + 1):
        if not nominals and root_count > config.max_roots:
            break
        for size in range(root_count, config.max_size + 1):
            for candidate in _candidates_of_class(
                root_count, size, nominals, concepts, roles, config
            ):
                form = _canonical_form(candidate)
                if form in seen:
                    continue
                seen.add(form)
                yield candidate


def _candidates_of_class(
    root_count: int,
    size: int,
    nominals: list[str],
    concepts: list[str],
    roles: list[str],
    config: DecideConfig,
):
    root_names = [f"w{i}" for i in range(root_count)]
    for sizes in _compositions(size, root_count):
        shape_pools = [
            list(_tree_shapes(s, config.max_depth, config.max_branching))
            for s in sizes
        ]
        if any(not pool for pool in shape_pools):
            continue
        for shapes in itertools.product(*shape_pools):
            elements: list[ForestAddress] = []
            for root, shape in zip(root_names, shapes):
                elements.extend(_addresses(shape, root))
            roots = [e for e in elements if e.is_root()]
            pairs = list(_admissible_pairs(elements))
            for nom_assign in itertools.product(roots, repeat=len(nominals)):
                nominal_map = dict(zip(nominals, nom_assign))
                for concept_bits in itertools.product(
                    *(itertools.product([False, True], repeat=len(elements)),)
                    * len(concepts)
                ):
                    concept_ext = {
                        c: frozenset(
                            e for e, on in zip(elements, bits) if on
                        )
                        for c, bits in zip(concepts, concept_bits)
                    }
                    for edge_bits in itertools.product(
                        [False, True], repeat=len(pairs) * len(roles)
                    ):
                        role_ext = {}
                        pos = 0
                        for r in roles:
                            chosen = frozenset(
                                p
                                for p, on in zip(
                                    pairs, edge_bits[pos : pos + len(pairs)]
                                )
                                if on
                            )
                            pos += len(pairs)
                            if chosen:
                                role_ext[r] = chosen
                        yield ForestInterpretation(
                            elements=tuple(elements),
                            concept_ext=concept_ext,
                            role_ext=role_ext,
                            nominal_map=nominal_map,
                            placeholder_ext={},
                            quasi=False,
                            strict=False,
                        )


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# The decision loop


def decide(
    k_raw: KnowledgeBase, u_raw: UnionQuery, config: DecideConfig | None = None
) -> Outcome:
    """Normalize, preprocess the query, and decide each resulting union by
    dovetailing saturation with countermodel enumeration."""
    config = config or DecideConfig()
    k, _ = normalize_pipeline(k_raw)

    extension: list = []
    disjuncts = []
    for q in u_raw.disjuncts:
        q2, axioms = eliminate_constants(
            ConjunctiveQuery(q.atoms, q.constants or u_raw.constants & _terms(q)),
            k,
        )
        disjuncts.append(q2)
        for ax in axioms:
            if ax not in extension:
                extension.append(ax)
    if extension:
        fresh = sorted(
            {
                ax.lhs.name
                for ax in extension
                if hasattr(ax.lhs, "name")
            }
        )
        k = KnowledgeBase(
            k.signature.extend(concepts=fresh),
            k.axioms + tuple(extension),
            k.dialect,
        )
    u = UnionQuery(tuple(disjuncts), u_raw.answer_vars, frozenset())

    parts = normalize_ucq(u, cap=config.ucq_cap)
    outcomes = [decide_simplified(k, part, config) for part in parts]
    if all(o.kind == "entailed" for o in outcomes):
        return Outcome(
            "entailed",
            "refutation",
            proofs=[p for o in outcomes for p in o.proofs],
            parts=outcomes,
            knowledge_base=k,
        )
    for o in outcomes:
        if o.kind == "not-entailed":
            return Outcome(
                o.kind,
                o.certificate,
                witness=o.witness,
                parts=outcomes,
                knowledge_base=k,
            )
    return Outcome("unknown", parts=outcomes, knowledge_base=k)


def _terms(q: ConjunctiveQuery) -> frozenset:
    return frozenset(q.terms())


def decide_simplified(
    k: KnowledgeBase, u: UnionQuery, config: DecideConfig
) -> Outcome:
    """One round-robin run for a single preprocessed union query."""
    n = config.blocking_depth(u)
    loop = SaturationLoop(translate(k, u))
    stream = enumerate_candidates(k.signature, k, n, config)
    stream_done = False

    def scan(budget: int) -> Outcome | None:
        nonlocal stream_done
        for _ in range(budget):
            candidate = next(stream, None)
            if candidate is None:
                stream_done = True
                return None
            rep = validate_nrep(candidate, k, n)
            if not isinstance(rep, NRepresentation):
                continue
            if any(has_match(candidate, q) for q in u.disjuncts):
                continue
            return Outcome(
                "not-entailed", "countermodel", witness=rep, knowledge_base=k
            )
        return None

    for _ in range(config.rounds):
        status, _used = loop.step(config.prover_slice)
        if status == "refuted":
            return Outcome(
                "entailed", "refutation", proofs=[loop.log], knowledge_base=k
            )
        if status == "saturated":
            # non-entailment is certain; prefer a concrete witness when the
            # caps allow one, otherwise report the saturation certificate
            found = scan(config.enum_slice * config.rounds)
            if found is not None:
                return found
            return Outcome("not-entailed", "saturation", knowledge_base=k)
        if not stream_done:
            found = scan(config.enum_slice)
            if found is not None:
                return found
    return Outcome("unknown", knowledge_base=k)
