"""Quasi-entailment: query matching against forest quasi-structures via
anchored components glued along matching counting-path sketches."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..core import InputError, Interpretation, KnowledgeBase, Role
from ..query import ConjunctiveQuery, RoleAtom, UnionQuery, has_match
from .structures import (
    CountingPath,
    ForestAddress,
    ForestInterpretation,
    find_descending_bcps,
)
from .unravel import TailMap


@dataclass(frozen=True)
class AnchoredComponent:
    """A window of nodes below a witness (predecessor-closed, depth-bounded)
    plus finitely many descending counting paths hanging off window nodes."""

    witness: ForestAddress
    window: tuple[ForestAddress, ...]
    paths: tuple[CountingPath, ...]

    def domain(self) -> frozenset:
        nodes = set(self.window)
        for p in self.paths:
            nodes.update(p.nodes)
        return frozenset(nodes)

    def sketches_at(self, e: ForestAddress) -> frozenset:
        return frozenset(p.sketch() for p in self.paths if p.nodes[0] == e)


@dataclass
class QuentailWitness:
    disjunct: ConjunctiveQuery
    components: tuple[AnchoredComponent, ...]
    assignments: tuple[dict, ...]  # one var -> frozenset(elements) map each


@dataclass
class QuentailResult:
    status: str  # "yes" | "no" | "cap"
    witness: QuentailWitness | None
    cap: int


def _window_component(
    j: ForestInterpretation, images: Iterable[ForestAddress], n: int
) -> tuple[ForestAddress, tuple[ForestAddress, ...]] | None:
    """Fit a set of nodes into one depth-n window: all in one tree, spanning
    at most n levels below their deepest common ancestor.  Returns (witness,
    predecessor-closed window) or None."""
    nodes = list(images)
    roots = {e.root for e in nodes}
    if len(roots) != 1:
        return None
    min_len = min(len(e.word) for e in nodes)
    prefix = nodes[0].word[:min_len]
    while prefix and any(e.word[: len(prefix)] != prefix for e in nodes):
        prefix = prefix[:-1]
    if not prefix and any(e.word[:0] != () for e in nodes):  # pragma: no cover
        return None
    anchor = ForestAddress(nodes[0].root, prefix)
    span = max(e.depth() for e in nodes) - anchor.depth()
    if span > n:
        return None
    window = set()
    for e in nodes:
        w = e
        while True:
            window.add(w)
            if w == anchor:
                break
            w = w.parent()
    ordered = tuple(sorted(window, key=lambda a: (a.depth(), a.word)))
    return anchor, ordered


def _partitions(items: list):
    """Set partitions through restricted-growth strings, deterministic."""
    n = len(items)
    if n == 0:
        yield []
        return
    rgs = [0] * n

    def emit():
        groups: dict[int, list] = {}
        for x, g in zip(items, rgs):
            groups.setdefault(g, []).append(x)
        return [groups[g] for g in sorted(groups)]

    while True:
        yield emit()
        i = n - 1
        while i > 0:
            if rgs[i] <= max(rgs[:i]):
                rgs[i] += 1
                for k in range(i + 1, n):
                    rgs[k] = 0
                break
            rgs[i] = 0
            i -= 1
        else:
            return


def quentails(
    j: ForestInterpretation,
    u: UnionQuery,
    k: KnowledgeBase,
    cap: int | None = None,
) -> QuentailResult:
    """Check whether some disjunct is realized by components of the
    quasi-structure whose shared variables are linked through counting paths
    with matching sketches.

    The component count is capped (default: atoms*(atoms+1) per disjunct);
    running out of budget is reported as status "cap", never as "no".
    """
    capped = False
    for q in u.disjuncts:
        disjunct_cap = cap if cap is not None else q.atom_count() * (
            q.atom_count() + 1
        )
        res = _quentail_one(j, q, k, disjunct_cap)
        if res.status == "yes":
            return res
        if res.status == "cap":
            capped = True
    return QuentailResult("cap" if capped else "no", None, cap or 0)


def _quentail_one(
    j: ForestInterpretation, q: ConjunctiveQuery, k: KnowledgeBase, cap: int
) -> QuentailResult:
    if q.constants:
        raise InputError("quasi-entailment expects constant-free queries")
    n = q.atom_count()
    variables = list(q.variables())
    role_atoms = list(q.role_atoms())
    must: dict[str, frozenset] = {}
    for x in variables:
        allowed = set(j.elements)
        for a in q.concept_atoms():
            if a.term == x:
                allowed &= j.concept_members(a.concept)
        must[x] = frozenset(allowed)
    sketches = {
        e: frozenset(p.sketch() for p in find_descending_bcps(j, e, k))
        for e in j.elements
    }
    paths_of = {e: find_descending_bcps(j, e, k) for e in j.elements}
    idx = j.order_index()

    concept_only = [
        x for x in variables if not any(x in a.terms() for a in role_atoms)
    ]
    single_images = {}
    for x in concept_only:
        cands = sorted(must[x], key=idx.__getitem__)
        if not cands:
            return QuentailResult("no", None, cap)
        single_images[x] = cands[0]

    # per variable: connected components of the sketch-link graph over
    # eligible counting-path starters
    link_comp: dict[str, dict[ForestAddress, int]] = {}
    for x in variables:
        eligible = sorted((e for e in must[x] if sketches[e]), key=idx.__getitem__)
        comp: dict[ForestAddress, int] = {}
        for e in eligible:
            if e in comp:
                continue
            comp[e] = len(comp)
            queue = [e]
            while queue:
                cur = queue.pop()
                for other in eligible:
                    if other not in comp and sketches[other] & sketches[cur]:
                        comp[other] = comp[e]
                        queue.append(other)
        link_comp[x] = comp

    def link_path(x: str, a: ForestAddress, b: ForestAddress):
        """Shortest chain a..b where consecutive nodes share a sketch."""
        eligible = sorted(
            (e for e in must[x] if sketches[e]), key=idx.__getitem__
        )
        prev = {a: None}
        frontier = [a]
        while frontier:
            nxt = []
            for cur in frontier:
                for e in eligible:
                    if e not in prev and sketches[e] & sketches[cur]:
                        prev[e] = cur
                        nxt.append(e)
            if b in prev:
                break
            frontier = nxt
            if not frontier:
                return None
        if b not in prev:
            return None
        out = [b]
        while out[-1] != a:
            out.append(prev[out[-1]])
        return list(reversed(out))

    capped = False

    for groups in _partitions(role_atoms):
        flat = [(g, atom) for g, group in enumerate(groups) for atom in group]
        pools = []
        feasible = True
        for g, atom in flat:
            pool = [
                (d1, d2)
                for (d1, d2) in sorted(
                    j.role_pairs(Role(atom.role)),
                    key=lambda p: (idx[p[0]], idx[p[1]]),
                )
                if d1 in must[atom.subject] and d2 in must[atom.object]
            ]
            if not pool:
                feasible = False
                break
            pools.append(pool)
        if not feasible:
            continue

        group_nodes: list[set] = [set() for _ in groups]
        placements: dict[str, list[tuple[int, ForestAddress]]] = {
            x: [] for x in variables
        }
        found = None

        def q4_feasible(x: str) -> bool:
            occs = placements[x]
            elems = {e for (_, e) in occs}
            comps = {g for (g, _) in occs}
            if len(elems) <= 1 and len(comps) <= 1:
                return True
            comp = link_comp[x]
            ids = set()
            for e in elems:
                if e not in comp:
                    return False
                ids.add(comp[e])
            return len(ids) == 1

        def place(g, atom, edge):
            added = []
            for x, e in ((atom.subject, edge[0]), (atom.object, edge[1])):
                occ = (g, e)
                if occ not in placements[x]:
                    placements[x].append(occ)
                    added.append((x, occ))
            return added

        def unplace(added):
            for x, occ in added:
                placements[x].remove(occ)

        def finalize():
            nonlocal capped
            connector_nodes: dict[str, list[ForestAddress]] = {}
            needed_sketch: dict[tuple[int, ForestAddress], set] = {}
            for x, occs in placements.items():
                elems = sorted({e for (_, e) in occs}, key=idx.__getitem__)
                comps = {g for (g, _) in occs}
                if len(elems) <= 1 and len(comps) <= 1:
                    continue
                chain_nodes: list[ForestAddress] = []
                hops: list[tuple[ForestAddress, ForestAddress]] = []
                for a, b in zip(elems, elems[1:]):
                    path = link_path(x, a, b)
                    if path is None:
                        return None
                    chain_nodes.extend(path[1:-1])
                    hops.extend(zip(path, path[1:]))
                if len(elems) == 1:
                    # one element in several components still needs a shared
                    # sketch available in each of them
                    if not sketches[elems[0]]:
                        return None
                    s = min(sketches[elems[0]])
                    for g, e in occs:
                        needed_sketch.setdefault((g, e), set()).add(s)
                for a, b in hops:
                    s = min(sketches[a] & sketches[b])
                    for g, e in occs:
                        if e in (a, b):
                            needed_sketch.setdefault((g, e), set()).add(s)
                connector_nodes[x] = chain_nodes
            n_components = (
                len(groups)
                + len(concept_only)
                + sum(len(v) for v in connector_nodes.values())
            )
            if n_components > cap:
                capped = True
                return None
            windows = []
            for nodes in group_nodes:
                w = _window_component(j, nodes, n)
                if w is None:
                    return None
                windows.append(w)
            return _build_witness(
                j,
                q,
                groups,
                windows,
                single_images,
                connector_nodes,
                needed_sketch,
                placements,
                paths_of,
            )

        def search(pos: int) -> bool:
            nonlocal found
            if pos == len(flat):
                witness = finalize()
                if witness is not None:
                    found = witness
                    return True
                return False
            g, atom = flat[pos]
            for edge in pools[pos]:
                before = set(group_nodes[g])
                group_nodes[g].update(edge)
                added = place(g, atom, edge)
                if _window_component(j, group_nodes[g], n) is not None and all(
                    q4_feasible(x) for x in (atom.subject, atom.object)
                ):
                    if search(pos + 1):
                        return True
                unplace(added)
                group_nodes[g].clear()
                group_nodes[g].update(before)
            return False

        if flat:
            if search(0):
                return QuentailResult("yes", found, cap)
        else:
            witness = finalize()
            if witness is not None:
                return QuentailResult("yes", witness, cap)

    return QuentailResult("cap" if capped else "no", None, cap)


def _build_witness(
    j,
    q,
    groups,
    group_windows,
    single_images,
    connector_nodes,
    needed_sketch,
    placements,
    paths_of,
):
    components: list[AnchoredComponent] = []
    assignments: list[dict] = []

    def path_with_sketch(e, s):
        for p in paths_of[e]:
            if p.sketch() == s:
                return p
        raise InputError(f"no counting path with sketch {s} at {e}")

    for g, (anchor, window) in enumerate(group_windows):
        paths = []
        for (gg, e), wanted in needed_sketch.items():
            if gg == g:
                for s in sorted(wanted):
                    paths.append(path_with_sketch(e, s))
        mu = {}
        for x, occs in placements.items():
            here = frozenset(e for (gg, e) in occs if gg == g)
            if here:
                mu[x] = here
        components.append(AnchoredComponent(anchor, window, tuple(paths)))
        assignments.append(mu)

    for x, e in sorted(single_images.items()):
        components.append(AnchoredComponent(e, (e,), ()))
        assignments.append({x: frozenset({e})})

    for x, nodes in sorted(connector_nodes.items()):
        for e in nodes:
            paths = tuple(paths_of[e])
            components.append(AnchoredComponent(e, (e,), paths))
            assignments.append({x: frozenset({e})})

    return QuentailWitness(q, tuple(components), tuple(assignments))


def verify_quentailment(
    j: ForestInterpretation,
    k: KnowledgeBase,
    witness: QuentailWitness,
) -> bool:
    """Independent check of the four witness conditions, used to revalidate
    search output."""
    q = witness.disjunct
    comps = witness.components
    mus = witness.assignments
    variables = q.variables()
    # component well-formedness: windows predecessor-closed within bound n
    n = q.atom_count()
    for comp, mu in zip(comps, mus):
        for e in comp.window:
            if not comp.witness.is_ancestor_of(e):
                return False
            if e.depth() - comp.witness.depth() > n:
                return False
            if e != comp.witness and e.parent() not in comp.window:
                return False
        for p in comp.paths:
            if p.nodes[0] not in comp.window:
                return False
        dom = comp.domain()
        for vals in mu.values():
            if not vals <= dom:
                return False
    # Q1
    for x in variables:
        if not any(mu.get(x) for mu in mus):
            return False
    # Q2
    for a in q.concept_atoms():
        ext = j.concept_members(a.concept)
        for mu in mus:
            if not mu.get(a.term, frozenset()) <= ext:
                return False
    # Q3
    for a in q.role_atoms():
        pairs = j.role_pairs(Role(a.role))
        if not any(
            (d1, d2) in pairs
            for mu in mus
            for d1 in mu.get(a.subject, frozenset())
            for d2 in mu.get(a.object, frozenset())
        ):
            return False
    # Q4: all placements of one variable chained through shared sketches
    for x in variables:
        spots = [
            (i, e)
            for i, mu in enumerate(mus)
            for e in mu.get(x, frozenset())
        ]
        if len(spots) <= 1:
            continue
        start = spots[0]
        seen = {start}
        frontier = [start]
        while frontier:
            (ci, e) = frontier.pop()
            se = comps[ci].sketches_at(e)
            for other in spots:
                if other in seen:
                    continue
                so = comps[other[0]].sketches_at(other[1])
                if se & so:
                    seen.add(other)
                    frontier.append(other)
        if set(spots) != seen:
            return False
    return True


@dataclass
class TailVerdict:
    status: str  # "match" | "failure" | "inconclusive"
    match: dict | None
    reason: str = ""


def tail_verify(
    j: ForestInterpretation,
    tails: TailMap,
    witness: QuentailWitness,
    i: Interpretation,
    q: ConjunctiveQuery,
) -> TailVerdict:
    """Project a quasi-witness on an unraveling down to the base model and
    verify it is a genuine query match there."""
    for comp in witness.components:
        if any(e in j.frontier for e in comp.domain()):
            return TailVerdict(
                "inconclusive", None, "witness touches the truncation frontier"
            )
    mapping: dict[str, object] = {}
    for mu in witness.assignments:
        for x, vals in mu.items():
            for e in vals:
                base = tails[e]
                if x in mapping and mapping[x] != base:
                    return TailVerdict(
                        "failure",
                        None,
                        f"placements of {x} project to different elements",
                    )
                mapping[x] = base
    for x in q.variables():
        if x not in mapping:
            return TailVerdict("failure", None, f"{x} unplaced")
    for a in q.concept_atoms():
        if mapping[a.term] not in i.concept_members(a.concept):
            return TailVerdict("failure", None, f"atom {a} fails")
    for a in q.role_atoms():
        if (mapping[a.subject], mapping[a.object]) not in i.role_pairs(
            Role(a.role)
        ):
            return TailVerdict("failure", None, f"atom {a} fails")
    return TailVerdict("match", mapping)
