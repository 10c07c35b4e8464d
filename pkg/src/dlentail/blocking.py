"""Depth-n blocking: tree windows, the blocking relation, validation of
finitely represented countermodels, and their unfolding into model prefixes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .core import (
    DialectError,
    InputError,
    Interpretation,
    KnowledgeBase,
    SIMPLIFIED,
    local_consistency,
)
from .forest import (
    ForestAddress,
    ForestInterpretation,
    iso_check,
    order_key,
)


def cut_n(i: ForestInterpretation, n: int) -> ForestInterpretation:
    """Restrict to nodes of depth at most n; addresses are preserved."""
    if n < 0:
        raise InputError("cut depth must be nonnegative")
    keep = {e for e in i.elements if e.depth() <= n}
    return ForestInterpretation(
        elements=tuple(e for e in i.elements if e in keep),
        concept_ext={c: v & keep for c, v in i.concept_ext.items()},
        role_ext={
            r: frozenset(p for p in v if p[0] in keep and p[1] in keep)
            for r, v in i.role_ext.items()
        },
        nominal_map={o: e for o, e in i.nominal_map.items() if e in keep},
        placeholder_ext={o: v & keep for o, v in i.placeholder_ext.items()},
        quasi=i.quasi,
        strict=i.strict,
        frontier=i.frontier & keep,
        pruned=i.pruned,
    )


@dataclass(frozen=True)
class BlockingTree:
    """The restriction of a host to a depth-n window below an anchor plus
    all of the host's roots."""

    host: ForestInterpretation
    anchor: ForestAddress
    n: int

    def window(self) -> tuple[ForestAddress, ...]:
        return tuple(
            e
            for e in self.host.elements
            if self.anchor.is_ancestor_of(e)
            and e.depth() - self.anchor.depth() <= self.n
        )

    def domain(self) -> tuple[ForestAddress, ...]:
        window = set(self.window())
        return tuple(
            e for e in self.host.elements if e in window or e.is_root()
        )

    def as_interpretation(self) -> ForestInterpretation:
        keep = set(self.domain())
        relabel = {}
        # re-anchor window addresses so two windows compare structurally
        for e in self.domain():
            if self.anchor.is_ancestor_of(e):
                relabel[e] = ForestAddress(
                    "_w", e.word[len(self.anchor.word):]
                )
            else:
                relabel[e] = e
        host = self.host
        return ForestInterpretation(
            elements=tuple(relabel[e] for e in self.domain()),
            concept_ext={
                c: frozenset(relabel[e] for e in v if e in keep)
                for c, v in host.concept_ext.items()
            },
            role_ext={
                r: frozenset(
                    (relabel[a], relabel[b])
                    for (a, b) in v
                    if a in keep and b in keep
                )
                for r, v in host.role_ext.items()
            },
            nominal_map={
                o: relabel[e] for o, e in host.nominal_map.items() if e in keep
            },
            placeholder_ext={
                o: frozenset(relabel[e] for e in v if e in keep)
                for o, v in host.placeholder_ext.items()
            },
            quasi=host.quasi,
            strict=False,
        )

    def leaves(self) -> tuple[ForestAddress, ...]:
        window = set(self.window())
        return tuple(
            e
            for e in self.window()
            if not any(s in window for s in self.host.successors(e))
        )


def blocks(
    t1: BlockingTree, t2: BlockingTree, k: KnowledgeBase
) -> dict | None:
    """Does the upper window block the lower one?  Checks domain
    disjointness (except roots), root-pinned isomorphism, and the absence of
    inverse-functional edges from the blocked window's descendants to roots.
    Returns the witnessing bijection on window nodes, or None."""
    if t1.host is not t2.host or t1.n != t2.n:
        raise InputError("blocking trees must share host and depth")
    host = t1.host
    w1, w2 = set(t1.window()), set(t2.window())
    roots = {e for e in host.elements if e.is_root()}
    if (w1 & w2) - roots:
        return None
    ifr = sorted(k.inverse_functional_roles(), key=str)
    for e in host.elements:
        if t2.anchor.is_ancestor_of(e) and e != t2.anchor:
            for f in ifr:
                for (a, b) in host.role_pairs(f):
                    if a == e and b.is_root():
                        return None
    phi = iso_check(t1.as_interpretation(), t2.as_interpretation(), mode="tagged")
    if phi is None:
        return None
    # translate back from re-anchored names to host addresses
    def back(addr: ForestAddress, tree: BlockingTree) -> ForestAddress:
        if addr.root == "_w":
            return ForestAddress(tree.anchor.root, tree.anchor.word + addr.word)
        return addr

    return {
        back(a, t1): back(b, t2) for a, b in phi.items() if a.root == "_w"
    }


@dataclass
class ValidationReport:
    ok: bool
    failures: list[tuple[int, str]] = field(default_factory=list)

    def add(self, condition: int, message: str) -> None:
        self.ok = False
        self.failures.append((condition, message))


@dataclass
class NRepresentation:
    """A validated finite forest countermodel representation: finite, no
    indirectly blocked nodes, one root per nominal, locally consistent off
    the directly blocked frontier."""

    structure: ForestInterpretation
    n: int
    blocked_map: dict[ForestAddress, ForestAddress]
    report: ValidationReport

    def directly_blocked(self) -> frozenset:
        return frozenset(self.blocked_map)


def _blocking_status(
    r: ForestInterpretation, k: KnowledgeBase, n: int
) -> tuple[dict, set]:
    """Compute the directly-blocked map (leaf -> blocker counterpart) and
    the set of indirectly blocked nodes, taking order-minimal blockers."""
    idx = {e: p for p, e in enumerate(r.elements)}
    blocked_anchor_of: dict[ForestAddress, tuple] = {}
    for e in r.elements:
        if e.is_root():
            continue
        ancestors = []
        a = e.parent()
        while True:
            if not a.is_root():
                ancestors.append(a)
            if a.is_root():
                break
            a = a.parent()
        t2 = BlockingTree(r, e, n)
        best = None
        for anc in sorted(ancestors, key=lambda x: (x.depth(), x.word)):
            t1 = BlockingTree(r, anc, n)
            phi = blocks(t1, t2, k)
            if phi is not None:
                best = (anc, phi)
                break
        if best is not None:
            blocked_anchor_of[e] = best

    directly: dict[ForestAddress, ForestAddress] = {}
    indirectly: set = set()

    def has_blocked_ancestor(e: ForestAddress) -> bool:
        a = e
        while not a.is_root():
            a = a.parent()
            if a in blocked_windows_leaves or a in indirectly:
                return True
        return False

    # leaves of blocked windows are the directly blocked nodes provided no
    # ancestor is itself blocked
    blocked_windows_leaves: set = set()
    for anchor in sorted(blocked_anchor_of, key=lambda x: (x.depth(), x.word)):
        blocker, phi = blocked_anchor_of[anchor]
        t2 = BlockingTree(r, anchor, n)
        inv = {b: a for a, b in phi.items()}
        for leaf in t2.leaves():
            if has_blocked_ancestor(leaf):
                indirectly.add(leaf)
                continue
            directly[leaf] = inv[leaf]
            blocked_windows_leaves.add(leaf)
    for e in r.elements:
        if e.is_root() or e in directly:
            continue
        a = e
        hit = False
        while not a.is_root():
            a = a.parent()
            if a in directly:
                hit = True
                break
        if hit:
            indirectly.add(e)
    return directly, indirectly


def validate_nrep(
    r: ForestInterpretation, k: KnowledgeBase, n: int
):
    """Check the four countermodel-representation conditions plus the global
    prohibition of inverse-functional tree-to-root edges.  Returns an
    NRepresentation on success, else the failure report."""
    if k.dialect != SIMPLIFIED:
        raise DialectError("validation needs a simplified knowledge base")
    report = ValidationReport(ok=True)
    if r.quasi:
        report.add(0, "expected real nominals, got a quasi-structure")
        return report

    for o in k.nominals():
        e = r.nominal_map.get(o)
        if e is None:
            report.add(3, f"nominal {o} has no root")
        elif not e.is_root():
            report.add(3, f"nominal {o} sits at non-root {e}")

    ifr = sorted(k.inverse_functional_roles(), key=str)
    for f in ifr:
        for (a, b) in r.role_pairs(f):
            if not a.is_root() and b.is_root():
                report.add(
                    5,
                    f"inverse-functional {f} edge from tree node {a} to root {b}",
                )

    directly, indirectly = _blocking_status(r, k, n)
    for e in sorted(indirectly, key=lambda x: (x.depth(), x.word)):
        report.add(2, f"indirectly blocked node {e} present")

    for e in r.elements:
        if e in directly:
            continue
        lr = local_consistency(r, e, k)
        if not lr.ok():
            ax, reason = lr.violations[0]
            report.add(4, f"element {e} violates {ax}: {reason}")

    if not report.ok:
        return report
    return NRepresentation(r, n, directly, report)


# ---------------------------------------------------------------------------
# Unfolding a representation into a model prefix


@dataclass(frozen=True)
class InducedPrefix:
    """Finite prefix of the model unfolded from a representation: elements
    are sequences of (copied element / original element) pairs."""

    interpretation: Interpretation
    frontier: frozenset
    depth: int

    @staticmethod
    def last_copy(seq: tuple) -> ForestAddress:
        return seq[-1][0]

    @staticmethod
    def last_original(seq: tuple) -> ForestAddress:
        return seq[-1][1]


def induce_prefix(rep: NRepresentation, depth: int) -> InducedPrefix:
    """Materialize unfolded sequences up to the given length.  Non-blocked
    successors extend a sequence by themselves; directly blocked successors
    extend it by their blocker copy."""
    r = rep.structure
    blocked = rep.blocked_map
    roots = [e for e in r.elements if e.is_root()]
    seqs: list[tuple] = [((e, e),) for e in roots]
    frontier: set = set()
    pos = 0
    while pos < len(seqs):
        s = seqs[pos]
        pos += 1
        if len(s) >= depth:
            frontier.add(s)
            continue
        top = InducedPrefix.last_copy(s)
        for succ in r.successors(top):
            if succ in blocked:
                seqs.append(s + ((blocked[succ], succ),))
            else:
                seqs.append(s + ((succ, succ),))

    elements = tuple(seqs)
    index = {s: i for i, s in enumerate(elements)}
    concept_ext = {
        c: frozenset(s for s in elements if InducedPrefix.last_copy(s) in v)
        for c, v in r.concept_ext.items()
    }
    nominal_map = {}
    for o, e in r.nominal_map.items():
        root_seq = ((e, e),)
        if root_seq in index:
            nominal_map[o] = root_seq

    role_ext: dict[str, set] = {name: set() for name in r.role_ext}
    by_parent: dict[tuple, list] = {}
    for s in elements:
        if len(s) > 1:
            by_parent.setdefault(s[:-1], []).append(s)
    root_seq_of = {e: ((e, e),) for e in roots}
    for name, pairs in r.role_ext.items():
        ext = role_ext[name]
        for s in elements:
            top = InducedPrefix.last_copy(s)
            for child in by_parent.get(s, []):
                down = InducedPrefix.last_original(child)
                if (top, down) in pairs:
                    ext.add((s, child))
                if (down, top) in pairs:
                    ext.add((child, s))
            for rt in roots:
                if (top, rt) in pairs and len(s) > 1:
                    ext.add((s, root_seq_of[rt]))
                if (rt, top) in pairs and len(s) > 1:
                    ext.add((root_seq_of[rt], s))
            if len(s) == 1:
                for rt in roots:
                    if (top, rt) in pairs:
                        ext.add((s, root_seq_of[rt]))

    interp = Interpretation(
        elements,
        concept_ext,
        {name: frozenset(v) for name, v in role_ext.items()},
        nominal_map,
        {},
    )
    return InducedPrefix(interp, frozenset(frontier), depth)


def tree_count_bound(c: int, r: int, m: int, n: int) -> int:
    """Upper-bound recurrence for the number of distinct depth-n windows
    over c concepts, r roles, and m roots.  Diagnostic only: the decision
    loop never uses it as a stopping rule."""
    if min(c, r, m) < 1 or n < 0:
        raise InputError("bound needs c, r, m >= 1 and n >= 0")
    t = 2 ** c
    x = (2 ** c) * (c * m) ** r
    a = c * m * r
    for _ in range(n):
        t = x * t ** a
    return t
