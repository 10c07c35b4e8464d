"""First-order refutation side: clause translation of a simplified knowledge
base plus a negated union query, and a fair given-clause saturation loop with
binary resolution and positive factoring."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .core import (
    DialectError,
    Exists,
    Forall,
    Func,
    GCI,
    InputError,
    KnowledgeBase,
    Role,
    SIMPLIFIED,
    classify_simplified,
    ClauseShape,
    FuncShape,
    GuardedShape,
    NominalShape,
    role_cnf,
    role_dnf,
)
from .query import ConceptAtom, ConjunctiveQuery, RoleAtom, UnionQuery

# terms: ("v", name) | ("c", name) | ("f", fn_name, arg_term)
EQ = "≈"


def var(name: str) -> tuple:
    return ("v", name)


def const(name: str) -> tuple:
    return ("c", name)


def app(fn: str, arg: tuple) -> tuple:
    return ("f", fn, arg)


def term_str(t: tuple) -> str:
    if t[0] == "v":
        return t[1].upper()
    if t[0] == "c":
        return t[1]
    return f"{t[1]}({term_str(t[2])})"


@dataclass(frozen=True)
class Literal:
    positive: bool
    pred: str
    args: tuple

    def negated(self) -> "Literal":
        return Literal(not self.positive, self.pred, self.args)

    def __str__(self) -> str:
        body = f"{self.pred}({', '.join(term_str(a) for a in self.args)})"
        return body if self.positive else "~" + body


@dataclass(frozen=True)
class Clause:
    literals: tuple

    def is_empty(self) -> bool:
        return not self.literals

    def __str__(self) -> str:
        return " | ".join(str(l) for l in self.literals) if self.literals else "[]"


def _walk(t: tuple, subst: dict) -> tuple:
    while t[0] == "v" and t in subst:
        t = subst[t]
    if t[0] == "f":
        return ("f", t[1], _walk(t[2], subst))
    return t


def _occurs(v: tuple, t: tuple, subst: dict) -> bool:
    t = t if t[0] != "v" else _walk(t, subst)
    if t == v:
        return True
    if t[0] == "f":
        return _occurs(v, t[2], subst)
    return False


def unify(pairs: list, subst: dict | None = None) -> dict | None:
    subst = dict(subst or {})
    work = list(pairs)
    while work:
        a, b = work.pop()
        a, b = _walk(a, subst), _walk(b, subst)
        if a == b:
            continue
        if a[0] == "v":
            if _occurs(a, b, subst):
                return None
            subst[a] = b
        elif b[0] == "v":
            if _occurs(b, a, subst):
                return None
            subst[b] = a
        elif a[0] == "f" and b[0] == "f" and a[1] == b[1]:
            work.append((a[2], b[2]))
        else:
            return None
    return subst


def apply_subst(lit: Literal, subst: dict) -> Literal:
    return Literal(lit.positive, lit.pred, tuple(_walk(a, subst) for a in lit.args))


def canonical(literals: Iterable[Literal]) -> Clause:
    """Deduplicate literals and rename variables to x0, x1, ... in order of
    first occurrence, so variant clauses become identical."""
    lits = []
    for l in literals:
        if l not in lits:
            lits.append(l)
    table: dict = {}

    def conv(t: tuple) -> tuple:
        if t[0] == "v":
            if t not in table:
                table[t] = ("v", f"x{len(table)}")
            return table[t]
        if t[0] == "f":
            return ("f", t[1], conv(t[2]))
        return t

    out = tuple(
        Literal(l.positive, l.pred, tuple(conv(a) for a in l.args)) for l in lits
    )
    return Clause(out)


def rename_apart(c: Clause, suffix: str) -> Clause:
    table: dict = {}

    def conv(t: tuple) -> tuple:
        if t[0] == "v":
            if t not in table:
                table[t] = ("v", t[1] + suffix)
            return table[t]
        if t[0] == "f":
            return ("f", t[1], conv(t[2]))
        return t

    return Clause(
        tuple(
            Literal(l.positive, l.pred, tuple(conv(a) for a in l.args))
            for l in c.literals
        )
    )


def is_tautology(c: Clause) -> bool:
    pos = {(l.pred, l.args) for l in c.literals if l.positive}
    if any((l.pred, l.args) in pos for l in c.literals if not l.positive):
        return True
    return any(
        l.positive and l.pred == EQ and l.args[0] == l.args[1] for l in c.literals
    )


def subsumes(c: Clause, d: Clause) -> bool:
    """Does c subsume d (some instance of c is a sub-multiset of d)?"""
    if len(c.literals) > len(d.literals):
        return False

    def match(t1: tuple, t2: tuple, subst: dict) -> dict | None:
        if t1[0] == "v":
            if t1 in subst:
                return subst if subst[t1] == t2 else None
            s2 = dict(subst)
            s2[t1] = t2
            return s2
        if t1[0] != t2[0]:
            return None
        if t1[0] == "c":
            return subst if t1 == t2 else None
        if t1[1] != t2[1]:
            return None
        return match(t1[2], t2[2], subst)

    def extend(pos: int, subst: dict, used: set) -> bool:
        if pos == len(c.literals):
            return True
        cl = c.literals[pos]
        for i, dl in enumerate(d.literals):
            if i in used or dl.positive != cl.positive or dl.pred != cl.pred:
                continue
            s = dict(subst)
            ok = True
            for a, b in zip(cl.args, dl.args):
                s2 = match(a, b, s)
                if s2 is None:
                    ok = False
                    break
                s = s2
            if ok and extend(pos + 1, s, used | {i}):
                return True
        return False

    return extend(0, {}, set())


# ---------------------------------------------------------------------------
# Translation


def translate(k: KnowledgeBase, u: UnionQuery | None = None) -> list[Clause]:
    """Clauses for the knowledge base and the negated union query, with the
    equality theory axiomatized whenever equality can occur."""
    if k.dialect != SIMPLIFIED:
        raise DialectError("translation expects a simplified knowledge base")
    clauses: list[Clause] = []
    x, y, z = var("x"), var("y"), var("z")
    witness_fns: list[str] = []

    def role_literal(positive: bool, role: Role, s: tuple, t: tuple) -> Literal:
        if role.inverted:
            return Literal(positive, role.base, (t, s))
        return Literal(positive, role.base, (s, t))

    for pos, ax in enumerate(k.axioms):
        shape = classify_simplified(ax)
        if shape is None:
            raise DialectError(f"axiom is not in simplified form: {ax}")
        if isinstance(shape, ClauseShape):
            lits = [Literal(False, a.name, (x,)) for a in shape.lhs]
            lits += [Literal(True, b.name, (x,)) for b in shape.rhs]
            clauses.append(canonical(lits))
        elif isinstance(shape, NominalShape):
            o = const(shape.individual)
            if shape.concept_first:  # name <= {o}
                clauses.append(
                    canonical(
                        [
                            Literal(False, shape.name.name, (x,)),
                            Literal(True, EQ, (x, o)),
                        ]
                    )
                )
            else:  # {o} <= name
                clauses.append(canonical([Literal(True, shape.name.name, (o,))]))
        elif isinstance(shape, GuardedShape):
            name = shape.name.name
            if not shape.existential:
                for disjunct in role_dnf(shape.guard):
                    lits = [Literal(False, name, (x,))]
                    for positive, role in disjunct:
                        lits.append(role_literal(not positive, role, x, y))
                    lits.append(Literal(True, shape.filler.name, (y,)))
                    clauses.append(canonical(lits))
            else:
                fn = f"sk{pos}"
                witness_fns.append(fn)
                gx = app(fn, x)
                clauses.append(
                    canonical(
                        [
                            Literal(False, name, (x,)),
                            Literal(True, shape.filler.name, (gx,)),
                        ]
                    )
                )
                for conj in role_cnf(shape.guard):
                    lits = [Literal(False, name, (x,))]
                    for positive, role in conj:
                        lits.append(role_literal(positive, role, x, gx))
                    clauses.append(canonical(lits))
        elif isinstance(shape, FuncShape):
            f = shape.role
            clauses.append(
                canonical(
                    [
                        role_literal(False, f, x, y),
                        role_literal(False, f, x, z),
                        Literal(True, EQ, (y, z)),
                    ]
                )
            )
        else:  # pragma: no cover
            raise InputError(f"unhandled shape {shape!r}")

    if u is not None:
        for q in u.disjuncts:
            if q.constants:
                raise InputError("translate expects constant-free queries")
            lits = []
            for a in sorted(q.atoms, key=str):
                if isinstance(a, ConceptAtom):
                    lits.append(Literal(False, a.concept, (var(a.term),)))
                else:
                    lits.append(
                        Literal(False, a.role, (var(a.subject), var(a.object)))
                    )
            clauses.append(canonical(lits))

    if any(l.pred == EQ for c in clauses for l in c.literals):
        clauses.extend(_equality_axioms(k, witness_fns))
    return clauses


def _equality_axioms(k: KnowledgeBase, witness_fns: list[str]) -> list[Clause]:
    x, y, z = var("x"), var("y"), var("z")
    out = [
        canonical([Literal(True, EQ, (x, x))]),
        canonical([Literal(False, EQ, (x, y)), Literal(True, EQ, (y, x))]),
        canonical(
            [
                Literal(False, EQ, (x, y)),
                Literal(False, EQ, (y, z)),
                Literal(True, EQ, (x, z)),
            ]
        ),
    ]
    for a in k.signature.concept_names:
        out.append(
            canonical(
                [
                    Literal(False, EQ, (x, y)),
                    Literal(False, a, (x,)),
                    Literal(True, a, (y,)),
                ]
            )
        )
    for r in k.signature.role_names:
        out.append(
            canonical(
                [
                    Literal(False, EQ, (x, y)),
                    Literal(False, r, (x, z)),
                    Literal(True, r, (y, z)),
                ]
            )
        )
        out.append(
            canonical(
                [
                    Literal(False, EQ, (x, y)),
                    Literal(False, r, (z, x)),
                    Literal(True, r, (z, y)),
                ]
            )
        )
    for fn in witness_fns:
        out.append(
            canonical(
                [
                    Literal(False, EQ, (x, y)),
                    Literal(True, EQ, (app(fn, x), app(fn, y))),
                ]
            )
        )
    return out


def clausify_implication(body: list[Literal], head: list[Literal]) -> Clause:
    """Utility CNF step for hand-built formulas: body implies head."""
    return canonical([l.negated() for l in body] + list(head))


# ---------------------------------------------------------------------------
# Saturation


@dataclass
class ProofRecord:
    rule: str
    premises: tuple[int, ...]
    conclusion: Clause


def is_ground(t: tuple) -> bool:
    if t[0] == "v":
        return False
    if t[0] == "f":
        return is_ground(t[2])
    return True


def term_size(t: tuple) -> int:
    return 1 if t[0] != "f" else 1 + term_size(t[2])


class GroundRewriter:
    """Oriented ground unit equalities used as rewrite rules.

    Each rule replaces a larger ground term by a smaller one (size, then
    lexicographic), so normalization terminates.  Rewriting a clause is a
    chain of sound unit-equality steps; the original clause stays derivable
    through the equality axioms, so completeness is unaffected.
    """

    def __init__(self):
        self.rules: dict[tuple, tuple[tuple, int]] = {}  # lhs -> (rhs, eq id)
        self.memo: dict[tuple, tuple] = {}

    @staticmethod
    def _orient(a: tuple, b: tuple) -> tuple | None:
        ka = (term_size(a), a)
        kb = (term_size(b), b)
        if ka == kb:
            return None
        return (a, b) if ka > kb else (b, a)

    def normalize(self, t: tuple) -> tuple[tuple, frozenset]:
        """Normal form of a ground term plus the rule ids applied."""
        if t[0] == "v":
            return t, frozenset()
        if t in self.memo:
            return self.memo[t]
        used: set = set()
        out = t
        if out[0] == "f":
            sub, u = self.normalize(out[2])
            used |= u
            out = ("f", out[1], sub)
        guard = 0
        while out in self.rules:
            rhs, eq_id = self.rules[out]
            used.add(eq_id)
            out = rhs
            if out[0] == "f":
                sub, u = self.normalize(out[2])
                used |= u
                out = ("f", out[1], sub)
            guard += 1
            if guard > 10000:  # pragma: no cover
                raise InputError("rewriting did not terminate")
        res = (out, frozenset(used))
        self.memo[t] = res
        return res

    def add(self, a: tuple, b: tuple, eq_id: int) -> bool:
        a, _ = self.normalize(a)
        b, _ = self.normalize(b)
        oriented = self._orient(a, b)
        if oriented is None:
            return False
        lhs, rhs = oriented
        self.rules[lhs] = (rhs, eq_id)
        self.memo = {}
        return True

    def rewrite_clause(self, c: Clause) -> tuple[Clause, frozenset]:
        used: set = set()
        lits = []
        for l in c.literals:
            args = []
            for a in l.args:
                if is_ground(a):
                    na, u = self.normalize(a)
                    used |= u
                    args.append(na)
                else:
                    args.append(a)
            lits.append(Literal(l.positive, l.pred, tuple(args)))
        if not used:
            return c, frozenset()
        return canonical(lits), frozenset(used)


@dataclass
class ProofLog:
    records: dict = field(default_factory=dict)  # id -> ProofRecord
    empty_id: int | None = None

    def ancestors(self, cid: int) -> list[int]:
        seen: list[int] = []
        stack = [cid]
        while stack:
            c = stack.pop()
            if c in seen:
                continue
            seen.append(c)
            stack.extend(self.records[c].premises)
        return sorted(seen)


@dataclass
class SaturationResult:
    status: str  # "refuted" | "saturated" | "exhausted"
    log: ProofLog
    retained: dict
    inferences: int
    selections: list = field(default_factory=list)
    queue_len_at_retention: dict = field(default_factory=dict)


def clause_weight(c: Clause) -> int:
    """Selection priority: symbol count plus penalties for extra literals
    and variables, so ground units come first.  Affects order only, never
    which inferences are drawn."""

    def tw(t: tuple) -> int:
        return 1 if t[0] != "f" else 1 + tw(t[2])

    symbols = sum(1 + sum(tw(a) for a in l.args) for l in c.literals)
    variables = len(
        {t for l in c.literals for a in l.args for t in _vars_of(a)}
    )
    return symbols + 4 * (len(c.literals) - 1 if c.literals else 0) + 3 * variables


def _vars_of(t: tuple):
    if t[0] == "v":
        yield t
    elif t[0] == "f":
        yield from _vars_of(t[2])


def resolvents(c1: Clause, c2: Clause) -> list[Clause]:
    """All binary resolvents of two clauses (assumed variable-disjoint)."""
    out = []
    for i, l1 in enumerate(c1.literals):
        for j, l2 in enumerate(c2.literals):
            if l1.positive == l2.positive or l1.pred != l2.pred:
                continue
            if len(l1.args) != len(l2.args):
                continue
            subst = unify(list(zip(l1.args, l2.args)))
            if subst is None:
                continue
            rest = [
                apply_subst(l, subst)
                for k, l in enumerate(c1.literals)
                if k != i
            ] + [
                apply_subst(l, subst)
                for k, l in enumerate(c2.literals)
                if k != j
            ]
            out.append(canonical(rest))
    return out


def factors(c: Clause) -> list[Clause]:
    """Positive factoring: unify two positive literals."""
    out = []
    for i, l1 in enumerate(c.literals):
        if not l1.positive:
            continue
        for j in range(i + 1, len(c.literals)):
            l2 = c.literals[j]
            if not l2.positive or l1.pred != l2.pred or len(l1.args) != len(l2.args):
                continue
            subst = unify(list(zip(l1.args, l2.args)))
            if subst is None:
                continue
            rest = [
                apply_subst(l, subst)
                for k, l in enumerate(c.literals)
                if k != j
            ]
            out.append(canonical(rest))
    return out


class SaturationLoop:
    """Given-clause loop with an explicit step function.

    Selection interleaves lightest-first picks with a forced oldest-first
    pick every ``age_pick_every`` rounds, so every retained clause is
    eventually selected (the fairness needed for refutation completeness);
    the inference rules themselves are unrestricted.  Forward subsumption
    only discards new clauses, never delays old ones.
    """

    def __init__(
        self,
        clauses: Iterable[Clause],
        use_subsumption: bool = True,
        age_pick_every: int = 4,
        subsumption_window: int = 3000,
    ):
        import heapq

        self.heapq = heapq
        self.log = ProofLog()
        self.retained: dict[Clause, int] = {}
        self.by_id: dict[int, Clause] = {}
        self.weight_heap: list = []
        self.age_queue: list[int] = []
        self.age_pos = 0
        self.selected: set[int] = set()
        self.processed: list[int] = []
        self.next_id = 0
        self.inferences = 0
        self.selections: list[int] = []
        self.rounds = 0
        self.use_subsumption = use_subsumption
        self.age_pick_every = age_pick_every
        self.subsumption_window = subsumption_window
        self.queue_len_at_retention: dict[int, int] = {}
        self.units: dict[tuple, list[Clause]] = {}
        # non-unit clauses indexed under their least literal key; a subsuming
        # clause's key set is contained in the candidate's, so looking up
        # every key of the candidate finds all possible subsumers
        self.nonunit_index: dict[tuple, list[tuple[Clause, frozenset, int]]] = {}
        self.partner_index: dict[tuple, list[int]] = {}
        self.renamed_partner: dict[int, Clause] = {}
        self.rewriter = GroundRewriter()
        for c in clauses:
            self._retain(c, "input", ())

    def _keys(self, c: Clause) -> frozenset:
        return frozenset((l.positive, l.pred) for l in c.literals)

    def _retain(self, c: Clause, rule: str, premises: tuple) -> None:
        if is_tautology(c) or c in self.retained:
            return
        normalized, eq_used = self.rewriter.rewrite_clause(c)
        if eq_used:
            # log the raw conclusion unqueued, then derive its normal form
            raw_id = self.next_id
            self.next_id += 1
            self.log.records[raw_id] = ProofRecord(rule, premises, c)
            self._retain(
                normalized, "rewrite", (raw_id,) + tuple(sorted(eq_used))
            )
            return
        keys = self._keys(c)
        if self.use_subsumption and self._subsumed(c, keys):
            return
        cid = self.next_id
        self.next_id += 1
        self.retained[c] = cid
        self.by_id[cid] = c
        self.heapq.heappush(self.weight_heap, (clause_weight(c), cid))
        self.age_queue.append(cid)
        self.queue_len_at_retention[cid] = len(self.age_queue) - self.age_pos
        self.log.records[cid] = ProofRecord(rule, premises, c)
        if c.is_empty():
            self.log.empty_id = cid
        if len(c.literals) == 1:
            l = c.literals[0]
            self.units.setdefault((l.positive, l.pred), []).append(c)
            if (
                l.positive
                and l.pred == EQ
                and is_ground(l.args[0])
                and is_ground(l.args[1])
            ):
                self.rewriter.add(l.args[0], l.args[1], cid)
        elif keys:
            self.nonunit_index.setdefault(min(keys), []).append(
                (c, keys, len(c.literals))
            )

    def _subsumed(self, c: Clause, keys: frozenset) -> bool:
        for l in c.literals:
            for u in self.units.get((l.positive, l.pred), ()):
                if subsumes(u, c):
                    return True
        if len(c.literals) == 1:
            return False
        checked = 0
        size = len(c.literals)
        for key in keys:
            for old, old_keys, old_len in self.nonunit_index.get(key, ()):
                if old_len > size or not old_keys <= keys:
                    continue
                checked += 1
                if subsumes(old, c):
                    return True
                if checked >= self.subsumption_window:
                    return False
        return False

    def _next_given(self) -> int | None:
        self.rounds += 1
        if self.rounds % self.age_pick_every == 0:
            while self.age_pos < len(self.age_queue):
                cid = self.age_queue[self.age_pos]
                self.age_pos += 1
                if cid not in self.selected:
                    return cid
        while self.weight_heap:
            _, cid = self.heapq.heappop(self.weight_heap)
            if cid not in self.selected:
                return cid
        while self.age_pos < len(self.age_queue):
            cid = self.age_queue[self.age_pos]
            self.age_pos += 1
            if cid not in self.selected:
                return cid
        return None

    def step(self, budget: int) -> tuple[str, int]:
        """Process given clauses until refutation, saturation, or the
        inference budget is spent; returns (status, inferences used)."""
        used = 0
        if self.log.empty_id is not None:
            return "refuted", used
        while used < budget:
            given_id = self._next_given()
            if given_id is None:
                return "saturated", used
            self.selected.add(given_id)
            self.selections.append(given_id)
            given = self.by_id[given_id]
            normalized, eq_used = self.rewriter.rewrite_clause(given)
            if eq_used and normalized != given:
                # stale under newer equations: queue its normal form instead
                self._retain(
                    normalized, "rewrite", (given_id,) + tuple(sorted(eq_used))
                )
                if self.log.empty_id is not None:
                    return "refuted", used
                continue
            renamed = rename_apart(given, "_g")
            self.processed.append(given_id)
            self.renamed_partner[given_id] = rename_apart(given, "_p")
            for l in renamed.literals:
                self.partner_index.setdefault(
                    (l.positive, l.pred), []
                ).append(given_id)
            # partners sharing a complementary literal key (the only ones
            # any resolution step could use)
            pids: list[int] = []
            seen: set[int] = set()
            for l in renamed.literals:
                for pid in self.partner_index.get((not l.positive, l.pred), ()):
                    if pid not in seen:
                        seen.add(pid)
                        pids.append(pid)
            conclusions: list[tuple[Clause, str, tuple]] = []
            for new in factors(renamed):
                conclusions.append((new, "factor", (given_id,)))
            for pid in sorted(pids):
                for new in resolvents(renamed, self.renamed_partner[pid]):
                    conclusions.append((new, "resolve", (given_id, pid)))
            for new, rule, premises in conclusions:
                used += 1
                self.inferences += 1
                self._retain(new, rule, premises)
                if self.log.empty_id is not None:
                    return "refuted", used
                if used >= budget:
                    return "exhausted", used
        return "exhausted", used

    def result(self, status: str) -> SaturationResult:
        return SaturationResult(
            status,
            self.log,
            self.retained,
            self.inferences,
            self.selections,
            self.queue_len_at_retention,
        )


def saturate(
    clauses: Iterable[Clause],
    budget: int,
    use_subsumption: bool = True,
) -> SaturationResult:
    loop = SaturationLoop(clauses, use_subsumption=use_subsumption)
    status, _ = loop.step(budget)
    return loop.result(status)


def replay(log: ProofLog) -> bool:
    """Re-derive every non-input record from its premises with the recorded
    rule; the conclusion must appear among the possible inferences."""
    for cid in sorted(log.records):
        rec = log.records[cid]
        if rec.rule == "input":
            continue
        if rec.rule == "factor":
            (pid,) = rec.premises
            pool = factors(rename_apart(log.records[pid].conclusion, "_g"))
        elif rec.rule == "resolve":
            gid, pid = rec.premises
            pool = resolvents(
                rename_apart(log.records[gid].conclusion, "_g"),
                rename_apart(log.records[pid].conclusion, "_p"),
            )
        elif rec.rule == "rewrite":
            raw_id = rec.premises[0]
            rw = GroundRewriter()
            for eq_id in rec.premises[1:]:
                lit = log.records[eq_id].conclusion.literals[0]
                rw.add(lit.args[0], lit.args[1], eq_id)
            redone, _ = rw.rewrite_clause(log.records[raw_id].conclusion)
            pool = [redone]
        else:
            return False
        if rec.conclusion not in pool:
            return False
    return True
