"""Rewriting raw knowledge bases into the simplified dialect: ABox
internalization, NNF, number-restriction and role-hierarchy elimination, and
the definitional structural transformation."""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    And,
    AtLeast,
    AtMost,
    Axiom,
    BOTTOM,
    Bottom,
    Concept,
    ConceptAssertion,
    ConceptName,
    DifferentIndividuals,
    Exists,
    Forall,
    Func,
    GCI,
    InputError,
    KnowledgeBase,
    NegRoleAssertion,
    Nominal,
    Not,
    Or,
    Placeholder,
    RAW,
    Role,
    RoleAnd,
    RoleAssertion,
    RoleExpr,
    RoleIncl,
    RoleLeaf,
    RoleNot,
    SIMPLIFIED,
    SameIndividual,
    Signature,
    TOP,
    Top,
    TransAxiom,
    UnsupportedInputError,
    classify_simplified,
    is_safe,
    nnf,
    subconcepts,
)


@dataclass
class TraceEntry:
    rule: str
    consumed: Axiom | None
    produced: tuple[Axiom, ...]
    fresh: tuple[str, ...] = ()


@dataclass
class RewriteTrace:
    entries: list[TraceEntry] = field(default_factory=list)

    def record(self, rule, consumed, produced, fresh=()):
        self.entries.append(TraceEntry(rule, consumed, tuple(produced), tuple(fresh)))

    def fresh_symbols(self) -> list[str]:
        out = []
        for e in self.entries:
            out.extend(e.fresh)
        return out


class _Fresh:
    """Deterministic per-rule fresh-name counters, collision-avoiding."""

    def __init__(self, taken: set[str]):
        self.taken = set(taken)
        self.counters: dict[str, int] = {}

    def next(self, prefix: str) -> str:
        n = self.counters.get(prefix, 0)
        while True:
            name = f"{prefix}{n}"
            n += 1
            if name not in self.taken:
                self.counters[prefix] = n
                self.taken.add(name)
                return name

    def named(self, base: str) -> str:
        if base not in self.taken:
            self.taken.add(base)
            return base
        return self.next(base + "_")


def _all_names(k: KnowledgeBase) -> set[str]:
    return (
        set(k.signature.concept_names)
        | set(k.signature.role_names)
        | set(k.signature.individual_names)
    )


def _reject_trans(k: KnowledgeBase) -> None:
    for ax in k.axioms:
        if isinstance(ax, TransAxiom):
            raise UnsupportedInputError(
                "transitivity not supported; pre-eliminate trans axioms"
            )


# ---------------------------------------------------------------------------
# Stage 1: ABox internalization


def internalize_abox(k: KnowledgeBase, trace: RewriteTrace | None = None) -> KnowledgeBase:
    trace = trace if trace is not None else RewriteTrace()
    _reject_trans(k)
    out: list[Axiom] = []
    for ax in k.axioms:
        if isinstance(ax, ConceptAssertion):
            produced = [GCI(Nominal(ax.individual), ax.concept)]
        elif isinstance(ax, RoleAssertion):
            produced = [
                GCI(
                    Nominal(ax.subject),
                    Exists(RoleLeaf(ax.role), Nominal(ax.object)),
                )
            ]
        elif isinstance(ax, NegRoleAssertion):
            produced = [
                GCI(
                    Nominal(ax.subject),
                    Forall(RoleLeaf(ax.role), Not(Nominal(ax.object))),
                )
            ]
        elif isinstance(ax, SameIndividual):
            produced = [GCI(Nominal(ax.first), Nominal(ax.second))]
        elif isinstance(ax, DifferentIndividuals):
            produced = [
                GCI(And(Nominal(ax.first), Nominal(ax.second)), BOTTOM)
            ]
        else:
            out.append(ax)
            continue
        trace.record("internalize-abox", ax, produced)
        out.extend(produced)
    return KnowledgeBase(k.signature, tuple(out), RAW)


# ---------------------------------------------------------------------------
# Stage 2: NNF (all inclusions become top-level)


def to_nnf_form(k: KnowledgeBase, trace: RewriteTrace | None = None) -> KnowledgeBase:
    trace = trace if trace is not None else RewriteTrace()
    out: list[Axiom] = []
    for ax in k.axioms:
        if isinstance(ax, GCI):
            produced = [GCI(TOP, nnf(Or(Not(ax.lhs), ax.rhs)))]
            trace.record("nnf", ax, produced)
            out.extend(produced)
        else:
            out.append(ax)
    return KnowledgeBase(k.signature, tuple(out), RAW)


# ---------------------------------------------------------------------------
# Stage 3: number restrictions


def eliminate_number_restrictions(
    k: KnowledgeBase, trace: RewriteTrace | None = None
) -> KnowledgeBase:
    trace = trace if trace is not None else RewriteTrace()
    fresh = _Fresh(_all_names(k))
    out: list[Axiom] = []
    new_roles: list[str] = []

    def rewrite(c: Concept, side: list[Axiom], names: list[str]) -> Concept:
        if isinstance(c, AtLeast):
            filler = rewrite(c.filler, side, names)
            if c.bound == 0:
                return TOP
            rs = [fresh.next("_r#") for _ in range(c.bound)]
            names.extend(rs)
            for rn in rs:
                side.append(RoleIncl(Role(rn), c.role))
            for a in range(len(rs)):
                for b in range(a + 1, len(rs)):
                    side.append(
                        GCI(
                            TOP,
                            Forall(
                                RoleAnd(RoleLeaf(Role(rs[a])), RoleLeaf(Role(rs[b]))),
                                BOTTOM,
                            ),
                        )
                    )
            parts = [Exists(RoleLeaf(Role(rn)), filler) for rn in rs]
            conj = parts[0]
            for p in parts[1:]:
                conj = And(conj, p)
            return conj
        if isinstance(c, AtMost):
            filler = rewrite(c.filler, side, names)
            rs = [fresh.next("_r#") for _ in range(c.bound)]
            names.extend(rs)
            for rn in rs:
                side.append(Func(Role(rn)))
            guard: RoleExpr = RoleLeaf(c.role)
            for rn in rs:
                guard = RoleAnd(guard, RoleNot(RoleLeaf(Role(rn))))
            return Forall(guard, nnf(Not(filler)))
        if isinstance(c, Not):
            return Not(rewrite(c.sub, side, names))
        if isinstance(c, And):
            return And(rewrite(c.left, side, names), rewrite(c.right, side, names))
        if isinstance(c, Or):
            return Or(rewrite(c.left, side, names), rewrite(c.right, side, names))
        if isinstance(c, Forall):
            return Forall(c.guard, rewrite(c.filler, side, names))
        if isinstance(c, Exists):
            return Exists(c.guard, rewrite(c.filler, side, names))
        return c

    for ax in k.axioms:
        if isinstance(ax, GCI) and any(
            isinstance(sc, (AtLeast, AtMost)) for sc in subconcepts(ax.rhs)
        ):
            side: list[Axiom] = []
            names: list[str] = []
            replaced = GCI(ax.lhs, rewrite(ax.rhs, side, names))
            produced = [replaced] + side
            trace.record("eliminate-number-restriction", ax, produced, names)
            out.extend(produced)
            new_roles.extend(names)
        else:
            out.append(ax)
    sig = k.signature.extend(roles=new_roles)
    return KnowledgeBase(sig, tuple(out), RAW)


# ---------------------------------------------------------------------------
# Stage 4: role hierarchy


def eliminate_role_hierarchy(
    k: KnowledgeBase, trace: RewriteTrace | None = None
) -> KnowledgeBase:
    trace = trace if trace is not None else RewriteTrace()
    out: list[Axiom] = []
    for ax in k.axioms:
        if isinstance(ax, RoleIncl):
            produced = [
                GCI(
                    TOP,
                    Forall(
                        RoleAnd(RoleLeaf(ax.sub), RoleNot(RoleLeaf(ax.sup))),
                        BOTTOM,
                    ),
                )
            ]
            trace.record("eliminate-role-inclusion", ax, produced)
            out.extend(produced)
        else:
            out.append(ax)
    return KnowledgeBase(k.signature, tuple(out), RAW)


# ---------------------------------------------------------------------------
# Stage 5: structural transformation


_ATOMIC_POS = (ConceptName, Placeholder)


def _flatten(c: Concept, op) -> list[Concept]:
    if isinstance(c, op):
        return _flatten(c.left, op) + _flatten(c.right, op)
    return [c]


def _fold(parts: list[Concept], op, empty: Concept) -> Concept:
    if not parts:
        return empty
    acc = parts[0]
    for p in parts[1:]:
        acc = op(acc, p)
    return acc


class _StructuralTransform:
    def __init__(self, k: KnowledgeBase, trace: RewriteTrace):
        self.trace = trace
        self.fresh = _Fresh(_all_names(k))
        self.nominal_names: dict[str, str] = {}
        self.out: list[Axiom] = []
        self.new_concepts: list[str] = []
        self.current_fresh: list[str] = []

    def nominal_name(self, o: str) -> ConceptName:
        if o not in self.nominal_names:
            name = self.fresh.named(f"_N@{o}")
            self.nominal_names[o] = name
            self.new_concepts.append(name)
            self.current_fresh.append(name)
            self.out.append(GCI(ConceptName(name), Nominal(o)))
            self.out.append(GCI(Nominal(o), ConceptName(name)))
        return ConceptName(self.nominal_names[o])

    def fresh_concept(self) -> ConceptName:
        name = self.fresh.next("_X#")
        self.new_concepts.append(name)
        self.current_fresh.append(name)
        return ConceptName(name)

    def guard_checked(self, guard: RoleExpr) -> RoleExpr:
        if not is_safe(guard):
            raise UnsupportedInputError(f"unsafe guard {guard} in universal/existential")
        return guard

    def atom_for_filler(self, filler: Concept) -> Concept:
        if isinstance(filler, _ATOMIC_POS):
            return filler
        if isinstance(filler, Nominal):
            return self.nominal_name(filler.individual)
        x = self.fresh_concept()
        self.expand(x, filler)
        return x

    def emit_clause(self, lhs: list[Concept], rhs_concept: Concept) -> None:
        """Clause form: conjunction of atoms entails the given NNF concept."""
        disjuncts = _flatten(rhs_concept, Or)
        lhs = list(lhs)
        rhs: list[Concept] = []
        complexes: list[Concept] = []
        for d in disjuncts:
            if isinstance(d, Top):
                return  # trivially true
            if isinstance(d, Bottom):
                continue
            if isinstance(d, _ATOMIC_POS) or isinstance(d, Nominal):
                rhs.append(d)
            elif isinstance(d, Not):
                s = d.sub
                if isinstance(s, Top):
                    continue
                if isinstance(s, Bottom):
                    return
                if isinstance(s, (ConceptName, Placeholder, Nominal)):
                    lhs.append(s)
                else:
                    raise InputError(f"not in negation normal form: {d}")
            else:
                complexes.append(d)
        if complexes:
            # a clause that needs definitions cannot keep raw nominals
            lhs = [
                self.nominal_name(a.individual) if isinstance(a, Nominal) else a
                for a in lhs
            ]
            rhs = [
                self.nominal_name(a.individual) if isinstance(a, Nominal) else a
                for a in rhs
            ]
        if (
            len(complexes) == 1
            and not rhs
            and len(lhs) == 1
            and isinstance(lhs[0], _ATOMIC_POS)
            and isinstance(complexes[0], (Forall, Exists))
        ):
            self.emit_guarded(lhs[0], complexes[0])
            return
        for d in complexes:
            x = self.fresh_concept()
            self.expand(x, d)
            rhs.append(x)
        self.finish_clause(lhs, rhs)

    def finish_clause(self, lhs: list[Concept], rhs: list[Concept]) -> None:
        if len(lhs) == 1 and len(rhs) == 1:
            l, r = lhs[0], rhs[0]
            if isinstance(l, _ATOMIC_POS) and isinstance(r, Nominal):
                self.out.append(GCI(l, r))
                return
            if isinstance(l, Nominal) and isinstance(r, _ATOMIC_POS):
                self.out.append(GCI(l, r))
                return
        lhs = [
            self.nominal_name(a.individual) if isinstance(a, Nominal) else a
            for a in lhs
        ]
        rhs = [
            self.nominal_name(a.individual) if isinstance(a, Nominal) else a
            for a in rhs
        ]
        self.out.append(
            GCI(_fold(lhs, And, TOP), _fold(rhs, Or, BOTTOM))
        )

    def emit_guarded(self, name: Concept, guarded: Concept) -> None:
        guard = self.guard_checked(guarded.guard)
        filler = self.atom_for_filler(guarded.filler)
        ctor = Forall if isinstance(guarded, Forall) else Exists
        self.out.append(GCI(name, ctor(guard, filler)))

    def expand(self, name: ConceptName, c: Concept) -> None:
        """Definitional expansion of name <= c for c in NNF."""
        if isinstance(c, Top):
            return
        if isinstance(c, And):
            self.expand(name, c.left)
            self.expand(name, c.right)
            return
        if isinstance(c, (Forall, Exists)):
            self.emit_guarded(name, c)
            return
        self.emit_clause([name], c)

    def run_axiom(self, ax: Axiom) -> None:
        before = len(self.out)
        self.current_fresh = []
        if isinstance(ax, Func):
            self.out.append(ax)
        elif isinstance(ax, GCI):
            if not isinstance(ax.lhs, Top):
                raise InputError("structural transformation expects top-level form")
            self.emit_clause([], ax.rhs)
        else:
            raise InputError(f"unexpected axiom at structural stage: {ax}")
        produced = tuple(self.out[before:])
        if produced != (ax,):
            self.trace.record(
                "structural-transform", ax, produced, tuple(self.current_fresh)
            )


def structural_transform(
    k: KnowledgeBase, trace: RewriteTrace | None = None
) -> KnowledgeBase:
    trace = trace if trace is not None else RewriteTrace()
    st = _StructuralTransform(k, trace)
    for ax in k.axioms:
        st.run_axiom(ax)
    sig = k.signature.extend(concepts=st.new_concepts)
    out = KnowledgeBase(sig, tuple(st.out), SIMPLIFIED)
    ok, diags = validate_simplified(out)
    if not ok:
        raise InputError("structural transformation missed shapes: " + "; ".join(diags))
    return out


# ---------------------------------------------------------------------------
# Validation and the full pipeline


def validate_simplified(k: KnowledgeBase) -> tuple[bool, list[str]]:
    """Shape check against the five simplified axiom forms."""
    diags: list[str] = []
    for ax in k.axioms:
        if isinstance(ax, TransAxiom):
            diags.append(f"transitivity axiom: {ax.role}")
            continue
        shape = classify_simplified(ax)
        if shape is None:
            diags.append(f"not a simplified shape: {ax}")
    return (not diags, diags)


def normalize_pipeline(k: KnowledgeBase) -> tuple[KnowledgeBase, RewriteTrace]:
    """internalize ABox -> NNF -> drop counting -> drop role hierarchy ->
    structural transformation.  The output passes the simplified validator."""
    trace = RewriteTrace()
    _reject_trans(k)
    k1 = internalize_abox(k, trace)
    k2 = to_nnf_form(k1, trace)
    k3 = eliminate_number_restrictions(k2, trace)
    k4 = eliminate_role_hierarchy(k3, trace)
    k5 = structural_transform(k4, trace)
    return k5, trace


def replay_trace(k: KnowledgeBase, trace: RewriteTrace) -> tuple[Axiom, ...]:
    """Re-apply the recorded rewrites to the input's axioms; the result must
    equal the pipeline output's axioms."""
    axioms = list(k.axioms)
    stages = ["internalize-abox", "nnf", "eliminate-number-restriction",
              "eliminate-role-inclusion", "structural-transform"]
    for stage in stages:
        entries = [e for e in trace.entries if e.rule == stage]
        new: list[Axiom] = []
        pos = 0
        for ax in axioms:
            if pos < len(entries) and entries[pos].consumed == ax:
                new.extend(entries[pos].produced)
                pos += 1
            else:
                new.append(ax)
        if pos != len(entries):
            raise InputError("trace does not replay against this input")
        axioms = new
    return tuple(axioms)
