"""Text formats: .dlkb knowledge bases, .dlq queries, .dli interpretations.

One s-expression grammar serves all three; a hand-rolled recursive-descent
reader keeps source spans for error messages.  Serialization is deterministic
so equal values produce byte-identical text.  Line comments start with ';'.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import (
    And,
    AtLeast,
    AtMost,
    Axiom,
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
    Interpretation,
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
    RoleOr,
    SameIndividual,
    Signature,
    SameIndividual as _Same,
    Top,
    TransAxiom,
)
from .forest import ForestAddress, ForestInterpretation
from .query import ConjunctiveQuery, ConceptAtom, RoleAtom, UnionQuery


@dataclass(frozen=True)
class SourceSpan:
    begin: int
    end: int
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class SyntaxErrorWithSpan(InputError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.span = span


@dataclass
class SAtom:
    text: str
    span: SourceSpan


@dataclass
class SList:
    items: list
    span: SourceSpan

    def head(self) -> str:
        if not self.items or not isinstance(self.items[0], SAtom):
            raise SyntaxErrorWithSpan("expected a tagged list", self.span)
        return self.items[0].text

    def args(self) -> list:
        return self.items[1:]


def tokenize(text: str):
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
        elif c in " \t\r":
            i += 1
            col += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            tokens.append((c, SourceSpan(i, i + 1, line, col)))
            i += 1
            col += 1
        elif c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise SyntaxErrorWithSpan(
                    "unterminated string", SourceSpan(i, n, line, col)
                )
            tokens.append(('"' + text[i + 1 : j], SourceSpan(i, j + 1, line, col)))
            col += j + 1 - i
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in ' \t\r\n();"':
                j += 1
            tokens.append((text[i:j], SourceSpan(i, j, line, col)))
            col += j - i
            i = j
    return tokens


def read_sexprs(text: str) -> list:
    tokens = tokenize(text)
    pos = 0

    def parse_one():
        nonlocal pos
        if pos >= len(tokens):
            raise SyntaxErrorWithSpan(
                "unexpected end of input", SourceSpan(len(text), len(text), 0, 0)
            )
        tok, span = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while True:
                if pos >= len(tokens):
                    raise SyntaxErrorWithSpan("missing )", span)
                if tokens[pos][0] == ")":
                    end = tokens[pos][1]
                    pos += 1
                    return SList(
                        items, SourceSpan(span.begin, end.end, span.line, span.column)
                    )
                items.append(parse_one())
        if tok == ")":
            raise SyntaxErrorWithSpan("unexpected )", span)
        return SAtom(tok, span)

    out = []
    while pos < len(tokens):
        out.append(parse_one())
    return out


def _single(text: str, what: str) -> SList:
    forms = read_sexprs(text)
    if len(forms) != 1 or not isinstance(forms[0], SList):
        raise InputError(f"expected exactly one ({what} ...) form")
    return forms[0]


# ---------------------------------------------------------------------------
# Roles, role expressions, concepts


def parse_role(x) -> Role:
    if isinstance(x, SAtom):
        return Role(x.text)
    if isinstance(x, SList) and x.head() == "inv":
        (arg,) = _expect_args(x, 1)
        return parse_role(arg).inv()
    raise SyntaxErrorWithSpan("expected a role", x.span)


def parse_role_expr(x) -> RoleExpr:
    if isinstance(x, SAtom):
        return RoleLeaf(Role(x.text))
    if isinstance(x, SList):
        head = x.head()
        if head == "inv":
            return RoleLeaf(parse_role(x))
        if head == "not":
            (arg,) = _expect_args(x, 1)
            return RoleNot(parse_role_expr(arg))
        if head in ("and", "or"):
            args = x.args()
            if len(args) < 2:
                raise SyntaxErrorWithSpan(f"{head} needs two or more parts", x.span)
            ctor = RoleAnd if head == "and" else RoleOr
            out = parse_role_expr(args[-1])
            for arg in reversed(args[:-1]):
                out = ctor(parse_role_expr(arg), out)
            return out
    raise SyntaxErrorWithSpan("expected a role expression", x.span)


def parse_concept(x) -> Concept:
    if isinstance(x, SAtom):
        if x.text == "top":
            return Top()
        if x.text == "bot":
            return Bottom()
        return ConceptName(x.text)
    if isinstance(x, SList):
        head = x.head()
        if head == "nom":
            (arg,) = _expect_args(x, 1)
            return Nominal(_atom_text(arg))
        if head == "ph":
            (arg,) = _expect_args(x, 1)
            return Placeholder(_atom_text(arg))
        if head == "not":
            (arg,) = _expect_args(x, 1)
            return Not(parse_concept(arg))
        if head in ("and", "or"):
            args = x.args()
            if len(args) < 2:
                raise SyntaxErrorWithSpan(f"{head} needs two or more parts", x.span)
            ctor = And if head == "and" else Or
            out = parse_concept(args[-1])
            for arg in reversed(args[:-1]):
                out = ctor(parse_concept(arg), out)
            return out
        if head in ("all", "some"):
            guard, filler = _expect_args(x, 2)
            ctor = Forall if head == "all" else Exists
            return ctor(parse_role_expr(guard), parse_concept(filler))
        if head in ("atmost", "atleast"):
            bound, role, filler = _expect_args(x, 3)
            n = _int_text(bound)
            ctor = AtMost if head == "atmost" else AtLeast
            return ctor(n, parse_role(role), parse_concept(filler))
    raise SyntaxErrorWithSpan("expected a concept", x.span)


def _expect_args(x: SList, n: int) -> list:
    args = x.args()
    if len(args) != n:
        raise SyntaxErrorWithSpan(
            f"{x.head()} takes {n} argument(s), got {len(args)}", x.span
        )
    return args


def _atom_text(x) -> str:
    if not isinstance(x, SAtom):
        raise SyntaxErrorWithSpan("expected a name", x.span)
    return x.text


def _int_text(x) -> int:
    try:
        return int(_atom_text(x))
    except ValueError:
        raise SyntaxErrorWithSpan("expected a number", x.span)


# ---------------------------------------------------------------------------
# Knowledge bases


def parse_kb(text: str) -> KnowledgeBase:
    form = _single(text, "kb")
    if form.head() != "kb":
        raise SyntaxErrorWithSpan("expected (kb ...)", form.span)
    axioms: list[Axiom] = []
    decl_concepts: list[str] = []
    decl_roles: list[str] = []
    decl_indivs: list[str] = []
    for item in form.args():
        if not isinstance(item, SList):
            raise SyntaxErrorWithSpan("expected an axiom form", item.span)
        head = item.head()
        if head == "signature":
            for group in item.args():
                if not isinstance(group, SList):
                    raise SyntaxErrorWithSpan("expected a declaration", group.span)
                names = [_atom_text(a) for a in group.args()]
                target = {
                    "concepts": decl_concepts,
                    "roles": decl_roles,
                    "individuals": decl_indivs,
                }.get(group.head())
                if target is None:
                    raise SyntaxErrorWithSpan(
                        f"unknown declaration {group.head()}", group.span
                    )
                for n in names:
                    if n in target:
                        raise SyntaxErrorWithSpan(f"duplicate declaration {n}", group.span)
                    target.append(n)
        elif head == "gci":
            lhs, rhs = _expect_args(item, 2)
            axioms.append(GCI(parse_concept(lhs), parse_concept(rhs)))
        elif head == "equiv":
            lhs, rhs = _expect_args(item, 2)
            cl, cr = parse_concept(lhs), parse_concept(rhs)
            axioms.append(GCI(cl, cr))
            axioms.append(GCI(cr, cl))
        elif head == "func":
            (arg,) = _expect_args(item, 1)
            axioms.append(Func(parse_role(arg)))
        elif head == "rincl":
            sub, sup = _expect_args(item, 2)
            axioms.append(RoleIncl(parse_role(sub), parse_role(sup)))
        elif head == "trans":
            (arg,) = _expect_args(item, 1)
            axioms.append(TransAxiom(parse_role(arg)))
        elif head == "inst":
            c, a = _expect_args(item, 2)
            axioms.append(ConceptAssertion(parse_concept(c), _atom_text(a)))
        elif head == "rel":
            ro, a, b = _expect_args(item, 3)
            axioms.append(RoleAssertion(parse_role(ro), _atom_text(a), _atom_text(b)))
        elif head == "nrel":
            ro, a, b = _expect_args(item, 3)
            axioms.append(
                NegRoleAssertion(parse_role(ro), _atom_text(a), _atom_text(b))
            )
        elif head == "same":
            a, b = _expect_args(item, 2)
            axioms.append(SameIndividual(_atom_text(a), _atom_text(b)))
        elif head == "diff":
            a, b = _expect_args(item, 2)
            axioms.append(DifferentIndividuals(_atom_text(a), _atom_text(b)))
        else:
            raise SyntaxErrorWithSpan(f"unknown axiom kind {head}", item.span)
    sig = _infer_signature(axioms, decl_concepts, decl_roles, decl_indivs)
    return KnowledgeBase(sig, tuple(axioms), RAW)


def _infer_signature(axioms, concepts, roles, indivs) -> Signature:
    cset, rset, iset = list(concepts), list(roles), list(indivs)

    def add(pool: list[str], name: str) -> None:
        if name not in pool:
            pool.append(name)

    def walk_expr(e: RoleExpr) -> None:
        from .core import roles_in_expr

        for ro in roles_in_expr(e):
            add(rset, ro.base)

    def walk(c: Concept) -> None:
        from .core import subconcepts

        for sc in subconcepts(c):
            if isinstance(sc, ConceptName):
                add(cset, sc.name)
            elif isinstance(sc, (Nominal, Placeholder)):
                add(iset, sc.individual)
            elif isinstance(sc, (Forall, Exists)):
                walk_expr(sc.guard)
            elif isinstance(sc, (AtMost, AtLeast)):
                add(rset, sc.role.base)

    for ax in axioms:
        if isinstance(ax, GCI):
            walk(ax.lhs)
            walk(ax.rhs)
        elif isinstance(ax, (Func, TransAxiom)):
            add(rset, ax.role.base)
        elif isinstance(ax, RoleIncl):
            add(rset, ax.sub.base)
            add(rset, ax.sup.base)
        elif isinstance(ax, ConceptAssertion):
            walk(ax.concept)
            add(iset, ax.individual)
        elif isinstance(ax, (RoleAssertion, NegRoleAssertion)):
            add(rset, ax.role.base)
            add(iset, ax.subject)
            add(iset, ax.object)
        elif isinstance(ax, (SameIndividual, DifferentIndividuals)):
            add(iset, ax.first)
            add(iset, ax.second)
    return Signature(tuple(cset), tuple(rset), tuple(iset))


# ---------------------------------------------------------------------------
# Queries


def parse_query(text: str) -> UnionQuery:
    form = _single(text, "ucq")
    if form.head() != "ucq":
        raise SyntaxErrorWithSpan("expected (ucq ...)", form.span)
    disjuncts: list[ConjunctiveQuery] = []
    answer_vars: tuple[str, ...] = ()
    constants: list[str] = []
    for item in form.args():
        if not isinstance(item, SList):
            raise SyntaxErrorWithSpan("expected (cq ...) or annotations", item.span)
        head = item.head()
        if head == "answer":
            answer_vars = tuple(_atom_text(a) for a in item.args())
        elif head == "individuals":
            constants.extend(_atom_text(a) for a in item.args())
        elif head == "cq":
            atoms = []
            for at in item.args():
                if not isinstance(at, SList):
                    raise SyntaxErrorWithSpan("expected an atom", at.span)
                if at.head() == "catom":
                    c, t = _expect_args(at, 2)
                    atoms.append(ConceptAtom(_atom_text(c), _atom_text(t)))
                elif at.head() == "ratom":
                    ro, t1, t2 = _expect_args(at, 3)
                    atoms.append(
                        RoleAtom(_atom_text(ro), _atom_text(t1), _atom_text(t2))
                    )
                else:
                    raise SyntaxErrorWithSpan(f"unknown atom {at.head()}", at.span)
            if not atoms:
                raise SyntaxErrorWithSpan("a disjunct needs at least one atom", item.span)
            disjuncts.append(ConjunctiveQuery(frozenset(atoms)))
        else:
            raise SyntaxErrorWithSpan(f"unknown query form {head}", item.span)
    if not disjuncts:
        raise SyntaxErrorWithSpan("a query needs at least one disjunct", form.span)
    return UnionQuery(tuple(disjuncts), answer_vars, frozenset(constants))


# ---------------------------------------------------------------------------
# Interpretations


def parse_interpretation(text: str):
    form = _single(text, "interp")
    if form.head() != "interp":
        raise SyntaxErrorWithSpan("expected (interp ...)", form.span)
    quasi = strict = False
    elements: list = []
    addresses: dict = {}
    concept_ext: dict[str, set] = {}
    role_ext: dict[str, set] = {}
    nominal_tags: dict[str, list] = {}
    frontier: set = set()
    edges: list[tuple[str, object, object, SourceSpan]] = []
    for item in form.args():
        if not isinstance(item, SList):
            raise SyntaxErrorWithSpan("expected a clause", item.span)
        head = item.head()
        if head == "quasi":
            quasi = True
        elif head == "strict":
            strict = True
        elif head == "elem":
            args = item.args()
            if not args:
                raise SyntaxErrorWithSpan("elem needs a name", item.span)
            name = _atom_text(args[0])
            if name in addresses or name in set(elements):
                raise SyntaxErrorWithSpan(f"duplicate element {name}", item.span)
            elements.append(name)
            for extra in args[1:]:
                if not isinstance(extra, SList):
                    raise SyntaxErrorWithSpan("expected an element clause", extra.span)
                ehead = extra.head()
                if ehead == "addr":
                    root, word = _expect_args(extra, 2)
                    addresses[name] = _parse_address(root, word)
                elif ehead == "in":
                    for c in extra.args():
                        concept_ext.setdefault(_atom_text(c), set()).add(name)
                elif ehead == "nominal":
                    for o in extra.args():
                        nominal_tags.setdefault(_atom_text(o), []).append(name)
                elif ehead == "frontier":
                    frontier.add(name)
                else:
                    raise SyntaxErrorWithSpan(f"unknown clause {ehead}", extra.span)
        elif head == "edge":
            ro, a, b = _expect_args(item, 3)
            edges.append((_atom_text(ro), _atom_text(a), _atom_text(b), item.span))
        else:
            raise SyntaxErrorWithSpan(f"unknown clause {head}", item.span)
    declared = set(elements)
    for ro, a, b, span in edges:
        for end in (a, b):
            if end not in declared:
                raise SyntaxErrorWithSpan(f"edge references undeclared {end}", span)
        role_ext.setdefault(ro, set()).add((a, b))
    if addresses:
        if set(addresses) != declared:
            missing = declared - set(addresses)
            raise SyntaxErrorWithSpan(
                f"mixed addressing: {sorted(missing)} lack addresses", form.span
            )
        return _build_forest(
            elements,
            addresses,
            concept_ext,
            role_ext,
            nominal_tags,
            quasi,
            strict,
            frontier,
        )
    nominal_map = {}
    placeholder_ext: dict[str, frozenset] = {}
    for o, tagged in nominal_tags.items():
        if quasi:
            placeholder_ext[o] = frozenset(tagged)
        else:
            if len(tagged) > 1:
                raise InputError(f"duplicate nominal assignment for {o}")
            nominal_map[o] = tagged[0]
    return Interpretation(
        tuple(elements),
        {c: frozenset(v) for c, v in concept_ext.items()},
        {ro: frozenset(v) for ro, v in role_ext.items()},
        nominal_map,
        placeholder_ext,
    )


def _parse_address(root, word) -> ForestAddress:
    root_name = _atom_text(root)
    wtext = _atom_text(word)
    if not wtext.startswith('"'):
        raise SyntaxErrorWithSpan('addresses are quoted, e.g. "0.1"', word.span)
    wtext = wtext[1:]
    if wtext == "":
        parts: tuple[int, ...] = ()
    else:
        try:
            parts = tuple(int(p) for p in wtext.split("."))
        except ValueError:
            raise SyntaxErrorWithSpan(f"bad address {wtext!r}", word.span)
    return ForestAddress(root_name, parts)


def _build_forest(
    elements, addresses, concept_ext, role_ext, nominal_tags, quasi, strict, frontier
) -> ForestInterpretation:
    by_name = addresses
    addr_elems = tuple(by_name[e] for e in elements)
    addr_of = by_name.__getitem__
    seen = set(addr_elems)
    if len(seen) != len(addr_elems):
        raise InputError("duplicate forest addresses")
    for a in addr_elems:
        if a.word and a.parent() not in seen:
            raise InputError(f"address {a} is not prefix-closed")
    conv_concepts = {
        c: frozenset(addr_of(e) for e in v) for c, v in concept_ext.items()
    }
    conv_roles = {
        ro: frozenset((addr_of(a), addr_of(b)) for (a, b) in v)
        for ro, v in role_ext.items()
    }
    nominal_map = {}
    placeholder_ext = {}
    for o, tagged in nominal_tags.items():
        if quasi:
            placeholder_ext[o] = frozenset(addr_of(e) for e in tagged)
        else:
            if len(tagged) > 1:
                raise InputError(f"duplicate nominal assignment for {o}")
            nominal_map[o] = addr_of(tagged[0])
    return ForestInterpretation(
        elements=addr_elems,
        concept_ext=conv_concepts,
        role_ext=conv_roles,
        nominal_map=nominal_map,
        placeholder_ext=placeholder_ext,
        quasi=quasi,
        strict=strict,
        frontier=frozenset(addr_of(e) for e in frontier),
    )


# ---------------------------------------------------------------------------
# Serialization


def serialize_role(ro: Role) -> str:
    return f"(inv {ro.base})" if ro.inverted else ro.base


def serialize_role_expr(e: RoleExpr) -> str:
    if isinstance(e, RoleLeaf):
        return serialize_role(e.role)
    if isinstance(e, RoleNot):
        return f"(not {serialize_role_expr(e.sub)})"
    if isinstance(e, RoleAnd):
        return f"(and {serialize_role_expr(e.left)} {serialize_role_expr(e.right)})"
    if isinstance(e, RoleOr):
        return f"(or {serialize_role_expr(e.left)} {serialize_role_expr(e.right)})"
    raise InputError(f"not a role expression: {e!r}")


def serialize_concept(c: Concept) -> str:
    if isinstance(c, Top):
        return "top"
    if isinstance(c, Bottom):
        return "bot"
    if isinstance(c, ConceptName):
        return c.name
    if isinstance(c, Nominal):
        return f"(nom {c.individual})"
    if isinstance(c, Placeholder):
        return f"(ph {c.individual})"
    if isinstance(c, Not):
        return f"(not {serialize_concept(c.sub)})"
    if isinstance(c, And):
        return f"(and {serialize_concept(c.left)} {serialize_concept(c.right)})"
    if isinstance(c, Or):
        return f"(or {serialize_concept(c.left)} {serialize_concept(c.right)})"
    if isinstance(c, Forall):
        return f"(all {serialize_role_expr(c.guard)} {serialize_concept(c.filler)})"
    if isinstance(c, Exists):
        return f"(some {serialize_role_expr(c.guard)} {serialize_concept(c.filler)})"
    if isinstance(c, AtMost):
        return f"(atmost {c.bound} {serialize_role(c.role)} {serialize_concept(c.filler)})"
    if isinstance(c, AtLeast):
        return f"(atleast {c.bound} {serialize_role(c.role)} {serialize_concept(c.filler)})"
    raise InputError(f"not a concept: {c!r}")


def serialize_axiom(ax: Axiom) -> str:
    if isinstance(ax, GCI):
        return f"(gci {serialize_concept(ax.lhs)} {serialize_concept(ax.rhs)})"
    if isinstance(ax, Func):
        return f"(func {serialize_role(ax.role)})"
    if isinstance(ax, RoleIncl):
        return f"(rincl {serialize_role(ax.sub)} {serialize_role(ax.sup)})"
    if isinstance(ax, TransAxiom):
        return f"(trans {serialize_role(ax.role)})"
    if isinstance(ax, ConceptAssertion):
        return f"(inst {serialize_concept(ax.concept)} {ax.individual})"
    if isinstance(ax, RoleAssertion):
        return f"(rel {serialize_role(ax.role)} {ax.subject} {ax.object})"
    if isinstance(ax, NegRoleAssertion):
        return f"(nrel {serialize_role(ax.role)} {ax.subject} {ax.object})"
    if isinstance(ax, SameIndividual):
        return f"(same {ax.first} {ax.second})"
    if isinstance(ax, DifferentIndividuals):
        return f"(diff {ax.first} {ax.second})"
    raise InputError(f"not an axiom: {ax!r}")


def serialize_kb(k: KnowledgeBase) -> str:
    lines = ["(kb"]
    sig = k.signature
    parts = []
    if sig.concept_names:
        parts.append("(concepts " + " ".join(sig.concept_names) + ")")
    if sig.role_names:
        parts.append("(roles " + " ".join(sig.role_names) + ")")
    if sig.individual_names:
        parts.append("(individuals " + " ".join(sig.individual_names) + ")")
    if parts:
        lines.append("  (signature " + " ".join(parts) + ")")
    for ax in k.axioms:
        lines.append("  " + serialize_axiom(ax))
    lines.append(")")
    return "\n".join(lines) + "\n"


def serialize_query(u: UnionQuery) -> str:
    lines = ["(ucq"]
    if u.answer_vars:
        lines.append("  (answer " + " ".join(u.answer_vars) + ")")
    if u.constants:
        lines.append("  (individuals " + " ".join(sorted(u.constants)) + ")")
    for cq in u.disjuncts:
        atoms = []
        for at in sorted(cq.atoms, key=str):
            if isinstance(at, ConceptAtom):
                atoms.append(f"(catom {at.concept} {at.term})")
            else:
                atoms.append(f"(ratom {at.role} {at.subject} {at.object})")
        lines.append("  (cq " + " ".join(atoms) + ")")
    lines.append(")")
    return "\n".join(lines) + "\n"


def _element_key(i: Interpretation):
    idx = i.order_index()
    return idx.__getitem__


def _element_names(i: Interpretation) -> dict:
    """Stable printable names for elements; forest addresses keep their
    structure, other ids are stringified."""
    names = {}
    used = set()
    for e in i.elements:
        if isinstance(e, ForestAddress):
            base = e.label()
        else:
            base = str(e)
        name = base
        n = 1
        while name in used:
            n += 1
            name = f"{base}#{n}"
        used.add(name)
        names[e] = name
    return names


def serialize_interpretation(i: Interpretation) -> str:
    names = _element_names(i)
    forest = isinstance(i, ForestInterpretation)
    lines = ["(interp"]
    if forest and i.quasi:
        lines.append("  (quasi)")
    if forest and i.strict:
        lines.append("  (strict)")
    tags: dict = {e: [] for e in i.elements}
    for c in sorted(i.concept_ext):
        for e in i.sorted_elements(i.concept_ext[c]):
            tags[e].append(("in", c))
    for o in sorted(i.nominal_map):
        tags[i.nominal_map[o]].append(("nominal", o))
    for o in sorted(i.placeholder_ext):
        for e in i.sorted_elements(i.placeholder_ext[o]):
            tags[e].append(("nominal", o))
    for e in i.elements:
        parts = [f"(elem {names[e]}"]
        if forest:
            word = ".".join(str(c) for c in e.word)
            parts.append(f'(addr {e.root} "{word}")')
        ins = [c for kind, c in tags[e] if kind == "in"]
        if ins:
            parts.append("(in " + " ".join(ins) + ")")
        noms = [o for kind, o in tags[e] if kind == "nominal"]
        for o in noms:
            parts.append(f"(nominal {o})")
        if forest and e in i.frontier:
            parts.append("(frontier)")
        lines.append("  " + " ".join(parts) + ")")
    key = _element_key(i)
    for ro in sorted(i.role_ext):
        for a, b in sorted(i.role_ext[ro], key=lambda p: (key(p[0]), key(p[1]))):
            lines.append(f"  (edge {ro} {names[a]} {names[b]})")
    lines.append(")")
    return "\n".join(lines) + "\n"


def dot_export(i: Interpretation) -> str:
    """Standard digraph description text: one node per element labeled with
    concept memberships and nominal tags, one edge per role pair."""
    names = _element_names(i)
    ids = {e: f"n{k}" for k, e in enumerate(i.elements)}
    lines = ["digraph interpretation {"]
    for e in i.elements:
        concepts = sorted(c for c, ext in i.concept_ext.items() if e in ext)
        noms = sorted(o for o, v in i.nominal_map.items() if v == e)
        noms += sorted(o for o, ext in i.placeholder_ext.items() if e in ext)
        label_parts = [names[e]]
        if concepts:
            label_parts.append(",".join(concepts))
        if noms:
            label_parts.append("{" + ",".join(noms) + "}")
        label = "\\n".join(label_parts)
        lines.append(f'  {ids[e]} [label="{label}"];')
    key = _element_key(i)
    for ro in sorted(i.role_ext):
        for a, b in sorted(i.role_ext[ro], key=lambda p: (key(p[0]), key(p[1]))):
            lines.append(f'  {ids[a]} -> {ids[b]} [label="{ro}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
