import random

import pytest

from dlentail.core import (
    ConceptName,
    Exists,
    Func,
    GCI,
    InputError,
    Interpretation,
    KnowledgeBase,
    Nominal,
    Role,
    RoleLeaf,
    SIMPLIFIED,
    Signature,
    all_locally_consistent,
    nom_free,
)
from dlentail.forest import (
    ForestAddress,
    ForestInterpretation,
    bcp_equiv,
    find_descending_bcps,
    iso_check,
    order_less,
    sketch_sets,
    unravel,
)
from dlentail.textio import parse_interpretation
from oracles import find_model


def loop_kb() -> KnowledgeBase:
    sig = Signature(("A",), ("r",), ("o",))
    return KnowledgeBase(
        sig,
        (
            GCI(ConceptName("A"), Nominal("o")),
            GCI(Nominal("o"), ConceptName("A")),
            GCI(ConceptName("A"), Exists(RoleLeaf(Role("r")), ConceptName("A"))),
        ),
        SIMPLIFIED,
    )


def loop_model() -> Interpretation:
    return Interpretation(
        ("d",),
        {"A": frozenset({"d"})},
        {"r": frozenset({("d", "d")})},
        {"o": "d"},
        {},
    )


def test_unravel_self_loop():
    j, tails = unravel(loop_model(), loop_kb(), depth=3)
    words = sorted(e.word for e in j.elements)
    assert words == [(), (0,), (0, 0), (0, 0, 0)]
    assert all(e in j.concept_members("A") for e in j.elements)
    assert all(e in j.placeholder_members("o") for e in j.elements)
    for e in j.elements:
        for s in j.successors(e):
            assert (e, s) in j.role_pairs(Role("r"))
            assert (s, e) in j.role_pairs(Role("r"))
    assert j.frontier == {ForestAddress("o", (0, 0, 0))}
    assert all(tails[e] == "d" for e in j.elements)
    assert j.quasi and j.strict


def test_unravel_requires_model():
    bad = Interpretation(("d",), {"A": frozenset()}, {}, {"o": "d"}, {})
    with pytest.raises(InputError):
        unravel(bad, loop_kb(), depth=2)


def test_unravel_roots_are_nominal_images():
    sig = Signature(("A", "B"), ("r",), ("o1", "o2"))
    k = KnowledgeBase(
        sig,
        (
            GCI(ConceptName("A"), Nominal("o1")),
            GCI(Nominal("o1"), ConceptName("A")),
            GCI(ConceptName("B"), Nominal("o2")),
            GCI(Nominal("o2"), ConceptName("B")),
        ),
        SIMPLIFIED,
    )
    i = Interpretation(
        ("x", "y", "z"),
        {"A": frozenset({"x"}), "B": frozenset({"y"})},
        {},
        {"o1": "x", "o2": "y"},
        {},
    )
    j, _ = unravel(i, k, depth=2)
    assert len(j.roots()) == 2
    labeling = j.root_labeling()
    assert set(labeling) == {"o1", "o2"}


def test_unravel_branching_bounded_by_axioms():
    rng = random.Random(17)
    from helpers import random_simplified_kb

    checked = 0
    while checked < 30:
        k = random_simplified_kb(
            rng, nominals=("o",), n_axioms=rng.randint(1, 4)
        )
        i = find_model(k, 2)
        if i is None or not k.nominals():
            continue
        j, _ = unravel(i, k, depth=3)
        m = len(k.axioms)
        for e in j.elements:
            assert len(j.successors(e)) <= m
        checked += 1


def test_unravel_is_strict_quasi_and_locally_consistent():
    j, _ = unravel(loop_model(), loop_kb(), depth=3)
    kq = nom_free(loop_kb())
    for e in j.elements:
        if e not in j.frontier:
            from dlentail.core import local_consistency

            assert local_consistency(j, e, kq).ok()
    # FQ2: every root tagged, every nominal at a root
    for o, root in j.root_labeling().items():
        assert root.is_root()
    assert all(j.node_tags(r) for r in j.roots())


def quasi_with_chain() -> tuple[KnowledgeBase, ForestInterpretation]:
    sig = Signature(("A",), ("f", "g"), ("o",))
    k = KnowledgeBase(
        sig,
        (
            GCI(ConceptName("A"), Nominal("o")),
            GCI(Nominal("o"), ConceptName("A")),
            Func(Role("f", True)),
        ),
        SIMPLIFIED,
    )
    text = (
        '(interp (quasi) (strict)'
        ' (elem r0 (addr rho "") (in A) (nominal o))'
        ' (elem n0 (addr rho "0"))'
        ' (elem n1 (addr rho "0.0") (in A) (nominal o))'
        ' (elem n2 (addr rho "1"))'
        ' (edge f n0 n1)'
        ' (edge g r0 n2))'
    )
    return k, parse_interpretation(text)


def test_descending_bcps():
    k, j = quasi_with_chain()
    rho = ForestAddress("rho")
    n0 = rho.child(0)
    n1 = n0.child(0)
    n2 = rho.child(1)
    assert [p.sketch() for p in find_descending_bcps(j, rho, k)] == [("o",)]
    assert [p.sketch() for p in find_descending_bcps(j, n0, k)] == [("f", "o")]
    assert [p.sketch() for p in find_descending_bcps(j, n1, k)] == [("o",)]
    assert find_descending_bcps(j, n2, k) == ()


def test_bcp_equiv_classes():
    k, j = quasi_with_chain()
    rho = ForestAddress("rho")
    n0 = rho.child(0)
    n1 = n0.child(0)
    n2 = rho.child(1)
    classes = {frozenset(c) for c in bcp_equiv(j, k)}
    assert frozenset({rho, n1}) in classes  # both carry sketch (o,)
    assert frozenset({n0}) in classes
    assert frozenset({n2}) in classes


def test_bcp_equiv_transitive_merge():
    """A node sharing one sketch with each of two others chains all three
    into one class (checked against a brute-force closure)."""
    sig = Signature((), ("f", "g"), ("o1", "o2"))
    k = KnowledgeBase(
        sig,
        (Func(Role("f", True)), Func(Role("g", True))),
        SIMPLIFIED,
    )
    text = (
        '(interp (quasi) (strict)'
        ' (elem r1 (addr t1 "") (nominal o1))'
        ' (elem r2 (addr t2 "") (nominal o2))'
        ' (elem a (addr t1 "0") (nominal o1))'
        ' (elem b (addr t1 "1") (nominal o1) (nominal o2))'
        ' (elem c (addr t2 "0") (nominal o2)))'
    )
    j = parse_interpretation(text)
    classes = bcp_equiv(j, k)
    sk = sketch_sets(j, k)
    # brute-force closure oracle
    import itertools

    pairs = {
        (x, y)
        for x, y in itertools.product(j.elements, repeat=2)
        if sk[x] & sk[y]
    }
    changed = True
    while changed:
        changed = False
        for x, y in itertools.product(j.elements, repeat=2):
            if (x, y) not in pairs and any(
                (x, z) in pairs and (z, y) in pairs for z in j.elements
            ):
                pairs.add((x, y))
                changed = True
    for cls in classes:
        for x in cls:
            for y in cls:
                assert (x, y) in pairs or x == y
    for x, y in pairs:
        cx = next(c for c in classes if x in c)
        assert y in cx


def test_order_less_clauses():
    k, j = quasi_with_chain()
    rho = ForestAddress("rho")
    n0 = rho.child(0)
    n1 = n0.child(0)
    n2 = rho.child(1)
    assert order_less(n0, n1, j)  # depth decides
    assert order_less(n0, n2, j)  # same depth, word order decides
    assert order_less(rho, n0, j)


def test_order_less_nominal_rank():
    sig = Signature((), (), ("o1", "o2"))
    text = (
        '(interp (quasi)'
        ' (elem r1 (addr t1 "") (nominal o2))'
        ' (elem r2 (addr t2 "") (nominal o1))'
        ' (elem a (addr t1 "0"))'
        ' (elem b (addr t2 "0")))'
    )
    j = parse_interpretation(text)
    a = ForestAddress("t1", (0,))
    b = ForestAddress("t2", (0,))
    # b's root carries the smaller nominal
    assert order_less(b, a, j, individual_order=("o1", "o2"))
    assert not order_less(a, b, j, individual_order=("o1", "o2"))


def test_order_error_untagged_root():
    text = '(interp (quasi) (elem r1 (addr t1 "")) (elem r2 (addr t2 "") (nominal o)))'
    j = parse_interpretation(text)
    with pytest.raises(InputError):
        order_less(ForestAddress("t1"), ForestAddress("t2"), j)


def test_iso_check_identity_and_permutation():
    k, j = quasi_with_chain()
    assert iso_check(j, j, mode="quasi") is not None
    # same shape with child indices swapped
    text = (
        '(interp (quasi) (strict)'
        ' (elem r0 (addr rho "") (in A) (nominal o))'
        ' (elem n0 (addr rho "7"))'
        ' (elem n1 (addr rho "7.3") (in A) (nominal o))'
        ' (elem n2 (addr rho "2"))'
        ' (edge f n0 n1)'
        ' (edge g r0 n2))'
    )
    other = parse_interpretation(text)
    phi = iso_check(j, other, mode="quasi")
    assert phi is not None
    assert phi[ForestAddress("rho", (0, 0))] == ForestAddress("rho", (7, 3))


def test_iso_check_detects_label_flip():
    k, j = quasi_with_chain()
    flipped = parse_interpretation(
        '(interp (quasi) (strict)'
        ' (elem r0 (addr rho "") (in A) (nominal o))'
        ' (elem n0 (addr rho "0") (in A))'
        ' (elem n1 (addr rho "0.0") (in A) (nominal o))'
        ' (elem n2 (addr rho "1"))'
        ' (edge f n0 n1)'
        ' (edge g r0 n2))'
    )
    assert iso_check(j, flipped, mode="quasi") is None


def test_iso_check_successor_matters():
    # same role graph, but one node hangs off a different parent
    a = parse_interpretation(
        '(interp (quasi)'
        ' (elem r0 (addr t "") (nominal o))'
        ' (elem x (addr t "0"))'
        ' (elem y (addr t "0.0"))'
        ' (edge r r0 x))'
    )
    b = parse_interpretation(
        '(interp (quasi)'
        ' (elem r0 (addr t "") (nominal o))'
        ' (elem x (addr t "0"))'
        ' (elem y (addr t "1"))'
        ' (edge r r0 x))'
    )
    assert iso_check(a, b, mode="quasi") is None
