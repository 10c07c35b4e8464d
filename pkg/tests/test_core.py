import random

import pytest

from dlentail.core import (
    And,
    AtLeast,
    AtMost,
    Bottom,
    ConceptName,
    DialectError,
    Exists,
    Forall,
    Func,
    GCI,
    Interpretation,
    KnowledgeBase,
    MissingNominalError,
    Nominal,
    Not,
    Or,
    Role,
    RoleAnd,
    RoleLeaf,
    RoleNot,
    RoleOr,
    SIMPLIFIED,
    Signature,
    Top,
    all_locally_consistent,
    closure,
    eval_concept,
    eval_role_expr,
    is_model,
    is_safe,
    is_safe_dnf,
    local_consistency,
    nnf,
    nominal_assignment_total,
    role_set_entails,
)
from helpers import (
    all_interpretations,
    all_role_exprs,
    random_concept,
    random_interpretation,
    random_simplified_kb,
)

A, B = ConceptName("A"), ConceptName("B")
r, s, f = Role("r"), Role("s"), Role("f")


def test_role_set_entails_examples():
    assert role_set_entails({r}, RoleAnd(RoleLeaf(r), RoleNot(RoleLeaf(s))))
    assert role_set_entails(set(), RoleNot(RoleLeaf(r)))
    assert not role_set_entails({s}, RoleOr(RoleLeaf(r), RoleNot(RoleLeaf(s))))


def test_is_safe_examples():
    assert is_safe(RoleAnd(RoleLeaf(r), RoleNot(RoleLeaf(s))))
    assert not is_safe(RoleNot(RoleLeaf(r)))
    assert not is_safe(RoleOr(RoleLeaf(r), RoleNot(RoleLeaf(s))))


def test_safe_iff_dnf_characterization():
    # exhaustive over all expressions of depth <= 3 over two roles
    count = 0
    for expr in all_role_exprs([r, s], 3):
        assert is_safe(expr) == is_safe_dnf(expr)
        count += 1
    assert count > 1000


def test_role_inverse_involution():
    assert r.inv().inv() == r


def test_nnf_examples():
    assert nnf(Not(And(A, B))) == Or(Not(A), Not(B))
    u = RoleLeaf(r)
    assert nnf(Not(Exists(u, A))) == Forall(u, Not(A))
    assert nnf(Not(AtMost(2, s, ConceptName("C")))) == AtLeast(
        3, s, ConceptName("C")
    )
    assert nnf(Not(AtLeast(0, s, A))) == Bottom()


def test_closure_single_gci():
    k = KnowledgeBase(Signature(("A", "B"), (), ()), (GCI(A, B),))
    expected = {Or(Not(A), B), Not(A), A, B, Not(B), And(A, Not(B))}
    assert closure(k) == expected


def test_closure_empty():
    k = KnowledgeBase(Signature(), ())
    assert closure(k) == set()


def test_closure_existential():
    k = KnowledgeBase(Signature(("A", "B"), ("r",), ()), (GCI(A, Exists(RoleLeaf(r), B)),))
    cl = closure(k)
    assert Exists(RoleLeaf(r), B) in cl
    assert Forall(RoleLeaf(r), Not(B)) in cl


def three_cycle() -> Interpretation:
    return Interpretation(
        (0, 1, 2),
        {"A": frozenset({0})},
        {"s": frozenset({(0, 1), (1, 2), (2, 0)})},
        {},
        {},
    )


def test_eval_concept_examples():
    i = three_cycle()
    assert eval_concept(i, Exists(RoleLeaf(s), Top())) == frozenset({0, 1, 2})
    assert eval_concept(i, Top()) == frozenset({0, 1, 2})
    assert eval_concept(i, Not(A)) == frozenset({1, 2})


def test_eval_missing_nominal():
    i = three_cycle()
    with pytest.raises(MissingNominalError):
        eval_concept(i, Nominal("o"))


def test_eval_inverse_and_negated_guards():
    i = three_cycle()
    # through s- the cycle runs backwards
    assert eval_role_expr(i, RoleLeaf(s.inv())) == frozenset(
        {(1, 0), (2, 1), (0, 2)}
    )
    # negated role covers every pair not in s
    neg = eval_role_expr(i, RoleNot(RoleLeaf(s)))
    assert (0, 1) not in neg and (1, 0) in neg and (0, 0) in neg


def test_counting_semantics():
    i = Interpretation(
        (0, 1, 2),
        {"A": frozenset({1, 2})},
        {"r": frozenset({(0, 1), (0, 2)})},
        {},
        {},
    )
    assert eval_concept(i, AtLeast(2, r, A)) == frozenset({0})
    assert eval_concept(i, AtMost(1, r, A)) == frozenset({1, 2})
    assert eval_concept(i, AtMost(2, r, A)) == frozenset({0, 1, 2})


def test_is_model_trivial():
    sig = Signature(("A",), (), ())
    i = Interpretation((0,), {"A": frozenset({0})}, {}, {}, {})
    assert is_model(i, KnowledgeBase(sig, (GCI(A, A),)))


def test_is_model_func_violation():
    sig = Signature((), ("f",), ())
    i = Interpretation(
        (0, 1, 2), {}, {"f": frozenset({(0, 1), (0, 2)})}, {}, {}
    )
    assert not is_model(i, KnowledgeBase(sig, (Func(f),)))


def fig1_kb() -> KnowledgeBase:
    """Three nominals tied into a cycle through functional f and role s."""
    sig = Signature((), ("f", "s"), ("o1", "o2", "o3"))
    axioms = [Func(f)]
    for a, b in (("o1", "o2"), ("o2", "o3"), ("o3", "o1")):
        chain = Exists(
            RoleLeaf(f), Exists(RoleLeaf(s), Exists(RoleLeaf(f.inv()), Nominal(b)))
        )
        axioms.append(GCI(Nominal(a), chain))
    return KnowledgeBase(sig, tuple(axioms))


def test_is_model_cycle_construction():
    # six elements: the three nominal roots plus the forced s-cycle
    i = Interpretation(
        ("o1", "o2", "o3", "e1", "e2", "e3"),
        {},
        {
            "f": frozenset({("o1", "e1"), ("o2", "e2"), ("o3", "e3")}),
            "s": frozenset({("e1", "e2"), ("e2", "e3"), ("e3", "e1")}),
        },
        {"o1": "o1", "o2": "o2", "o3": "o3"},
        {},
    )
    assert is_model(i, fig1_kb())


def test_local_consistency_examples():
    sig = Signature(("A", "B"), ("r",), ())
    k = KnowledgeBase(
        sig, (GCI(A, Exists(RoleLeaf(r), B)),), dialect=SIMPLIFIED
    )
    i = Interpretation((0, 1), {"A": frozenset({0})}, {}, {}, {})
    report = local_consistency(i, 0, k)
    assert not report.ok() and len(report.violations) == 1
    assert local_consistency(i, 1, k).ok()


def test_local_consistency_requires_simplified():
    k = KnowledgeBase(Signature(("A",), (), ()), (GCI(A, A),))
    i = Interpretation((0,), {}, {}, {}, {})
    with pytest.raises(DialectError):
        local_consistency(i, 0, k)


def test_local_vs_global_nominal_free_exhaustive():
    """Model checking and element-wise local checking agree on every small
    interpretation for simplified nominal-free knowledge bases."""
    sig = Signature(("A", "B"), ("r",), ())
    kbs = [
        KnowledgeBase(sig, (GCI(A, B),), dialect=SIMPLIFIED),
        KnowledgeBase(
            sig, (GCI(A, Exists(RoleLeaf(r), B)), Func(r)), dialect=SIMPLIFIED
        ),
        KnowledgeBase(
            sig,
            (GCI(Top(), Or(A, B)), GCI(A, Forall(RoleLeaf(r), B))),
            dialect=SIMPLIFIED,
        ),
    ]
    for k in kbs:
        for i in all_interpretations(2, ("A", "B"), ("r",)):
            assert is_model(i, k) == all_locally_consistent(i, k)


def test_local_vs_global_with_nominals():
    sig = Signature(("A",), (), ("o",))
    k = KnowledgeBase(
        sig, (GCI(A, Nominal("o")), GCI(Nominal("o"), A)), dialect=SIMPLIFIED
    )
    for i in all_interpretations(2, ("A",), (), nominals=("o",)):
        both = all_locally_consistent(i, k) and nominal_assignment_total(i, k)
        assert is_model(i, k) == both


def test_nnf_complement_property():
    rng = random.Random(7)
    roles = [r, s]
    for _ in range(300):
        i = random_interpretation(rng, rng.randint(1, 4), ("A", "B"), ("r", "s"))
        c = random_concept(rng, ("A", "B"), roles, rng.randint(0, 3))
        full = frozenset(i.elements)
        assert eval_concept(i, nnf(Not(c))) == full - eval_concept(i, c)
        assert eval_concept(i, nnf(c)) == eval_concept(i, c)


def test_edge_labels_match_safe_extension():
    """For safe expressions, an edge is in the extension exactly when its
    label set entails the expression."""
    rng = random.Random(11)
    roles = [r, s, r.inv(), s.inv()]
    for _ in range(100):
        i = random_interpretation(rng, rng.randint(1, 3), (), ("r", "s"))
        for expr in all_role_exprs([r, s], 1):
            if not is_safe(expr):
                continue
            ext = eval_role_expr(i, expr)
            for a in i.elements:
                for b in i.elements:
                    labels = i.edge_roles(a, b, roles)
                    assert ((a, b) in ext) == role_set_entails(labels, expr)


def test_random_simplified_kbs_classify():
    rng = random.Random(3)
    for _ in range(50):
        k = random_simplified_kb(rng, nominals=("o",))
        from dlentail.core import classify_simplified

        for ax in k.axioms:
            assert classify_simplified(ax) is not None


def test_signature_disjointness():
    from dlentail.core import InputError

    with pytest.raises(InputError):
        Signature(("A",), ("A",), ())
    with pytest.raises(InputError):
        Signature(("A", "A"), (), ())
