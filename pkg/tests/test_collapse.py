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
    is_model,
    nom_free,
)
from dlentail.forest import (
    ForestAddress,
    ForestInterpretation,
    bcp_equiv,
    check_admissibility,
    collapse,
    factorize,
    iso_check,
    prune,
    unravel,
)
from dlentail.forest.collapse import Refusal
from forest_cases import (
    admissible_quasi_models,
    chain_merge_kb,
    chain_merge_quasi,
    single_merge_quasi,
)
from oracles import find_model


def test_collapse_single_merge_creates_self_loop():
    k, j = single_merge_quasi()
    out, trace = collapse(j, k)
    rho = ForestAddress("rho")
    assert out.elements == (rho,)
    assert out.nominal_map == {"o": rho}
    assert (rho, rho) in out.role_pairs(Role("r"))
    assert len(trace.steps) == 1 and trace.steps[0].case == 2


def test_collapse_no_starters_only_reinterprets():
    sig = Signature(("B",), ("r",), ("o",))
    k = KnowledgeBase(
        sig,
        (GCI(ConceptName("B"), Nominal("o")), GCI(Nominal("o"), ConceptName("B"))),
        SIMPLIFIED,
    )
    rho = ForestAddress("rho")
    c = rho.child(0)
    j = ForestInterpretation(
        elements=(rho, c),
        concept_ext={"B": frozenset({rho})},
        role_ext={"r": frozenset({(rho, c)})},
        placeholder_ext={"o": frozenset({rho})},
        quasi=True,
        strict=True,
    )
    out, trace = collapse(j, k)
    assert not trace.steps
    assert out.nominal_map == {"o": rho}
    assert set(out.elements) == {rho, c}


def test_collapse_chain_merge_sheds_functional_conflict():
    k = chain_merge_kb()
    j = chain_merge_quasi()
    out, trace = collapse(j, k)
    rho = ForestAddress("rho")
    # the deep o-node merged into the root; the root child with the f-edge
    # into the root was shed; the promoted chain start survives as a root
    assert out.nominal_map == {"o": rho}
    f = Role("f")
    preds = [a for (a, b) in out.role_pairs(f) if b == rho]
    assert len(preds) == 1 and preds[0].is_root()
    assert ForestAddress("rho", (1,)) not in out.elements
    cases = [s.case for s in trace.steps]
    assert cases == [1, 2]
    assert is_model(out, k)


def test_collapse_rejects_non_strict():
    k, j = single_merge_quasi()
    rho = ForestAddress("rho")
    c = rho.child(0)
    loose = ForestInterpretation(
        elements=(rho, c, c.child(0)),
        concept_ext=j.concept_ext,
        role_ext={"r": frozenset({(c.child(0), rho)})},
        placeholder_ext={"o": frozenset({rho, c})},
        quasi=True,
        strict=False,
    )
    with pytest.raises(InputError):
        collapse(loose, k)


def test_prune_identity_without_deletions():
    k = chain_merge_kb()
    rho = ForestAddress("rho")
    j = ForestInterpretation(
        elements=(rho,),
        concept_ext={"B": frozenset({rho})},
        role_ext={},
        placeholder_ext={"o": frozenset({rho})},
        quasi=True,
        strict=True,
    )
    p = prune(j, k)
    assert set(p.elements) == {rho}


def test_prune_keeps_focus_drops_subtree():
    k, j = single_merge_quasi()
    rho = ForestAddress("rho")
    c = rho.child(0)
    grand = c.child(0)
    bigger = ForestInterpretation(
        elements=(rho, c, grand),
        concept_ext={"B": frozenset({rho, c})},
        role_ext={"r": frozenset({(rho, c), (c, grand)})},
        placeholder_ext={"o": frozenset({rho, c})},
        quasi=True,
        strict=True,
    )
    p = prune(bigger, k)
    assert c in p.elements      # focus survives in the pruning
    assert grand not in p.elements  # its subtree does not
    assert p.pruned


def test_prune_is_substructure():
    for k, j in admissible_quasi_models(402, 20):
        p = prune(j, k)
        assert set(p.elements) <= set(j.elements)
        for r, pairs in p.role_ext.items():
            assert pairs <= j.role_ext.get(r, frozenset())


def test_factorize_singletons_is_copy():
    sig = Signature((), ("f",), ("o",))
    k = KnowledgeBase(sig, (Func(Role("f", True)),), SIMPLIFIED)
    rho = ForestAddress("rho")
    c = rho.child(0)
    j = ForestInterpretation(
        elements=(rho, c),
        concept_ext={},
        role_ext={"r": frozenset({(rho, c)})},
        placeholder_ext={"o": frozenset({rho})},
        quasi=True,
        strict=True,
    )
    m = factorize(j, k)
    assert len(m.elements) == 2
    assert len(m.role_ext["r"]) == 1
    assert m.nominal_map["o"] in m.roots()


def test_factorize_merges_same_sketch():
    k, j = single_merge_quasi()
    m = factorize(j, k)
    assert len(m.elements) == 1
    (e,) = m.elements
    assert m.nominal_map == {"o": e}
    assert (e, e) in m.role_pairs(Role("r"))


def test_factorize_rejects_split_placeholder():
    from dlentail.forest import NotFactorizableError

    sig = Signature((), (), ("o",))
    k = KnowledgeBase(sig, (), SIMPLIFIED)
    t1, t2 = ForestAddress("t1"), ForestAddress("t2")
    j = ForestInterpretation(
        elements=(t1, t2),
        placeholder_ext={"o": frozenset({t1, t2})},
        quasi=True,
        strict=True,
    )
    # both roots carry o, but compute equivalence over a structure where the
    # two occurrences are forced apart by dropping one side's sketch
    classes = [frozenset({t1}), frozenset({t2})]
    with pytest.raises(NotFactorizableError):
        factorize(j, k, equiv=classes)


def test_admissibility_of_unravelings():
    from helpers import random_simplified_kb

    rng = random.Random(23)
    checked = 0
    while checked < 15:
        k = random_simplified_kb(rng, nominals=("o",), n_axioms=rng.randint(1, 3))
        i = find_model(k, 2)
        if i is None:
            continue
        j, _ = unravel(i, k, depth=3)
        ch = check_admissibility(j, k)
        assert not isinstance(ch, Refusal)
        checked += 1


def test_admissibility_refusal_on_conflicting_witnesses():
    """Two same-sketch nodes whose only witnesses differ in concept labels."""
    sig = Signature(("A", "B", "C"), ("r", "f"), ("o",))
    k = KnowledgeBase(
        sig,
        (
            Func(Role("f", True)),
            GCI(ConceptName("A"), Exists(RoleLeaf(Role("r")), ConceptName("B"))),
        ),
        SIMPLIFIED,
    )
    t1, t2 = ForestAddress("t1"), ForestAddress("t2")
    c1, c2 = t1.child(0), t2.child(0)
    j = ForestInterpretation(
        elements=(t1, t2, c1, c2),
        concept_ext={
            "A": frozenset({t1, t2}),
            "B": frozenset({c1, c2}),
            "C": frozenset({c1}),
        },
        role_ext={"r": frozenset({(t1, c1), (t2, c2)})},
        placeholder_ext={"o": frozenset({t1, t2})},
        quasi=True,
        strict=True,
    )
    ch = check_admissibility(j, k)
    assert isinstance(ch, Refusal) and ch.condition == 2


def test_admissibility_trivial_without_existentials():
    k, j = single_merge_quasi()
    ch = check_admissibility(j, k)
    assert ch == {}


def test_collapse_is_model_on_generated_cases():
    for k, j in admissible_quasi_models(731, 30):
        out, _ = collapse(j, k)
        assert is_model(out, k), f"collapse output not a model for {k.axioms}"


def test_collapse_equals_factorized_pruning():
    for k, j in admissible_quasi_models(877, 30):
        out, _ = collapse(j, k)
        equiv_all = bcp_equiv(j, k)
        p = prune(j, k)
        kept = set(p.elements)
        equiv = [cls & kept for cls in equiv_all if cls & kept]
        m = factorize(p, k, equiv=[frozenset(c) for c in equiv])
        assert iso_check(out, m, mode="forest") is not None


def test_collapse_terminates_within_domain_size():
    for k, j in admissible_quasi_models(19, 25):
        _, trace = collapse(j, k)
        assert len(trace.steps) <= len(j.elements)
