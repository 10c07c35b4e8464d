"""Forest structures and the model transformations built on them."""

from .structures import (
    CountingPath,
    ForestAddress,
    ForestInterpretation,
    bcp_equiv,
    find_descending_bcps,
    iso_check,
    order_key,
    order_less,
    pair_isomorphic,
    sketch_sets,
)
from .unravel import TailMap, unravel
from .collapse import (
    CollapseTrace,
    NotFactorizableError,
    Refusal,
    check_admissibility,
    collapse,
    factorize,
    prune,
)
from .quentail import (
    AnchoredComponent,
    QuentailResult,
    QuentailWitness,
    TailVerdict,
    quentails,
    tail_verify,
    verify_quentailment,
)

__all__ = [
    "AnchoredComponent",
    "CollapseTrace",
    "CountingPath",
    "ForestAddress",
    "ForestInterpretation",
    "NotFactorizableError",
    "QuentailResult",
    "QuentailWitness",
    "Refusal",
    "TailMap",
    "TailVerdict",
    "bcp_equiv",
    "check_admissibility",
    "collapse",
    "factorize",
    "find_descending_bcps",
    "iso_check",
    "order_key",
    "order_less",
    "pair_isomorphic",
    "prune",
    "quentails",
    "sketch_sets",
    "tail_verify",
    "unravel",
    "verify_quentailment",
]
