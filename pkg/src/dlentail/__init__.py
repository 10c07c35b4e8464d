"""Entailment of unions of conjunctive queries over ALCHOIQb knowledge bases.

The package dovetails two semi-procedures: enumeration and validation of
finitely represented countermodels, and a refutation-complete first-order
saturation loop.  Every model transformation the decision procedure rests on
(unraveling, collapsing, pruning, factorization, blocking, quentailment) is
exposed as an independently testable operation.
"""

__version__ = "0.1.0"
