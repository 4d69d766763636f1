"""Logical-relation liftings: function spaces, powersets, products, pair powersets.

Lifted relations are exposed as membership predicates rather than
materialized sets; the one exception is pow_image_pairs, the deliberately
brute-force image-factorization oracle used to cross-check the Egli-Milner
predicate.
"""

from __future__ import annotations

from typing import Callable, Mapping

from .errors import GuardExceeded, ValidationError
from .lts import Relation

#: Ceiling on subset enumeration in pow_image_pairs (2**20 iterations).
IMAGE_PAIRS_GUARD = 20


def pow_related(U, V, R: Relation) -> bool:
    """Egli-Milner lifting of R to sets.

    True iff every element of U has an R-partner in V and every element of
    V has an R-partner in U.
    """
    U = frozenset(U)
    V = frozenset(V)
    if not U <= R.left:
        raise ValidationError("U contains elements outside the left space")
    if not V <= R.right:
        raise ValidationError("V contains elements outside the right space")
    pairs = R.pairs
    for u in U:
        if not any((u, v) in pairs for v in V):
            return False
    for v in V:
        if not any((u, v) in pairs for u in U):
            return False
    return True


def pow_image_pairs(R: Relation) -> frozenset:
    """All componentwise projections of subsets of R, enumerated explicitly.

    This materializes the image-factorized powerset lifting: the set of
    (projection-left, projection-right) pairs over every subset of R.
    Exponential in |R|, hence the guard.
    """
    pairs = sorted(R.pairs)
    if len(pairs) > IMAGE_PAIRS_GUARD:
        raise GuardExceeded(f"pow_image_pairs limited to {IMAGE_PAIRS_GUARD} pairs, got {len(pairs)}")
    out = set()
    for mask in range(1 << len(pairs)):
        chosen = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        out.add((frozenset(p[0] for p in chosen), frozenset(p[1] for p in chosen)))
    return frozenset(out)


def _apply(h, x, name):
    if isinstance(h, Mapping):
        if x not in h:
            raise ValidationError(f"{name} is partial: no value at {x!r}")
        return h[x]
    return h(x)


def fun_lift_related(f, g, R0: Relation, related: Callable) -> bool:
    """Function-space lifting: (f, g) is in [R0 -> R1].

    True iff for every pair (s, t) in R0 the images f(s) and g(t) satisfy
    the codomain predicate ``related``.  Passing the codomain as a predicate
    lets Pow-lifted and pair-lifted codomains plug in without materializing
    them.
    """
    if isinstance(f, Mapping) and not set(R0.left) <= set(f):
        raise ValidationError("f is partial on the left space")
    if isinstance(g, Mapping) and not set(R0.right) <= set(g):
        raise ValidationError("g is partial on the right space")
    for (s, t) in sorted(R0.pairs):
        if not related(_apply(f, s, "f"), _apply(g, t, "g")):
            return False
    return True


def product_relation(R0: Relation, R1: Relation) -> Relation:
    """Componentwise product: ((s0,s1),(t0,t1)) related iff s0 R0 t0 and s1 R1 t1."""
    left = frozenset((s0, s1) for s0 in R0.left for s1 in R1.left)
    right = frozenset((t0, t1) for t0 in R0.right for t1 in R1.right)
    pairs = frozenset(((s0, s1), (t0, t1))
                      for (s0, t0) in R0.pairs for (s1, t1) in R1.pairs)
    return Relation(left, right, pairs)


def pow_pair_related(U, V, R: Relation) -> bool:
    """Egli-Milner lifting over the product relation R x R, on sets of pairs.

    U and V collect ordered state pairs; both directions of the lifting are
    required, matching pow_related applied to product_relation(R, R).
    """
    U = frozenset(U)
    V = frozenset(V)
    for (s1, s2) in U:
        if s1 not in R.left or s2 not in R.left:
            raise ValidationError(f"pair {(s1, s2)!r} not over the left space")
    for (t1, t2) in V:
        if t1 not in R.right or t2 not in R.right:
            raise ValidationError(f"pair {(t1, t2)!r} not over the right space")
    pairs = R.pairs
    for (s1, s2) in U:
        if not any((s1, t1) in pairs and (s2, t2) in pairs for (t1, t2) in V):
            return False
    for (t1, t2) in V:
        if not any((s1, t1) in pairs and (s2, t2) in pairs for (s1, s2) in U):
            return False
    return True
