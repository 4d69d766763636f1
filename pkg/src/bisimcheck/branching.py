"""Branching and semi-branching bisimulation over pair-valued saturations.

The saturations record (synchronisation point, successor) pairs: a row at
state s collects every pair reachable as an internal prefix followed by one
labelled step, plus a variant-specific internal-action case.  The logical
verdict route lifts a relation to sets of pairs with the full symmetric
Egli-Milner condition over the product relation.

For the semi-branching variant the two routes coincide.  For the branching
variant the lifted condition is strictly stronger than the clause
definition: a diagonal pair reached through a nonempty internal prefix can
appear in a left row with no partner available on the right, because the
branching rows only carry the stationary pair of their own start state
(the semi-branching rows carry every internally reachable diagonal, which
closes the gap).  See the pinned counterexample in the test suite.

The pair-valued function space also carries the composition of the
almost-monad (unit a -> {(a,a)}, multiplication by componentwise union),
which satisfies the left unit law but not the right one; the failure
witnesses live in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import ValidationError
from .lifting import pow_pair_related
from .lts import TAU, Lts, Relation, _as_frozenset
from .weak import tau_star


@dataclass(frozen=True)
class PairEndo:
    """A total map from states to finite sets of ordered state pairs."""

    space: frozenset
    mapping: Mapping

    def __post_init__(self):
        object.__setattr__(self, "space", _as_frozenset(self.space))
        mapping = {s: frozenset(v) for s, v in self.mapping.items()}
        object.__setattr__(self, "mapping", mapping)
        if set(mapping) != set(self.space):
            raise ValidationError("pair endo mapping must be total on its space")
        for s, pairs in mapping.items():
            for p in pairs:
                if not (isinstance(p, tuple) and len(p) == 2):
                    raise ValidationError(f"value {p!r} at {s!r} is not a pair")
                if p[0] not in self.space or p[1] not in self.space:
                    raise ValidationError(f"pair {p!r} at {s!r} leaves the space")

    def __call__(self, s):
        try:
            return self.mapping[s]
        except KeyError:
            raise ValidationError(f"state {s!r} not in space") from None


@dataclass(frozen=True)
class PairTs:
    """Label-indexed family of pair endos: the target of the saturations."""

    states: frozenset
    labels: frozenset
    rows: Mapping

    def __post_init__(self):
        object.__setattr__(self, "states", _as_frozenset(self.states))
        object.__setattr__(self, "labels", _as_frozenset(self.labels))
        object.__setattr__(self, "rows", dict(self.rows))
        if set(self.rows) != set(self.labels):
            raise ValidationError("rows must cover exactly the declared labels")
        for a, row in self.rows.items():
            if row.space != self.states:
                raise ValidationError(f"row for {a!r} lives on the wrong space")


VARIANTS = ("branching", "semibranching")


def branching_saturate(F: Lts, variant: str = "branching") -> PairTs:
    """Pair-valued saturation of F for the requested variant.

    Every row collects pairs (s1, s2) with an internal path s ->* s1 and a
    single a-step s1 -> s2.  On the internal label the branching variant
    adds the stationary pair (s, s); the semi-branching variant adds (s1, s1)
    for every internally reachable s1.
    """
    if variant not in VARIANTS:
        raise ValidationError(f"unknown variant {variant!r}")
    if not F.has_tau:
        raise ValidationError("system has no internal action in its alphabet")
    closure = tau_star(F).mapping
    rows = {}
    for a in F.labels:
        step = F.trans[a].mapping
        mapping = {}
        for s in F.states:
            pairs = {(s1, s2) for s1 in closure[s] for s2 in step[s1]}
            if a == TAU:
                if variant == "branching":
                    pairs.add((s, s))
                else:
                    pairs |= {(s1, s1) for s1 in closure[s]}
            mapping[s] = frozenset(pairs)
        rows[a] = PairEndo(F.states, mapping)
    return PairTs(F.states, F.labels, rows)


def _clause_ok(s, t, a, F, G, closure_g, pairs, variant) -> bool:
    """Left clause of the direct definitions for one pair, label and variant."""
    for s1 in F.trans[a].mapping[s]:
        found = any((s, t1) in pairs and (s1, t2) in pairs
                    for t1 in closure_g[t] for t2 in G.trans[a].mapping[t1])
        if not found and a == TAU:
            if variant == "branching":
                found = (s1, t) in pairs
            else:
                found = any((s, t1) in pairs and (s1, t1) in pairs for t1 in closure_g[t])
        if not found:
            return False
    return True


def _pair_ok(s, t, F, G, closure_f, closure_g, pairs, variant) -> bool:
    conv = frozenset((y, x) for (x, y) in pairs)
    for a in F.labels:
        if not _clause_ok(s, t, a, F, G, closure_g, pairs, variant):
            return False
        if not _clause_ok(t, s, a, G, F, closure_f, conv, variant):
            return False
    return True


def is_branching_bisimulation(R: Relation, F: Lts, G: Lts,
                              variant: str = "branching", method: str = "direct") -> bool:
    """Decide branching or semi-branching bisimulation, directly or logically.

    The direct route checks the matching clauses verbatim, including the
    variant-specific internal-action escape.  The logical route asks, per
    label and related pair, for the Egli-Milner condition between the
    saturation rows over the product relation.  The routes agree for the
    semi-branching variant; for the branching variant the logical route is
    strictly stronger (see the module docstring).
    """
    if variant not in VARIANTS:
        raise ValidationError(f"unknown variant {variant!r}")
    if F.labels != G.labels:
        raise ValidationError("systems must share an alphabet")
    if not F.has_tau:
        raise ValidationError("system has no internal action in its alphabet")
    if R.left != F.states or R.right != G.states:
        raise ValidationError("relation spaces must match the state spaces")
    if method == "direct":
        closure_f = tau_star(F).mapping
        closure_g = tau_star(G).mapping
        return all(_pair_ok(s, t, F, G, closure_f, closure_g, R.pairs, variant)
                   for (s, t) in R.pairs)
    if method == "logical":
        satF = branching_saturate(F, variant)
        satG = branching_saturate(G, variant)
        return all(pow_pair_related(satF.rows[a].mapping[s], satG.rows[a].mapping[t], R)
                   for a in sorted(F.labels) for (s, t) in sorted(R.pairs))
    raise ValidationError(f"unknown method {method!r}")


def greatest_branching_bisimulation(F: Lts, G: Lts, variant: str = "branching") -> Relation:
    """Largest relation accepted for the variant, by sweep refinement."""
    if variant not in VARIANTS:
        raise ValidationError(f"unknown variant {variant!r}")
    if F.labels != G.labels:
        raise ValidationError("systems must share an alphabet")
    if not F.has_tau:
        raise ValidationError("system has no internal action in its alphabet")
    closure_f = tau_star(F).mapping
    closure_g = tau_star(G).mapping
    pairs = {(s, t) for s in F.states for t in G.states}
    while True:
        frozen = frozenset(pairs)
        bad = {(s, t) for (s, t) in pairs
               if not _pair_ok(s, t, F, G, closure_f, closure_g, frozen, variant)}
        if not bad:
            break
        pairs -= bad
    return Relation(F.states, G.states, frozenset(pairs))


def am_eta(space, a) -> frozenset:
    """Unit of the almost-monad: the diagonal singleton {(a, a)}."""
    space = _as_frozenset(space)
    if a not in space:
        raise ValidationError(f"element {a!r} not in space")
    return frozenset({(a, a)})


def am_mu(U) -> frozenset:
    """Multiplication of the almost-monad: union over both components."""
    out = set()
    for (V, W) in U:
        out |= set(V)
        out |= set(W)
    return frozenset(out)


def am_unit(space) -> PairEndo:
    """The unit as a pair endo: every state maps to its diagonal singleton."""
    space = _as_frozenset(space)
    return PairEndo(space, {s: am_eta(space, s) for s in space})


def am_compose(f: PairEndo, g: PairEndo) -> PairEndo:
    """Kleisli-style composition induced by the almost-monad.

    (f.g)(a) unions g over both components of every pair in f(a); the unit
    is a left identity for this but not a right one.
    """
    if f.space != g.space:
        raise ValidationError("am_compose needs pair endos on the same space")
    mapping = {}
    for s in f.space:
        out = set()
        for (x, y) in f.mapping[s]:
            out |= g.mapping[x]
            out |= g.mapping[y]
        mapping[s] = frozenset(out)
    return PairEndo(f.space, mapping)


def pair_endo_leq(f: PairEndo, g: PairEndo) -> bool:
    """Pointwise inclusion of pair sets; False on a space mismatch."""
    if f.space != g.space:
        return False
    return all(f.mapping[s] <= g.mapping[s] for s in f.space)
