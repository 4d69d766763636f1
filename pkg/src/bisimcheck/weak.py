"""Weak bisimulation by four routes: direct, derived words, saturation, lax systems.

The derived transition for a visible word interleaves the reflexive-
transitive closure of the internal action around each letter.  Saturation
rebuilds the system so that weak bisimulation becomes strong bisimulation of
the results; laxification presents the same data without any internal label.

A lax system is stored by generators (the epsilon endo and one endo per
visible letter).  The generator invariants checked by validate_lax --
identity below epsilon, epsilon idempotent, epsilon absorbed on both sides
of every letter -- imply the word-level laws: reflexivity is the first
invariant, and for composition any split of a word either concatenates two
letter folds directly or peels an empty factor, which absorption and
idempotence cancel.  That reduction is what makes validation finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ValidationError
from .lifting import fun_lift_related, pow_related
from .lts import TAU, Endo, Lts, Relation, endo_leq, kleisli_compose, kleisli_identity
from .strong import greatest_strong_bisimulation, is_strong_bisimulation


def hat(w: Iterable) -> tuple:
    """Delete every occurrence of the internal action from a word."""
    return tuple(a for a in w if a != TAU)


def _require_tau(F: Lts):
    if not F.has_tau:
        raise ValidationError("system has no internal action in its alphabet")


def tau_star(F: Lts) -> Endo:
    """Reflexive-transitive closure of the internal-action component."""
    _require_tau(F)
    step = F.trans[TAU].mapping
    mapping = {}
    for s in F.states:
        seen = {s}
        frontier = [s]
        while frontier:
            x = frontier.pop()
            for y in step[x]:
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        mapping[s] = frozenset(seen)
    return Endo(F.states, mapping)


def derived_transitions(F: Lts, v: Iterable) -> Endo:
    """Transitions of the derived system for a visible word.

    For v = a1...ak this is closure.a1.closure...ak.closure; the empty word
    gives the closure itself.  Equivalent to quantifying over all words that
    erase to v, but terminating.
    """
    closure = tau_star(F)
    out = closure
    for a in v:
        if a == TAU:
            raise ValidationError("derived transitions take words without the internal action")
        if a not in F.labels:
            raise ValidationError(f"letter {a!r} not in alphabet")
        out = kleisli_compose(kleisli_compose(out, F.trans[a]), closure)
    return out


def saturate(F: Lts) -> Lts:
    """Least saturated system above F.

    The internal row becomes its reflexive-transitive closure and every
    visible row is wrapped in that closure on both sides.
    """
    closure = tau_star(F)
    trans = {TAU: closure}
    for a in F.visible:
        trans[a] = kleisli_compose(kleisli_compose(closure, F.trans[a]), closure)
    return Lts(F.states, F.labels, trans)


def is_saturated(F: Lts) -> bool:
    """Identity below the internal row, internal row transitively closed,
    and every visible row absorbing the internal row on both sides."""
    _require_tau(F)
    ident = kleisli_identity(F.states)
    ftau = F.trans[TAU]
    if not endo_leq(ident, ftau):
        return False
    if not endo_leq(kleisli_compose(ftau, ftau), ftau):
        return False
    for a in F.visible:
        fa = F.trans[a]
        if not endo_leq(kleisli_compose(kleisli_compose(ftau, fa), ftau), fa):
            return False
    return True


@dataclass(frozen=True)
class LaxLts:
    """Generator form of a lax transition system over visible words.

    Holds the epsilon endo and one endo per visible letter; longer words are
    recovered by lax_apply.  Structural shape is validated here, the
    algebraic generator laws by validate_lax.
    """

    states: frozenset
    visible: frozenset
    eps: Endo
    letters: Mapping

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "visible", frozenset(self.visible))
        object.__setattr__(self, "letters", dict(self.letters))
        if TAU in self.visible:
            raise ValidationError("visible alphabet must not contain the internal action")
        if self.eps.space != self.states:
            raise ValidationError("epsilon endo lives on the wrong space")
        if set(self.letters) != set(self.visible):
            raise ValidationError("letter table must cover exactly the visible alphabet")
        for a, endo in self.letters.items():
            if endo.space != self.states:
                raise ValidationError(f"letter row for {a!r} lives on the wrong space")


def laxify(F: Lts) -> LaxLts:
    """Present a system with internal action as a lax system over visible words."""
    closure = tau_star(F)
    letters = {a: kleisli_compose(kleisli_compose(closure, F.trans[a]), closure)
               for a in F.visible}
    return LaxLts(F.states, F.visible, closure, letters)


def lax_apply(Lx: LaxLts, v: Iterable) -> Endo:
    """Evaluate a lax system on a visible word: epsilon for the empty word,
    otherwise the fold of the letter endos."""
    v = tuple(v)
    for a in v:
        if a not in Lx.visible:
            raise ValidationError(f"letter {a!r} not in the visible alphabet")
    if not v:
        return Lx.eps
    out = Lx.letters[v[0]]
    for a in v[1:]:
        out = kleisli_compose(out, Lx.letters[a])
    return out


def validate_lax(Lx: LaxLts) -> bool:
    """Check the three generator invariants of a lax system."""
    ident = kleisli_identity(Lx.states)
    if not endo_leq(ident, Lx.eps):
        return False
    if kleisli_compose(Lx.eps, Lx.eps) != Lx.eps:
        return False
    for f in Lx.letters.values():
        if kleisli_compose(Lx.eps, f) != f or kleisli_compose(f, Lx.eps) != f:
            return False
    return True


def inner(Lx: LaxLts) -> Lts:
    """Reintroduce the internal action: epsilon becomes the internal row."""
    trans = {TAU: Lx.eps}
    trans.update(Lx.letters)
    return Lts(Lx.states, Lx.visible | {TAU}, trans)


WEAK_METHODS = ("direct", "derived", "saturation", "lax")


def is_weak_bisimulation(R: Relation, F: Lts, G: Lts, method: str = "direct") -> bool:
    """Decide whether R is a weak bisimulation, by the requested route.

    direct:     single steps on one side matched by derived transitions of
                the erased letter on the other;
    derived:    both sides quantified over derived one-letter transitions;
    saturation: strong bisimulation of the saturated systems;
    lax:        the lax presentations related at epsilon and at each letter.
    All four agree on every input.
    """
    if F.labels != G.labels:
        raise ValidationError("systems must share an alphabet")
    _require_tau(F)
    if R.left != F.states or R.right != G.states:
        raise ValidationError("relation spaces must match the state spaces")

    if method == "direct" or method == "derived":
        dF = {a: derived_transitions(F, hat((a,))) for a in F.labels}
        dG = {a: derived_transitions(G, hat((a,))) for a in F.labels}
        for (s, t) in R.pairs:
            for a in F.labels:
                left_moves = F.trans[a].mapping[s] if method == "direct" else dF[a].mapping[s]
                right_moves = G.trans[a].mapping[t] if method == "direct" else dG[a].mapping[t]
                for s1 in left_moves:
                    if not any((s1, t1) in R.pairs for t1 in dG[a].mapping[t]):
                        return False
                for t1 in right_moves:
                    if not any((s1, t1) in R.pairs for s1 in dF[a].mapping[s]):
                        return False
        return True
    if method == "saturation":
        return is_strong_bisimulation(R, saturate(F), saturate(G), method="direct")
    if method == "lax":
        LxF = laxify(F)
        LxG = laxify(G)
        words = [()] + [(a,) for a in sorted(F.visible)]
        return all(fun_lift_related(lax_apply(LxF, v).mapping, lax_apply(LxG, v).mapping,
                                    R, lambda U, V: pow_related(U, V, R))
                   for v in words)
    raise ValidationError(f"unknown method {method!r}")


def greatest_weak_bisimulation(F: Lts, G: Lts) -> Relation:
    """Largest weak bisimulation, computed on the saturations."""
    _require_tau(F)
    _require_tau(G)
    return greatest_strong_bisimulation(saturate(F), saturate(G))
