"""Finite labelled transition systems and the Kleisli monoid on [S -> Pow S].

A labelled transition system maps each label to a nondeterministic successor
function on a finite state space.  Successor functions compose like
endomorphisms in the Kleisli category of the finite powerset monad; that
monoid structure is what every saturation construction in this package is
built from, so it lives here next to the system type itself.

All values are immutable after construction and all operations are pure.
State identifiers are opaque tokens; outputs are sorted lexicographically
wherever an order is observable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ValidationError

#: Reserved label name for the internal (silent) action.
TAU = "tau"


def _as_frozenset(xs):
    return xs if isinstance(xs, frozenset) else frozenset(xs)


@dataclass(frozen=True)
class Endo:
    """One element of [S -> Pow S]: a total map from states to successor sets.

    The map is total by construction (dead states carry an explicit empty
    set), so composition never has to consult partiality.
    """

    space: frozenset
    mapping: Mapping

    def __post_init__(self):
        object.__setattr__(self, "space", _as_frozenset(self.space))
        mapping = {s: _as_frozenset(v) for s, v in self.mapping.items()}
        object.__setattr__(self, "mapping", mapping)
        if set(mapping) != set(self.space):
            raise ValidationError("endo mapping must be total on its space")
        for s, succ in mapping.items():
            if not succ <= self.space:
                raise ValidationError(f"successors of {s!r} leave the space")

    @classmethod
    def of(cls, space, partial_mapping=None):
        """Build an Endo from a possibly-partial mapping, filling empty sets."""
        space = _as_frozenset(space)
        partial_mapping = partial_mapping or {}
        for s in partial_mapping:
            if s not in space:
                raise ValidationError(f"state {s!r} not in space")
        mapping = {s: frozenset(partial_mapping.get(s, ())) for s in space}
        return cls(space, mapping)

    def __call__(self, s):
        try:
            return self.mapping[s]
        except KeyError:
            raise ValidationError(f"state {s!r} not in space") from None


def kleisli_identity(space) -> Endo:
    """The unit of the Kleisli monoid: every state maps to its singleton."""
    space = _as_frozenset(space)
    return Endo(space, {s: frozenset({s}) for s in space})


def kleisli_compose(f: Endo, g: Endo) -> Endo:
    """Compose f then g: (f.g)(s) is the union of g over the successors f(s)."""
    if f.space != g.space:
        raise ValidationError("kleisli_compose needs endos on the same space")
    mapping = {}
    for s in f.space:
        out = set()
        for s1 in f.mapping[s]:
            out |= g.mapping[s1]
        mapping[s] = frozenset(out)
    return Endo(f.space, mapping)


def endo_leq(f: Endo, g: Endo) -> bool:
    """Pointwise inclusion of successor sets; False on a space mismatch."""
    if f.space != g.space:
        return False
    return all(f.mapping[s] <= g.mapping[s] for s in f.space)


@dataclass(frozen=True)
class Lts:
    """A finite labelled transition system.

    ``trans`` has one Endo per declared label; ``has_tau`` is derived from
    the reserved label name, so one system format serves both plain and
    internal-action systems.
    """

    states: frozenset
    labels: frozenset
    trans: Mapping

    def __post_init__(self):
        object.__setattr__(self, "states", _as_frozenset(self.states))
        object.__setattr__(self, "labels", _as_frozenset(self.labels))
        object.__setattr__(self, "trans", dict(self.trans))
        if set(self.trans) != set(self.labels):
            raise ValidationError("transition table must cover exactly the declared labels")
        for a, endo in self.trans.items():
            if not isinstance(endo, Endo):
                raise ValidationError(f"transition row for {a!r} is not an Endo")
            if endo.space != self.states:
                raise ValidationError(f"transition row for {a!r} lives on the wrong state space")

    @property
    def has_tau(self) -> bool:
        return TAU in self.labels

    @property
    def visible(self) -> frozenset:
        return self.labels - {TAU}


def _check_token(name, what):
    if not isinstance(name, str) or not name or any(c.isspace() for c in name):
        raise ValidationError(f"{what} {name!r} must be a non-empty token without whitespace")


def validate_lts(states: Iterable[str], labels: Iterable[str],
                 transitions: Iterable[tuple]) -> Lts:
    """Check a raw system description and build the Lts.

    Rejects duplicate state or label names, transitions on undeclared
    labels, and transitions touching undeclared states.
    """
    states = list(states)
    labels = list(labels)
    for s in states:
        _check_token(s, "state")
    for a in labels:
        _check_token(a, "label")
    if len(set(states)) != len(states):
        raise ValidationError("duplicate state names")
    if len(set(labels)) != len(labels):
        raise ValidationError("duplicate label names")
    state_set = frozenset(states)
    label_set = frozenset(labels)
    rows = {a: {s: set() for s in state_set} for a in label_set}
    for tr in transitions:
        try:
            src, a, dst = tr
        except (TypeError, ValueError):
            raise ValidationError(f"transition {tr!r} is not a (src, label, dst) triple") from None
        if src not in state_set:
            raise ValidationError(f"unknown state {src!r} in transition")
        if dst not in state_set:
            raise ValidationError(f"unknown state {dst!r} in transition")
        if a not in label_set:
            raise ValidationError(f"transition on undeclared label {a!r}")
        rows[a][src].add(dst)
    trans = {a: Endo(state_set, {s: frozenset(v) for s, v in rows[a].items()}) for a in label_set}
    return Lts(state_set, label_set, trans)


def successors(F: Lts, a, s) -> frozenset:
    """The set of states reachable from s in one a-step."""
    if a not in F.labels:
        raise ValidationError(f"label {a!r} not in alphabet")
    if s not in F.states:
        raise ValidationError(f"state {s!r} not in state space")
    return F.trans[a].mapping[s]


def apply_word(F: Lts, w: Iterable) -> Endo:
    """Extend transitions from letters to words: the fold of kleisli_compose.

    The empty word gives the Kleisli identity, so this is the monoid
    homomorphism from words under concatenation to endos under composition.
    """
    out = kleisli_identity(F.states)
    for a in w:
        if a not in F.labels:
            raise ValidationError(f"letter {a!r} not in alphabet")
        out = kleisli_compose(out, F.trans[a])
    return out


def ts_leq(F: Lts, G: Lts) -> bool:
    """Pointwise comparison of systems; False unless states and labels agree."""
    if F.states != G.states or F.labels != G.labels:
        return False
    return all(endo_leq(F.trans[a], G.trans[a]) for a in F.labels)


@dataclass(frozen=True)
class Relation:
    """A finite binary relation between two state spaces."""

    left: frozenset
    right: frozenset
    pairs: frozenset

    def __post_init__(self):
        object.__setattr__(self, "left", _as_frozenset(self.left))
        object.__setattr__(self, "right", _as_frozenset(self.right))
        object.__setattr__(self, "pairs", _as_frozenset(self.pairs))
        for p in self.pairs:
            if not (isinstance(p, tuple) and len(p) == 2):
                raise ValidationError(f"relation element {p!r} is not a pair")
            if p[0] not in self.left or p[1] not in self.right:
                raise ValidationError(f"pair {p!r} not contained in left x right")

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def row(self, s) -> frozenset:
        return frozenset(t for (x, t) in self.pairs if x == s)

    def col(self, t) -> frozenset:
        return frozenset(s for (s, y) in self.pairs if y == t)

    def converse(self) -> "Relation":
        return Relation(self.right, self.left, frozenset((t, s) for (s, t) in self.pairs))

    @classmethod
    def diagonal(cls, space) -> "Relation":
        space = _as_frozenset(space)
        return cls(space, space, frozenset((s, s) for s in space))

    @classmethod
    def full(cls, left, right) -> "Relation":
        left = _as_frozenset(left)
        right = _as_frozenset(right)
        return cls(left, right, frozenset((s, t) for s in left for t in right))
