"""Finite measurable spaces, sub-probability kernels, and probabilistic bisimulation.

A finite sigma-algebra is stored as its partition into atoms; the measurable
sets are exactly the unions of atoms, which makes validation and enumeration
trivial.  All measure arithmetic is exact rational: the definitions below are
exact equalities and a floating-point verdict would be tolerance-dependent.

Kernel measurability is read at the finite level as "s -> F s U is constant
on every atom", which instantiates measurability into the canonical
sigma-algebra on sub-probability measures.

Two bisimulation notions live here: the equivalence-relation definition on a
single process (quotientability), and its extension to a relation between two
processes via the induced equivalence on the sum process.  Both are connected
to logical relations (membership-respecting linked set pairs) and to spans of
coalgebra homomorphisms; the span constructions sit at the bottom of the file.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Optional

from .errors import GuardExceeded, NotAnEquivalence, ValidationError
from .lts import Relation, _as_frozenset

#: Ceiling on atoms per side for the linked-pair enumerations.
ATOM_GUARD = 12


@dataclass(frozen=True)
class FinMeasSpace:
    """A finite carrier with a sigma-algebra given by its atom partition."""

    carrier: frozenset
    atoms: tuple

    def __post_init__(self):
        object.__setattr__(self, "carrier", _as_frozenset(self.carrier))
        atoms = tuple(sorted((frozenset(b) for b in self.atoms),
                             key=lambda b: sorted(b)))
        object.__setattr__(self, "atoms", atoms)
        seen = set()
        for block in atoms:
            if not block:
                raise ValidationError("atoms must be non-empty")
            if block & seen:
                raise ValidationError("atoms must be disjoint")
            seen |= block
        if seen != set(self.carrier):
            raise ValidationError("atoms must cover the carrier exactly")

    @classmethod
    def discrete(cls, carrier) -> "FinMeasSpace":
        carrier = _as_frozenset(carrier)
        return cls(carrier, tuple(frozenset({x}) for x in sorted(carrier)))

    def atom_of(self, x) -> frozenset:
        for block in self.atoms:
            if x in block:
                return block
        raise ValidationError(f"point {x!r} not in carrier")

    def is_measurable(self, U) -> bool:
        U = frozenset(U)
        if not U <= self.carrier:
            return False
        return all(block <= U or not (block & U) for block in self.atoms)

    def measurable_sets(self):
        """Iterate every measurable set, smallest first (2^#atoms of them)."""
        for k in range(len(self.atoms) + 1):
            for chosen in combinations(self.atoms, k):
                yield frozenset().union(*chosen) if chosen else frozenset()


@dataclass(frozen=True)
class SubProb:
    """A sub-probability measure: exact rational weight per atom, mass <= 1."""

    space: FinMeasSpace
    weights: Mapping

    def __post_init__(self):
        weights = {block: Fraction(w) for block, w in self.weights.items()}
        object.__setattr__(self, "weights", weights)
        if set(weights) != set(self.space.atoms):
            raise ValidationError("weights must cover exactly the atoms")
        for block, w in weights.items():
            if w < 0:
                raise ValidationError(f"negative weight on atom {sorted(block)!r}")
        if sum(weights.values()) > 1:
            raise ValidationError("total mass exceeds 1")

    @classmethod
    def of(cls, space: FinMeasSpace, partial=None) -> "SubProb":
        """Build from a possibly-partial atom->weight map, filling zeros."""
        partial = partial or {}
        weights = {block: Fraction(0) for block in space.atoms}
        for block, w in partial.items():
            block = frozenset(block)
            if block not in weights:
                raise ValidationError(f"{sorted(block)!r} is not an atom of the space")
            weights[block] = Fraction(w)
        return cls(space, weights)

    @property
    def total_mass(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))


def measure_of(pi: SubProb, U) -> Fraction:
    """Value of the measure on a measurable set: the sum over its atoms."""
    U = frozenset(U)
    if not pi.space.is_measurable(U):
        raise ValidationError(f"{sorted(U)!r} is not measurable")
    return sum((pi.weights[block] for block in pi.space.atoms if block <= U), Fraction(0))


def dirac(space: FinMeasSpace, x) -> SubProb:
    """Unit mass on the atom of x."""
    return SubProb.of(space, {space.atom_of(x): Fraction(1)})


@dataclass(frozen=True)
class MeasurableMap:
    """A total point map whose preimages of atoms are measurable."""

    dom: FinMeasSpace
    cod: FinMeasSpace
    fn: Mapping

    def __post_init__(self):
        fn = dict(self.fn)
        object.__setattr__(self, "fn", fn)
        if set(fn) != set(self.dom.carrier):
            raise ValidationError("map must be total on its domain")
        for x, y in fn.items():
            if y not in self.cod.carrier:
                raise ValidationError(f"image {y!r} of {x!r} not in the codomain")
        for block in self.cod.atoms:
            if not self.dom.is_measurable(self.preimage(block)):
                raise ValidationError(f"preimage of atom {sorted(block)!r} is not measurable")

    def __call__(self, x):
        return self.fn[x]

    def preimage(self, V) -> frozenset:
        V = frozenset(V)
        return frozenset(x for x in self.dom.carrier if self.fn[x] in V)

    @classmethod
    def identity(cls, space: FinMeasSpace, cod: Optional[FinMeasSpace] = None) -> "MeasurableMap":
        return cls(space, cod if cod is not None else space,
                   {x: x for x in space.carrier})


def giry_map(f: MeasurableMap, pi: SubProb) -> SubProb:
    """Pushforward of a measure along a measurable map."""
    if pi.space != f.dom:
        raise ValidationError("measure lives on the wrong space for this map")
    return SubProb(f.cod, {block: measure_of(pi, f.preimage(block)) for block in f.cod.atoms})


@dataclass(frozen=True)
class MarkovProcess:
    """A measurable kernel from points to sub-probability measures on the same space."""

    space: FinMeasSpace
    kernel: Mapping

    def __post_init__(self):
        kernel = dict(self.kernel)
        object.__setattr__(self, "kernel", kernel)
        if set(kernel) != set(self.space.carrier):
            raise ValidationError("kernel must be total on the carrier")
        for s, pi in kernel.items():
            if not isinstance(pi, SubProb) or pi.space != self.space:
                raise ValidationError(f"kernel at {s!r} is not a measure on the process space")
        for block in self.space.atoms:
            for dest in self.space.atoms:
                values = {kernel[s].weights[dest] for s in block}
                if len(values) > 1:
                    raise ValidationError(
                        f"kernel not measurable: value on {sorted(dest)!r} varies "
                        f"inside atom {sorted(block)!r}")

    def value(self, s, U) -> Fraction:
        return measure_of(self.kernel[s], U)


def validate_markov(states, atoms, kernel) -> MarkovProcess:
    """Check a raw process description and build the MarkovProcess.

    ``kernel`` maps each state to {atom index -> weight}, indices referring
    to the given atom list.  Rejects non-partitions, weight sums above 1,
    and kernels that are not constant on atoms.
    """
    space = FinMeasSpace(frozenset(states), tuple(frozenset(b) for b in atoms))
    listed = [frozenset(b) for b in atoms]
    built = {}
    for s in space.carrier:
        row = kernel.get(s, {})
        partial = {}
        for idx, w in row.items():
            idx = int(idx)
            if not 0 <= idx < len(listed):
                raise ValidationError(f"atom index {idx} out of range in row {s!r}")
            partial[listed[idx]] = partial.get(listed[idx], Fraction(0)) + Fraction(w)
        built[s] = SubProb.of(space, partial)
    extra = set(kernel) - set(space.carrier)
    if extra:
        raise ValidationError(f"kernel rows for unknown states {sorted(extra)!r}")
    return MarkovProcess(space, built)


def is_coalgebra_hom(f: MeasurableMap, F: MarkovProcess, G: MarkovProcess) -> bool:
    """Whether f maps F to G as coalgebras: G(f s) V = F s (f^-1 V).

    Checked on atoms V; finite additivity extends the equality to every
    measurable set.
    """
    return coalgebra_hom_violation(f, F, G) is None


def coalgebra_hom_violation(f: MeasurableMap, F: MarkovProcess, G: MarkovProcess):
    """First (state, set) witness breaking the homomorphism equation, or None."""
    if f.dom != F.space or f.cod != G.space:
        raise ValidationError("map endpoints must match the process spaces")
    for s in sorted(F.space.carrier):
        for block in G.space.atoms:
            if G.kernel[f(s)].weights[block] != F.value(s, f.preimage(block)):
                return (s, block)
    return None


def _equivalence_classes(R: Relation):
    """Classes of an equivalence relation given as a Relation on one space."""
    if R.left != R.right:
        raise ValidationError("an equivalence needs equal left and right spaces")
    for s in R.left:
        if (s, s) not in R.pairs:
            raise ValidationError(f"relation not reflexive at {s!r}")
    for (s, t) in R.pairs:
        if (t, s) not in R.pairs:
            raise ValidationError(f"relation not symmetric at {(s, t)!r}")
    for (s, t) in R.pairs:
        for (t2, u) in R.pairs:
            if t2 == t and (s, u) not in R.pairs:
                raise ValidationError(f"relation not transitive at {(s, u)!r}")
    classes = []
    seen = set()
    for s in sorted(R.left):
        if s in seen:
            continue
        cls = R.row(s)
        classes.append(cls)
        seen |= cls
    return classes


def _closed_measurable_sets(space: FinMeasSpace, classes):
    """Unions of classes that are measurable, i.e. the R-closed measurable sets."""
    if len(classes) > 20:
        raise GuardExceeded("too many equivalence classes for exact enumeration")
    out = []
    for k in range(len(classes) + 1):
        for chosen in combinations(classes, k):
            U = frozenset().union(*chosen) if chosen else frozenset()
            if space.is_measurable(U):
                out.append(U)
    return out


def prob_bisim_equiv_violation(R: Relation, F: MarkovProcess):
    """First (s, s', U) with s R s' but F s U != F s' U on an R-closed
    measurable U, or None."""
    if R.left != F.space.carrier:
        raise ValidationError("relation must live on the process carrier")
    classes = _equivalence_classes(R)
    if all(s == t for (s, t) in R.pairs):
        return None
    closed = _closed_measurable_sets(F.space, classes)
    for (s, t) in sorted(R.pairs):
        if s == t:
            continue
        for U in closed:
            if F.value(s, U) != F.value(t, U):
                return (s, t, U)
    return None


def is_prob_bisimulation_equiv(R: Relation, F: MarkovProcess) -> bool:
    """Equivalence-relation bisimulation: related states agree on every
    R-closed measurable set."""
    return prob_bisim_equiv_violation(R, F) is None


def _common_coarsening(part1, part2):
    """Finest partition coarser than both: merge blocks that overlap."""
    blocks = [set(b) for b in part1]
    for b in part2:
        touching = [blk for blk in blocks if blk & b]
        merged = set(b)
        for blk in touching:
            merged |= blk
            blocks.remove(blk)
        blocks.append(merged)
    changed = True
    while changed:
        changed = False
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                if blocks[i] & blocks[j]:
                    blocks[i] |= blocks.pop(j)
                    changed = True
                    break
            if changed:
                break
    return sorted((frozenset(b) for b in blocks), key=lambda b: sorted(b))


def _class_name(cls) -> str:
    return "{" + ",".join(str(x) for x in sorted(cls)) + "}"


def quotient_space(X: FinMeasSpace, R: Relation):
    """Quotient carrier with the largest sigma-algebra making the projection
    measurable; returns the space and the projection map.

    A set of classes is measurable exactly when its union is measurable
    upstream, so the quotient atoms are the images of the finest partition
    coarser than both the atoms and the classes.
    """
    if R.left != X.carrier:
        raise ValidationError("relation must live on the carrier")
    classes = _equivalence_classes(R)
    names = {cls: _class_name(cls) for cls in classes}
    blocks = _common_coarsening(X.atoms, classes)
    q_atoms = tuple(frozenset(names[cls] for cls in classes if cls <= block)
                    for block in blocks)
    q_space = FinMeasSpace(frozenset(names.values()), q_atoms)
    fn = {x: names[cls] for cls in classes for x in cls}
    return q_space, MeasurableMap(X, q_space, fn)


def quotient_process(F: MarkovProcess, R: Relation):
    """Quotient coalgebra when R is a bisimulation.

    Returns (process, None) on success, else (None, witness) with the first
    violating (s, s', U).  The projection is a coalgebra homomorphism onto
    the result.
    """
    witness = prob_bisim_equiv_violation(R, F)
    if witness is not None:
        return None, witness
    q_space, proj = quotient_space(F.space, R)
    kernel = {}
    for x in F.space.carrier:
        q = proj(x)
        if q in kernel:
            continue
        kernel[q] = SubProb(q_space, {block: F.value(x, proj.preimage(block))
                                      for block in q_space.atoms})
    return MarkovProcess(q_space, kernel), None


def inl(x) -> str:
    return f"l:{x}"


def inr(x) -> str:
    return f"r:{x}"


@dataclass(frozen=True)
class RelationReport:
    """z-closure analysis of a relation and its induced relation on the sum."""

    z_closed: bool
    r_star: Relation
    is_per: bool
    is_equivalence: bool


def analyze_relation(R: Relation) -> RelationReport:
    """Assemble the symmetric extension on the disjoint union and classify it.

    z-closure (R.Rop.R inside R) and transitivity of the extension are
    computed independently; they agree by construction of the extension.
    """
    rows = {s: R.row(s) for s in R.left}
    z_closed = True
    for (s, t) in R.pairs:
        for s1 in R.col(t):
            for t1 in rows[s1]:
                if (s, t1) not in R.pairs:
                    z_closed = False
                    break
            if not z_closed:
                break
        if not z_closed:
            break

    carrier = frozenset(inl(s) for s in R.left) | frozenset(inr(t) for t in R.right)
    star = set()
    for (s, t) in R.pairs:
        star.add((inl(s), inr(t)))
        star.add((inr(t), inl(s)))
    for s in R.left:
        for s1 in R.left:
            if rows[s] & rows[s1]:
                star.add((inl(s), inl(s1)))
    cols = {t: R.col(t) for t in R.right}
    for t in R.right:
        for t1 in R.right:
            if cols[t] & cols[t1]:
                star.add((inr(t), inr(t1)))
    r_star = Relation(carrier, carrier, frozenset(star))

    succ = {}
    for (x, y) in star:
        succ.setdefault(x, set()).add(y)
    is_per = all((x, z) in star
                 for (x, y) in star for z in succ.get(y, ()))
    reflexive = all((x, x) in star for x in carrier)
    return RelationReport(z_closed, r_star, is_per, is_per and reflexive)


def equivalence_failure(R: Relation) -> Optional[str]:
    """Name the first property stopping the sum extension from being an
    equivalence, or None."""
    report = analyze_relation(R)
    if not report.z_closed:
        return "not z-closed"
    if any(not R.row(s) for s in R.left):
        return "not total"
    if any(not R.col(t) for t in R.right):
        return "not onto"
    if not report.is_equivalence:
        return "not an equivalence"
    return None


def sum_process(F: MarkovProcess, G: MarkovProcess) -> MarkovProcess:
    """Disjoint sum of two processes on tagged carriers.

    A state from one summand keeps its kernel on its own half and puts no
    mass on the other half.
    """
    carrier = frozenset(inl(x) for x in F.space.carrier) | frozenset(inr(x) for x in G.space.carrier)
    atoms = tuple(frozenset(inl(x) for x in block) for block in F.space.atoms) + \
        tuple(frozenset(inr(x) for x in block) for block in G.space.atoms)
    space = FinMeasSpace(carrier, atoms)
    kernel = {}
    for x in F.space.carrier:
        kernel[inl(x)] = SubProb.of(space, {frozenset(inl(y) for y in block): w
                                            for block, w in F.kernel[x].weights.items()})
    for x in G.space.carrier:
        kernel[inr(x)] = SubProb.of(space, {frozenset(inr(y) for y in block): w
                                            for block, w in G.kernel[x].weights.items()})
    return MarkovProcess(space, kernel)


def is_prob_bisimulation_between(R: Relation, F: MarkovProcess, G: MarkovProcess) -> bool:
    """Bisimulation between two processes: the induced relation on the sum
    must be an equivalence (else a diagnostic is raised) and a bisimulation
    of the sum process."""
    if R.left != F.space.carrier or R.right != G.space.carrier:
        raise ValidationError("relation spaces must match the process carriers")
    failure = equivalence_failure(R)
    if failure is not None:
        raise NotAnEquivalence(failure)
    report = analyze_relation(R)
    return is_prob_bisimulation_equiv(report.r_star, sum_process(F, G))


def r_sigma_related(U, V, R: Relation) -> bool:
    """Membership-respecting lifting to sets: every related pair agrees on
    membership."""
    U = frozenset(U)
    V = frozenset(V)
    if not U <= R.left:
        raise ValidationError("U contains elements outside the left space")
    if not V <= R.right:
        raise ValidationError("V contains elements outside the right space")
    return all((s in U) == (t in V) for (s, t) in R.pairs)


def _guard_atoms(R: Relation, F: MarkovProcess, G: MarkovProcess):
    if R.left != F.space.carrier or R.right != G.space.carrier:
        raise ValidationError("relation spaces must match the process carriers")
    if len(F.space.atoms) > ATOM_GUARD or len(G.space.atoms) > ATOM_GUARD:
        raise GuardExceeded(f"linked-pair enumeration limited to {ATOM_GUARD} atoms per side")


def _linked_pairs(R: Relation, left: FinMeasSpace, right: FinMeasSpace):
    """Enumerate all measurable (U, V) linked by the membership lifting.

    For a fixed U the linked V are pinned on the codomain of R and free on
    atoms disjoint from it, so the enumeration is one pass over measurable
    U with the free atoms expanded explicitly.
    """
    cod = frozenset(t for (_, t) in R.pairs)
    cols = {t: R.col(t) for t in cod}
    for U in left.measurable_sets():
        core = set()
        consistent = True
        for t in cod:
            verdicts = {s in U for s in cols[t]}
            if len(verdicts) > 1:
                consistent = False
                break
            if verdicts.pop():
                core.add(t)
        if not consistent:
            continue
        forced = []
        free = []
        broken = False
        for block in right.atoms:
            bc = block & cod
            if bc:
                inter = bc & core
                if inter == bc:
                    forced.append(block)
                elif inter:
                    broken = True
                    break
            else:
                free.append(block)
        if broken:
            continue
        base = frozenset().union(*forced) if forced else frozenset()
        for mask in range(1 << len(free)):
            extra = [free[i] for i in range(len(free)) if mask >> i & 1]
            yield U, base.union(*extra) if extra else base


def prob_logical_violation(R: Relation, F: MarkovProcess, G: MarkovProcess):
    """First (s, t, U, V) with s R t, U linked to V, but F s U != G t V."""
    _guard_atoms(R, F, G)
    if not R.pairs:
        return None
    pairs = sorted(R.pairs)
    for U, V in _linked_pairs(R, F.space, G.space):
        for (s, t) in pairs:
            if F.value(s, U) != G.value(t, V):
                return (s, t, U, V)
    return None


def is_prob_logical_relation(R: Relation, F: MarkovProcess, G: MarkovProcess) -> bool:
    """Logical relation of processes: related states give equal measure to
    every linked pair of measurable sets."""
    return prob_logical_violation(R, F, G) is None


def _family_atoms(carrier, family):
    """Atoms of a finite sigma-algebra given as the family of its members."""
    atoms = {}
    for x in carrier:
        atom = frozenset(carrier)
        for U in family:
            if x in U:
                atom &= U
            else:
                atom -= U
        atoms[x] = atom
    return tuple(sorted(set(atoms.values()), key=lambda b: sorted(b)))


def coarsened_sigma_algebras(R: Relation, F: MarkovProcess, G: MarkovProcess):
    """Atom partitions of the three sigma-algebras induced by the linked pairs:
    the coarsened left algebra, the coarsened right algebra, and the algebra
    on the relation itself (preimages under the projections, which coincide
    for linked pairs)."""
    _guard_atoms(R, F, G)
    left_family = set()
    right_family = set()
    pair_family = set()
    for U, V in _linked_pairs(R, F.space, G.space):
        left_family.add(U)
        right_family.add(V)
        w1 = frozenset(p for p in R.pairs if p[0] in U)
        w2 = frozenset(p for p in R.pairs if p[1] in V)
        if w1 != w2:
            raise AssertionError("projection preimages of a linked pair differ")
        pair_family.add(w1)
    return (_family_atoms(F.space.carrier, left_family),
            _family_atoms(G.space.carrier, right_family),
            _family_atoms(R.pairs, pair_family))


def restrict_process(F: MarkovProcess, coarser: FinMeasSpace) -> MarkovProcess:
    """The same kernel viewed on a coarser sigma-algebra over the same carrier.

    The kernel must still be measurable with respect to the coarser atoms;
    this is validated, not assumed.
    """
    if coarser.carrier != F.space.carrier:
        raise ValidationError("coarsening must keep the carrier")
    for block in coarser.atoms:
        if not F.space.is_measurable(block):
            raise ValidationError(f"atom {sorted(block)!r} is not measurable upstream")
    kernel = {s: SubProb(coarser, {block: F.value(s, block) for block in coarser.atoms})
              for s in coarser.carrier}
    return MarkovProcess(coarser, kernel)


def pair_name(p) -> str:
    return f"({p[0]},{p[1]})"


@dataclass(frozen=True)
class GirySpan:
    """A span of coalgebra homomorphism candidates between two processes.

    Construction only checks the wiring; the homomorphism property is the
    business of verify_giry_span.
    """

    left: MarkovProcess
    right: MarkovProcess
    apex: MarkovProcess
    leg_l: MeasurableMap
    leg_r: MeasurableMap

    def __post_init__(self):
        if self.leg_l.dom != self.apex.space or self.leg_r.dom != self.apex.space:
            raise ValidationError("legs must start at the apex space")
        if self.leg_l.cod != self.left.space or self.leg_r.cod != self.right.space:
            raise ValidationError("legs must land in the outer process spaces")


def build_span(R: Relation, F: MarkovProcess, G: MarkovProcess):
    """Turn a logical relation into a span over the coarsened spaces.

    Returns (span, None) on success.  If R is not a logical relation,
    returns (None, witness).  The apex carrier is the relation itself with
    the induced sigma-algebra; the apex kernel value on an atom is the
    common outer value over any linked pair presenting that atom, and both
    the independence of that choice and additivity against the outer
    presentation are re-verified during construction.
    """
    witness = prob_logical_violation(R, F, G)
    if witness is not None:
        return None, witness
    atoms_l, atoms_r, atoms_p = coarsened_sigma_algebras(R, F, G)
    left = restrict_process(F, FinMeasSpace(F.space.carrier, atoms_l))
    right = restrict_process(G, FinMeasSpace(G.space.carrier, atoms_r))

    names = {p: pair_name(p) for p in R.pairs}
    apex_space = FinMeasSpace(frozenset(names.values()),
                              tuple(frozenset(names[p] for p in block) for block in atoms_p))

    presentations = {}
    for U, V in _linked_pairs(R, F.space, G.space):
        w = frozenset(p for p in R.pairs if p[0] in U)
        presentations.setdefault(w, []).append(U)

    kernel = {}
    for p in R.pairs:
        s, _ = p
        weights = {}
        for block in atoms_p:
            candidates = presentations[block]
            values = {F.value(s, U) for U in candidates}
            if len(values) != 1:
                raise AssertionError(f"apex value at {p!r} depends on the presenting set")
            weights[frozenset(names[q] for q in block)] = values.pop()
        kernel[names[p]] = SubProb(apex_space, weights)
        for w, candidates in presentations.items():
            total = sum((kernel[names[p]].weights[frozenset(names[q] for q in block)]
                         for block in atoms_p if block <= w), Fraction(0))
            if total != F.value(s, candidates[0]):
                raise AssertionError(f"apex measure at {p!r} is not additive over atoms")

    apex = MarkovProcess(apex_space, kernel)
    leg_l = MeasurableMap(apex_space, left.space, {names[p]: p[0] for p in R.pairs})
    leg_r = MeasurableMap(apex_space, right.space, {names[p]: p[1] for p in R.pairs})
    return GirySpan(left, right, apex, leg_l, leg_r), None


@dataclass(frozen=True)
class SpanVerdict:
    ok: bool
    witness: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.ok


def verify_giry_span(span: GirySpan) -> SpanVerdict:
    """Check that both legs are coalgebra homomorphisms out of the apex.

    Leg measurability and apex kernel measurability are enforced by the
    types at construction; the content here is the two homomorphism squares.
    A false verdict carries which leg fails and at which state and set.
    """
    for side, leg, outer in (("left", span.leg_l, span.left),
                             ("right", span.leg_r, span.right)):
        bad = coalgebra_hom_violation(leg, span.apex, outer)
        if bad is not None:
            state, block = bad
            return SpanVerdict(False, {"leg": side, "state": state, "set": sorted(block)})
    return SpanVerdict(True)


def span_image_relation(span: GirySpan) -> Relation:
    """The relation traced out by the two legs."""
    pairs = frozenset((span.leg_l(p), span.leg_r(p)) for p in span.apex.space.carrier)
    return Relation(span.left.space.carrier, span.right.space.carrier, pairs)


def factor_span_through_image(span: GirySpan):
    """Try to push the apex structure onto the image relation.

    The image carries the largest sigma-algebra making the paired legs
    measurable.  The kernel descends exactly when the apex kernel is
    constant on each fiber of the pairing; otherwise the first conflicting
    fiber is returned as (None, conflict), with every set on which its
    points disagree and the values they assign.
    """
    fibers = {}
    for p in sorted(span.apex.space.carrier):
        q = (span.leg_l(p), span.leg_r(p))
        fibers.setdefault(q, []).append(p)
    image_points = sorted(fibers)

    fiber_blocks = [frozenset(ps) for ps in fibers.values()]
    blocks = _common_coarsening(span.apex.space.atoms, fiber_blocks)
    image_atoms = tuple(frozenset(pair_name(q) for q in image_points
                                  if frozenset(fibers[q]) <= block)
                        for block in blocks)
    image_space = FinMeasSpace(frozenset(pair_name(q) for q in image_points), image_atoms)

    kernel = {}
    for q in image_points:
        weights = {}
        disagreements = []
        for block, atom in zip(blocks, image_atoms):
            values = [span.apex.value(p, block) for p in fibers[q]]
            if len(set(values)) > 1:
                disagreements.append({"set": sorted(atom), "values": values})
            else:
                weights[atom] = values[0]
        if disagreements:
            return None, {"image_point": pair_name(q), "fiber": fibers[q],
                          "disagreements": disagreements}
        kernel[pair_name(q)] = SubProb(image_space, weights)
    return MarkovProcess(image_space, kernel), None
