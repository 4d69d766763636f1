"""Deterministic generators and independent oracles shared by the test suite."""

from fractions import Fraction
from itertools import product

import bisimcheck as bc
from bisimcheck.lts import TAU
from bisimcheck.markov import FinMeasSpace, MarkovProcess, SubProb


def make_lts(states, labels, edges):
    return bc.validate_lts(states, labels, edges)


def random_lts(rng, n_states, labels, density=0.3):
    states = [f"s{i}" for i in range(n_states)]
    edges = [(s, a, d)
             for a in labels for s in states for d in states
             if rng.random() < density]
    return bc.validate_lts(states, labels, edges)


def all_relations(left, right):
    """Every relation between two finite spaces, in a fixed order."""
    cells = sorted((s, t) for s in left for t in right)
    for mask in range(1 << len(cells)):
        pairs = frozenset(c for i, c in enumerate(cells) if mask >> i & 1)
        yield bc.Relation(frozenset(left), frozenset(right), pairs)


def random_relation(rng, left, right, density=0.4):
    pairs = frozenset((s, t) for s in left for t in right if rng.random() < density)
    return bc.Relation(frozenset(left), frozenset(right), pairs)


def sample_relations(rng, left, right, exhaustive_bits=9, sample=200):
    """All relations when the grid is small, otherwise a deterministic sample."""
    if len(left) * len(right) <= exhaustive_bits:
        yield from all_relations(left, right)
        return
    for _ in range(sample):
        yield random_relation(rng, left, right, density=rng.choice((0.2, 0.4, 0.7)))


def random_partition(rng, points):
    points = sorted(points)
    n_blocks = rng.randint(1, len(points))
    blocks = [[] for _ in range(n_blocks)]
    for p in points:
        blocks[rng.randrange(n_blocks)].append(p)
    return [frozenset(b) for b in blocks if b]


def equivalence_from_partition(points, blocks):
    pairs = frozenset((x, y) for b in blocks for x in b for y in b)
    return bc.Relation(frozenset(points), frozenset(points), pairs)


def random_equivalence(rng, points):
    return equivalence_from_partition(points, random_partition(rng, points))


def random_weights(rng, n_cells, full=False):
    """Exact rational weights over n_cells summing to <= 1 (== 1 when full)."""
    den = rng.choice((1, 2, 3, 4, 6))
    cells = [0] * (n_cells + (0 if full else 1))
    for _ in range(den):
        cells[rng.randrange(len(cells))] += 1
    return [Fraction(c, den) for c in cells[:n_cells]]


def random_markov(rng, n_states, full=False):
    """A random discrete process (full sigma-algebra) with exact weights."""
    states = [f"x{i}" for i in range(n_states)]
    space = FinMeasSpace.discrete(states)
    atoms = sorted(space.atoms, key=sorted)
    kernel = {}
    for s in states:
        ws = random_weights(rng, len(atoms), full=full)
        kernel[s] = SubProb.of(space, dict(zip(atoms, ws)))
    return MarkovProcess(space, kernel)


def split_markov(rng, base: MarkovProcess, copies=2):
    """Blow up each state of a discrete process into 1..copies members so the
    class relation is a bisimulation by construction.

    Each member row splits every class weight across that class's members;
    the class-level marginals equal the base row, so members of one class
    agree on every union of classes.
    """
    members = {s: [f"{s}.{k}" for k in range(rng.randint(1, copies))]
               for s in sorted(base.space.carrier)}
    points = [m for ms in members.values() for m in ms]
    space = FinMeasSpace.discrete(points)
    kernel = {}
    for s, ms in members.items():
        for m in ms:
            weights = {}
            for block, w in base.kernel[s].weights.items():
                (cls,) = block
                targets = members[cls]
                cuts = random_weights(rng, len(targets), full=True)
                for tgt, cut in zip(targets, cuts):
                    weights[frozenset({tgt})] = w * cut
            kernel[m] = SubProb.of(space, weights)
    classes = [frozenset(ms) for ms in members.values()]
    return MarkovProcess(space, kernel), equivalence_from_partition(points, classes)


def brute_force_union(F, G, accepts):
    """Union of every relation passing ``accepts``, by full enumeration."""
    best = set()
    for R in all_relations(F.states, G.states):
        if accepts(R, F, G):
            best |= R.pairs
    return frozenset(best)


def derived_words_oracle(F, v, max_len):
    """Brute-force reading of the derived transition: the union over all words
    of bounded length whose tau-erasure is v."""
    v = tuple(v)
    labels = sorted(F.labels)
    result = {s: set() for s in F.states}
    for n in range(max_len + 1):
        for w in product(labels, repeat=n):
            if bc.hat(w) != v:
                continue
            endo = bc.apply_word(F, w)
            for s in F.states:
                result[s] |= endo.mapping[s]
    return {s: frozenset(xs) for s, xs in result.items()}


def tau_eccentricity(F):
    """Largest number of tau-steps needed to realize any tau-closure edge."""
    step = F.trans[TAU].mapping
    worst = 0
    for s in F.states:
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for x in frontier:
                for y in step[x]:
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        nxt.append(y)
            frontier = nxt
        worst = max(worst, max(dist.values()))
    return worst


def oracle_word_budget(F, v):
    """Word length that makes the brute-force oracle complete for v."""
    ecc = tau_eccentricity(F)
    return (len(v) + 1) * ecc + len(v)


def coin_process():
    h = Fraction(1, 2)
    return bc.validate_markov(["S", "H", "T"], [["S"], ["H"], ["T"]],
                              {"S": {1: h, 2: h}, "H": {1: Fraction(1)}, "T": {2: Fraction(1)}})


def coin_pair_processes():
    """The two product structures on the square of the coin space: the tensor
    of two independent copies, and the same with the start row replaced by the
    two-observers row."""
    t = coin_process()
    names = [a + b for a in "SHT" for b in "SHT"]
    space = FinMeasSpace.discrete(names)

    def tensor_row(p):
        out = {}
        for q in names:
            w = t.kernel[p[0]].weights[frozenset({q[0]})] * t.kernel[p[1]].weights[frozenset({q[1]})]
            if w:
                out[frozenset({q})] = w
        return out

    tstar = MarkovProcess(space, {p: SubProb.of(space, tensor_row(p)) for p in names})
    rows = {p: tensor_row(p) for p in names}
    rows["SS"] = {frozenset({"HH"}): Fraction(1, 2), frozenset({"TT"}): Fraction(1, 2)}
    tplus = MarkovProcess(space, {p: SubProb.of(space, rows[p]) for p in names})
    return t, tstar, tplus


def codiagonal_span():
    """The span from the coin to itself through the sum of the two pair
    structures, with legs projecting through the co-diagonal."""
    from bisimcheck.markov import GirySpan, MeasurableMap, sum_process

    t, tstar, tplus = coin_pair_processes()
    apex = sum_process(tstar, tplus)
    leg_l = MeasurableMap(apex.space, t.space, {x: x[2] for x in apex.space.carrier})
    leg_r = MeasurableMap(apex.space, t.space, {x: x[3] for x in apex.space.carrier})
    return GirySpan(t, t, apex, leg_l, leg_r)


def rstar_coin_relation():
    t = coin_process()
    pairs = {("S", "S"), ("H", "H"), ("T", "T"), ("H", "T"), ("T", "H")}
    return bc.Relation(t.space.carrier, t.space.carrier, frozenset(pairs))
