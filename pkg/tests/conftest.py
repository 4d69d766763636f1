import random

import pytest

import bisimcheck as bc


@pytest.fixture
def rng():
    return random.Random(20240817)


@pytest.fixture
def tau_chain():
    """p0 -tau-> p1 -a-> p2 against q0 -a-> q1, with the weak-but-not-strong
    relation from the examples."""
    F = bc.validate_lts(["p0", "p1", "p2"], ["a", "tau"],
                        [("p0", "tau", "p1"), ("p1", "a", "p2")])
    G = bc.validate_lts(["q0", "q1"], ["a", "tau"], [("q0", "a", "q1")])
    R = bc.Relation(F.states, G.states,
                    frozenset({("p0", "q0"), ("p1", "q0"), ("p2", "q1")}))
    return F, G, R
