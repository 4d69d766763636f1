"""Bisimulation checking for finite systems, cross-validated two ways.

Strong, weak, branching, semi-branching and finite probabilistic
bisimulation, each decided both by its direct matching definition and by a
logical-relation characterization over derived algebraic structures.
"""

from .errors import (BisimError, FormatError, GuardExceeded, NotAnEquivalence,
                     ValidationError)
from .lts import (TAU, Endo, Lts, Relation, apply_word, endo_leq,
                  kleisli_compose, kleisli_identity, successors, ts_leq,
                  validate_lts)
from .lifting import (fun_lift_related, pow_image_pairs, pow_pair_related,
                      pow_related, product_relation)
from .strong import (StrongViolation, find_strong_violation,
                     greatest_strong_bisimulation, is_strong_bisimulation,
                     word_characterization_check)
from .weak import (LaxLts, derived_transitions, greatest_weak_bisimulation,
                   hat, inner, is_saturated, is_weak_bisimulation, lax_apply,
                   laxify, saturate, tau_star, validate_lax)
from .branching import (PairEndo, PairTs, am_compose, am_eta, am_mu, am_unit,
                        branching_saturate, greatest_branching_bisimulation,
                        is_branching_bisimulation, pair_endo_leq)
from .markov import (FinMeasSpace, GirySpan, MarkovProcess, MeasurableMap,
                     SubProb, analyze_relation, build_span,
                     coarsened_sigma_algebras, dirac,
                     factor_span_through_image, giry_map, is_coalgebra_hom,
                     is_prob_bisimulation_between, is_prob_bisimulation_equiv,
                     is_prob_logical_relation, measure_of, quotient_process,
                     quotient_space, r_sigma_related, restrict_process,
                     span_image_relation, sum_process, validate_markov,
                     verify_giry_span)

__version__ = "0.1.0"
