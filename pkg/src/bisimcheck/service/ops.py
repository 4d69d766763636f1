"""Operation layer shared by the HTTP endpoints and the command-line client.

Each operation takes a request model, drives the core library, and returns a
response model.  Witnesses are rendered JSON-ready here (states as strings,
sets as sorted lists, rationals as "p/q" strings) so that text and JSON
reports carry exactly the same data.
"""

from __future__ import annotations

from fractions import Fraction

from .. import branching, markov, strong, weak
from ..errors import ValidationError
from ..formats import format_rational, parse_rational
from ..lts import Lts, Relation, validate_lts
from ..markov import GirySpan, MarkovProcess, MeasurableMap
from . import models

CHECK_KINDS = ("strong", "weak", "branching", "semibranching")
SATURATE_KINDS = ("weak", "branching", "semibranching")


def lts_from_doc(doc: models.LtsDoc) -> Lts:
    return validate_lts(doc.states, doc.labels, doc.transitions)


def lts_to_doc(F: Lts) -> models.LtsDoc:
    triples = sorted((s, a, d)
                     for a in F.labels for s in F.states for d in F.trans[a].mapping[s])
    return models.LtsDoc(states=sorted(F.states), labels=sorted(F.labels), transitions=triples)


def relation_from_doc(doc: models.RelationDoc, left, right) -> Relation:
    for (s, t) in doc.pairs:
        if s not in left:
            raise ValidationError(f"unknown state {s!r} on the left of the relation")
        if t not in right:
            raise ValidationError(f"unknown state {t!r} on the right of the relation")
    return Relation(frozenset(left), frozenset(right), frozenset(tuple(p) for p in doc.pairs))


def relation_pairs(R: Relation) -> list:
    return sorted(R.pairs)


def markov_from_doc(doc: models.MarkovDoc) -> MarkovProcess:
    kernel = {s: {idx: parse_rational(w) for idx, w in row.items()}
              for s, row in doc.kernel.items()}
    return markov.validate_markov(doc.states, [frozenset(b) for b in doc.atoms], kernel)


def markov_to_doc(P: MarkovProcess) -> models.MarkovDoc:
    index = {block: i for i, block in enumerate(P.space.atoms)}
    kernel = {}
    for s in sorted(P.space.carrier):
        kernel[s] = {index[block]: format_rational(w)
                     for block, w in sorted(P.kernel[s].weights.items(),
                                            key=lambda kv: index[kv[0]])
                     if w != 0}
    return models.MarkovDoc(states=sorted(P.space.carrier),
                            atoms=[sorted(block) for block in P.space.atoms],
                            kernel=kernel)


def span_to_doc(span: GirySpan) -> models.SpanDoc:
    points = sorted(span.apex.space.carrier)
    return models.SpanDoc(left=markov_to_doc(span.left),
                          right=markov_to_doc(span.right),
                          apex=markov_to_doc(span.apex),
                          leg_left={p: span.leg_l(p) for p in points},
                          leg_right={p: span.leg_r(p) for p in points})


def span_from_doc(doc: models.SpanDoc) -> GirySpan:
    left = markov_from_doc(doc.left)
    right = markov_from_doc(doc.right)
    apex = markov_from_doc(doc.apex)
    leg_l = MeasurableMap(apex.space, left.space, dict(doc.leg_left))
    leg_r = MeasurableMap(apex.space, right.space, dict(doc.leg_right))
    return GirySpan(left, right, apex, leg_l, leg_r)


def _jsonable(value):
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (frozenset, set)):
        return sorted(_jsonable(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return value


def _check_methods(kind: str, method: str):
    table = {
        "strong": ("direct", "logical"),
        "weak": weak.WEAK_METHODS,
        "branching": ("direct", "logical"),
        "semibranching": ("direct", "logical"),
    }
    if kind not in table:
        raise ValidationError(f"unknown check kind {kind!r}")
    if method == "all":
        return table[kind]
    if method not in table[kind]:
        raise ValidationError(f"unknown method {method!r} for {kind} (have {', '.join(table[kind])})")
    return (method,)


def _branching_witness(R, F, G, variant):
    closure_f = weak.tau_star(F).mapping
    closure_g = weak.tau_star(G).mapping
    for (s, t) in sorted(R.pairs):
        for a in sorted(F.labels):
            left_ok = branching._clause_ok(s, t, a, F, G, closure_g, R.pairs, variant)
            conv = frozenset((y, x) for (x, y) in R.pairs)
            right_ok = branching._clause_ok(t, s, a, G, F, closure_f, conv, variant)
            if not (left_ok and right_ok):
                return {"label": a, "left_state": s, "right_state": t,
                        "side": "left" if not left_ok else "right"}
    return None


def run_check(kind: str, req: models.CheckRequest) -> models.CheckResponse:
    F = lts_from_doc(req.left)
    G = lts_from_doc(req.right)
    R = relation_from_doc(req.relation, F.states, G.states)
    methods = _check_methods(kind, req.method)
    verdicts = {}
    for m in methods:
        if kind == "strong":
            verdicts[m] = strong.is_strong_bisimulation(R, F, G, method=m)
        elif kind == "weak":
            verdicts[m] = weak.is_weak_bisimulation(R, F, G, method=m)
        else:
            verdicts[m] = branching.is_branching_bisimulation(R, F, G, variant=kind, method=m)
    holds = all(verdicts.values())
    witness = None
    if not holds:
        if kind == "strong":
            bad = strong.find_strong_violation(R, F, G)
            witness = bad.as_dict() if bad else None
        elif kind == "weak":
            bad = strong.find_strong_violation(R, weak.saturate(F), weak.saturate(G))
            witness = dict(bad.as_dict(), note="on the saturated systems") if bad else None
        else:
            witness = _branching_witness(R, F, G, kind)
    return models.CheckResponse(kind=kind, holds=holds, methods=verdicts, witness=witness)


def run_greatest(kind: str, req: models.GreatestRequest) -> models.RelationResponse:
    F = lts_from_doc(req.left)
    G = lts_from_doc(req.right)
    if kind == "strong":
        R = strong.greatest_strong_bisimulation(F, G)
    elif kind == "weak":
        R = weak.greatest_weak_bisimulation(F, G)
    elif kind in ("branching", "semibranching"):
        R = branching.greatest_branching_bisimulation(F, G, variant=kind)
    else:
        raise ValidationError(f"unknown kind {kind!r}")
    return models.RelationResponse(kind=kind, pairs=relation_pairs(R))


def run_saturate(req: models.SaturateRequest) -> models.SaturateResponse:
    F = lts_from_doc(req.system)
    if req.kind == "weak":
        return models.SaturateResponse(kind="weak", system=lts_to_doc(weak.saturate(F)))
    if req.kind in ("branching", "semibranching"):
        sat = branching.branching_saturate(F, variant=req.kind)
        rows = [models.PairRow(label=a, state=s, pairs=sorted(sat.rows[a].mapping[s]))
                for a in sorted(sat.labels) for s in sorted(sat.states)]
        return models.SaturateResponse(kind=req.kind, rows=rows)
    raise ValidationError(f"unknown saturation kind {req.kind!r}")


def run_laxify(req: models.LaxifyRequest) -> models.LaxifyResponse:
    F = lts_from_doc(req.system)
    Lx = weak.laxify(F)
    eps = {s: sorted(Lx.eps.mapping[s]) for s in sorted(Lx.states)}
    letters = {a: {s: sorted(Lx.letters[a].mapping[s]) for s in sorted(Lx.states)}
               for a in sorted(Lx.visible)}
    return models.LaxifyResponse(eps=eps, letters=letters)


def run_prob_check(req: models.ProbCheckRequest) -> models.CheckResponse:
    P = markov_from_doc(req.process)
    R = relation_from_doc(req.relation, P.space.carrier, P.space.carrier)
    bad = markov.prob_bisim_equiv_violation(R, P)
    witness = None
    if bad is not None:
        s, t, U = bad
        witness = {"left_state": s, "right_state": t, "set": sorted(U),
                   "values": [_jsonable(P.value(s, U)), _jsonable(P.value(t, U))]}
    return models.CheckResponse(kind="prob", holds=bad is None,
                                methods={"direct": bad is None}, witness=witness)


def run_prob_between(req: models.ProbBetweenRequest) -> models.CheckResponse:
    F = markov_from_doc(req.left)
    G = markov_from_doc(req.right)
    R = relation_from_doc(req.relation, F.space.carrier, G.space.carrier)
    holds = markov.is_prob_bisimulation_between(R, F, G)
    witness = None
    if not holds:
        report = markov.analyze_relation(R)
        bad = markov.prob_bisim_equiv_violation(report.r_star, markov.sum_process(F, G))
        if bad is not None:
            s, t, U = bad
            witness = {"left_state": s, "right_state": t, "set": sorted(U),
                       "note": "on the sum process"}
    return models.CheckResponse(kind="prob-between", holds=holds,
                                methods={"direct": holds}, witness=witness)


def run_prob_quotient(req: models.ProbCheckRequest) -> models.QuotientResponse:
    P = markov_from_doc(req.process)
    R = relation_from_doc(req.relation, P.space.carrier, P.space.carrier)
    proc, witness = markov.quotient_process(P, R)
    if proc is None:
        s, t, U = witness
        return models.QuotientResponse(holds=False,
                                       witness={"left_state": s, "right_state": t,
                                                "set": sorted(U)})
    return models.QuotientResponse(holds=True, process=markov_to_doc(proc))


def run_prob_sigma(req: models.ProbSpanRequest) -> models.SigmaResponse:
    F = markov_from_doc(req.left)
    G = markov_from_doc(req.right)
    R = relation_from_doc(req.relation, F.space.carrier, G.space.carrier)
    atoms_l, atoms_r, atoms_p = markov.coarsened_sigma_algebras(R, F, G)
    return models.SigmaResponse(left_atoms=[sorted(b) for b in atoms_l],
                                right_atoms=[sorted(b) for b in atoms_r],
                                pair_atoms=[sorted(b) for b in atoms_p])


def run_prob_span(req: models.ProbSpanRequest) -> models.SpanResponse:
    F = markov_from_doc(req.left)
    G = markov_from_doc(req.right)
    R = relation_from_doc(req.relation, F.space.carrier, G.space.carrier)
    span, witness = markov.build_span(R, F, G)
    if span is None:
        s, t, U, V = witness
        return models.SpanResponse(holds=False,
                                   witness={"left_state": s, "right_state": t,
                                            "left_set": sorted(U), "right_set": sorted(V),
                                            "values": [_jsonable(F.value(s, U)),
                                                       _jsonable(G.value(t, V))]})
    verdict = markov.verify_giry_span(span)
    return models.SpanResponse(holds=bool(verdict), verified=bool(verdict),
                               span=span_to_doc(span),
                               witness=verdict.witness if not verdict else None)


def run_prob_factor(req: models.ProbFactorRequest) -> models.FactorResponse:
    span = span_from_doc(req.span)
    proc, conflict = markov.factor_span_through_image(span)
    if proc is None:
        return models.FactorResponse(holds=False, conflict=_jsonable(conflict))
    return models.FactorResponse(holds=True, process=markov_to_doc(proc))
