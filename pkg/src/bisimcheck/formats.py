"""Text and JSON formats for systems, relations, processes and spans.

The transition-system format is line oriented and diff friendly:

    states p0 p1 p2
    labels a tau
    p0 tau p1
    p1 a p2

Relations are one ``left right`` pair per line.  Processes are a single JSON
document with fields ``states``, ``atoms`` (array of arrays of state names)
and ``kernel`` (state -> atom index -> rational string); weights are exact
rationals written "p/q" or "p", never decimals.  ``#`` starts a comment in
the line-oriented formats.

Serialization is canonical (sorted states, labels, transitions, pairs), so
serialize . parse acts as a canonicalizer and round-trips exactly.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .errors import FormatError
from .lts import Lts, Relation, validate_lts
from .markov import GirySpan, MarkovProcess, MeasurableMap, validate_markov

_RATIONAL = re.compile(r"^(0|[1-9][0-9]*)(/([1-9][0-9]*))?$")


def parse_rational(text: str, line=None) -> Fraction:
    """Parse a non-negative rational written as "p" or "p/q"."""
    m = _RATIONAL.match(text.strip())
    if not m:
        raise FormatError(f"not a rational (use p or p/q): {text!r}", line)
    num = int(m.group(1))
    den = int(m.group(3)) if m.group(3) else 1
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_lts(text: str) -> Lts:
    """Parse the line-oriented system format; semantic checks via validate_lts."""
    states = []
    labels = []
    transitions = []
    for lineno, tokens in _content_lines(text):
        if tokens[0] == "states":
            states.extend(tokens[1:])
        elif tokens[0] == "labels":
            labels.extend(tokens[1:])
        elif len(tokens) == 3:
            transitions.append((tokens[0], tokens[1], tokens[2]))
        else:
            raise FormatError(f"expected 'states ...', 'labels ...' or 'src label dst', got {' '.join(tokens)!r}",
                              lineno)
    return validate_lts(states, labels, transitions)


def serialize_lts(F: Lts) -> str:
    lines = ["states " + " ".join(sorted(F.states)) if F.states else "states",
             "labels " + " ".join(sorted(F.labels)) if F.labels else "labels"]
    triples = sorted((s, a, d)
                     for a in F.labels for s in F.states for d in F.trans[a].mapping[s])
    lines.extend(f"{s} {a} {d}" for (s, a, d) in triples)
    return "\n".join(lines) + "\n"


def parse_relation(text: str, left, right) -> Relation:
    """Parse one pair per line against the supplied state spaces."""
    left = frozenset(left)
    right = frozenset(right)
    pairs = set()
    for lineno, tokens in _content_lines(text):
        if len(tokens) != 2:
            raise FormatError(f"expected 'left right', got {' '.join(tokens)!r}", lineno)
        s, t = tokens
        if s not in left:
            raise FormatError(f"unknown state {s!r} on the left", lineno)
        if t not in right:
            raise FormatError(f"unknown state {t!r} on the right", lineno)
        pairs.add((s, t))
    return Relation(left, right, frozenset(pairs))


def serialize_relation(R: Relation) -> str:
    return "".join(f"{s} {t}\n" for (s, t) in sorted(R.pairs))


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise FormatError(f"invalid JSON in {what}: {err}", err.lineno) from None


def _markov_from_doc(doc) -> MarkovProcess:
    if not isinstance(doc, dict):
        raise FormatError("process document must be a JSON object")
    for field in ("states", "atoms", "kernel"):
        if field not in doc:
            raise FormatError(f"process document is missing {field!r}")
    if not isinstance(doc["states"], list) or not isinstance(doc["atoms"], list):
        raise FormatError("states and atoms must be arrays")
    if not all(isinstance(b, list) for b in doc["atoms"]):
        raise FormatError("atoms must be arrays of state names")
    if not isinstance(doc["kernel"], dict) or \
            not all(isinstance(r, dict) for r in doc["kernel"].values()):
        raise FormatError("kernel must map states to index->weight objects")
    kernel = {}
    for s, row in doc["kernel"].items():
        parsed = {}
        for idx, w in row.items():
            if not isinstance(w, str):
                raise FormatError(f"weight {w!r} in row {s!r} must be a rational string")
            if not str(idx).isdigit():
                raise FormatError(f"atom index {idx!r} in row {s!r} is not a number")
            parsed[int(idx)] = parse_rational(w)
        kernel[s] = parsed
    return validate_markov(doc["states"], [frozenset(b) for b in doc["atoms"]], kernel)


def parse_markov(text: str) -> MarkovProcess:
    """Parse the JSON process document and validate it."""
    doc = _load_json(text, "process document")
    return _markov_from_doc(doc)


def _markov_doc(P: MarkovProcess) -> dict:
    atoms = [sorted(block) for block in P.space.atoms]
    index = {block: i for i, block in enumerate(P.space.atoms)}
    kernel = {}
    for s in sorted(P.space.carrier):
        row = {str(index[block]): format_rational(w)
               for block, w in sorted(P.kernel[s].weights.items(), key=lambda kv: index[kv[0]])
               if w != 0}
        kernel[s] = row
    return {"states": sorted(P.space.carrier), "atoms": atoms, "kernel": kernel}


def serialize_markov(P: MarkovProcess) -> str:
    return json.dumps(_markov_doc(P), indent=2) + "\n"


def parse_span(text: str) -> GirySpan:
    """Parse the JSON span document written by the span construction."""
    doc = _load_json(text, "span document")
    if not isinstance(doc, dict):
        raise FormatError("span document must be a JSON object")
    for field in ("left", "right", "apex", "leg_left", "leg_right"):
        if field not in doc:
            raise FormatError(f"span document is missing {field!r}")
    if not isinstance(doc["leg_left"], dict) or not isinstance(doc["leg_right"], dict):
        raise FormatError("span legs must be objects mapping apex points to states")
    left = _markov_from_doc(doc["left"])
    right = _markov_from_doc(doc["right"])
    apex = _markov_from_doc(doc["apex"])
    leg_l = MeasurableMap(apex.space, left.space, dict(doc["leg_left"]))
    leg_r = MeasurableMap(apex.space, right.space, dict(doc["leg_right"]))
    return GirySpan(left, right, apex, leg_l, leg_r)


def serialize_span(span: GirySpan) -> str:
    doc = {
        "left": _markov_doc(span.left),
        "right": _markov_doc(span.right),
        "apex": _markov_doc(span.apex),
        "leg_left": {p: span.leg_l(p) for p in sorted(span.apex.space.carrier)},
        "leg_right": {p: span.leg_r(p) for p in sorted(span.apex.space.carrier)},
    }
    return json.dumps(doc, indent=2) + "\n"
