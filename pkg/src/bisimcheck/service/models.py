"""Pydantic request and response models for the verdict service.

The documents mirror the file formats one to one: a system document carries
states, labels and transition triples; a process document carries states,
atom blocks and a kernel of rational strings keyed by atom index.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel


class LtsDoc(BaseModel):
    states: list[str]
    labels: list[str]
    transitions: list[tuple[str, str, str]] = []


class RelationDoc(BaseModel):
    pairs: list[tuple[str, str]] = []


class MarkovDoc(BaseModel):
    states: list[str]
    atoms: list[list[str]]
    kernel: dict[str, dict[int, str]] = {}


class SpanDoc(BaseModel):
    left: MarkovDoc
    right: MarkovDoc
    apex: MarkovDoc
    leg_left: dict[str, str]
    leg_right: dict[str, str]


class CheckRequest(BaseModel):
    left: LtsDoc
    right: LtsDoc
    relation: RelationDoc
    method: str = "all"


class GreatestRequest(BaseModel):
    left: LtsDoc
    right: LtsDoc


class SaturateRequest(BaseModel):
    system: LtsDoc
    kind: str = "weak"


class LaxifyRequest(BaseModel):
    system: LtsDoc


class ProbCheckRequest(BaseModel):
    process: MarkovDoc
    relation: RelationDoc


class ProbBetweenRequest(BaseModel):
    left: MarkovDoc
    right: MarkovDoc
    relation: RelationDoc


class ProbSpanRequest(BaseModel):
    left: MarkovDoc
    right: MarkovDoc
    relation: RelationDoc


class ProbFactorRequest(BaseModel):
    span: SpanDoc


class CheckResponse(BaseModel):
    kind: str
    holds: bool
    methods: dict[str, bool]
    witness: Optional[dict] = None


class RelationResponse(BaseModel):
    kind: str
    pairs: list[tuple[str, str]]


class PairRow(BaseModel):
    label: str
    state: str
    pairs: list[tuple[str, str]]


class SaturateResponse(BaseModel):
    kind: str
    system: Optional[LtsDoc] = None
    rows: Optional[list[PairRow]] = None


class LaxifyResponse(BaseModel):
    eps: dict[str, list[str]]
    letters: dict[str, dict[str, list[str]]]


class QuotientResponse(BaseModel):
    holds: bool
    process: Optional[MarkovDoc] = None
    witness: Optional[dict] = None


class SigmaResponse(BaseModel):
    left_atoms: list[list[str]]
    right_atoms: list[list[str]]
    pair_atoms: list[list[tuple[str, str]]]


class SpanResponse(BaseModel):
    holds: bool
    verified: Optional[bool] = None
    span: Optional[SpanDoc] = None
    witness: Optional[dict] = None


class FactorResponse(BaseModel):
    holds: bool
    process: Optional[MarkovDoc] = None
    conflict: Optional[dict] = None
