"""FastAPI application exposing the verdict operations over HTTP.

Structural problems with a submitted document (unknown states, bad labels,
guard overruns, ineligible relations) come back as 400 with a detail string;
verdicts, witnesses and constructions are plain 200 responses.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import BisimError
from . import models, ops

app = FastAPI(title="bisimcheck", version="0.1.0",
              description="Bisimulation verdicts for finite transition systems "
                          "and finite Markov processes")


def _guarded(fn, *args):
    try:
        return fn(*args)
    except BisimError as err:
        raise HTTPException(status_code=400, detail=str(err)) from None


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/check/{kind}", response_model=models.CheckResponse)
def check(kind: str, req: models.CheckRequest) -> models.CheckResponse:
    return _guarded(ops.run_check, kind, req)


@app.post("/greatest/{kind}", response_model=models.RelationResponse)
def greatest(kind: str, req: models.GreatestRequest) -> models.RelationResponse:
    return _guarded(ops.run_greatest, kind, req)


@app.post("/saturate", response_model=models.SaturateResponse)
def saturate(req: models.SaturateRequest) -> models.SaturateResponse:
    return _guarded(ops.run_saturate, req)


@app.post("/laxify", response_model=models.LaxifyResponse)
def laxify(req: models.LaxifyRequest) -> models.LaxifyResponse:
    return _guarded(ops.run_laxify, req)


@app.post("/prob/check", response_model=models.CheckResponse)
def prob_check(req: models.ProbCheckRequest) -> models.CheckResponse:
    return _guarded(ops.run_prob_check, req)


@app.post("/prob/check-between", response_model=models.CheckResponse)
def prob_check_between(req: models.ProbBetweenRequest) -> models.CheckResponse:
    return _guarded(ops.run_prob_between, req)


@app.post("/prob/quotient", response_model=models.QuotientResponse)
def prob_quotient(req: models.ProbCheckRequest) -> models.QuotientResponse:
    return _guarded(ops.run_prob_quotient, req)


@app.post("/prob/sigma", response_model=models.SigmaResponse)
def prob_sigma(req: models.ProbSpanRequest) -> models.SigmaResponse:
    return _guarded(ops.run_prob_sigma, req)


@app.post("/prob/span", response_model=models.SpanResponse)
def prob_span(req: models.ProbSpanRequest) -> models.SpanResponse:
    return _guarded(ops.run_prob_span, req)


@app.post("/prob/factor", response_model=models.FactorResponse)
def prob_factor(req: models.ProbFactorRequest) -> models.FactorResponse:
    return _guarded(ops.run_prob_factor, req)
