"""Command-line client for the verdict operations.

The CLI parses the on-disk formats, hands the same request models to the
same operation layer the HTTP service uses, and renders the response either
as text or as JSON.  Exit codes: 0 when the property holds or the
construction succeeds, 1 when the property fails (a witness is printed),
2 for usage, parse and validation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import formats
from .errors import BisimError
from .service import models, ops

CHECK_KINDS = ("strong", "weak", "branching", "semibranching")


def _read(path: str) -> str:
    return Path(path).read_text()


def _load_lts_doc(path: str) -> models.LtsDoc:
    return ops.lts_to_doc(formats.parse_lts(_read(path)))


def _load_markov_doc(path: str) -> models.MarkovDoc:
    return ops.markov_to_doc(formats.parse_markov(_read(path)))


def _load_relation_doc(path: str, left, right) -> models.RelationDoc:
    R = formats.parse_relation(_read(path), left, right)
    return models.RelationDoc(pairs=sorted(R.pairs))


def _emit(args, resp, text_lines) -> None:
    if args.format == "json":
        print(json.dumps(resp.model_dump(), indent=2))
    else:
        for line in text_lines:
            print(line)


def _verdict_lines(resp: models.CheckResponse) -> list:
    lines = [f"verdict: {'holds' if resp.holds else 'fails'}"]
    for m, v in resp.methods.items():
        lines.append(f"method {m}: {'holds' if v else 'fails'}")
    if resp.witness:
        parts = " ".join(f"{k}={v}" for k, v in resp.witness.items())
        lines.append(f"witness: {parts}")
    return lines


def _cmd_check(args) -> int:
    left = _load_lts_doc(args.left)
    right = _load_lts_doc(args.right)
    relation = _load_relation_doc(args.relation, left.states, right.states)
    req = models.CheckRequest(left=left, right=right, relation=relation, method=args.method)
    resp = ops.run_check(args.kind, req)
    _emit(args, resp, _verdict_lines(resp))
    return 0 if resp.holds else 1


def _cmd_greatest(args) -> int:
    req = models.GreatestRequest(left=_load_lts_doc(args.left), right=_load_lts_doc(args.right))
    resp = ops.run_greatest(args.kind, req)
    body = "".join(f"{s} {t}\n" for (s, t) in resp.pairs)
    if args.out:
        Path(args.out).write_text(body)
    _emit(args, resp, [f"{s} {t}" for (s, t) in resp.pairs])
    return 0


def _cmd_saturate(args) -> int:
    req = models.SaturateRequest(system=_load_lts_doc(args.system), kind=args.kind)
    resp = ops.run_saturate(req)
    if resp.system is not None:
        body = formats.serialize_lts(ops.lts_from_doc(resp.system))
        if args.out:
            Path(args.out).write_text(body)
        _emit(args, resp, body.rstrip("\n").split("\n"))
    else:
        lines = [f"{row.label} {row.state}: " + " ".join(f"({x},{y})" for (x, y) in row.pairs)
                 for row in resp.rows]
        _emit(args, resp, lines)
    return 0


def _cmd_laxify(args) -> int:
    req = models.LaxifyRequest(system=_load_lts_doc(args.system))
    resp = ops.run_laxify(req)
    lines = [f"eps {s}: " + " ".join(succ) for s, succ in resp.eps.items()]
    for a, row in resp.letters.items():
        lines.extend(f"{a} {s}: " + " ".join(succ) for s, succ in row.items())
    _emit(args, resp, lines)
    return 0


def _cmd_prob_check(args) -> int:
    process = _load_markov_doc(args.process)
    relation = _load_relation_doc(args.relation, process.states, process.states)
    resp = ops.run_prob_check(models.ProbCheckRequest(process=process, relation=relation))
    _emit(args, resp, _verdict_lines(resp))
    return 0 if resp.holds else 1


def _cmd_prob_between(args) -> int:
    left = _load_markov_doc(args.left)
    right = _load_markov_doc(args.right)
    relation = _load_relation_doc(args.relation, left.states, right.states)
    resp = ops.run_prob_between(models.ProbBetweenRequest(left=left, right=right,
                                                          relation=relation))
    _emit(args, resp, _verdict_lines(resp))
    return 0 if resp.holds else 1


def _cmd_prob_quotient(args) -> int:
    process = _load_markov_doc(args.process)
    relation = _load_relation_doc(args.relation, process.states, process.states)
    resp = ops.run_prob_quotient(models.ProbCheckRequest(process=process, relation=relation))
    if resp.holds:
        body = json.dumps(resp.process.model_dump(), indent=2) + "\n"
        if args.out:
            Path(args.out).write_text(body)
        _emit(args, resp, ["verdict: holds"] + body.rstrip("\n").split("\n"))
        return 0
    parts = " ".join(f"{k}={v}" for k, v in resp.witness.items())
    _emit(args, resp, ["verdict: fails", f"witness: {parts}"])
    return 1


def _cmd_prob_sigma(args) -> int:
    left = _load_markov_doc(args.left)
    right = _load_markov_doc(args.right)
    relation = _load_relation_doc(args.relation, left.states, right.states)
    resp = ops.run_prob_sigma(models.ProbSpanRequest(left=left, right=right, relation=relation))

    def fmt(block):
        return "{" + ",".join(str(x) for x in block) + "}"

    lines = ["left: " + " ".join(fmt(b) for b in resp.left_atoms),
             "right: " + " ".join(fmt(b) for b in resp.right_atoms),
             "pairs: " + " ".join(fmt([f"({s},{t})" for (s, t) in b]) for b in resp.pair_atoms)]
    _emit(args, resp, lines)
    return 0


def _cmd_prob_span(args) -> int:
    left = _load_markov_doc(args.left)
    right = _load_markov_doc(args.right)
    relation = _load_relation_doc(args.relation, left.states, right.states)
    resp = ops.run_prob_span(models.ProbSpanRequest(left=left, right=right, relation=relation))
    if resp.holds:
        if args.out:
            Path(args.out).write_text(json.dumps(resp.span.model_dump(), indent=2) + "\n")
        _emit(args, resp, ["verdict: holds", f"verified: {resp.verified}"])
        return 0
    lines = ["verdict: fails"]
    if resp.witness:
        lines.append("witness: " + " ".join(f"{k}={v}" for k, v in resp.witness.items()))
    _emit(args, resp, lines)
    return 1


def _cmd_prob_factor(args) -> int:
    doc = models.SpanDoc(**json.loads(_read(args.span)))
    resp = ops.run_prob_factor(models.ProbFactorRequest(span=doc))
    if resp.holds:
        body = json.dumps(resp.process.model_dump(), indent=2)
        _emit(args, resp, ["verdict: holds"] + body.split("\n"))
        return 0
    parts = " ".join(f"{k}={v}" for k, v in resp.conflict.items())
    _emit(args, resp, ["verdict: fails", f"conflict: {parts}"])
    return 1


def _cmd_serve(args) -> int:
    try:
        import uvicorn
    except ImportError:
        print("error: the serve command needs uvicorn (pip install uvicorn)", file=sys.stderr)
        return 2
    uvicorn.run("bisimcheck.service.app:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bisimcheck",
                                     description="Bisimulation verdicts, two ways, cross-checked.")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide a bisimulation kind for a given relation")
    p.add_argument("kind", choices=CHECK_KINDS)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--relation", required=True)
    p.add_argument("--method", default="all")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("greatest", help="compute the largest bisimulation of a kind")
    p.add_argument("kind", choices=CHECK_KINDS)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_greatest)

    p = sub.add_parser("saturate", help="saturate a system with internal actions")
    p.add_argument("--system", required=True)
    p.add_argument("--kind", choices=("weak", "branching", "semibranching"), default="weak")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_saturate)

    p = sub.add_parser("laxify", help="present a system as a lax system over visible words")
    p.add_argument("--system", required=True)
    p.set_defaults(fn=_cmd_laxify)

    prob = sub.add_parser("prob", help="probabilistic (Markov process) operations")
    psub = prob.add_subparsers(dest="subcommand", required=True)

    p = psub.add_parser("check", help="equivalence-relation bisimulation on one process")
    p.add_argument("--process", required=True)
    p.add_argument("--relation", required=True)
    p.set_defaults(fn=_cmd_prob_check)

    p = psub.add_parser("check-between", help="bisimulation between two processes via the sum")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--relation", required=True)
    p.set_defaults(fn=_cmd_prob_between)

    p = psub.add_parser("quotient", help="quotient a process by a bisimulation equivalence")
    p.add_argument("--process", required=True)
    p.add_argument("--relation", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_prob_quotient)

    p = psub.add_parser("sigma", help="coarsened sigma-algebras induced by a relation")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--relation", required=True)
    p.set_defaults(fn=_cmd_prob_sigma)

    p = psub.add_parser("span", help="build and verify a span from a logical relation")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--relation", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_prob_span)

    p = psub.add_parser("factor", help="factor a span through its image relation")
    p.add_argument("--span", required=True)
    p.set_defaults(fn=_cmd_prob_factor)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return err.code if isinstance(err.code, int) else 2
    try:
        return args.fn(args)
    except BisimError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
