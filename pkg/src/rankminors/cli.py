"""Command-line front end.  Every subcommand prints one JSON report on stdout.

Exit codes: 0 success, 1 usage or input error, 2 rank too low / infeasible,
3 node budget exceeded.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .bias import analytic_rank, bias_exact, bias_mc
from .budgets import BudgetExpression, budget_eval, describe
from .covering import verify_counterexample
from .disjoint import disjoint_rank_find
from .errors import Infeasible, Obstructed, RankMinorsError, RankTooLow, ScaleExceeded
from .families import PartitionFamily, family_for
from .generators import generate, to_json
from .minors import general_minor_find
from .oracles import BUDGET_ENV, disjoint_rank_exact, essential_rank_exact, node_budget, rrank_exact
from .tensor import Tensor, restrict


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _read(path: str) -> tuple[Tensor, str]:
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from None
    try:
        return Tensor.from_json(raw.decode()), hashlib.sha256(raw).hexdigest()
    except (ValueError, KeyError, TypeError) as e:
        raise UsageError(f"bad tensor file {path}: {e}") from None


def _family(notion: str, d: int) -> PartitionFamily:
    if notion in ("tr", "sr", "pr"):
        return family_for(notion, d)
    try:
        fam = PartitionFamily.from_json(Path(notion).read_text())
    except (OSError, ValueError, KeyError) as e:
        raise UsageError(f"notion must be tr, sr, pr or a partition-family file: {e}") from None
    if fam.d != d:
        raise UsageError(f"family is on {fam.d} axes but the tensor has order {d}")
    return fam


def _write(path: str | None, data: dict) -> str | None:
    if path:
        Path(path).write_text(json.dumps(data, indent=1, sort_keys=True))
    return path


def cmd_rank(args) -> dict:
    t, digest = _read(args.input)
    R = _family(args.notion, t.order)
    if args.kind == "essential":
        rep = essential_rank_exact(t, R)
        out = {"value": rep.value}
        cert = {"modifier": rep.modifier.to_dict(), "certificate": rep.certificate.to_dict()}
    elif args.kind == "disjoint":
        value, sel = disjoint_rank_exact(t, R)
        out = {"value": value, "selection": sel.to_dict()}
        cert = out
    else:
        rep = rrank_exact(t, R)
        out = {"value": rep.value, "lower_bound": rep.to_dict()["lower_bound"],
               "certificate_valid": rep.certificate.verify(t)}
        cert = rep.certificate.to_dict()
    out["certificate_path"] = _write(args.emit_certificate, cert)
    return {"input_sha256": digest, "result": out}


def cmd_minor(args) -> dict:
    t, digest = _read(args.input)
    R = _family(args.notion, t.order)
    from .bias import MinorTrace

    trace = MinorTrace()
    sel = general_minor_find(t, R, args.target, trace)
    sub = restrict(t, sel)
    rep = rrank_exact(sub, R)
    out = {"selection": sel.to_dict(), "sizes": list(sel.sizes), "minor_rank": rep.value,
           "verified": rep.value >= args.target, "trace": trace.steps}
    out["certificate_path"] = _write(args.emit_certificate, {"selection": sel.to_dict(), "target": args.target,
                                                             "minor": sub.to_dict()})
    return {"input_sha256": digest, "result": out}


def cmd_disjoint(args) -> dict:
    t, digest = _read(args.input)
    R = _family(args.notion, t.order)
    cert = disjoint_rank_find(t, R, args.target)
    out = cert.to_dict()
    out["certificate_path"] = _write(args.emit_certificate, cert.to_dict())
    return {"input_sha256": digest, "result": out}


def cmd_bias(args) -> dict:
    t, digest = _read(args.input)
    if args.samples is not None:
        res = bias_mc(t, args.samples, args.seed).to_dict()
    else:
        res = bias_exact(t).to_dict()
        if args.analytic:
            res["analytic_rank"] = analytic_rank(t).to_dict()
    return {"input_sha256": digest, "seed": args.seed if args.samples is not None else None, "result": res}


def cmd_verify(args) -> dict:
    return {"result": verify_counterexample()}


def _params(pairs) -> dict:
    out: dict = {}
    for item in pairs or []:
        if "=" not in item:
            raise UsageError(f"parameter {item!r} is not key=value")
        k, v = item.split("=", 1)
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v
    return out


def cmd_budget(args) -> dict:
    if args.list:
        return {"result": describe()}
    if not args.name:
        raise UsageError("budget needs --name or --list")
    params = _params(args.param)
    for key in ("l", "d", "q", "s", "m"):
        v = getattr(args, key)
        if v is not None:
            params[key] = v
    if args.base:
        params["base"] = args.base
    expr = BudgetExpression(args.name, params)
    value = budget_eval(expr)
    return {"result": {"expression": expr.to_dict(), "value": str(value), "digits": len(str(value))}}


def cmd_generate(args) -> dict:
    obj = generate(args.kind, _params(args.param), args.seed)
    text = to_json(obj)
    if args.output:
        Path(args.output).write_text(text)
        res = {"kind": args.kind, "output": args.output}
    else:
        res = {"kind": args.kind, "tensor": json.loads(text)}
    return {"seed": args.seed, "output_sha256": hashlib.sha256(text.encode()).hexdigest(), "result": res}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rankminors", description="Rank notions, minors and disjoint minors of tensors over F_p.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def tensor_args(p, target=False):
        p.add_argument("--input", required=True, help="tensor JSON file")
        p.add_argument("--notion", default="tr", help="tr, sr, pr or a partition-family JSON file")
        if target:
            p.add_argument("--target", type=int, required=True)
        p.add_argument("--emit-certificate", metavar="PATH")

    p = sub.add_parser("rank", help="exact R-rank with a certificate")
    tensor_args(p)
    p.add_argument("--kind", choices=("plain", "essential", "disjoint"), default="plain")
    p.set_defaults(func=cmd_rank)

    for name, func, help_ in (("minor", cmd_minor, "find a small minor of rank >= target"),
                              ("disjoint", cmd_disjoint, "find a disjoint minor of rank >= target")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("action", choices=("find",))
        tensor_args(p, target=True)
        p.set_defaults(func=func)

    p = sub.add_parser("bias", help="bias of the multilinear form")
    p.add_argument("--input", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true")
    g.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--analytic", action="store_true", help="also report the analytic rank")
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser("verify-counterexample", help="check the 11 x 4 x 15 slice-rank example")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("budget", help="evaluate a budget formula exactly")
    p.add_argument("--name")
    p.add_argument("--list", action="store_true")
    for key in ("l", "d", "q", "s", "m"):
        p.add_argument(f"--{key}", type=int)
    p.add_argument("--base")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("generate", help="write a seeded random or planted tensor")
    p.add_argument("--kind", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--output")
    p.set_defaults(func=cmd_generate)
    return ap


def _emit(report: dict):
    print(json.dumps(report, indent=1, sort_keys=True, default=str))


def main(argv=None) -> int:
    start = time.perf_counter()
    report = {"version": __version__, "node_budget": node_budget(), "node_budget_env": BUDGET_ENV}
    try:
        args = build_parser().parse_args(argv)
        report["command"] = args.command
        report.update(args.func(args))
        code = 0
    except UsageError as e:
        report.update(error="usage", message=str(e))
        code = 1
    except (RankTooLow, Infeasible, Obstructed) as e:
        report.update(error=type(e).__name__, message=str(e))
        code = 2
    except ScaleExceeded as e:
        report.update(error="ScaleExceeded", message=str(e), scale_exceeded=True)
        code = 3
    except (RankMinorsError, ValueError) as e:
        report.update(error=type(e).__name__, message=str(e))
        code = 1
    report["seconds"] = round(time.perf_counter() - start, 4)
    report["exit_code"] = code
    _emit(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
