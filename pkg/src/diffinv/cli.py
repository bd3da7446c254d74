"""Command-line front end: ``diffinv <command> --ctx ctx.json [flags] [exprs...]``.

Exit codes: 0 success, 1 a check returned false, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import re
import sys
from typing import List, Optional

from . import actions, invariants
from .actions import AffineElement, FiniteGroup, GaugeMatrix, ParametrizedGroup
from .diffcore import Context, DiffAlgebraError, DiffRational, derive, derive_multi
from .parser import ParseError, parse

CONTEXT_FIELDS = ("m", "n", "parameters", "seed", "eval_range", "trials", "retries", "closure_bound", "groups")


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    def __init__(self, result, report=None):
        super().__init__("check failed")
        self.result = result
        self.report = report


# --------------------------------------------------------------------------
# context and argument decoding


def load_context(path: Optional[str]) -> Context:
    if path is None:
        raise UsageError("--ctx is required")
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError("cannot read context %s: %s" % (path, exc))
    if not isinstance(data, dict):
        raise UsageError("context file must hold a JSON object")
    unknown = set(data) - set(CONTEXT_FIELDS)
    if unknown:
        raise UsageError("unknown context fields: %s" % ", ".join(sorted(unknown)))
    if "m" not in data or "n" not in data:
        raise UsageError("context needs m and n")
    data = dict(data)
    data["parameters"] = tuple(data.get("parameters", ()))
    try:
        return Context(**data)
    except (TypeError, ValueError) as exc:
        raise UsageError("invalid context: %s" % exc)


def parse_alpha(text: str) -> tuple:
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        text = text[1:-1]
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError("bad multi-index %r" % text)


def parse_alphas(text: str) -> List[tuple]:
    return [parse_alpha(part) for part in text.split(";") if part.strip()]


def _json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError("%s must be JSON: %s" % (what, exc))


def parse_vector(text, ctx: Context, what: str = "vector") -> List[DiffRational]:
    data = _json_arg(text, what) if isinstance(text, str) else text
    if not isinstance(data, list):
        raise UsageError("%s must be a JSON array" % what)
    return [parse(str(v), ctx) for v in data]


def parse_matrix(text, ctx: Context, what: str = "matrix") -> List[List[DiffRational]]:
    data = _json_arg(text, what) if isinstance(text, str) else text
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise UsageError("%s must be a JSON array of rows" % what)
    return [[parse(str(v), ctx) for v in row] for row in data]


_GROUP_RE = re.compile(r"(translations|gl|linear|perm)(\d+)$")


def resolve_group(name: Optional[str], ctx: Context):
    if name is None:
        raise UsageError("--group is required")
    if name in ctx.groups:
        return _user_group(name, ctx.groups[name], ctx)
    if name == "sign":
        return actions.sign_group(ctx.n)
    if name == "trivial":
        return actions.trivial_group(ctx.n)
    mt = _GROUP_RE.match(name)
    if mt:
        kind, n = mt.group(1), int(mt.group(2))
        if n != ctx.n:
            raise UsageError("group %s acts on C^%d but n=%d" % (name, n, ctx.n))
        return {"translations": actions.translations, "gl": actions.general_affine,
                "linear": actions.general_linear, "perm": actions.permutation_group}[kind](n)
    raise UsageError("unknown group %r" % name)


def _user_group(name: str, entry, ctx: Context):
    if not isinstance(entry, dict):
        raise UsageError("group %s must be an object" % name)
    params = tuple(entry.get("params", ()))
    gctx = dataclasses.replace(ctx, parameters=ctx.parameters + tuple(p for p in params if p not in ctx.parameters))
    zero = ["0"] * ctx.n

    def element(e):
        try:
            return AffineElement(parse_matrix(e["h"], gctx, "h"), parse_vector(e.get("h0", zero), gctx, "h0"))
        except (KeyError, TypeError) as exc:
            raise UsageError("bad element in group %s: %s" % (name, exc))
        except ValueError as exc:
            raise UsageError("bad element in group %s: %s" % (name, exc))

    if "elements" in entry:
        gens = [element(e) for e in entry["elements"]]
        return FiniteGroup(actions.group_closure(gens, ctx.closure_bound), name)
    if "h" in entry:
        return ParametrizedGroup(element(entry), params, name)
    raise UsageError("group %s needs 'elements' or 'h'" % name)


def read_exprs(args, ctx: Context) -> List[DiffRational]:
    texts = list(args.exprs)
    if not texts:
        texts = [line.strip() for line in sys.stdin if line.strip()]
    if not texts:
        raise UsageError("no expressions given")
    return [parse(t, ctx) for t in texts]


def _one(args, ctx: Context) -> DiffRational:
    exprs = read_exprs(args, ctx)
    if len(exprs) != 1:
        raise UsageError("expected exactly one expression")
    return exprs[0]


def _fmt_matrix(rows) -> List[str]:
    return ["[%s]" % ", ".join(str(e) for e in row) for row in rows]


# --------------------------------------------------------------------------
# commands; each returns (result, report) where result is a str or list


def cmd_derive(args, ctx):
    out = []
    for f in read_exprs(args, ctx):
        if args.alpha is not None:
            out.append(str(derive_multi(f, ctx.alpha(parse_alpha(args.alpha)))))
        else:
            if args.i is None:
                raise UsageError("derive needs --i or --alpha")
            if not 1 <= args.i <= ctx.m:
                raise UsageError("--i must lie in 1..%d" % ctx.m)
            out.append(str(derive(f, args.i)))
    return out, None


def cmd_act_affine(args, ctx):
    if args.group is not None:
        elems = resolve_group(args.group, ctx).elements()
    else:
        if args.h is None:
            raise UsageError("act-affine needs --group or --h/--h0")
        h0 = args.h0 if args.h0 is not None else json.dumps(["0"] * ctx.n)
        try:
            elems = [AffineElement(parse_matrix(args.h, ctx, "--h"), parse_vector(h0, ctx, "--h0"))]
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise UsageError(str(exc))
    return [str(actions.affine_act(f, a)) for f in read_exprs(args, ctx) for a in elems], None


def _gauge(args, ctx, avoid):
    if args.matrix is not None:
        try:
            return GaugeMatrix(parse_matrix(args.matrix, ctx, "--matrix"))
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise UsageError(str(exc))
    return actions.generic_gauge(ctx, avoid=avoid)


def cmd_act_gauge(args, ctx):
    exprs = read_exprs(args, ctx)
    g = _gauge(args, ctx, exprs)
    try:
        return [str(actions.gauge_act(f, g)) for f in exprs], None
    except actions.NotGaugeCompatible as exc:
        w = actions.gl_partial_witness(g)
        report = {"check": "gauge-symmetry", "element": str(g), "witness": str(w[3]) if w else None, "pass": False}
        raise CheckFailed(str(exc), report)


def cmd_wronskian(args, ctx):
    if args.alphas is None:
        raise UsageError("wronskian needs --alphas")
    return str(invariants.wronskian(ctx, parse_alphas(args.alphas))), None


def cmd_bordered(args, ctx):
    if args.alphas is None or args.alpha is None:
        raise UsageError("bordered needs --alphas and --alpha")
    coeffs = invariants.bordered_invariant_coeffs(ctx, parse_alphas(args.alphas), parse_alpha(args.alpha))
    return [str(c) for c in coeffs], None


def _report(rep: invariants.CheckReport):
    rec = rep.to_record()
    if not rep:
        raise CheckFailed("false", rec)
    return "true", rec


def cmd_invariance_check(args, ctx):
    f = _one(args, ctx)
    rep = invariants.invariance_check(ctx, f, resolve_group(args.group, ctx), gauge=args.gauge,
                                      method=args.method, trials=args.trials, seed=args.seed)
    return _report(rep)


def _frame_matrix(args, ctx):
    if args.frame is None:
        raise UsageError("--frame is required")
    return parse_matrix(args.frame, ctx, "--frame")


def cmd_frame_check(args, ctx):
    return _report(invariants.frame_check(ctx, _frame_matrix(args, ctx), resolve_group(args.group, ctx)))


def cmd_delta_rewrite(args, ctx):
    phi = _frame_matrix(args, ctx)
    group = resolve_group(args.group, ctx)
    rep = invariants.frame_check(ctx, phi, group)
    if not rep:
        raise CheckFailed("false", rep.to_record())
    frame = invariants.GaugeFrame.build(ctx, phi, group)
    return [str(invariants.delta_rewrite(f, frame)) for f in read_exprs(args, ctx)], None


def cmd_lindep(args, ctx):
    res = invariants.lindep_constants(ctx, read_exprs(args, ctx), trials=max(5, args.trials or 5),
                                      seed=args.seed)
    if not res:
        return "independent", None
    return "dependent [%s]" % ", ".join(str(c) for c in res.kernel), None


def cmd_jet_rank(args, ctx):
    r = invariants.jet_jacobian_rank(ctx, read_exprs(args, ctx), order=args.order, method=args.method,
                                     trials=args.trials, seed=args.seed)
    return str(r), None


def cmd_reynolds(args, ctx):
    group = resolve_group(args.group, ctx)
    if not isinstance(group, FiniteGroup):
        raise UsageError("reynolds needs a finite group")
    return [str(invariants.reynolds_average(p, group, ctx.closure_bound)) for p in read_exprs(args, ctx)], None


def cmd_instantiate(args, ctx):
    if args.alphas is None:
        raise UsageError("instantiate needs --alphas")
    group = resolve_group(args.group, ctx) if args.group else None
    out = []
    for p in read_exprs(args, ctx):
        try:
            out.append(str(invariants.instantiate_tuple_invariant(ctx, p, parse_alphas(args.alphas), group)))
        except invariants.NotInvariant as exc:
            raise CheckFailed(str(exc), {"check": "tuple-invariance", "element": None, "witness": str(exc),
                                         "pass": False})
    return out, None


def cmd_character_check(args, ctx):
    if args.k is None:
        raise UsageError("character-check needs --k")
    return _report(invariants.character_cocycle_check(ctx, args.k))


def cmd_transport(args, ctx):
    if args.a is None or args.b is None:
        raise UsageError("transport needs --a and --b")
    t = actions.gauge_transport(ctx, parse_vector(args.a, ctx, "--a"), parse_vector(args.b, ctx, "--b"))
    return _fmt_matrix(t.entries), None


COMMANDS = {
    "derive": cmd_derive,
    "act-affine": cmd_act_affine,
    "act-gauge": cmd_act_gauge,
    "wronskian": cmd_wronskian,
    "bordered": cmd_bordered,
    "invariance-check": cmd_invariance_check,
    "frame-check": cmd_frame_check,
    "delta-rewrite": cmd_delta_rewrite,
    "lindep": cmd_lindep,
    "jet-rank": cmd_jet_rank,
    "reynolds": cmd_reynolds,
    "instantiate": cmd_instantiate,
    "character-check": cmd_character_check,
    "transport": cmd_transport,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="diffinv", description="Differential invariants of affine subgroups.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, allow_abbrev=False)
        p.add_argument("exprs", nargs="*", help="expressions (read from stdin when omitted)")
        p.add_argument("--ctx", help="JSON context file")
        p.add_argument("--format", choices=("text", "records"), default="text")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--order", type=int)
        p.add_argument("--gauge", action="store_true", help="also act by a generic gauge")
        p.add_argument("--group")
        p.add_argument("--alphas", help='multi-indices, e.g. "[1];[2]"')
        p.add_argument("--alpha", help='one multi-index, e.g. "[3]"')
        p.add_argument("--i", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--matrix", help="JSON rows of expressions")
        p.add_argument("--frame", help="JSON rows of expressions")
        p.add_argument("--h", help="JSON rows of expressions")
        p.add_argument("--h0", help="JSON array of expressions")
        p.add_argument("--a", help="JSON array of expressions")
        p.add_argument("--b", help="JSON array of expressions")
        p.add_argument("--method", choices=("exact", "randomized"), default="exact")
    return ap


def _emit(fmt: str, ok: bool, result, report, stream) -> None:
    if fmt == "records":
        stream.write(json.dumps({"ok": ok, "result": result, "report": report}) + "\n")
        return
    lines = result if isinstance(result, list) else [result]
    for line in lines:
        stream.write(line + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    fmt = "text"
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        ctx = load_context(args.ctx)
        if args.seed is not None:
            ctx = dataclasses.replace(ctx, seed=args.seed)
        if args.trials is not None:
            ctx = dataclasses.replace(ctx, trials=args.trials)
        result, report = COMMANDS[args.command](args, ctx)
    except CheckFailed as exc:
        _emit(fmt, False, exc.result, exc.report, sys.stdout)
        if exc.report and exc.report.get("witness"):
            sys.stderr.write("witness: %s\n" % exc.report["witness"])
        return 1
    except (UsageError, ParseError) as exc:
        sys.stderr.write("diffinv: %s\n" % exc)
        return 2
    except invariants.AutoRaiseOrder as exc:
        sys.stderr.write("diffinv: %s\n" % exc)
        return 2
    except (DiffAlgebraError, ValueError, TypeError) as exc:
        sys.stderr.write("diffinv: %s\n" % exc)
        return 2
    _emit(fmt, True, result, report, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
