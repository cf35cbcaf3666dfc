"""Command-line front end: ``python -m densityclone <command> ...``.

Exit codes: 0 success, 1 usage or parse error, 2 construction or search
failure, 3 verification failure.

The ``--config`` file is a JSON object whose keys are :class:`RunConfig`
fields; command-line options override it.  Rationals may be written as
``"p/q"`` strings.  Example::

    {"k_max": 12, "n_out": 1024, "epsilon": "1/3", "delta": "1/10"}
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import badness, density, errors, monoid, precomplete
from .functions import FinFun, format_function, parse_expression, parse_function
from .report import VerificationRecord, dumps, make_report, parse_fraction, to_jsonable
from .sets import parse_set

EXIT_OK, EXIT_USAGE, EXIT_SEARCH, EXIT_VERIFY = 0, 1, 2, 3


@dataclass
class RunConfig:
    set_horizon: int = 2 ** 20
    image_horizon: int = 2 ** 10
    n_out: int = 2 ** 12
    k_max: int = 14
    search_horizon: int = 2 ** 17
    interval_count: int = 4
    e_max: int = 64
    target_check: int = 50
    m_max: int = 2 ** 38
    t_max: int = 2 ** 20
    n_max: int = 2 ** 38
    epsilon: Fraction = Fraction(1, 3)
    delta: Fraction | None = None
    confirm_cost: bool = False

    def validate(self) -> None:
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, int) and not isinstance(v, bool) and f.name != "k_max" and v <= 0:
                raise ValueError(f"{f.name} must be positive")
        if self.k_max < 0:
            raise ValueError("k_max must be nonnegative")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.delta is not None and self.delta <= 0:
            raise ValueError("delta must be positive")

    def update(self, values: dict) -> None:
        names = {f.name for f in dataclasses.fields(self)}
        for key, v in values.items():
            if key not in names:
                raise ValueError(f"unknown config key {key!r}")
            if key in ("epsilon", "delta") and v is not None:
                v = parse_fraction(v)
            elif key == "confirm_cost":
                v = bool(v)
            elif not isinstance(v, int) or isinstance(v, bool):
                raise ValueError(f"config key {key!r} needs an integer")
            setattr(self, key, v)

    def pipeline(self, target: str) -> precomplete.PipelineConfig:
        return precomplete.PipelineConfig(
            set_horizon=self.set_horizon, image_horizon=self.image_horizon,
            interval_count=self.interval_count, e_max=self.e_max, k_max=self.k_max,
            n_out=self.n_out, search_horizon=self.search_horizon, target=target,
            target_check=self.target_check)


class Outcome(Exception):
    """Carries a non-zero exit code together with the partial result."""

    def __init__(self, code: int, result):
        super().__init__(code)
        self.code = code
        self.result = result


def _records(obj):
    """Yield every verification record nested in a result."""
    if isinstance(obj, VerificationRecord):
        yield obj
    elif isinstance(obj, dict):
        for v in obj.values():
            yield from _records(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            yield from _records(v)
    elif hasattr(obj, "to_dict"):
        yield from _records(obj.to_dict())


def _verdict(result) -> dict:
    recs = list(_records(result))
    if any(not r.passed for r in recs):
        raise Outcome(EXIT_VERIFY, result)
    return result


def _need_cost_ok(f: FinFun, cfg: RunConfig) -> None:
    if f.arity >= 3 and not cfg.confirm_cost:
        raise ValueError(f"{f.label} has arity {f.arity}; image computations grow like N^{f.arity}. "
                         "Pass --confirm-cost to proceed")


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(" ", "").split(",") if t]


# -- commands ---------------------------------------------------------------------


def cmd_density(args, cfg):
    A = parse_set(args.set)
    horizons = _int_list(args.horizons) if args.horizons else [2 ** k for k in range(1, 17)]
    rep = density.upper_density_estimate(A, horizons)
    return {"set": A.label, "density": rep}


def cmd_badness(args, cfg):
    f = parse_function(args.function)
    _need_cost_ok(f, cfg)
    B = parse_set(args.set)
    horizons = badness.SearchHorizons(cfg.m_max, cfg.t_max, cfg.n_max)
    asm = badness.assemble_global_witness(f, B, cfg.epsilon, args.J, horizons, cfg.delta)
    cert = asm.certificate(format_function(f), B.label)
    check = badness.validate_certificate(f, cert)
    if args.certificate:
        Path(args.certificate).write_text(cert.dumps())
    return _verdict({"assembly": asm, "certificate": cert, "validation": check,
                     "certificate_file": args.certificate})


def cmd_probe(args, cfg):
    f = parse_function(args.function)
    _need_cost_ok(f, cfg)
    sets = [parse_set(s) for s in args.sets]
    hz = badness.ProbeHorizons(input_horizon=args.input_horizon, k_max=args.block_k,
                               a_bound=args.a_bound)
    return {"probe": badness.membership_probe(f, sets, hz)}


def _n_sequence(args, k_max: int) -> list[int]:
    if args.n_list:
        return _int_list(args.n_list)
    if args.n_geometric:
        if args.n_geometric < 2:
            raise ValueError("--n-geometric needs B >= 2")
        rule = lambda i: args.n_geometric ** i
    else:
        rule = parse_expression(args.n_expr, 1)
    out, i = [], 1
    while not out or out[-1] <= 2 ** (k_max + 1):
        if i > 2 ** (k_max + 2):
            raise ValueError("n-rule never exceeds 2^(k_max+1)")
        out.append(rule(i))
        i += 1
    return out


def cmd_onto(args, cfg):
    seq = _n_sequence(args, cfg.k_max)
    oc = precomplete.build_onto_construction(seq, cfg.k_max)
    out = {"construction": oc, "invariants": precomplete.onto_invariants(oc),
           "coverage": precomplete.verify_onto(oc)}
    if args.ideal_set:
        lo, _, hi = args.k_range.partition("..")
        ks = range(int(lo), int(hi or lo) + 1)
        out["ideal"] = precomplete.verify_onto_preserves_ideal(
            oc, parse_set(args.ideal_set), cfg.epsilon, ks)
    return _verdict(out)


def cmd_pipeline(args, cfg):
    g = parse_function(args.function)
    _need_cost_ok(g, cfg)
    A = parse_set(args.set)
    res = precomplete.run_precompleteness_pipeline(g, A, cfg.pipeline(args.target))
    return _verdict({"pipeline": res, "e": res.large_set.e, "n": res.large_set.n_seq,
                     "generated_term": res.generated.record.details.get("term")})


def cmd_monoid(args, cfg):
    if args.tree_file:
        tree = monoid.parse_tree(Path(args.tree_file).read_text())
    elif args.tree:
        tree = monoid.parse_tree(args.tree)
    elif args.shipped == "binary":
        tree = monoid.full_binary_tree(args.depth)
    else:
        tree = monoid.single_branch_tree(args.depth)
    p = monoid.make_partition(max(args.N, 8))
    elements = monoid.branch_elements(p, tree, args.cap)
    total = tree.branch_count() if tree.depth else 0
    for m in args.mutate or []:
        x, _, v = m.partition("=")
        if not elements:
            raise ValueError("nothing to mutate: the tree has no branches")
        elements[0] = monoid.mutate(elements[0], int(x), int(v))
    rec = monoid.verify_monoid_laws(p, tree, elements, args.N)
    return _verdict({"tree": tree, "branches_used": len(elements), "branches_total": total,
                     "capped": len(elements) < total, "laws": rec})


def cmd_generate(args, cfg):
    t = parse_function(args.t)
    if t.arity != 2:
        raise ValueError("t must be binary")
    Z = parse_set(args.z)
    u = parse_function(args.target)
    r = precomplete.right_inverse(t, Z, cfg.n_out, cfg.search_horizon)
    gen = precomplete.generate_function(t, r, u, cfg.target_check)
    return _verdict({"right_inverse": r, "generated": gen.record})


COMMANDS = {"density": cmd_density, "badness": cmd_badness, "probe": cmd_probe,
            "onto": cmd_onto, "pipeline": cmd_pipeline, "monoid": cmd_monoid,
            "generate": cmd_generate}


# -- parser ------------------------------------------------------------------------


def _globals(p: argparse.ArgumentParser, default) -> None:
    p.add_argument("--config", default=default, help="JSON file of RunConfig values")
    p.add_argument("--report", default=default, help="write the JSON report here")
    p.add_argument("--summary", action="store_true", default=default,
                   help="print a short table instead of the JSON report")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="densityclone",
                                 description="Exact finite-horizon checks for the density-zero ideal clone.")
    _globals(ap, None)
    ap.set_defaults(summary=False)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        _globals(p, argparse.SUPPRESS)
        return p

    def cfg_opts(p, *names):
        for n in names:
            p.add_argument("--" + n.replace("_", "-"), dest=n, default=None,
                           type=str if n in ("epsilon", "delta") else int)

    p = add("density", "prefix and dyadic-block density table of a set")
    p.add_argument("set")
    p.add_argument("--horizons", help="comma-separated increasing horizons")

    p = add("badness", "search for and validate a badness certificate")
    p.add_argument("function")
    p.add_argument("set")
    p.add_argument("--J", type=int, default=2)
    p.add_argument("--certificate", help="write the certificate JSON here")
    p.add_argument("--confirm-cost", action="store_true", default=None)
    cfg_opts(p, "epsilon", "delta", "m_max", "t_max", "n_max")

    p = add("probe", "look for a shadow with a dense image of a sparse set")
    p.add_argument("function")
    p.add_argument("sets", nargs="+")
    p.add_argument("--input-horizon", type=int, default=2 ** 22)
    p.add_argument("--block-k", type=int, default=10)
    p.add_argument("--a-bound", type=int, default=2)
    p.add_argument("--confirm-cost", action="store_true", default=None)

    p = add("onto", "build and check the binary map with h[C x D] covering N")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--n-list", help="explicit n_1,n_2,...")
    g.add_argument("--n-expr", help="n_i as an expression in x1 = i, e.g. '3*x1'")
    g.add_argument("--n-geometric", type=int, metavar="B", help="n_i = B^i")
    p.add_argument("--ideal-set", help="set T for the ideal-preservation check")
    p.add_argument("--k-range", default="10..14")
    cfg_opts(p, "k_max", "epsilon")

    p = add("pipeline", "run the full generation pipeline")
    p.add_argument("function")
    p.add_argument("set")
    p.add_argument("--target", default="x1 * x1 + 1")
    p.add_argument("--confirm-cost", action="store_true", default=None)
    cfg_opts(p, "set_horizon", "image_horizon", "n_out", "k_max", "search_horizon",
             "interval_count", "e_max", "target_check")

    p = add("monoid", "check the composition laws of the closed monoid")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--tree")
    g.add_argument("--tree-file")
    g.add_argument("--shipped", choices=("single", "binary"), default="single")
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--N", type=int, default=2000)
    p.add_argument("--cap", type=int, default=256)
    p.add_argument("--mutate", action="append", metavar="X=V",
                   help="override the first branch element at X")

    p = add("generate", "right-invert a binary t and rebuild a target through it")
    p.add_argument("--t", required=True)
    p.add_argument("--z", default="all")
    p.add_argument("--target", required=True)
    cfg_opts(p, "n_out", "search_horizon", "target_check")
    return ap


def _config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg.update(json.loads(Path(args.config).read_text()))
    overrides = {f.name: getattr(args, f.name) for f in dataclasses.fields(cfg)
                 if getattr(args, f.name, None) is not None}
    cfg.update(overrides)
    cfg.validate()
    return cfg


def _command_args(args) -> dict:
    skip = {"config", "report", "summary", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def summarize(report: dict) -> str:
    lines = [f"{report['command']}: {report['status']}"]
    res = report.get("result") or {}
    if "error" in res:
        lines.append(f"  {res['error']}: {res.get('message', '')}")

    def walk(obj, path=""):
        if isinstance(obj, dict):
            if {"name", "passed", "scope"} <= obj.keys():
                mark = "PASS" if obj["passed"] else "FAIL"
                first = f"  first failure: {obj['failures'][0]}" if obj.get("failures") else ""
                lines.append(f"  [{mark}] {obj['name']} ({obj['scope']}){first}")
                return
            for k, v in obj.items():
                walk(v, f"{path}.{k}")
        elif isinstance(obj, list):
            for v in obj:
                walk(v, path)

    walk(res)
    dens = res.get("density")
    if isinstance(dens, dict):
        for row in dens["table"]:
            lines.append(f"  |A ∩ [0,{row['n']})| = {row['count']}  ratio {row['ratio']}")
        lines.append(f"  estimate {dens['ratio']} at horizon {dens['horizon']}")
    lines = list(dict.fromkeys(lines))
    for key in ("e", "n", "generated_term", "branches_used"):
        if key in res:
            lines.append(f"  {key} = {res[key]}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    code, status = EXIT_OK, "ok"
    config: dict = {}
    try:
        cfg = _config(args)
        config = {"run": cfg, "command": _command_args(args)}
        result = COMMANDS[args.command](args, cfg)
    except Outcome as out:
        code, status, result = out.code, "verification-failed", out.result
    except (errors.SearchFailure, errors.PipelineStageError, errors.SetTooSmall,
            errors.PremiseUnmet, errors.NotEnoughIntervals, errors.NoPreimage,
            errors.RTableGap, errors.PreconditionViolated, errors.EnumerationBoundError,
            errors.PartitionError) as exc:
        code, status = EXIT_SEARCH, "failed"
        result = {"error": getattr(exc, "code", type(exc).__name__), "message": str(exc)}
        for attr in ("stage", "horizon"):
            if getattr(exc, attr, None) is not None:
                result[attr] = getattr(exc, attr)
        cause = getattr(exc, "cause", None)
        if cause is not None:
            result["cause"] = getattr(cause, "code", type(cause).__name__)
    except (errors.DensityCloneError, ValueError, OSError, KeyError) as exc:
        code, status = EXIT_USAGE, "usage-error"
        result = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, errors.SpecParseError):
            result["position"] = exc.position
    report = make_report(args.command, config, result, status)
    text = dumps(report)
    if args.report:
        Path(args.report).write_text(text)
    out = summarize(to_jsonable(report)) if args.summary else (None if args.report else text)
    if out:
        sys.stdout.write(out)
    return code
