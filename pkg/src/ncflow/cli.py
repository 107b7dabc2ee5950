"""Command-line front end: solve, verify, gen, dump-h."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .bdgraph import build_compact_H, build_expensive_H, dump_text
from .dual import check_dual_feasible, solve_dual
from .generate import random_instance
from .geodesic import ZeroFlowCase, geodesic_structure
from .io import ParseError, fmt_frac, format_instance, format_solution, parse_instance, parse_solution
from .model import (
    Instance,
    check_multiflow,
    dual_objective,
    is_feasible,
    is_half_integral,
    lambda_for_ncp,
    objective_phi,
    validate_instance,
)
from .oracle import check_complementary_slackness
from .pipeline import solve_ncp, solve_ncp_lambda

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INVALID = 0, 1, 2, 3


class _Exit(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def _load_instance(path: str) -> Instance:
    try:
        inst = parse_instance(Path(path).read_text())
    except ParseError as e:
        raise _Exit(EXIT_PARSE, f"{path}: {e}") from None
    except OSError as e:
        raise _Exit(EXIT_PARSE, f"{path}: {e}") from None
    rep = validate_instance(inst)
    if not rep.ok:
        raise _Exit(EXIT_INVALID, f"{path}: invalid instance: " + "; ".join(rep.failures))
    return inst


def verify_record(inst: Instance, rec, lam) -> list:
    """Everything wrong with a claimed optimal primal/dual pair (empty if it checks out)."""
    bad = list(check_multiflow(rec.F, inst))
    unknown = set(rec.dual) - set(inst.nodes)
    if unknown:
        bad.append(f"dual values for unknown nodes {sorted(unknown)}")
        return bad
    if bad:
        return bad
    l_hat = {v: Fraction(rec.dual.get(v, 0)) for v in inst.nodes}
    if not is_feasible(rec.F, inst):
        bad.append("multiflow exceeds a node capacity")
    if not all(is_half_integral(w) for _, w in rec.F):
        bad.append("multiflow weight is not half-integral")
    if not all(x >= 0 and is_half_integral(x) for x in l_hat.values()):
        bad.append("dual value is negative or not half-integral")
    elif not check_dual_feasible(inst, l_hat, lam):
        bad.append("dual infeasible: some T-path is shorter than lambda")
    phi = objective_phi(rec.F, inst, lam)
    c_l = dual_objective(l_hat, inst)
    if phi != c_l:
        bad.append(f"duality gap: phi = {phi} but c.l = {c_l}")
    if rec.objective is not None and rec.objective != phi:
        bad.append(f"stated objective {rec.objective} differs from phi = {phi}")
    bad += check_complementary_slackness(rec.F, l_hat, inst, lam).violations
    return bad


def _resolve_lambda(explicit, *fallbacks):
    for x in (explicit,) + fallbacks:
        if x is not None:
            return x
    return None


# -- commands -----------------------------------------------------------------------


def cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    lam = _resolve_lambda(args.lam, inst.lam)
    sol = solve_ncp_lambda(inst, lam) if lam is not None else solve_ncp(inst)
    c = sol.cert
    summary = [
        f"lambda = {c.lam}",
        f"phi = {c.phi}",
        f"value = {c.value}",
        f"cost = {c.cost}",
        f"c.l = {c.dual_objective}",
        f"c.l_hat = {c.rounded_objective}",
        f"paths = {len(sol.F)}",
        f"zero case = {c.zero_case}",
        f"certificates = {'ok' if c.ok else 'FAILED'}",
    ]
    text = format_solution(sol.F, c.l_hat, c.phi, c.lam, inst.nodes, summary)
    if args.output:
        Path(args.output).write_text(text)
    if args.json:
        print(json.dumps({
            "lambda": c.lam,
            "phi": fmt_frac(c.phi),
            "value": fmt_frac(c.value),
            "cost": fmt_frac(c.cost),
            "paths": [{"weight": fmt_frac(w), "nodes": list(p)} for p, w in sol.F],
            "dual": {v: fmt_frac(c.l_hat[v]) for v in inst.nodes},
            "certificates_ok": c.ok,
            "problems": c.problems + c.cs_l.violations + c.cs_l_hat.violations,
        }, indent=2))
    elif args.output:
        print("\n".join(summary))
    else:
        print(text, end="")
    return EXIT_OK if c.ok else EXIT_FAIL


def _verify_one(job) -> tuple:
    inst_path, sol_path, lam_flag = job
    try:
        inst = _load_instance(inst_path)
        try:
            rec = parse_solution(Path(sol_path).read_text())
        except (ParseError, OSError) as e:
            raise _Exit(EXIT_PARSE, f"{sol_path}: {e}") from None
    except _Exit as e:
        return sol_path, e.code, [str(e)]
    lam = _resolve_lambda(lam_flag, rec.lam, inst.lam)
    if lam is None:
        lam = lambda_for_ncp(inst)
    bad = verify_record(inst, rec, lam)
    return sol_path, EXIT_FAIL if bad else EXIT_OK, bad


def cmd_verify(args) -> int:
    jobs = [(args.instance, s, args.lam) for s in args.solutions]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_verify_one, jobs))
    else:
        results = [_verify_one(j) for j in jobs]
    if args.json:
        print(json.dumps([{"solution": p, "exit": code, "failures": bad} for p, code, bad in results], indent=2))
    else:
        for p, code, bad in results:
            print(f"{p}: {'PASS' if code == EXIT_OK else 'FAIL'}")
            for b in bad:
                print(f"  {b}")
    return max(code for _, code, _ in results)


def cmd_gen(args) -> int:
    inst = random_instance(args.seed, args.size)
    if args.lam is not None:
        inst = Instance(inst.nodes, inst.edges, inst.terminals, inst.cap, inst.cost, args.lam)
    text = format_instance(inst)
    if args.output:
        Path(args.output).write_text(text)
    else:
        print(text, end="")
    return EXIT_OK


def cmd_dump_h(args) -> int:
    inst = _load_instance(args.instance)
    lam = _resolve_lambda(args.lam, inst.lam)
    if lam is None:
        lam = lambda_for_ncp(inst)
    dbl = inst.doubled()
    gs = geodesic_structure(dbl, solve_dual(dbl, lam).l, lam)
    if isinstance(gs, ZeroFlowCase):
        print(f"no geodesics: terminal distance {gs.p} exceeds lambda {lam}")
        return EXIT_OK
    H = (build_expensive_H if args.expensive else build_compact_H)(gs, dbl.cap)
    print(dump_text(H), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncflow", description="Half-integer min-cost free multiflows in node-capacitated networks.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("instance")
    p.add_argument("-o", "--output")
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check solution files against an instance")
    p.add_argument("instance")
    p.add_argument("solutions", nargs="+")
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a random instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=6)
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("dump-h", help="print the bidirected graph built for an instance")
    p.add_argument("instance")
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--expensive", action="store_true")
    p.set_defaults(func=cmd_dump_h)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except _Exit as e:
        print(str(e), file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
