"""Command line front end: ``lmod <command> ...``.

Exit codes: 0 success or PASS, 1 FAIL, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor

from . import serialize
from .builders import intersection_module, weighted_module
from .kostant import Irreducible, check_irreducible, kostant
from .lmod import LModError, validate
from .microsupport import TypeTable, self_contragredient, strong_ms, weak_ms
from .mixer import MixError, mix, mix_ok, verify_ic_wc
from .roots import RootDataError, build, parabolic_name, parse_parabolic

USAGE_ERROR = 2
WEIGHT_RE = re.compile(r"^-\d+(,-?\d+)*$")


class UsageError(Exception):
    pass


def parse_weight(text: str, rank: int) -> tuple[int, ...]:
    text = text.strip()
    if text == "0":
        return (0,) * rank
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse weight {text!r}; use 0 or comma separated integers")
    if len(vals) != rank:
        raise UsageError(f"weight {text!r} needs {rank} coordinates")
    return vals


def _datum(label):
    try:
        return build(label)
    except RootDataError as exc:
        raise UsageError(str(exc))


def _parabolic(text, rank):
    try:
        return parse_parabolic(text, rank)
    except (RootDataError, ValueError):
        raise UsageError(f"cannot parse parabolic {text!r}; use G, P0 or 1-based indices like 1,2")


def _frac(x) -> str:
    return str(x)


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        text = serialize.dumps(payload)
    else:
        text = "\n".join(lines) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_module(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    try:
        return serialize.lmod_from_json(text), serialize.digest(text)
    except (LModError, RootDataError) as exc:
        raise UsageError(str(exc))


# -- commands ------------------------------------------------------------------


def cmd_roots(args) -> int:
    d = _datum(args.type)
    payload = dict(d.to_json(), rho=list(d.rho), weyl_order=len(d.weyl))
    lines = [f"root system {d.label} (rank {d.rank})",
             "cartan: " + "; ".join(" ".join(map(str, r)) for r in d.cartan),
             "simple roots (fundamental weight coordinates):"]
    lines += [f"  alpha{i + 1} = {list(r)}" for i, r in enumerate(d.simple_roots)]
    lines.append(f"positive roots ({len(d.positive_roots)}):")
    lines += [f"  {list(r)}  simple coords {[_frac(c) for c in d.simple_coords(r)]}" for r in d.positive_roots]
    lines.append(f"rho = {list(d.rho)}")
    lines.append(f"|W| = {len(d.weyl)}")
    _emit(args, payload, lines)
    return 0


def cmd_kostant(args) -> int:
    pos = args.spec
    if len(pos) == 3:
        label, qtext, wtext = pos
        ptext = "P0"
    elif len(pos) == 4:
        label, ptext, qtext, wtext = pos
    else:
        raise UsageError("kostant needs TYPE [P] Q LAMBDA")
    d = _datum(label)
    P, Q = _parabolic(ptext, d.rank), _parabolic(qtext, d.rank)
    if P & ~Q:
        raise UsageError("P must be contained in Q")
    V = Irreducible(Q, parse_weight(wtext, d.rank))
    try:
        check_irreducible(d, V)
    except RootDataError as exc:
        raise UsageError(str(exc))
    comps = kostant(d, P, V)
    rows = [{"w": list(c.w.word), "w_name": c.w.word_string(), "degree": c.degree,
             "highest_weight": list(c.target.weight)} for c in comps]
    lines = [f"H(n_P^Q; V) for {d.label}, P={parabolic_name(P, d.rank)}, "
             f"Q={parabolic_name(Q, d.rank)}, lambda={list(V.weight)}",
             f"{'w':<14}{'degree':>7}  highest weight"]
    lines += [f"{r['w_name']:<14}{r['degree']:>7}  {r['highest_weight']}" for r in rows]
    _emit(args, {"type": d.label, "P": P, "Q": Q, "lambda": list(V.weight), "components": rows}, lines)
    return 0


def cmd_build(args) -> int:
    d = _datum(args.type)
    if args.kind == "wc":
        if len(args.rest) not in (2, 3):
            raise UsageError("build wc needs TYPE R LAMBDA [PROFILE]")
        R = _parabolic(args.rest[0], d.rank)
        lam = parse_weight(args.rest[1], d.rank)
        eta = args.rest[2] if len(args.rest) == 3 else (args.eta or "mu")
        if eta not in ("mu", "nu"):
            raise UsageError("profile must be mu or nu")
        V = Irreducible(R, lam)
        try:
            check_irreducible(d, V)
        except RootDataError as exc:
            raise UsageError(str(exc))
        M = weighted_module(d, R, V, eta)
    else:
        if len(args.rest) not in (1, 2):
            raise UsageError("build ic needs TYPE LAMBDA [PERVERSITY]")
        lam = parse_weight(args.rest[0], d.rank)
        p = args.rest[1] if len(args.rest) == 2 else (args.perversity or "m")
        if p not in ("m", "n"):
            raise UsageError("perversity must be m or n")
        V = Irreducible(d.full, lam)
        try:
            check_irreducible(d, V)
        except RootDataError as exc:
            raise UsageError(str(exc))
        M = intersection_module(d, V, p)
    text = serialize.lmod_to_json(M)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}: {len(M.slots)} slots on {len(M.poset)} strata")
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args) -> int:
    M, dig = _read_module(args.file)
    err = validate(M)
    payload = {"command": "validate", "input_digest": dig, "ok": err is None,
               "violation": None if err is None else str(err)}
    lines = [f"input {dig}", "ok" if err is None else f"violation: {err}"]
    _emit(args, payload, lines)
    return 0 if err is None else 1


def _check_valid(M):
    err = validate(M)
    if err:
        raise UsageError(f"input is not a valid L-module: {err}")


def cmd_microsupport(args) -> int:
    M, dig = _read_module(args.file)
    _check_valid(M)
    d = M.datum
    table = TypeTable(M)
    weak = weak_ms(M, args.eta, table)
    rows = []
    for V, w in weak.items():
        rows.append({"parabolic": V.parabolic, "highest_weight": list(V.weight),
                     "witness_Q": w.Q, "witness_degree": w.degree, "multiplicity": w.multiplicity,
                     "self_contragredient": self_contragredient(d, V)})
    payload = {"command": f"microsupport --eta {args.eta}", "input_digest": dig, "members": rows}
    lines = [f"input {dig}; weak micro-support ({args.eta}): {len(rows)} member(s)",
             f"{'P':<10}{'highest weight':<18}{'Q':<10}{'degree':>7}{'mult':>6}  strong"]
    for r in rows:
        lines.append(f"{parabolic_name(r['parabolic'], d.rank):<10}{str(r['highest_weight']):<18}"
                     f"{parabolic_name(r['witness_Q'], d.rank):<10}{r['witness_degree']:>7}"
                     f"{r['multiplicity']:>6}  {'yes' if r['self_contragredient'] else 'no'}")
    _emit(args, payload, lines)
    return 0


def cmd_mix(args) -> int:
    M, dig = _read_module(args.file)
    _check_valid(M)
    data = mix(M, args.eta)
    ok = mix_ok(data)
    payload = {"command": f"mix --eta {args.eta}", "input_digest": dig, "ok": ok,
               **serialize.mixed_to_dict(data, M.datum.rank)}
    lines = [f"input {dig}; {args.eta}-mixed decomposition in {len(data.blocks)} step(s)",
             f"{'i':>3}  {'P':<10}{'highest weight':<18}{'d':>4}"]
    for row in data.table(M.datum.rank):
        lines.append(f"{row['index']:>3}  {row['parabolic']:<10}{str(row['highest_weight']):<18}{row['degree']:>4}")
    lines += [f"check {k}: {v}" for k, v in data.checks.items()]
    lines.append("PASS" if ok else "FAIL")
    _emit(args, payload, lines)
    return 0 if ok else 1


def _report_dict(rep) -> dict:
    return {"type": rep.label, "lambda": list(rep.E.weight), "parity": rep.parity,
            "status": rep.status, "blocks": rep.blocks,
            "strong_blocks": [list(v.weight) for v in rep.strong_blocks],
            "warnings": rep.warnings, "checks": rep.checks}


def _report_lines(rep) -> list[str]:
    lines = [f"verify ic-wc {rep.label} lambda={list(rep.E.weight)} parity={rep.parity}: {rep.status}"]
    lines += [f"  warning: {w}" for w in rep.warnings]
    for b in rep.blocks:
        lines.append(f"  block {b['index']}: P={b['parabolic']} weight={b['highest_weight']} d={b['degree']}")
    return lines


def _verify_case(case):
    label, lam, parity, compute = case
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = verify_ic_wc(label, lam, parity, compute)
    return _report_dict(rep), _report_lines(rep)


DEFAULT_CASES = [(t, None, p) for t in ("A1", "A2", "B2", "G2") for p in ("m", "n")]


def cmd_verify(args) -> int:
    if args.all:
        cases = [(t, (0,) * build(t).rank, p, not args.no_mix) for t, _, p in DEFAULT_CASES]
    else:
        if args.what != "ic-wc" or len(args.rest) != 3:
            raise UsageError("verify needs: ic-wc TYPE LAMBDA PARITY, or --all")
        label, wtext, parity = args.rest
        d = _datum(label)
        if parity not in ("m", "n", "mu", "nu"):
            raise UsageError("parity must be m or n")
        lam = parse_weight(wtext, d.rank)
        E = Irreducible(d.full, lam)
        try:
            check_irreducible(d, E)
        except RootDataError as exc:
            raise UsageError(str(exc))
        if not self_contragredient(d, E):
            raise UsageError(f"{E.describe(d.rank)} is not self-contragredient; rejected")
        cases = [(d.label, lam, parity, not args.no_mix)]
    t0 = time.perf_counter()
    workers = int(os.environ.get("LMOD_THREADS", "0") or 0) or min(len(cases), os.cpu_count() or 1)
    if len(cases) > 1 and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_verify_case, cases))
    else:
        results = [_verify_case(c) for c in cases]
    for payload, _ in results:
        for w in payload["warnings"]:
            print(f"warning: {w}", file=sys.stderr)
    statuses = [p["status"] for p, _ in results]
    lines = [line for _, ls in results for line in ls]
    lines.append("note: blocks that are not self-contragredient contribute no global cohomology "
                 "(cited, not computed)")
    _emit(args, {"command": "verify", "results": [p for p, _ in results]}, lines)
    if args.timing:
        print(f"elapsed {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return 1 if "FAIL" in statuses else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lmod", description="Exact L-module calculus on split root systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="machine readable output")
        p.add_argument("--out", help="write output to FILE")
        return p

    p = common(sub.add_parser("roots", help="summarize a root datum"))
    p.add_argument("type")
    p.set_defaults(func=cmd_roots)

    p = common(sub.add_parser("kostant", help="Kostant table of H(n_P^Q; V)"))
    p.add_argument("spec", nargs="+", metavar="TYPE [P] Q LAMBDA")
    p.set_defaults(func=cmd_kostant)

    p = sub.add_parser("build", help="build a weighted or intersection cohomology L-module")
    p.add_argument("kind", choices=["wc", "ic"])
    p.add_argument("type")
    p.add_argument("rest", nargs="+", metavar="ARG")
    p.add_argument("--eta", choices=["mu", "nu"])
    p.add_argument("--perversity", choices=["m", "n"])
    p.add_argument("--out", help="write the L-module JSON to FILE")
    p.set_defaults(func=cmd_build)

    p = common(sub.add_parser("validate", help="check the differential condition"))
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = common(sub.add_parser("microsupport", help="weak micro-support with witnesses"))
    p.add_argument("file")
    p.add_argument("--eta", choices=["full", "mu", "nu"], default="full")
    p.set_defaults(func=cmd_microsupport)

    p = common(sub.add_parser("mix", help="mixed decomposition into weighted cohomology blocks"))
    p.add_argument("file")
    p.add_argument("--eta", choices=["mu", "nu"], default="mu")
    p.set_defaults(func=cmd_mix)

    p = common(sub.add_parser("verify", help="intersection = weighted cohomology certificate"))
    p.add_argument("what", nargs="?", choices=["ic-wc"])
    p.add_argument("rest", nargs="*")
    p.add_argument("--all", action="store_true", help="run the default batch")
    p.add_argument("--timing", action="store_true", help="print elapsed time to stderr")
    p.add_argument("--no-mix", action="store_true",
                   help="only run input checks and warnings; report UNVERIFIED")
    p.set_defaults(func=cmd_verify)
    # let weights such as -1,0 through as positionals
    for p in [parser, *sub.choices.values()]:
        p._negative_number_matcher = WEIGHT_RE
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lmod: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (MixError, LModError) as exc:
        print(f"lmod: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
