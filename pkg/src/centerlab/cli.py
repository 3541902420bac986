"""Command-line front end.

Subcommands: liapunov, verify, reversible, qhcenter, returnmap, classify.
Every command reads a system file, applies ``--set`` specializations, runs
the requested analysis and prints one JSON report (deterministic up to the
timings block, which ``--no-timings`` removes).

Exit codes: 0 ok, 2 parse error, 3 class mismatch / unusable input,
4 internal engine fault.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

from .liapunov import EngineError
from .mpoly import Rat
from .parser import ParseError, parse_first_integral
from .perturb import (
    ALL_ORDERS,
    FIRST_ORDER,
    build_perturbation,
    center_conditions_pipeline,
    general_perturbation,
    minimal_perturbation,
)
from .qhomog import QHSignature, classify_qh_center, detect_quasi_homogeneity
from .report import condition_entry, display_str, poly_terms, ratfunc_entry, to_json
from .structure import (
    DarbouxExpr,
    characteristic_directions,
    is_hamiltonian,
    reversibility_conditions,
    verify_darboux_integral,
)
from .systems import (
    DEGENERATE,
    NILPOTENT,
    ClassificationError,
    PlaneSystem,
    parse_system,
    substitute,
)
from .numeric import classify_monodromic, return_map


def _rat(text: str):
    if "/" in text:
        a, b = text.split("/", 1)
        return Rat(int(a), int(b))
    return Rat(int(text))


def _load_system(args) -> tuple:
    with open(args.system) as fh:
        source = fh.read()
    s = parse_system(source)
    if args.set:
        binds = {}
        for item in args.set:
            name, _, val = item.partition("=")
            if not val:
                raise ParseError(f"--set expects name=value, got {item!r}", 0, 0)
            binds[name.strip()] = _rat(val.strip())
        s = substitute(s, binds)
    return s, source


def _emit(args, data: dict, t0: float) -> None:
    data.setdefault("warnings", [])
    data["timings"] = {"total_s": round(time.perf_counter() - t0, 6)}
    text = to_json(data, no_timings=args.no_timings)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_liapunov(args) -> int:
    t0 = time.perf_counter()
    s, source = _load_system(args)
    base_class = s.linear_class
    perturb_desc = {"kind": "none"}
    perturbation_params: List[str] = []
    mode = {"all-orders": ALL_ORDERS, "first-order": FIRST_ORDER}.get(args.mode)

    choice = args.perturb
    if choice == "auto":
        choice = "minimal" if base_class in (NILPOTENT, DEGENERATE) else "none"
    if choice != "none":
        default_kind = "nilpotent" if base_class == NILPOTENT else "degenerate"
        if choice.startswith("general"):
            deg = int(choice.split(":", 1)[1]) if ":" in choice else 5
            spec = general_perturbation(s, degree=deg, kind=default_kind)
            perturb_desc = {"kind": default_kind, "template": "general", "degree": deg}
        elif choice in ("minimal", "nilpotent", "degenerate", "hamiltonian"):
            kind = default_kind if choice == "minimal" else choice
            spec = minimal_perturbation(kind)
            perturb_desc = {"kind": kind, "template": "minimal"}
        else:
            raise ParseError(f"unknown --perturb choice {choice!r}", 0, 0)
        before = set(s.params)
        s = build_perturbation(s, spec)
        perturbation_params = [p for p in s.params if p not in before]
    if mode is None:
        mode = FIRST_ORDER if base_class == DEGENERATE else ALL_ORDERS

    result = center_conditions_pipeline(s, args.max_degree, mode=mode,
                                        perturbation_params=perturbation_params)
    data = {
        "input": source,
        "class": {"base": base_class, "analyzed": s.linear_class},
        "perturbation": perturb_desc,
        "mode": mode,
        "liapunov": [ratfunc_entry(v, k, deg) for (k, deg, v) in result.constants],
        "conditions": [condition_entry(c.eps_order, c.poly, constant=c.constant_index,
                                       solved=(c.solved[0] if c.solved else None))
                       for c in result.base_conditions],
        "perturbation_conditions": [
            condition_entry(c.eps_order, c.poly, constant=c.constant_index,
                            solved=(c.solved[0] if c.solved else None))
            for c in result.perturbation_conditions],
        "mixed_conditions": [condition_entry(c.eps_order, c.poly, constant=c.constant_index)
                             for c in result.mixed_conditions],
        "side_conditions": [display_str(p) for p in result.side_conditions],
        "convention": result.reports[0].convention.as_dict() if result.reports else {},
        "warnings": list(result.warnings),
    }
    _emit(args, data, t0)
    return 0


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    s, source = _load_system(args)
    parsed = parse_first_integral(args.integral, s.vars)
    power = []
    for base, expo in parsed.power_factors:
        if base.is_polynomial:
            power.append((base.as_poly(), expo))
        else:
            power.append((base, expo))
    expr = DarbouxExpr(
        power_factors=power,
        exp_factor=(None if parsed.exp_factor is None
                    else (parsed.exp_factor[0], parsed.exp_factor[1])),
        arg_factor=parsed.arg_factor,
    )
    residual = verify_darboux_integral(s, expr)
    data = {
        "input": source,
        "class": s.linear_class,
        "integral": args.integral,
        "residual_zero": residual.is_zero,
        "residual_terms": len(residual),
        "warnings": [],
    }
    if parsed.arg_factor is not None:
        data["warnings"].append("argument factor: identity certified on u^2+v^2 > 0")
    _emit(args, data, t0)
    return 0


def cmd_reversible(args) -> int:
    t0 = time.perf_counter()
    s, source = _load_system(args)
    r = reversibility_conditions(s)
    data = {
        "input": source,
        "class": s.linear_class,
        "structure": {
            "verdict": r.verdict,
            "axis_symbols": list(r.axis_symbols),
            "conditions": [{"terms": poly_terms(p), "canonical": display_str(p)}
                           for p in r.conditions],
            "all_angles": r.all_angles,
            "witness_angles": r.witness_angles(),
        },
        "warnings": [],
    }
    _emit(args, data, t0)
    return 0


def cmd_qhcenter(args) -> int:
    t0 = time.perf_counter()
    s, source = _load_system(args)

    def analyze(system: PlaneSystem, label: dict) -> dict:
        sigs = detect_quasi_homogeneity(system, args.bound)
        if args.pq:
            p, q = (int(v) for v in args.pq.split(","))
            match = [g for g in sigs if (g.p, g.q) == (p, q)]
            sig = match[0] if match else QHSignature(p, q, -1)
        else:
            if not sigs:
                return {**label, "verdict": "undecided",
                        "note": "no quasi-homogeneous structure detected"}
            sig = sigs[0]
        verdict, info = classify_qh_center(system, sig)
        entry = {**label, "pq": [sig.p, sig.q], "weight_degree": sig.m,
                 "verdict": verdict,
                 "condition_i": info["condition_i"].holds if "condition_i" in info else None}
        if "condition_ii" in info:
            entry["integral"] = info["condition_ii"].value
            entry["integral_error"] = info["condition_ii"].error
            entry["numeric"] = True
        return entry

    if args.sweep:
        name, _, rng = args.sweep.partition("=")
        a, b, step = (_rat(v) for v in rng.split(":"))
        points = []
        v = a
        while v <= b:
            points.append(v)
            v = v + step
        workers = int(os.environ.get("CENTERLAB_THREADS", "1"))
        systems = [(substitute(s, {name: v}), {"sweep": {name: str(v)}}) for v in points]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                entries = list(ex.map(lambda t: analyze(*t), systems))
        else:
            entries = [analyze(*t) for t in systems]
        qdata = {"sweep": entries}
    else:
        qdata = analyze(s, {})
    data = {
        "input": source,
        "class": s.linear_class,
        "qhomog": qdata,
        "warnings": ["quasi-homogeneous verdicts are numeric (quadrature-based)"],
    }
    _emit(args, data, t0)
    return 0


def cmd_returnmap(args) -> int:
    t0 = time.perf_counter()
    s, source = _load_system(args)
    x0 = [float(v) for v in args.x0] if args.x0 else [0.02, 0.05, 0.1]
    rm = return_map(s, x0, transversal=args.transversal, rel_tol=args.rel_tol)
    data = {
        "input": source,
        "class": s.linear_class,
        "numeric": {
            "transversal": rm.transversal,
            "classification": rm.classification,
            "samples": [{"x0": sm.x0, "value": sm.value,
                         "displacement": sm.displacement,
                         "return_time": sm.return_time} for sm in rm.samples],
        },
        "warnings": rm.warnings + ["return-map verdicts are evidence, not proof"],
    }
    _emit(args, data, t0)
    return 0


def cmd_classify(args) -> int:
    t0 = time.perf_counter()
    s, source = _load_system(args)
    x0 = [float(v) for v in args.x0] if args.x0 else [0.02, 0.05, 0.1]
    verdict = classify_monodromic(s, x0, transversal=args.transversal)
    dirs = verdict.directions
    data = {
        "input": source,
        "class": s.linear_class,
        "structure": {
            "hamiltonian": is_hamiltonian(s),
            "characteristic_directions": [str(d) for d in dirs.directions],
            "every_direction": dirs.every_direction,
            "lowest_degree": dirs.lowest_degree,
        },
        "numeric": {
            "classification": verdict.return_result.classification,
            "samples": [{"x0": sm.x0, "displacement": sm.displacement}
                        for sm in verdict.return_result.samples],
        },
        "summary": verdict.summary,
        "warnings": verdict.return_result.warnings + ["combined verdict is evidence, not proof"],
    }
    _emit(args, data, t0)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="centerlab",
                                 description="Exact center-vs-focus analysis for planar "
                                             "polynomial systems")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("system", help="system file (xdot = ...; ydot = ...)")
        p.add_argument("--set", action="append", default=[], metavar="NAME=VALUE",
                       help="specialize a parameter (exact rational, e.g. 1/10)")
        p.add_argument("--no-timings", action="store_true")
        p.add_argument("-o", "--output", help="write the JSON report to a file")

    p = sub.add_parser("liapunov", help="obstruction constants and center conditions")
    common(p)
    p.add_argument("--perturb", default="auto",
                   help="auto | none | minimal | nilpotent | degenerate | "
                        "general[:D] | hamiltonian")
    p.add_argument("--max-degree", type=int, default=8)
    p.add_argument("--mode", choices=["all-orders", "first-order"], default=None)
    p.set_defaults(func=cmd_liapunov)

    p = sub.add_parser("verify", help="check a first-integral candidate exactly")
    common(p)
    p.add_argument("--integral", required=True,
                   help="product form, e.g. \"(1+x)^(-2*c)*(x^4+y^2)\" or exp((g)/(h)) "
                        "or argexp(k; u; v) factors")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reversible", help="time-reversibility about a rotated axis")
    common(p)
    p.set_defaults(func=cmd_reversible)

    p = sub.add_parser("qhcenter", help="quasi-homogeneous center test")
    common(p)
    p.add_argument("--pq", help="force the weights, e.g. 2,3")
    p.add_argument("--bound", type=int, default=8, help="search bound for (p,q)")
    p.add_argument("--sweep", metavar="NAME=A:B:STEP",
                   help="sweep one parameter over a rational range")
    p.set_defaults(func=cmd_qhcenter)

    p = sub.add_parser("returnmap", help="numeric first-return map")
    common(p)
    p.add_argument("--x0", action="append", help="initial radius (repeatable)")
    p.add_argument("--transversal", default="x+", help="x+ | y+ | angle in radians")
    p.add_argument("--rel-tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_returnmap)

    p = sub.add_parser("classify", help="characteristic directions + return map")
    common(p)
    p.add_argument("--x0", action="append")
    p.add_argument("--transversal", default="x+")
    p.set_defaults(func=cmd_classify)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ClassificationError as exc:
        print(f"class mismatch: {exc}", file=sys.stderr)
        return 3
    except EngineError as exc:
        print(f"engine fault: {exc}", file=sys.stderr)
        return 4
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
