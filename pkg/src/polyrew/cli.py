"""Command-line front end: validate, normalize, branchings, confluence,
basis, termination, fdt, obstruction, words."""
from __future__ import annotations

import argparse
import json
import sys

from . import branchings as br
from . import diagram as dg
from . import interpret as ip
from . import rewrite as rw
from . import words as wd
from .cells import Polygraph, PolygraphError, parse_dexpr_text, parse_polygraph, validate

SCHEMA = 1


def _load_poly(path: str) -> Polygraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_polygraph(fh.read())


def _load_levels(poly, interp_paths, cert_path):
    pool: dict[str, ip.Interpretation] = {}
    for path in interp_paths or []:
        with open(path, "r", encoding="utf-8") as fh:
            for interp in ip.parse_interpretations(fh.read(), poly):
                pool[interp.name] = interp
    if cert_path is None:
        return None
    with open(cert_path, "r", encoding="utf-8") as fh:
        names = ip.load_certificate(fh.read())
    missing = [n for n in names if n not in pool]
    if missing:
        raise ip.InterpError(f"certificate names not found: {missing} "
                             f"(pass their files with --interp)")
    return [pool[n] for n in names]


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.output == "json":
        payload = {"schema": SCHEMA, **payload}
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for line in text_lines:
            print(line)


def _branching_rows(poly, rep: br.BranchingReport):
    conc = []
    for name, b, cls, v in rep.concrete:
        conc.append({
            "name": name,
            "rules": list(b.rules()),
            "class": cls.tag + (f"({cls.subcase})" if cls.subcase else ""),
            "peak": dg.dump(poly.sig, b.source),
            "confluence": v.status,
        })
    idx = []
    for t, rows, saturated in rep.indexed:
        idx.append({
            "rules": [t.rule_a, t.rule_b],
            "side": t.side,
            "hole": {"anchor_left": list(t.hole.anchor_left),
                     "anchor_right": list(t.hole.anchor_right)},
            "instances": [{
                "name": name,
                "filler": dg.dump(poly.sig, k),
                "filler_size": k.size(),
                "confluence": v.status,
            } for name, k, b, v in rows],
            "saturated": saturated,
        })
    return conc, idx


def cmd_validate(args):
    try:
        poly = _load_poly(args.poly)
    except PolygraphError as e:
        # invalid polygraphs still produce a structured report
        _emit(args, {"valid": False, "violations": [str(e)]},
              [f"invalid: {e}"])
        return 0
    report = validate(poly)
    _emit(args, {"valid": not report, "violations": report,
                 "counts": list(poly.counts()), "dimension": poly.dimension},
          [f"polygraph {poly.name}: "
           + ("valid" if not report else "invalid"),
           f"cell counts: {poly.counts()}"]
          + [f"violation: {v}" for v in report])
    return 0


def cmd_normalize(args):
    poly = _load_poly(args.poly)
    d = parse_dexpr_text(poly, args.cell)
    nf, trace, status = rw.normalize(poly, d, args.max_steps)
    _emit(args, {"status": status, "steps": len(trace.steps),
                 "normal_form": dg.dump(poly.sig, nf),
                 "trace": rw.trace_json(poly, trace)},
          [f"status: {status}", f"steps: {len(trace.steps)}",
           "normal form:", dg.dump(poly.sig, nf)])
    return 0


def cmd_branchings(args):
    poly = _load_poly(args.poly)
    rep = br.analyse_branchings(poly, None, args.max_steps,
                                args.size_bound, args.width_bound)
    conc, idx = _branching_rows(poly, rep)
    lines = [f"critical branchings of {poly.name}: "
             f"{len(conc)} concrete, {len(idx)} indexed template(s)"]
    for c in conc:
        lines.append(f"  {c['name']}: {c['class']}")
    for t in idx:
        lines.append(f"  indexed {t['rules'][0]}/{t['rules'][1]} "
                     f"({t['side']}): {len(t['instances'])} normal instance(s) "
                     f"within bounds, saturated={t['saturated']}")
    _emit(args, {"concrete": conc, "indexed": idx}, lines)
    return 0


def cmd_confluence(args):
    poly = _load_poly(args.poly)
    levels = _load_levels(poly, args.interp, args.cert)
    rep = br.analyse_branchings(poly, levels, args.max_steps,
                                args.size_bound, args.width_bound)
    conc, idx = _branching_rows(poly, rep)
    lines = []
    for c in conc:
        lines.append(f"{c['name']}: {c['confluence']}")
    for t in idx:
        for i in t["instances"]:
            lines.append(f"{i['name']}: {i['confluence']}")
    _emit(args, {"concrete": conc, "indexed": idx,
                 "certificate": (rep.cert_report.verdict
                                 if rep.cert_report else "absent")}, lines)
    return 0


def cmd_basis(args):
    poly = _load_poly(args.poly)
    levels = _load_levels(poly, args.interp, args.cert)
    try:
        gens, rep = br.build_homotopy_basis(poly, levels, args.max_steps,
                                            args.size_bound, args.width_bound)
    except ValueError as e:
        _emit(args, {"error": str(e)}, [f"no basis: {e}"])
        return 0
    rows = [{
        "name": g.name,
        "lhs": [[r, s] for r, s in g.lhs_signed()],
        "rhs": [[r, s] for r, s in g.rhs_signed()],
    } for g in gens]
    _emit(args, {"basis": rows, "size": len(rows)},
          [f"homotopy basis of size {len(rows)}:"]
          + [f"  {r['name']}: {[x[0] for x in r['lhs']]} ~ "
             f"{[x[0] for x in r['rhs']]}" for r in rows])
    return 0


def cmd_termination(args):
    poly = _load_poly(args.poly)
    levels = _load_levels(poly, args.interp, args.cert)
    if levels is None:
        print("termination requires --cert", file=sys.stderr)
        return 2
    rep = ip.check_certificate(poly, levels)
    _emit(args, rep.to_json(),
          [f"certificate: {rep.verdict}"]
          + [f"  {r}" for r in rep.reasons]
          + [f"  {s.rule}@{s.level}: {s.status}" for s in rep.statuses])
    return 0


def cmd_fdt(args):
    poly = _load_poly(args.poly)
    levels = _load_levels(poly, args.interp, args.cert)
    out = br.fdt_report(poly, levels, args.max_steps,
                        args.size_bound, args.width_bound)
    conc, idx = _branching_rows(poly, out["report"])
    _emit(args, {"verdict": out["verdict"], "basis_size": out["basis_size"],
                 "saturated": out["saturated"], "certificate": out["certificate"],
                 "concrete": conc, "indexed": idx},
          [f"fdt verdict: {out['verdict']}",
           f"certificate: {out['certificate']}",
           f"basis size: {out['basis_size']}",
           f"concrete branchings: {len(conc)}",
           f"indexed templates: {len(idx)} (saturated={out['saturated']})"])
    return 0


def cmd_obstruction(args):
    poly = _load_poly(args.poly)
    levels = _load_levels(poly, args.interp, args.cert)
    gens, rep = br.build_homotopy_basis(poly, levels, args.max_steps,
                                        args.size_bound, args.width_bound)
    by_name = {g.name: g for g in gens}
    cand_names = [s for s in args.candidates.split(",") if s]
    missing = [n for n in cand_names + [args.target] if n not in by_name]
    if missing:
        print(f"unknown generator(s): {missing}; available: "
              f"{sorted(by_name)}", file=sys.stderr)
        return 2
    dvals = {}
    for item in args.dvals.split(","):
        k, v = item.split("=")
        dvals[k.strip()] = int(v)
    verdict, vals = ip.derivation_obstruction(
        [by_name[n] for n in cand_names], by_name[args.target], dvals)
    _emit(args, {"verdict": verdict, "target_values": list(vals),
                 "candidates": cand_names, "target": args.target},
          [f"verdict: {verdict}",
           f"target trace values: {vals[0]} vs {vals[1]}"])
    return 0


def cmd_words(args):
    poly = _load_poly(args.poly)
    if poly.dimension != 2:
        print("words requires a 2-polygraph (rule declarations)", file=sys.stderr)
        return 2
    if args.word:
        nf, trace, status = wd.normalize_word(poly, tuple(args.word.split()),
                                              args.max_steps)
        _emit(args, {"status": status, "normal_form": list(nf),
                     "steps": len(trace.steps)},
              [f"status: {status}", f"normal form: {' '.join(nf) or '(empty)'}"])
        return 0
    rep = wd.word_confluence_report(poly, args.max_steps)
    payload = {k: v for k, v in rep.items() if k != "basis"}
    payload["basis"] = [b["name"] for b in rep["basis"]]
    _emit(args, payload,
          [f"critical pairs: {len(rep['pairs'])}",
           f"joinable: {rep['joinable']}",
           f"basis size: {rep['basis_size']}",
           f"termination: {rep['termination']}",
           f"verdict: {rep['verdict']}"]
          + [f"  peak {''.join(p['peak'])}: "
             f"{'joinable' if p['joinable'] else 'NOT joinable'}"
             for p in rep["pairs"]])
    return 0


def main(argv=None) -> int:
    top = argparse.ArgumentParser(prog="polyrew", description=__doc__)
    sub = top.add_subparsers(dest="verb", required=True)

    def common(sp, bounds=True):
        sp.add_argument("--poly", required=True, help="polygraph file")
        sp.add_argument("--interp", action="append",
                        help="interpretation file (repeatable)")
        sp.add_argument("--cert", help="certificate file (ordered level names)")
        sp.add_argument("--max-steps", type=int, default=10_000)
        if bounds:
            sp.add_argument("--size-bound", type=int, default=4)
            sp.add_argument("--width-bound", type=int, default=4)
        sp.add_argument("-o", "--output", choices=("text", "json"),
                        default="text")

    sp = sub.add_parser("validate", help="check polygraph invariants")
    common(sp, bounds=False)
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("normalize", help="normalize a 2-cell")
    common(sp, bounds=False)
    sp.add_argument("--cell", required=True, help="diagram expression")
    sp.set_defaults(fn=cmd_normalize)

    sp = sub.add_parser("branchings", help="enumerate critical branchings")
    common(sp)
    sp.set_defaults(fn=cmd_branchings)

    sp = sub.add_parser("confluence", help="per-branching confluence verdicts")
    common(sp)
    sp.set_defaults(fn=cmd_confluence)

    sp = sub.add_parser("basis", help="build the homotopy basis")
    common(sp)
    sp.set_defaults(fn=cmd_basis)

    sp = sub.add_parser("termination", help="check a termination certificate")
    common(sp, bounds=False)
    sp.set_defaults(fn=cmd_termination)

    sp = sub.add_parser("fdt", help="finite-derivation-type report")
    common(sp)
    sp.set_defaults(fn=cmd_fdt)

    sp = sub.add_parser("obstruction", help="derivation obstruction check")
    common(sp)
    sp.add_argument("--candidates", required=True,
                    help="comma-separated generator names")
    sp.add_argument("--target", required=True, help="target generator name")
    sp.add_argument("--dvals", required=True,
                    help="per-rule integers, e.g. alpha=1,beta=-1")
    sp.set_defaults(fn=cmd_obstruction)

    sp = sub.add_parser("words", help="word-rewriting report (2-polygraph mode)")
    common(sp, bounds=False)
    sp.add_argument("--word", help="normalize this word instead of reporting")
    sp.set_defaults(fn=cmd_words)

    args = top.parse_args(argv)
    try:
        return args.fn(args)
    except (PolygraphError, ip.InterpError, dg.DiagramError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
