"""Command line front end: ``orbit-designs <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .classify import certify_family, classify_corner_designs, extra_families, table_families
from .config import FORMATS, Config
from .designs import (WeightedDesign, corner_design, fisher_bound, is_tight, strength_direct,
                      strength_full, strength_invariant)
from .groups import build_group, corner_orbit, molien_dims
from .invariants import closed_form_invariant, closed_form_labels, invariant_harm_basis
from .poly import format_poly
from .scalar import format_scalar, parse_scalar, scalar_mode
from .xu import (XuFormula, XuSolveError, solve_moment_system, verify_conditions, verify_degree,
                 weight_by_name)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def scalar_json(x) -> dict:
    return {"value": format_scalar(x), "mode": scalar_mode(x)}


def _emit(data, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(data, sort_keys=True, indent=2) + "\n")
        return
    rows = data.get("rows") if isinstance(data, dict) else None
    if fmt == "csv":
        buf = io.StringIO()
        if rows:
            keys = sorted({k for r in rows for k in r})
            w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: _flat(r.get(k)) for k in keys})
        else:
            w = csv.writer(buf, lineterminator="\n")
            for k in sorted(data):
                w.writerow([k, _flat(data[k])])
        out.write(buf.getvalue())
        return
    for k in sorted(data):
        v = data[k]
        if isinstance(v, list) and v and isinstance(v[0], dict):
            out.write(f"{k}:\n")
            for item in v:
                out.write("  " + ", ".join(f"{a}={_flat(b)}" for a, b in sorted(item.items())) + "\n")
        else:
            out.write(f"{k}: {_flat(v)}\n")


def _flat(v) -> str:
    if isinstance(v, dict) and set(v) == {"value", "mode"}:
        return v["value"]
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: malformed JSON ({e})") from None


def _check_rank(cfg: Config, n: int) -> None:
    if n > cfg.orbit_rank_cap:
        raise UsageError(f"rank {n} exceeds the orbit rank cap {cfg.orbit_rank_cap}")


# ---------------------------------------------------------------------------------
# subcommands

def cmd_orbit(args, cfg):
    _check_rank(cfg, args.rank)
    G = build_group(args.type, args.rank)
    if not 1 <= args.corner <= G.n:
        raise UsageError(f"corner must lie in 1..{G.n}")
    orb = corner_orbit(G, args.corner)
    return EXIT_OK, {
        "group": G.name, "corner": args.corner, "size": orb.size,
        "norm2": scalar_json(orb.norm2),
        "points": [[format_scalar(x) for x in p] for p in orb.points],
    }


def cmd_harm_basis(args, cfg):
    _check_rank(cfg, args.rank)
    G = build_group(args.type, args.rank)
    if args.closed_form:
        polys = []
        for lab in closed_form_labels(G.dynkin_type, G.n):
            f = closed_form_invariant(G.dynkin_type, G.n, lab)
            if f.degree() == args.degree:
                polys.append({"label": lab, "poly": format_poly(f)})
        return EXIT_OK, {"group": G.name, "degree": args.degree, "closed_forms": polys}
    B = invariant_harm_basis(G, args.degree)
    return EXIT_OK, {"group": G.name, "degree": args.degree, "dimension": len(B),
                     "basis": [format_poly(f) for f in B.polys]}


def _parse(text):
    try:
        return parse_scalar(str(text))
    except Exception as e:  # sympy raises several exception types on bad input
        raise UsageError(f"cannot parse scalar {text!r}: {e}") from None


def load_design(data: dict):
    """(design, group or None) from the JSON design format."""
    if "points" in data:
        pts = [tuple(_parse(x) for x in p) for p in data["points"]]
        ws = [_parse(w) for w in data["weights"]]
        X = WeightedDesign.from_points(pts, ws)
        G = build_group(data["type"], int(data["rank"])) if "type" in data else None
        return X, G
    try:
        G = build_group(data["type"], int(data["rank"]))
        J = [int(k) for k in data["J"]]
        radii = {int(k): _parse(v) for k, v in data["radii"].items()}
        weights = {int(k): _parse(v) for k, v in data["weights"].items()}
    except KeyError as e:
        raise UsageError(f"design file is missing {e}") from None
    if set(J) != set(radii) or set(J) != set(weights):
        raise UsageError("J, radii and weights must name the same corners")
    origin = data.get("origin_weight")
    X = corner_design(G, {k: r * r for k, r in radii.items()}, weights,
                      origin_weight=None if origin is None else _parse(origin))
    return X, G


def cmd_check_design(args, cfg):
    try:
        X, G = load_design(_load_json(args.file))
    except ValueError as e:
        raise UsageError(str(e)) from None
    t = {}
    if G is not None:
        t["invariant"] = strength_invariant(X, G, args.tmax).t_certified
    t["full_harmonic"] = strength_full(X, args.tmax).t_certified
    t["direct_integration"] = strength_direct(X, args.tmax).t_certified
    agree = len(set(t.values())) == 1
    best = min(t.values())
    data = {"size": X.size, "spheres": X.p, "t_max": args.tmax, "strength": t, "agree": agree}
    if best >= 1:
        tr = is_tight(X, best)
        data["tight"] = {"t": best, "tight": tr.tight, "bound": tr.bound, "slack": tr.slack}
    ok = agree and (args.t is None or best >= args.t)
    return (EXIT_OK if ok else EXIT_FAIL), data


def cmd_fisher(args, cfg):
    b = fisher_bound(args.n, args.t, args.spheres, args.eps, args.origin)
    return EXIT_OK, {"n": args.n, "t": args.t, "spheres": args.spheres, "eps": args.eps,
                     "origin": args.origin, "bound": b}


def cmd_classify(args, cfg):
    _check_rank(cfg, args.nmax)
    C = classify_corner_designs(args.type, args.nmax, args.tmax)
    rows = [f.describe() for f in C.families]
    return EXIT_OK, {"type": C.dynkin_type, "n_max": args.nmax, "t_max": args.tmax,
                     "candidates": C.candidates, "rows": rows,
                     "flagged": [str(x) for x in C.flagged]}


def cmd_reproduce_tables(args, cfg):
    tables = (1, 2, 3) if args.table == "all" else (int(args.table),)
    params = [Fraction(p) for p in args.param] if args.param else None
    rows = []
    for tb in tables:
        fams = table_families(tb) + (extra_families() if tb == 3 and args.extras else [])
        for fam in fams:
            values = fam.sample_values()
            if fam.param is not None and params:
                values = params
            for v in values:
                c = certify_family(fam, v)
                rows.append({"table": tb, "group": f"{fam.dynkin_type}{fam.n}",
                             "J": list(fam.J), "t": fam.t, "spheres": fam.p,
                             "parameter": None if v is None else str(v),
                             "t_invariant": c.t_invariant, "t_full": c.t_full,
                             "t_direct": c.t_direct, "size": c.size, "bound": c.bound,
                             "ok": c.ok})
    ok = all(r["ok"] for r in rows)
    return (EXIT_OK if ok else EXIT_FAIL), {"rows": rows, "all_ok": ok}


def cmd_xu_build(args, cfg):
    W = weight_by_name(args.weight)
    try:
        F = solve_moment_system(W, args.n, args.family)
    except XuSolveError as e:
        return EXIT_FAIL, {"error": str(e), "weight": W.name, "n": args.n, "family": args.family}
    data = F.to_json()
    data["weight"] = W.name
    data["degree"] = F.degree
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(data, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return EXIT_OK, data


def cmd_xu_verify(args, cfg):
    data = _load_json(args.file)
    try:
        F = XuFormula.from_json(data)
        W = weight_by_name(args.weight or data.get("weight", "gaussian"))
    except (KeyError, ValueError) as e:
        raise UsageError(f"bad formula file: {e}") from None
    t = args.t if args.t is not None else F.degree
    cond = verify_conditions(F, W)
    deg = verify_degree(F, W, t)
    out = {
        "family": F.family, "n": F.n, "weight": W.name, "t": t,
        "conditions_pass": cond.passed, "degree_pass": deg.passed,
        "failing_conditions": [{"kind": c.kind, "j": c.j, "value": format_scalar(c.value, 12)}
                               for c in cond.failing()],
        "failing_monomials": [{"a": a, "b": b, "residual": format_scalar(r, 12)}
                              for a, b, r, _ in deg.failing()],
        "monomials_checked": deg.brute_count, "invariants_checked": deg.reduced_count,
    }
    ok = deg.passed and (cond.passed or t != F.degree)
    return (EXIT_OK if ok else EXIT_FAIL), out


def cmd_molien(args, cfg):
    G = build_group(args.type, args.rank)
    return EXIT_OK, {"group": G.name, "l_max": args.lmax, "coefficients": molien_dims(G, args.lmax)}


# ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def global_args(parser, default):
        parser.add_argument("--precision", type=int, default=default,
                            help="big-float bits (default 256)")
        parser.add_argument("--tolerance-exponent", type=int, default=default,
                            help="zero test threshold 2^-e (default precision/2)")
        parser.add_argument("--format", choices=FORMATS, default=default, help="output format")
        parser.add_argument("--rank-cap", type=int, default=default,
                            help="largest rank to enumerate")

    p = argparse.ArgumentParser(prog="orbit-designs",
                                description="Designs and cubature from reflection group orbits.")
    global_args(p, None)
    # the same options are accepted after the subcommand name
    common = argparse.ArgumentParser(add_help=False)
    global_args(common, argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **k: _add(*a, parents=[common], **k)

    def group_args(sp, rank_flag="--rank"):
        sp.add_argument("--type", required=True, type=str.upper, choices=("A", "B", "D"))
        sp.add_argument(rank_flag, required=True, type=int)

    s = sub.add_parser("orbit", help="corner-vector orbit")
    group_args(s)
    s.add_argument("--corner", required=True, type=int)
    s.add_argument("--json", action="store_true", help="JSON output (the default)")
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("harm-basis", help="invariant harmonic polynomials of one degree")
    group_args(s)
    s.add_argument("--degree", required=True, type=int)
    s.add_argument("--closed-form", action="store_true", help="print the closed forms instead")
    s.set_defaults(func=cmd_harm_basis)

    s = sub.add_parser("check-design", help="certify the strength of a design file")
    s.add_argument("file")
    s.add_argument("--tmax", type=int, default=8)
    s.add_argument("--t", type=int, default=None, help="required strength (exit 1 below it)")
    s.set_defaults(func=cmd_check_design)

    s = sub.add_parser("fisher", help="Fisher-type lower bound")
    s.add_argument("--n", required=True, type=int)
    s.add_argument("--t", required=True, type=int)
    s.add_argument("--spheres", type=int, default=1)
    s.add_argument("--eps", type=int, default=0, choices=(0, 1))
    s.add_argument("--origin", action="store_true")
    s.set_defaults(func=cmd_fisher)

    s = sub.add_parser("classify", help="search tight designs X(G, J)")
    s.add_argument("--type", required=True, type=str.upper, choices=("A", "B", "D"))
    s.add_argument("--nmax", required=True, type=int)
    s.add_argument("--tmax", type=int, default=7)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("reproduce-tables", help="re-certify the published tables")
    s.add_argument("--table", default="all", choices=("1", "2", "3", "all"))
    s.add_argument("--param", action="append", default=None,
                   help="value of the free radius for one-parameter rows (repeatable)")
    s.add_argument("--extras", action="store_true", help="include tight D4 designs missing from the type D table")
    s.set_defaults(func=cmd_reproduce_tables)

    s = sub.add_parser("xu-build", help="solve the radial moment system")
    s.add_argument("--weight", default="gaussian", choices=("gaussian", "unit_disk"))
    s.add_argument("--n", required=True, type=int)
    s.add_argument("--family", default="odd", choices=("odd", "even"))
    s.add_argument("--out", default=None, help="also write the formula to this file")
    s.set_defaults(func=cmd_xu_build)

    s = sub.add_parser("xu-verify", help="check a radial cubature formula file")
    s.add_argument("file")
    s.add_argument("--t", type=int, default=None, help="degree to check (default: the family's)")
    s.add_argument("--weight", default=None, choices=("gaussian", "unit_disk"))
    s.set_defaults(func=cmd_xu_verify)

    s = sub.add_parser("molien", help="dimensions of invariant harmonic polynomials")
    group_args(s)
    s.add_argument("--lmax", required=True, type=int)
    s.set_defaults(func=cmd_molien)
    return p


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        cfg = Config.from_env(precision_bits=args.precision,
                              tolerance_exponent=args.tolerance_exponent,
                              output_format=args.format, orbit_rank_cap=args.rank_cap)
        cfg.apply()
        code, data = args.func(args, cfg)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    _emit(data, cfg.output_format, out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
