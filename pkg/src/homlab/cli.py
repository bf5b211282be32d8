"""The `homlab` command line."""
from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import amalgamation as am
from . import constructions as cons
from . import homogeneity as hom
from . import permgroup as pg
from . import search
from . import structure as st
from .errors import HomlabError, PreconditionFailed
from .space import dump_space, from_json, load_space, to_json


class UsageError(Exception):
    pass


def _ks(text):
    try:
        ks = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k list {text!r}")
    if not ks or min(ks) < 1:
        raise argparse.ArgumentTypeError("k values must be positive")
    return ks


def _floats(text):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}")


def _load(path):
    if not os.path.isfile(path):
        raise UsageError(f"no such file: {path}")
    return load_space(path)


def _load_json(path):
    if not os.path.isfile(path):
        raise UsageError(f"no such file: {path}")
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as e:
            raise UsageError(f"{path}: invalid JSON ({e})")


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required for this construction")


def _space_out(space, args):
    if args.output:
        dump_space(space, args.output, args.format)
    return to_json(space)


# ---------------------------------------------------------------------------
# subcommands


def cmd_construct(args):
    kind = args.kind
    if kind == "cycle":
        _need(args, "n")
        X = cons.cycle(args.n)
    elif kind == "discrete":
        _need(args, "n")
        from .space import discrete_space

        X = discrete_space(args.n)
    elif kind == "binary":
        _need(args, "m")
        X = cons.binary_space(args.m)
    elif kind == "b":
        _need(args, "m", "k")
        X = cons.b_space(args.m, args.k)
    elif kind == "d":
        _need(args, "n")
        X = cons.d_space(args.n)
    elif kind == "e":
        _need(args, "m", "k")
        X = cons.e_space(args.m, args.k)
    elif kind == "dbool":
        _need(args, "n")
        X = cons.discrete_boolean_duplicate(args.n)
    elif kind == "hexagon":
        vals = args.values or [1.0, 1.2, 1.4, 1.6, 1.8]
        if len(vals) != 5:
            raise UsageError("hexagon takes 5 values")
        X = cons.hexagon(*vals)
    elif kind == "tetra":
        vals = args.values or [1.0, 1.1, 1.2]
        if len(vals) != 3:
            raise UsageError("tetra takes 3 values")
        X = cons.tetrahedron(*vals)
    elif kind == "boolean":
        _need(args, "norm")
        X = cons.boolean_space(st.NormTable.from_dict(_load_json(args.norm)))
    elif kind == "wap":
        base = _load(args.base) if args.base else cons.scale(cons.cycle(2), 1.0)
        gadget = cons.wap_gadget(base)
        X = gadget.X if args.side == "x" else gadget.Y
    elif kind == "random":
        _need(args, "n")
        X = search.random_orbital_coloring(args.n, random.Random(args.seed))
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(kind)
    return _space_out(X, args)


def cmd_analyze(args):
    X = _load(args.space)
    return hom.analyze(X, args.k, ultra=args.ultra).as_dict()


def cmd_decompose(args):
    X = _load(args.space)
    if args.kind == "isofree":
        dec = st.isosceles_free_components(X)
    else:
        dec = st.isosceles_generated_components(X)
    out = dec.as_dict()
    star = st.aut_star(X, dec)
    out["aut_star_order"] = star.order
    Q = st.quotient_space(X, dec)
    out["quotient"] = to_json(Q)
    out["singleton_distances"] = sorted(int(c) for c in st.singleton_distances(X))
    return out


def cmd_classify(args):
    X = _load(args.space)
    out = st.classify(X).as_dict()
    if args.checks:
        out["theorem_checks"] = st.theorem_checks(X)
    if out["isosceles_free"]:
        t = st.to_norm_table(X)
        out["norm_table"] = t.as_dict()
        if t.m <= 4:
            out["norm_properties"] = st.norm_properties(t).as_dict()
    return out


def cmd_factor(args):
    X = _load(args.space)
    f = cons.rainbow_factorization(X)
    if f is None:
        raise PreconditionFailed("space does not have exactly two isosceles-generated components")
    return {
        "base": to_json(f.base),
        "H": [list(h) for h in f.params.H],
        "g": list(f.params.g),
        "r": list(f.params.r),
        "points": list(f.points),
    }


def cmd_aut(args):
    X = _load(args.space)
    G = hom.automorphisms(X, cap=args.cap)
    out = {
        "order": G.order,
        "generators": [list(g) for g in G.generators],
        "transitive": pg.is_transitive(G),
        "regular": pg.is_regular(G),
        "abelian": pg.is_abelian(G),
        "boolean": pg.is_boolean(G),
    }
    if args.elements:
        out["elements"] = G.elements.tolist()
    return out


def cmd_amalgam(args):
    if args.action == "z3z3":
        s = am.z3z3_counterexample()
    else:
        if not args.scheme:
            raise UsageError(f"amalgam {args.action} needs a scheme file")
        data = _load_json(args.scheme)
        if "colors" in data:
            s = am.scheme_from_space(from_json(data))
        else:
            s = am.TriangleScheme.from_dict(data)
    if args.action == "validate":
        return am.validate_scheme(s).as_dict()
    if args.action == "coherence":
        return am.coherence_check(s).as_dict()
    if args.action == "limit":
        return _space_out(am.limit_space(s), args)
    out = s.as_dict()
    out["validate"] = am.validate_scheme(s).as_dict()
    out["coherence"] = am.coherence_check(s, hint=am.Z3Z3_WITNESS).as_dict()
    return out


def cmd_delta(args):
    method = args.method or ("regular" if args.k == 1 else "formula")
    fn = search.delta1 if args.k == 1 else search.delta2
    rep = fn(args.n, method)
    return rep.as_dict()


def cmd_verify_table(args):
    rep = search.verify_table(args.max, jobs=args.jobs)
    args._table = rep
    args._exit = 0 if rep.ok else 1
    return rep.as_dict()


def cmd_wap(args):
    base = _load(args.space) if args.space else cons.scale(cons.cycle(2), 1.0)
    g = cons.wap_gadget(base, args.p0, args.p1)
    out = g.as_dict()
    out["X"] = to_json(g.X)
    out["Y"] = to_json(g.Y)
    return out


# ---------------------------------------------------------------------------


def build_parser():
    def globals_(suppress):
        g = argparse.ArgumentParser(add_help=False)
        kw = {"default": argparse.SUPPRESS} if suppress else {}
        g.add_argument("--pretty", action="store_true", help="human readable output", **kw)
        g.add_argument("--jobs", type=int, help="worker processes", **({"default": None} | kw))
        g.add_argument("--seed", type=int, help="seed for randomized commands", **({"default": 0} | kw))
        return g

    # options may come before or after the subcommand; the subcommand copy
    # only sets a value when given
    common = globals_(True)
    p = argparse.ArgumentParser(prog="homlab", parents=[globals_(False)],
                                description="Homogeneous finite metric spaces and their distance counts.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", parents=[common], help="build a named space")
    c.add_argument("kind", choices=["cycle", "discrete", "binary", "b", "d", "e", "dbool",
                                    "hexagon", "tetra", "boolean", "wap", "random"])
    c.add_argument("--n", type=int)
    c.add_argument("--m", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--values", type=_floats, help="comma separated distances (hexagon, tetra)")
    c.add_argument("--norm", help="norm table JSON (boolean)")
    c.add_argument("--base", help="base space for wap")
    c.add_argument("--side", choices=["x", "y"], default="x")
    c.add_argument("-o", "--output")
    c.add_argument("--format", choices=["json", "text"], default="json")
    c.set_defaults(func=cmd_construct)

    a = sub.add_parser("analyze", parents=[common], help="homogeneity report")
    a.add_argument("space")
    a.add_argument("--k", type=_ks, default=(1, 2))
    a.add_argument("--ultra", action="store_true")
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("decompose", parents=[common], help="component decomposition")
    d.add_argument("space")
    d.add_argument("--kind", choices=["isofree", "isogen"], default="isogen")
    d.set_defaults(func=cmd_decompose)

    k = sub.add_parser("classify", parents=[common], help="structure classification")
    k.add_argument("space")
    k.add_argument("--checks", action="store_true", help="also evaluate the structural implications")
    k.set_defaults(func=cmd_classify)

    f = sub.add_parser("factor", parents=[common], help="rainbow factorization")
    f.add_argument("space")
    f.set_defaults(func=cmd_factor)

    u = sub.add_parser("aut", parents=[common], help="automorphism group")
    u.add_argument("space")
    u.add_argument("--cap", type=int, default=None)
    u.add_argument("--elements", action="store_true")
    u.set_defaults(func=cmd_aut)

    m = sub.add_parser("amalgam", parents=[common], help="triangle schemes")
    m.add_argument("action", choices=["validate", "coherence", "limit", "z3z3"])
    m.add_argument("scheme", nargs="?")
    m.add_argument("-o", "--output")
    m.add_argument("--format", choices=["json", "text"], default="json")
    m.set_defaults(func=cmd_amalgam)

    t = sub.add_parser("delta", parents=[common], help="Δ₁(n) or Δ₂(n)")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--k", type=int, choices=[1, 2], default=1)
    t.add_argument("--method", choices=["regular", "full", "oracle", "formula"])
    t.set_defaults(func=cmd_delta)

    v = sub.add_parser("verify-table", parents=[common], help="check the table of maximal distance counts")
    v.add_argument("--max", type=int, default=16)
    v.set_defaults(func=cmd_verify_table)

    w = sub.add_parser("wap", parents=[common], help="amalgamation obstruction gadget")
    w.add_argument("space", nargs="?")
    w.add_argument("--p0", type=int, default=0)
    w.add_argument("--p1", type=int, default=1)
    w.set_defaults(func=cmd_wap)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.seed is not None:
        random.seed(args.seed)
    try:
        out = args.func(args)
    except UsageError as e:
        print(f"homlab: error: {e}", file=sys.stderr)
        return 2
    except HomlabError as e:
        diag = {"error": type(e).__name__, "message": str(e)}
        print(json.dumps(diag), file=sys.stderr)
        return 1
    if args.pretty and getattr(args, "_table", None) is not None:
        print(args._table.text())
    else:
        print(json.dumps(out, indent=2 if args.pretty else None))
    return getattr(args, "_exit", 0)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
