"""Command line interface: cmlab check | derive | verify-pkls | search | count | hermitian."""

import argparse
import json
import sys
from fractions import Fraction

from . import cmspec, engine, galois, hermitian, pkls, weiltype

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _write(data, out):
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode("utf-8"))


def _prime(model, spec_arg):
    """--prime D=<name or comma separated elements>."""
    if spec_arg is None:
        return model
    key, _, val = spec_arg.partition("=")
    if key != "D" or not val:
        raise engine.ParseError("--prime expects D=<subgroup>")
    G = model.spec.group
    if val in model.subgroups:
        D = model.subgroups[val]
    else:
        try:
            D = G.subgroup([int(x) for x in val.split(",")])
        except ValueError as e:
            raise engine.InvalidModel("decomposition group", str(e))
    model.D = D
    return model


def _parse_assertions(items):
    out = {}
    for item in items or ():
        name, _, val = item.partition("=")
        if val.lower() not in ("true", "false", "1", "0"):
            raise engine.ParseError("assertion %r must be fact=true|false" % item)
        if name not in engine.ASSERTABLE:
            raise engine.ParseError("unknown fact %r" % name)
        out[name] = val.lower() in ("true", "1")
    return out


def cmd_check(args, extra=None):
    model = _prime(engine.load_model(args.model), args.prime)
    report = engine.derive_conclusions(model, extra)
    _write(engine.render_report(report, args.emit), args.out)
    return EXIT_FAIL if report["invariant_failures"] else EXIT_OK


def cmd_derive(args):
    return cmd_check(args, _parse_assertions(args.asserts))


def _groups(names, all_iotas=False):
    if not names:
        return galois.catalog(all_iotas=all_iotas)
    return galois.catalog([n.strip() for n in names.split(",") if n.strip()], all_iotas=all_iotas)


def cmd_verify_pkls(args):
    G = galois.group_by_name(args.group, args.iota)
    if args.all_subgroups:
        Ds = G.subgroups()
    elif args.D:
        Ds = [G.subgroup([int(x) for x in args.D.split(",")])]
    else:
        Ds = [G.whole()]
    certs = []
    ok = True
    for D in Ds:
        res = pkls.verify_pkls(G, D, args.budget)
        ok = ok and res["surjective"]
        certs.append(dict(res["certificate"], surjective=res["surjective"]))
    print(json.dumps(certs, indent=2, sort_keys=True))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_search(args):
    groups = _groups(args.catalog, args.all_iotas)
    if args.kind == "exotic":
        found = weiltype.search_exotic_frobenius(groups, args.budget)
        out = [w.describe() for w in found]
    else:
        found = weiltype.search_nonneat(groups, args.dim, args.budget)
        out = [{"group": s.group.name, "iota": s.group.iota,
                "H": list(s.factors[0].H.elements), "cm_type": s.factors[0].phi.support()}
               for s in found]
    print(json.dumps({"kind": args.kind, "count": len(out), "witnesses": out}, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_count(args):
    model = _prime(engine.load_model(args.model), args.prime)
    if args.kind in ("P", "L0") and model.D is None:
        raise engine.InvalidModel("decomposition group", "kind %s needs D" % args.kind)
    n = cmspec.invariant_class_count(model.spec, args.kind, args.r, args.s, D=model.D,
                                     budget=args.budget)
    print(json.dumps({"kind": args.kind, "r": args.r, "s": args.s, "count": n}))
    return EXIT_OK


def _matrix(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return [[Fraction(x) for x in row] for row in data]
    except (OSError, ValueError, TypeError, ZeroDivisionError) as e:
        raise engine.ParseError("cannot read matrix %s: %s" % (path, e))


def cmd_hermitian(args):
    try:
        b = Fraction(args.b)
    except (ValueError, ZeroDivisionError) as e:
        raise engine.ParseError("bad rational %r: %s" % (args.b, e))
    try:
        pair = hermitian.RiemannPair(_matrix(args.psi), _matrix(args.beta), b)
        summary = engine.hermitian_summary(pair)
    except (hermitian.BadBeta, hermitian.NotQPolarized, hermitian.Degenerate) as e:
        print("error: %s: %s" % (type(e).__name__, e), file=sys.stderr)
        return EXIT_INPUT
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="cmlab", description="Exact computations on CM abelian varieties.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="compute predicates and derive conclusions for a model")
    c.add_argument("model")
    c.add_argument("--prime", help="decomposition group, D=<subgroup name or elements>")
    c.add_argument("--emit", choices=("text", "json"), default="text")
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("derive", help="like check, with extra asserted facts")
    d.add_argument("model")
    d.add_argument("--assert", dest="asserts", action="append", metavar="FACT=BOOL")
    d.add_argument("--prime")
    d.add_argument("--emit", choices=("text", "json"), default="text")
    d.add_argument("--out")
    d.set_defaults(func=cmd_derive)

    v = sub.add_parser("verify-pkls", help="certify surjectivity of Ker r -> Ker s")
    v.add_argument("--group", required=True)
    v.add_argument("--iota", type=int)
    v.add_argument("--D", help="comma separated elements of D (default: the whole group)")
    v.add_argument("--all-subgroups", action="store_true")
    v.add_argument("--budget", type=int)
    v.set_defaults(func=cmd_verify_pkls)

    s = sub.add_parser("search", help="search the catalog for exotic Frobenius germs or non-neat types")
    s.add_argument("kind", choices=("exotic", "nonneat"))
    s.add_argument("--catalog", help="comma separated group names (default: whole catalog)")
    s.add_argument("--all-iotas", action="store_true")
    s.add_argument("--dim", type=int, default=4)
    s.add_argument("--budget", type=int)
    s.set_defaults(func=cmd_search)

    n = sub.add_parser("count", help="dimension of the classes in H^2r(A^s)(r) fixed by a torus")
    n.add_argument("--model", required=True)
    n.add_argument("--kind", choices=("MT", "L", "P", "L0"), required=True)
    n.add_argument("-r", type=int, required=True)
    n.add_argument("-s", type=int, required=True)
    n.add_argument("--prime")
    n.add_argument("--budget", type=int)
    n.set_defaults(func=cmd_count)

    h = sub.add_parser("hermitian", help="signature and determinant class of a Riemann pair")
    h.add_argument("--psi", required=True)
    h.add_argument("--beta", required=True)
    h.add_argument("--b", required=True)
    h.set_defaults(func=cmd_hermitian)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except (engine.ParseError, engine.InvalidModel, engine.InconsistentFacts) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT
    except (galois.GroupTooLarge, galois.NotAGroup, galois.IotaNotCentralInvolution,
            KeyError, ValueError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT
    except cmspec.EnumerationBudgetExceeded as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
