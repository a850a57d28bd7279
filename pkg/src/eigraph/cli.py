"""Command-line front end.

Subcommands mirror the library modules:

    eigraph eig validate|reduce|move|modular|ucover
    eigraph cover check|sheets
    eigraph commation to-regular|radius|diameter|verify
    eigraph sieve member|primes-not-in|partial-sum
    eigraph rigidity triangle|obstruct|classify|g24

Exit codes: 0 success/valid, 1 usage or validation error, 2 verification
failure.  Output is deterministic: identical inputs give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import core, covers, commation, modular, moves, rigidity, sieve


def _read_graph(path: str) -> core.EIGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return core.from_obj(json.load(fh))


def _write_json(obj, path=None):
    text = json.dumps(obj, sort_keys=True, indent=2)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_eig_validate(args):
    g = _read_graph(args.graph)
    rep = core.validate(g)
    for v in rep.violations:
        print("violation:", v)
    print("valid" if rep.ok else "invalid")
    return 0 if rep.ok else 2


def _cmd_eig_reduce(args):
    g = _read_graph(args.graph)
    fn = moves.essentialize if args.mode == "essential" else moves.minimalize
    out, seq = fn(g)
    if seq.degenerate:
        print("degenerate: reduced to an edgeless vertex")
    print("moves:", len(seq))
    _write_json(core.to_obj(out), args.out)
    return 0


def _cmd_eig_move(args):
    g = _read_graph(args.graph)
    params = json.loads(args.params)
    out, rec = moves.apply_move(g, args.kind.replace("-", "_"), params)
    print("arrow:", rec.arrow)
    _write_json(core.to_obj(out), args.out)
    return 0


def _cmd_eig_modular(args):
    g = _read_graph(args.graph)
    md = modular.modular_data(g)
    print("unimodular:", md.unimodular)
    for gid, frac in sorted(md.generator_fractions().items()):
        print("generator %s: %s" % (gid, frac))
    if moves.is_minimal(g):
        print("invariant primes:", sorted(modular.invariant_primes(g)))
    return 0


def _cmd_eig_ucover(args):
    g = _read_graph(args.graph)
    ball = covers.universal_ball(g, args.base or g.vertices[0], args.radius)
    print("vertices:", ball.tree.n_vertices())
    n = covers.recognize_regular(ball) if args.radius >= 2 else None
    print("regular degree:", n if n is not None else "not recognized")
    return 0


def _cmd_cover_check(args):
    with open(args.map, "r", encoding="utf-8") as fh:
        p = covers.CoveringMap.from_obj(json.load(fh))
    rep = covers.check(p)
    for loc, what in rep.violations:
        print("violation at %s: %s" % (loc, what))
    print("valid" if rep.ok else "invalid")
    if rep.ok:
        print("graph cover:", covers.is_graph_cover(p))
    return 0 if rep.ok else 2


def _cmd_cover_sheets(args):
    g = _read_graph(args.graph)
    cov, p = covers.cyclic_cover(g, args.k, args.designated)
    _write_json(p.to_obj(), args.out)
    return 0


def _cmd_commation_to_regular(args):
    cert = commation.to_regular(_read_graph(args.graph))
    return _emit_cert(cert, args.out)


def _cmd_commation_radius(args):
    cert = commation.radius_commation(_read_graph(args.graph))
    return _emit_cert(cert, args.out)


def _cmd_commation_diameter(args):
    cert = commation.diameter_commation(
        _read_graph(args.graph), _read_graph(args.graph2), n_cap=args.cap, jobs=args.jobs
    )
    return _emit_cert(cert, args.out)


def _emit_cert(cert, out):
    rep = commation.verify(cert)
    print("length:", rep.length, "word:", rep.word)
    print("degrees:", json.dumps(cert.oracle_degrees, sort_keys=True))
    if rep.axioms:
        print("axioms:", ", ".join(rep.axioms))
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(cert.dumps() + "\n")
    else:
        print(cert.dumps())
    if not rep.ok:
        for v in rep.violations:
            print("violation:", v)
        return 2
    return 0


def _cmd_commation_verify(args):
    with open(args.cert, "r", encoding="utf-8") as fh:
        cert = commation.Commation.loads(fh.read())
    rep = commation.verify(cert)
    print("length:", rep.length, "word:", rep.word, "compressed:", rep.compressed_length)
    if rep.axioms:
        print("axioms:", ", ".join(rep.axioms))
    for v in rep.violations:
        print("violation:", v)
    print("valid" if rep.ok else "invalid")
    return 0 if rep.ok else 2


def _cmd_sieve_member(args):
    ok = sieve.in_s(args.m, args.d, args.N)
    print("%d %s S_{%d,%d}" % (args.m, "in" if ok else "not in", args.d, args.N))
    return 0


def _cmd_sieve_primes_not_in(args):
    ps = sieve.primes_not_in(args.N, args.count, args.limit)
    print(" ".join(str(p) for p in ps))
    return 0


def _cmd_sieve_partial_sum(args):
    partial, bound = sieve.partial_sum_bound(args.d, args.N, args.limit)
    print("partial: %s (~%.9f)" % (partial, float(partial)))
    print("bound:   %s (~%.9f)" % (bound, float(bound)))
    print("partial < bound:", partial < bound)
    return 0


def _cmd_rigidity_triangle(args):
    spec = rigidity.make_triangle(args.q, args.r, args.s)
    _write_json(core.to_obj(spec.graph()), args.out)
    return 0


def _cmd_rigidity_obstruct(args):
    spec = rigidity.make_triangle(args.q, args.r, args.s)
    proof = rigidity.triangle_obstruction(spec, args.N, max_vertices=args.max_vertices)
    for line in proof.chain:
        print(line)
    print("smooth-index covers with <= %d vertices: %d" % (proof.search_max_vertices, proof.search_found))
    print("obstruction holds" if proof.ok else "obstruction fails")
    return 0 if proof.ok else 2


def _cmd_rigidity_classify(args):
    spec = rigidity.make_triangle(args.q, args.r, args.s)
    res = rigidity.classify_quotients(spec, args.max_vertices)
    for lq in res:
        labels = sorted(set(str(l.to_obj()) for l in lq.vlabels.values()))
        print("quotient: %d vertices, labels %s" % (lq.graph.n_vertices(), labels))
    print("total:", len(res))
    return 0


def _cmd_rigidity_g24(args):
    g, seq = rigidity.g24_family(args.k)
    prof = core.degree_profile(g)
    base = max(prof, key=lambda v: (prof[v], v))
    ball = covers.universal_ball(g, base, 2)
    print("essential degree:", covers.recognize_regular(ball))
    print("chain length:", len(seq))
    _write_json(core.to_obj(g), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eigraph", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="group", required=True)

    eig = sub.add_parser("eig", help="edge-indexed graph operations").add_subparsers(dest="cmd", required=True)
    p = eig.add_parser("validate")
    p.add_argument("graph")
    p.set_defaults(fn=_cmd_eig_validate)
    p = eig.add_parser("reduce")
    p.add_argument("graph")
    p.add_argument("--mode", choices=["minimal", "essential"], default="minimal")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_eig_reduce)
    p = eig.add_parser("move")
    p.add_argument("graph")
    p.add_argument("--kind", required=True)
    p.add_argument("--params", required=True, help="JSON move parameters")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_eig_move)
    p = eig.add_parser("modular")
    p.add_argument("graph")
    p.set_defaults(fn=_cmd_eig_modular)
    p = eig.add_parser("ucover")
    p.add_argument("graph")
    p.add_argument("--base")
    p.add_argument("--radius", type=int, default=2)
    p.set_defaults(fn=_cmd_eig_ucover)

    cov = sub.add_parser("cover", help="covering maps").add_subparsers(dest="cmd", required=True)
    p = cov.add_parser("check")
    p.add_argument("map")
    p.set_defaults(fn=_cmd_cover_check)
    p = cov.add_parser("sheets")
    p.add_argument("graph")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--designated")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_cover_sheets)

    com = sub.add_parser("commation", help="commation certificates").add_subparsers(dest="cmd", required=True)
    p = com.add_parser("to-regular")
    p.add_argument("graph")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_commation_to_regular)
    p = com.add_parser("radius")
    p.add_argument("graph")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_commation_radius)
    p = com.add_parser("diameter")
    p.add_argument("graph")
    p.add_argument("graph2")
    p.add_argument("--cap", type=int, default=None, help="degree search budget")
    p.add_argument("--jobs", type=int, default=1, help="parallel candidate evaluation")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_commation_diameter)
    p = com.add_parser("verify")
    p.add_argument("cert")
    p.set_defaults(fn=_cmd_commation_verify)

    sv = sub.add_parser("sieve", help="smooth-number machinery").add_subparsers(dest="cmd", required=True)
    p = sv.add_parser("member")
    p.add_argument("m", type=int)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(fn=_cmd_sieve_member)
    p = sv.add_parser("primes-not-in")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--limit", type=int, required=True)
    p.set_defaults(fn=_cmd_sieve_primes_not_in)
    p = sv.add_parser("partial-sum")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--limit", type=int, required=True)
    p.set_defaults(fn=_cmd_sieve_partial_sum)

    rg = sub.add_parser("rigidity", help="triangle rigidity toolkit").add_subparsers(dest="cmd", required=True)
    p = rg.add_parser("triangle")
    for flag in ("--q", "--r", "--s"):
        p.add_argument(flag, type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_rigidity_triangle)
    p = rg.add_parser("obstruct")
    for flag in ("--q", "--r", "--s", "--N"):
        p.add_argument(flag, type=int, required=True)
    p.add_argument("--max-vertices", type=int, default=12)
    p.set_defaults(fn=_cmd_rigidity_obstruct)
    p = rg.add_parser("classify")
    for flag in ("--q", "--r", "--s"):
        p.add_argument(flag, type=int, required=True)
    p.add_argument("--max-vertices", type=int, required=True)
    p.set_defaults(fn=_cmd_rigidity_classify)
    p = rg.add_parser("g24")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_rigidity_g24)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (OSError, json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
        print("error:", exc, file=sys.stderr)
        return 1
    except (
        moves.MoveError,
        covers.TreeInput,
        covers.BallTooLarge,
        modular.NotAPath,
        modular.NotMinimal,
        sieve.LimitExhausted,
        rigidity.BadPrimes,
        rigidity.HypothesisFailed,
        rigidity.BudgetExceeded,
        rigidity.BadDegrees,
        commation.Elementary,
        commation.EqualizationFailed,
        commation.UnsupportedInput,
        core.SizeExceeded,
    ) as exc:
        print("error:", exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
