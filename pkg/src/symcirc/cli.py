"""Batch front door: pattern generation, width computation, compilation,
symmetry analysis, oracle evaluation, identity verification, and suites.

Exit codes: 0 success, 1 a verification failed (an identity did not hold),
2 usage or parse errors.  Every randomized step draws from random.Random
seeded by --seed, so identical argv produce identical outputs.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from . import compilers, oracle, pattern, reduce, symmetry, width
from .circuit import Circuit, SKEW
from .errors import SymcircError
from .oracle import ColouredGraph, WeightedHost


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(data, out: Optional[str]):
    text = json.dumps(data, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# -- pattern ------------------------------------------------------------------------


def _cmd_pattern(args) -> int:
    if args.kind == "path":
        g = pattern.make_path(args.v)
    elif args.kind == "grid":
        g = pattern.make_grid(args.rows, args.cols)
    elif args.kind == "btree":
        g = pattern.make_complete_binary_tree(args.v)
    elif args.kind == "kbipartite":
        g = pattern.make_complete_bipartite(args.a, args.b)
    elif args.kind == "cycle":
        g = pattern.make_cycle(args.v)
    else:
        raise SymcircError(f"unknown generator {args.kind!r}")
    _emit(g.to_json(), args.out)
    return 0


# -- width --------------------------------------------------------------------------


def _cmd_width(args) -> int:
    g = pattern.BipartiteMultigraph.from_json(_load_json(args.graph))
    cap = args.caps.get("width_vertices", width.DEFAULT_VERTEX_CAP)
    if args.parameter == "tw":
        value, cert = width.treewidth_exact(g, cap=cap)
    elif args.parameter == "pw":
        value, cert = width.pathwidth_exact(g, cap=cap)
    else:
        value, cert = width.treedepth_exact(g, cap=cap)
    ok, reason = width.validate_decomposition(g, cert)
    if not ok:
        print(f"certificate failed validation: {reason}", file=sys.stderr)
        return 1
    _emit({"parameter": args.parameter, "value": value, "certificate": cert.to_json()},
          args.out)
    return 0


# -- compile ------------------------------------------------------------------------


def _cmd_compile(args) -> int:
    g = pattern.BipartiteMultigraph.from_json(_load_json(args.graph))
    if args.decomp:
        data = _load_json(args.decomp)
        kind = data.get("kind")
        if args.shape == "td":
            report = compilers.compile_formula_td(
                g, width.EliminationForest.from_json(data), args.n, args.m)
        elif args.shape == "pw":
            report = compilers.compile_skew_pw(
                g, width.PathDecomposition.from_json(data), args.n, args.m)
        else:
            report = compilers.compile_circuit_tw(
                g, width.TreeDecomposition.from_json(data), args.n, args.m)
    else:
        report = compilers.compile_single(g, args.n, args.m, args.shape)
    payload = report.to_json()
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(report.circuit.to_dot() + "\n")
    _emit(payload, args.out)
    return 0


# -- analyze ------------------------------------------------------------------------


def _cmd_analyze(args) -> int:
    circuit = Circuit.from_json(_load_json(args.circuit))
    report = symmetry.analyze(circuit, args.n, args.m)
    _emit(report.to_json(), args.out)
    return 0


# -- oracle -------------------------------------------------------------------------


def _cmd_oracle(args) -> int:
    g = pattern.BipartiteMultigraph.from_json(_load_json(args.pattern))
    if args.which == "hom":
        host = WeightedHost.from_json(_load_json(args.host))
        value = oracle.hom_count(g, host)
    elif args.which == "emb":
        host = WeightedHost.from_json(_load_json(args.host))
        value = oracle.emb_eval(g, host)
    else:
        host = ColouredGraph.from_json(_load_json(args.host))
        value = oracle.colhom_eval(g, host)
    _emit({"value": {"num": str(value.numerator), "den": str(value.denominator)}}, args.out)
    return 0


# -- reduce -------------------------------------------------------------------------


def _random_coloured_host(s, n: int, rng: random.Random) -> ColouredGraph:
    pairs = [(u + 1, v + 1) for (u, v, _) in s.edge_list_global()]
    return ColouredGraph.random({v + 1: n for v in s.vertices()}, pairs, rng)


def _cmd_reduce(args) -> int:
    rng = random.Random(args.seed)
    trials = args.trials
    if args.gadget == "clique-grid":
        n = args.n
        y = {(i, j): Fraction(rng.randint(-3, 3)) for i in range(1, 2 * n + 1)
             for j in range(i + 1, 2 * n + 1)}
        gadget = reduce.clique_grid_gadget(n, y)
        check = oracle.colhom_eval(pattern.make_grid(n, n), gadget) == reduce.clique_poly(n, y)
        payload = {"gadget": gadget.to_json(), "identity_holds": bool(check)}
    elif args.gadget == "btree":
        m = args.n
        size = m ** 6
        x = {i: Fraction(rng.randint(-2, 2)) for i in range(1, size + 1)}
        y = {(i, j): Fraction(rng.randint(-2, 2)) for i in range(1, size + 1)
             for j in range(i, size + 1)}
        gadget = reduce.btree_vp_gadget(m, x, y)
        check = oracle.colhom_eval(pattern.make_complete_binary_tree(m), gadget) == \
            reduce.btree_vp_poly(m, x, y)
        payload = {"gadget": gadget.to_json(), "identity_holds": bool(check)}
    elif args.gadget == "path":
        m = args.n
        size = m ** 2
        x = {i: Fraction(rng.randint(-2, 2)) for i in range(1, size + 1)}
        y = {(i, j): Fraction(rng.randint(-2, 2)) for i in range(1, size + 1)
             for j in range(i, size + 1)}
        gadget = reduce.path_vbp_gadget(m, x, y)
        check = oracle.colhom_eval(pattern.make_path(m + 2), gadget) == \
            reduce.path_vbp_poly(m, x, y)
        payload = {"gadget": gadget.to_json(), "identity_holds": bool(check)}
    elif args.gadget == "minor":
        s = pattern.BipartiteMultigraph.from_json(_load_json(args.minor_pattern))
        fprime = pattern.BipartiteMultigraph.from_json(_load_json(args.host_pattern))
        branch = pattern.find_minor(s, fprime, norm_cap=args.caps.get("minor_norm", 24))
        if branch is None:
            print("no minor witness found", file=sys.stderr)
            return 1
        check = True
        for _ in range(trials):
            y = _random_coloured_host(s, args.n, rng)
            gadget = reduce.minor_gadget(fprime, s, branch, args.n, y)
            check = check and oracle.colhom_eval(fprime, gadget) == oracle.colhom_eval(s, y)
        payload = {
            "branch_sets": [sorted(v + 1 for v in bs) for bs in branch.sets],
            "remainder": sorted(v + 1 for v in branch.b0),
            "identity_holds": bool(check),
        }
    elif args.gadget in ("extract-subgraph", "extract-minor"):
        s = pattern.BipartiteMultigraph.from_json(_load_json(args.minor_pattern))
        f = pattern.BipartiteMultigraph.from_json(_load_json(args.host_pattern))
        handle = reduce.brute_hom_oracle(f)
        if args.gadget == "extract-subgraph":
            evaluator = reduce.extract_colhom_via_subgraph(f, s, args.n, handle)
        else:
            evaluator = reduce.extract_colhom_via_minor(f, s, args.n, handle)
        check = True
        for _ in range(trials):
            g = _random_coloured_host(s, args.n, rng)
            check = check and evaluator(g) == oracle.colhom_eval(s, g)
        payload = {"identity_holds": bool(check)}
    elif args.gadget == "extract-lincomb":
        spec = _load_json(args.terms)
        patterns = [pattern.BipartiteMultigraph.from_json(t["graph"]) for t in spec["terms"]]
        alphas = [Fraction(int(t["alpha"]["num"]), int(t["alpha"]["den"]))
                  for t in spec["terms"]]

        def lincomb(host):
            return sum(a * oracle.hom_count(p, host) for a, p in zip(alphas, patterns))

        evaluator = reduce.extract_single_from_lincomb(
            lincomb, patterns, alphas, args.ell, args.n, args.big_n, seed=args.seed)
        check = True
        for _ in range(trials):
            g = WeightedHost.random(args.n, args.n, rng)
            check = check and evaluator(g) == oracle.hom_count(patterns[args.ell], g)
        payload = {"identity_holds": bool(check)}
    else:
        raise SymcircError(f"unknown gadget {args.gadget!r}")
    _emit(payload, args.out)
    return 0 if payload["identity_holds"] else 1


# -- identity verification ------------------------------------------------------------


def _verify_uncolour(trials: int, rng: random.Random) -> List[Tuple[str, bool]]:
    out = []
    for name, f in (("P2", pattern.make_path(2)), ("P3", pattern.make_path(3))):
        colours = [v + 1 for v in f.vertices()]
        ok = True
        for _ in range(trials):
            g = ColouredGraph.random({c: 1 for c in colours},
                                     [(a, b) for a in colours for b in colours if a <= b], rng)
            try:
                reduce.uncolour_expand(f, colours, 1, g)
            except SymcircError:
                ok = False
        out.append((f"uncolour/{name}", ok))
    return out


def _verify_product(trials: int, rng: random.Random) -> List[Tuple[str, bool]]:
    f = pattern.make_path(3)
    colours = [v + 1 for v in f.vertices()]
    pairs = [(u + 1, v + 1) for (u, v, _) in f.edge_list_global()]
    ok = True
    for _ in range(trials):
        g = ColouredGraph.random({c: 2 for c in colours}, pairs, rng)
        h = ColouredGraph.random({c: 2 for c in colours}, pairs, rng)
        lhs = oracle.colhom_eval(f, reduce.tensor_product(g, h))
        if lhs != oracle.colhom_eval(f, g) * oracle.colhom_eval(f, h):
            ok = False
    return [("product/P3", ok)]


def _verify_quotient(trials: int, rng: random.Random) -> List[Tuple[str, bool]]:
    out = []
    x = Fraction(1, 2)
    worked = oracle.hom_count(pattern.make_path(2),
                              reduce.bipartite_double(WeightedHost(1, 1, {(0, 0): x})))
    out.append(("quotient/worked-2+2x", worked == 2 + 2 * x))
    ok = True
    for f in (pattern.make_path(2), pattern.make_path(3), pattern.make_cycle(4)):
        for _ in range(trials):
            g = WeightedHost.random(2, 2, rng)
            if not reduce.check_quotient_identity(f, g):
                ok = False
    out.append(("quotient/random", ok))
    return out


def _verify_cfi(trials: int, rng: random.Random) -> List[Tuple[str, bool]]:
    out = []
    for name, s in (("P2", pattern.make_path(2)), ("P3", pattern.make_path(3)),
                    ("C4", pattern.make_cycle(4))):
        pair = reduce.cfi_pair(s)
        idc = oracle.identity_colouring(s)
        even = oracle.coloured_hom_eval(s, idc, pair.even)
        odd = oracle.coloured_hom_eval(s, idc, pair.odd)
        out.append((f"cfi/{name}", even != odd))
    return out


def _verify_hom_to_emb(trials: int, rng: random.Random) -> List[Tuple[str, bool]]:
    ok = True
    for f in pattern.enumerate_bipartite_multigraphs(4, 4, max_mult=2):
        if f.a_count > 3 or f.b_count > 3:
            continue
        terms = oracle.hom_to_emb_terms(f)
        g = WeightedHost.random(2, 2, rng)
        total = sum(oracle.emb_eval(t, g) for t in terms)
        if total != oracle.hom_count(f, g):
            ok = False
    return [("hom-to-emb/<=3-per-side", ok)]


def _verify_slice(trials: int, rng: random.Random) -> List[Tuple[str, bool]]:
    p2 = pattern.make_path(2)
    p3 = pattern.make_path(3)
    sub = pattern.BipartiteMultigraph(2, 1, {(0, 0): 1})
    colouring = {0: 1, 1: 2, 2: 3}

    def combined(g):
        return oracle.coloured_hom_eval(sub, colouring, g) + oracle.colhom_eval(p3, g)

    ok = True
    for _ in range(trials):
        g = ColouredGraph.random({1: 2, 2: 2, 3: 2}, [(1, 3), (2, 3)], rng)
        if reduce.degree_slice(combined, 1, 2, g) != oracle.coloured_hom_eval(sub, colouring, g):
            ok = False
        if reduce.degree_slice(combined, 2, 2, g) != oracle.colhom_eval(p3, g):
            ok = False
        if reduce.degree_slice(combined, 0, 2, g) != 0:
            ok = False
    return [("slice/mixed", ok)]


def _verify_minor(trials: int, rng: random.Random) -> List[Tuple[str, bool]]:
    out = []
    cases = [
        ("P2<=P3", pattern.make_path(2), pattern.make_path(3)),
        ("C4<=grid2x3", pattern.make_cycle(4), pattern.make_grid(2, 3)),
    ]
    for name, s, fprime in cases:
        branch = pattern.find_minor(s, fprime)
        if branch is None:
            out.append((f"minor/{name}", False))
            continue
        pairs = [(u + 1, v + 1) for (u, v, _) in s.edge_list_global()]
        ok = True
        for _ in range(trials):
            y = ColouredGraph.random({v + 1: 2 for v in s.vertices()}, pairs, rng)
            gadget = reduce.minor_gadget(fprime, s, branch, 2, y)
            if oracle.colhom_eval(fprime, gadget) != oracle.colhom_eval(s, y):
                ok = False
        out.append((f"minor/{name}", ok))
    return out


def _verify_gadgets(trials: int, rng: random.Random) -> List[Tuple[str, bool]]:
    out = []
    y_ones = {(i, j): Fraction(1) for i in range(1, 5) for j in range(i + 1, 5)}
    g = reduce.clique_grid_gadget(2, y_ones)
    out.append(("gadget/clique-all-ones-6",
                oracle.colhom_eval(pattern.make_grid(2, 2), g) == 6))
    ok = True
    for _ in range(trials):
        y = {(i, j): Fraction(rng.randint(-3, 3)) for i in range(1, 5)
             for j in range(i + 1, 5)}
        lhs = oracle.colhom_eval(pattern.make_grid(2, 2), reduce.clique_grid_gadget(2, y))
        if lhs != reduce.clique_poly(2, y):
            ok = False
    out.append(("gadget/clique-random", ok))
    size = 1
    x = {i: Fraction(rng.randint(-2, 2)) for i in range(1, size + 1)}
    y = {(1, 1): Fraction(rng.randint(-2, 2))}
    lhs = oracle.colhom_eval(pattern.make_path(3), reduce.path_vbp_gadget(1, x, y))
    out.append(("gadget/path-m1", lhs == reduce.path_vbp_poly(1, x, y)))
    return out


IDENTITY_SUITES: Dict[str, Callable[[int, random.Random], List[Tuple[str, bool]]]] = {
    "uncolour": _verify_uncolour,
    "product": _verify_product,
    "quotient": _verify_quotient,
    "cfi": _verify_cfi,
    "hom-to-emb": _verify_hom_to_emb,
    "slice": _verify_slice,
    "minor": _verify_minor,
    "gadgets": _verify_gadgets,
}


def _cmd_verify(args) -> int:
    rng = random.Random(args.seed)
    names = sorted(IDENTITY_SUITES) if args.name == "all" else [args.name]
    results: List[Tuple[str, bool]] = []
    for name in names:
        if name not in IDENTITY_SUITES:
            print(f"unknown identity {name!r}", file=sys.stderr)
            return 2
        results.extend(IDENTITY_SUITES[name](args.trials, rng))
    results.sort()
    if args.json:
        _emit({"tests": [{"id": test, "pass": bool(ok)} for test, ok in results]}, None)
    else:
        for test, ok in results:
            print(f"{'PASS' if ok else 'FAIL'}  {test}")
    return 0 if all(ok for _, ok in results) else 1


# -- suites -------------------------------------------------------------------------


def _suite_compile(seed: int) -> List[Tuple[str, bool]]:
    rng = random.Random(seed)
    patterns = {
        "P2": pattern.make_path(2),
        "P3": pattern.make_path(3),
        "P4": pattern.make_path(4),
        "C4": pattern.make_cycle(4),
        "K22": pattern.make_complete_bipartite(2, 2),
        "star3": pattern.make_complete_bipartite(1, 3),
        "double-edge": pattern.BipartiteMultigraph(1, 1, {(0, 0): 2}),
    }
    results = []
    for name, f in sorted(patterns.items()):
        for (n, m) in ((1, 1), (2, 2), (2, 3)):
            hp = oracle.hom_poly(f, n, m)
            for shape in ("td", "pw", "tw"):
                report = compilers.compile_single(f, n, m, shape)
                ok = report.circuit.expand_symbolic() == hp
                ok = ok and symmetry.is_symmetric(report.circuit, n, m)
                results.append((f"compile/{name}/{shape}/{n}x{m}", ok))
    return results


def _suite_symmetry(seed: int) -> List[Tuple[str, bool]]:
    rng = random.Random(seed)
    results = []
    for idx in range(30):
        n = rng.choice((2, 3))
        mode = rng.choice(("general", "skew"))
        c = symmetry.random_symmetric_circuit(n, n, rng, 40, mode)
        was_skew = c.validate(SKEW)[0]
        r = symmetry.rigidify(c, n, n)
        ok = symmetry.is_rigid(r) and r.size() <= c.size()
        names = c.variables()
        for _ in range(5):
            point = {v: Fraction(rng.randrange(0, 512)) for v in names}
            ok = ok and c.evaluate(point) == r.evaluate(point)
        if was_skew:
            ok = ok and r.validate(SKEW)[0]
        results.append((f"symmetry/rigidify/{idx:02d}", ok))
    report = compilers.compile_single(pattern.make_path(3), 2, 2, "td")
    analysis = symmetry.SymmetryAnalysis(report.circuit, 2, 2, assume_rigid=True)
    results.append(("symmetry/td-P3-support-bound", analysis.max_support() <= 2))
    return sorted(results)


def _suite_reductions(seed: int) -> List[Tuple[str, bool]]:
    rng = random.Random(seed)
    results = []
    for name in sorted(IDENTITY_SUITES):
        results.extend(IDENTITY_SUITES[name](3, rng))
    return sorted(results)


SUITES = {
    "compile": _suite_compile,
    "symmetry": _suite_symmetry,
    "reductions": _suite_reductions,
}


def _cmd_suite(args) -> int:
    names = sorted(SUITES) if args.which == "all" else [args.which]
    results: List[Tuple[str, bool]] = []
    for name in names:
        results.extend(SUITES[name](args.seed))
    results.sort()
    report = {
        "seed": args.seed,
        "tests": [{"id": test, "pass": bool(ok)} for test, ok in results],
        "passed": sum(1 for _, ok in results if ok),
        "failed": sum(1 for _, ok in results if not ok),
    }
    _emit(report, args.out)
    return 0 if report["failed"] == 0 else 1


# -- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symcirc")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    parser.add_argument("--caps", help="JSON file overriding size caps "
                                       "(width_vertices, brute_force_maps, minor_norm)")
    parser.add_argument("--json", action="store_true",
                        help="machine-readable output for text-mode commands")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pattern", help="generate pattern graphs")
    psub = p.add_subparsers(dest="action", required=True)
    gen = psub.add_parser("gen")
    gen.add_argument("kind", choices=["path", "grid", "btree", "kbipartite", "cycle"])
    gen.add_argument("--v", type=int, default=2)
    gen.add_argument("--rows", type=int, default=2)
    gen.add_argument("--cols", type=int, default=2)
    gen.add_argument("--a", type=int, default=1)
    gen.add_argument("--b", type=int, default=1)
    gen.add_argument("--out")
    gen.set_defaults(func=_cmd_pattern)

    w = sub.add_parser("width", help="exact width parameters with certificates")
    w.add_argument("parameter", choices=["tw", "pw", "td"])
    w.add_argument("--graph", required=True)
    w.add_argument("--out")
    w.set_defaults(func=_cmd_width)

    c = sub.add_parser("compile", help="compile a pattern to a symmetric circuit")
    c.add_argument("--graph", required=True)
    c.add_argument("--shape", choices=["td", "pw", "tw"], required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--decomp")
    c.add_argument("--out")
    c.add_argument("--dot")
    c.set_defaults(func=_cmd_compile)

    a = sub.add_parser("analyze", help="symmetry report for a circuit")
    a.add_argument("--circuit", required=True)
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--m", type=int, required=True)
    a.add_argument("--out")
    a.set_defaults(func=_cmd_analyze)

    o = sub.add_parser("oracle", help="brute-force reference evaluation")
    o.add_argument("which", choices=["hom", "colhom", "emb"])
    o.add_argument("--pattern", required=True)
    o.add_argument("--host", required=True)
    o.add_argument("--out")
    o.set_defaults(func=_cmd_oracle)

    r = sub.add_parser("reduce", help="emit and check hardness gadgets and pipelines")
    r.add_argument("gadget", choices=["clique-grid", "btree", "path", "minor",
                                      "extract-subgraph", "extract-minor",
                                      "extract-lincomb"])
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--minor-pattern", help="pattern S being projected or extracted")
    r.add_argument("--host-pattern", help="pattern F or F' supplying the oracle")
    r.add_argument("--terms", help="JSON with the linear combination's terms")
    r.add_argument("--ell", type=int, default=0, help="term index to extract")
    r.add_argument("--big-n", type=int, default=3, help="basis host size N")
    r.add_argument("--trials", type=int, default=3)
    r.add_argument("--out")
    r.set_defaults(func=_cmd_reduce)

    v = sub.add_parser("verify", help="run identity suites")
    vsub = v.add_subparsers(dest="action", required=True)
    vid = vsub.add_parser("identity")
    vid.add_argument("--name", default="all",
                     choices=["all"] + sorted(IDENTITY_SUITES))
    vid.add_argument("--trials", type=int, default=5)
    vid.add_argument("--seed", type=int, default=0)
    vid.set_defaults(func=_cmd_verify)

    s = sub.add_parser("suite", help="run acceptance-style suites")
    s.add_argument("which", choices=["all"] + sorted(SUITES))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_suite)

    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if not hasattr(args, "seed") or args.seed is None:
        args.seed = 0
    if not hasattr(args, "json"):
        args.json = False
    caps: Dict[str, int] = {}
    if getattr(args, "caps", None):
        try:
            caps = {k: int(v) for k, v in _load_json(args.caps).items()}
        except (OSError, ValueError, AttributeError) as exc:
            print(f"error: bad caps file: {exc}", file=sys.stderr)
            return 2
    args.caps = caps
    if "brute_force_maps" in caps:
        oracle.BRUTE_FORCE_CAP = caps["brute_force_maps"]
    try:
        return args.func(args)
    except SymcircError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
