"""Command-line experiment runner.

Subcommands: ``run``, ``bounds``, ``verify``, ``scaling``.  Output is JSON
(or CSV for ``scaling`` and transcripts) and depends only on the flags and
the seed.  Exit codes: 0 ok, 2 bad parameters, 3 undelivered shares with no
fallback, 4 an oracle check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from pathlib import Path

from .baseline import InfeasibleTarget, run_sota, sota_block_length
from .bounds import bounds_report, graph_communication_lower, randomness_bounds
from .encoding import EncodingError, make_params, random_secret
from .field import FieldError
from .generators import (FAMILIES, fixtures, gen_backbone, gen_cycle, gen_geometric_1d,
                         gen_layered, gen_random_propagating, gen_regular_fringe, gen_star,
                         gen_window)
from .graph import DEALER, GraphError, Network, read_graph
from .numeric import to_json
from .oracle import EnumerationBudgetExceeded, verify_collusion_resistance, verify_recovery
from .protocol import ProtocolError, RunOptions, run_sneak, run_with_fallback
from .report import transcript_csv

EXIT_OK, EXIT_PARAM, EXIT_UNDELIVERED, EXIT_ORACLE = 0, 2, 3, 4


class UsageError(ValueError):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _default_seed() -> int:
    raw = os.environ.get("SNEAK_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def _graph_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("graph")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", type=Path, help="graph file")
    src.add_argument("--gen", choices=FAMILIES, help="generated family or fixture")
    g.add_argument("--n", type=int, help="participants (generated families)")
    g.add_argument("--gen-degree", type=int,
                   help="in-degree / attachment count for generators (default d + 2t)")
    g.add_argument("--a", type=int, help="window slack (window family, default gen degree)")
    g.add_argument("--layers", type=_int_list, help="layer sizes (layered family)")
    g.add_argument("--hub", type=int, help="hub or backbone size (fringe family)")
    g.add_argument("--radius", type=float, default=3.0, help="radius (geometric family)")
    g.add_argument("--undirected", action="store_true",
                   help="undirected variant of the random and window families")
    s = p.add_argument_group("sharing")
    s.add_argument("--k", type=int, help="recovery threshold (default: file hint or 2)")
    s.add_argument("--d", type=int, help="encoding dimension (default k)")
    s.add_argument("--ell", type=int, help="collusion threshold (default k-1)")
    s.add_argument("--t", type=int, default=0, help="adversary budget")
    s.add_argument("--q", type=int, help="field size (default smallest prime above max participants)")
    s.add_argument("--max-participants", type=int, help="reserve ids for later additions")
    s.add_argument("--degree-cap", action="store_true", help="replace s_A by randomness")
    s.add_argument("--seed", type=int, default=None, help="seed (default $SNEAK_SEED or 0)")


def _build_graph(args) -> tuple[Network, str, int | None]:
    if args.graph is not None:
        net, hint = read_graph(args.graph)
        return net, str(args.graph.name), hint or None
    fam = args.gen
    k = args.k or 2
    d = args.d or k
    deg = args.gen_degree or d + 2 * args.t
    seed = args.seed
    fx = fixtures()
    if fam in fx:
        return fx[fam], fam, None
    if fam == "layered":
        if not args.layers:
            raise UsageError("--layers is required for the layered family")
        return gen_layered(args.layers, deg), fam, None
    if args.n is None:
        raise UsageError(f"--n is required for the {fam} family")
    n = args.n
    if fam == "star":
        return gen_star(n), fam, None
    if fam == "cycle":
        return gen_cycle(n), fam, None
    if fam == "random":
        return gen_random_propagating(n, deg, seed, not args.undirected), fam, None
    if fam == "window":
        a = deg if args.a is None else args.a
        return gen_window(n, deg, a, seed, not args.undirected), fam, None
    if fam == "fringe":
        return gen_regular_fringe(n, deg, args.hub or deg, seed), fam, None
    if fam == "backbone":
        hub = args.hub or deg
        if n <= hub:
            raise UsageError("--n must exceed the backbone size --hub")
        return gen_backbone(_backbone_clique(hub), n - hub, deg, seed), fam, None
    if fam == "geometric":
        rng = random.Random(f"geometric-{seed}")
        pos = sorted(rng.uniform(0.5, n) for _ in range(n))
        return gen_geometric_1d(pos, args.radius), fam, None
    raise UsageError(f"unknown family {fam}")  # pragma: no cover


def _backbone_clique(size: int) -> Network:
    edges = [(DEALER, i) for i in range(1, size + 1)]
    edges += [(i, j) for i in range(1, size + 1) for j in range(i + 1, size + 1)]
    return Network.from_edges(size, edges, witness=range(1, size + 1))


def _setup(args):
    if args.seed is None:
        args.seed = _default_seed()
    net, name, hint = _build_graph(args)
    k = args.k or hint or 2
    d = args.d or k
    params = make_params(net.n, k, d, q=args.q, ell=args.ell, t_adv=args.t,
                         degree_cap=args.degree_cap, max_participants=args.max_participants)
    graph_info = {"source": name, "n": net.n, "directed": net.directed,
                  "edges": len(net.edges()), "digest": net.digest()}
    return net, params, graph_info


def _dump(obj, out: Path | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def cmd_run(args) -> int:
    net, params, info = _setup(args)
    seed = args.seed
    out = {"command": "run", "graph": info, "params": params.as_dict(), "seed": seed}
    code = EXIT_OK
    algos = ["sneak", "sota"] if args.algo == "both" else [args.algo]
    traces = {}
    if "sneak" in algos:
        secret = random_secret(params, random.Random(f"secret-{seed}"))
        rng = random.Random(seed)
        if args.fallback != "none":
            rep = run_with_fallback(net, params, secret, rng, args.fallback)
        else:
            opts = RunOptions(adversaries=args.adversaries or (), corruption=args.corruption,
                              adversary_seed=seed)
            rep = run_sneak(net, params, secret, rng, opts)
            if args.adversaries:
                rep.extras["honest_undelivered"] = sorted(
                    set(net.participants) - set(args.adversaries) - rep.delivered)
        out["sneak"] = rep.to_dict()
        traces["sneak"] = rep.transcript
        undelivered = rep.stalled | rep.failed
        if args.adversaries:
            undelivered = undelivered - set(args.adversaries)
        if undelivered:
            code = EXIT_UNDELIVERED
    if "sota" in algos:
        L = sota_block_length(net, params)
        secret = tuple(random.Random(f"sota-secret-{seed}").randrange(params.q) for _ in range(L))
        rep = run_sota(net, params, secret, random.Random(f"sota-{seed}"))
        out["sota"] = rep.to_dict()
        traces["sota"] = rep.transcript
    if args.trace is not None:
        for i, (algo, msgs) in enumerate(traces.items()):
            path = args.trace if i == 0 else args.trace.with_name(
                f"{args.trace.stem}.{algo}{args.trace.suffix}")
            path.write_text(transcript_csv(msgs))
    _dump(out, args.out)
    return code


def cmd_bounds(args) -> int:
    net, params, info = _setup(args)
    out = {"command": "bounds", "graph": info, "params": params.as_dict(), "seed": args.seed,
           "bounds": bounds_report(net, params).to_dict()}
    _dump(out, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    net, params, info = _setup(args)
    budget = params.ell if args.budget is None else args.budget
    fallback = None if args.fallback == "none" else args.fallback
    col = verify_collusion_resistance(net, params, budget, algorithm=args.algo,
                                      fallback=fallback, max_enum=args.max_enum)
    rec = verify_recovery(net, params, algorithm=args.algo, fallback=fallback,
                          max_enum=args.max_enum, seed=args.seed)
    out = {"command": "verify", "graph": info, "params": params.as_dict(), "seed": args.seed,
           "collusion": col.to_dict(), "recovery": rec.to_dict()}
    _dump(out, args.out)
    return EXIT_OK if col.ok and rec.ok else EXIT_ORACLE


def cmd_scaling(args) -> int:
    if args.seed is None:
        args.seed = _default_seed()
    k = args.k or 2
    d = args.d or k
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["family", "n", "rep", "seed", "sneak_units", "sota_units", "lower_bound",
                "sneak_draw_units", "sota_randomness_lower"])
    for n in args.sizes:
        for rep_i in range(args.reps):
            seed = args.seed + rep_i
            if args.family == "window":
                net = gen_window(n, d, d if args.a is None else args.a, seed)
            elif args.family == "random":
                net = gen_random_propagating(n, d, seed)
            elif args.family == "star":
                net = gen_star(n)
            elif args.family == "layered":
                net = gen_layered([d] * max(1, n // d), d)
            elif args.family == "fringe":
                net = gen_regular_fringe(n, d, args.hub or d, seed)
            else:
                raise UsageError(f"family {args.family} not supported by scaling")
            params = make_params(net.n, k, d)
            sn = run_sneak(net, params, random_secret(params, random.Random(seed)),
                           random.Random(seed))
            L = sota_block_length(net, params)
            so = run_sota(net, params, (0,) * L, random.Random(seed))
            lower, _ = graph_communication_lower(net, params)
            rb = randomness_bounds(net, params)
            w.writerow([args.family, net.n, rep_i, seed, to_json(sn.total_units),
                        to_json(so.total_units), to_json(lower),
                        to_json(sn.randomness_units), to_json(rb.sota_lower)])
    text = buf.getvalue()
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sneak", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate dissemination and report costs")
    _graph_flags(r)
    r.add_argument("--algo", choices=("sneak", "sota", "both"), default="sneak")
    r.add_argument("--fallback", choices=("none", "naive", "dealer", "local"), default="none")
    r.add_argument("--adversaries", type=_int_list, help="ids of corrupting relays")
    r.add_argument("--corruption", choices=("offset", "random"), default="offset")
    r.add_argument("--trace", type=Path, help="write transcript CSV here")
    r.add_argument("--out", type=Path, help="write JSON here instead of stdout")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bounds", help="evaluate closed-form bounds")
    _graph_flags(b)
    b.add_argument("--out", type=Path)
    b.set_defaults(func=cmd_bounds)

    v = sub.add_parser("verify", help="exhaustive secrecy and recovery checks")
    _graph_flags(v)
    v.add_argument("--budget", type=int, help="colluding set size (default ell)")
    v.add_argument("--max-enum", type=int, default=2_000_000)
    v.add_argument("--algo", choices=("sneak", "sota"), default="sneak")
    v.add_argument("--fallback", choices=("none", "naive", "dealer", "local"), default="none")
    v.add_argument("--out", type=Path)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scaling", help="growth curves as CSV")
    s.add_argument("--family", choices=("window", "random", "star", "layered", "fringe"),
                   default="window")
    s.add_argument("--sizes", type=_int_list, default=[16, 32, 64, 128])
    s.add_argument("--reps", type=int, default=1)
    s.add_argument("--k", type=int)
    s.add_argument("--d", type=int)
    s.add_argument("--a", type=int)
    s.add_argument("--hub", type=int)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", type=Path)
    s.set_defaults(func=cmd_scaling)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, EncodingError, GraphError, FieldError, ProtocolError,
            InfeasibleTarget, EnumerationBudgetExceeded, OSError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_PARAM


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
