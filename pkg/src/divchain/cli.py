"""Command-line front end.

Exit codes: 0 success, 1 domain/usage error, 2 verification failure (a
certificate did not prove, or a grid check found a violation), 3 resource
exhaustion.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import antichains as ac
from . import certify as ct
from . import chains as ch
from . import figures as fg
from . import hitting as ht
from . import kernels as kn
from . import montecarlo as mc
from . import sieve as sv
from . import weights as wt

_CHAIN_NAMES = {
    "random": ch.ChainId.random_prime,
    "random_prime": ch.ChainId.random_prime,
    "mertens": ch.ChainId.mertens,
    "vm": ch.ChainId.von_mangoldt,
    "von_mangoldt": ch.ChainId.von_mangoldt,
    "eps": ch.ChainId.eps_modified,
    "eps_modified": ch.ChainId.eps_modified,
}


def _parse_chain(args) -> ch.ChainId:
    name = args.chain
    if name in ("obm", "odd_banks_martin"):
        if args.k is None or not args.Q:
            raise ValueError("odd_banks_martin needs --k and --Q")
        return ch.ChainId.odd_banks_martin(args.k, _parse_int_list(args.Q))
    if name not in _CHAIN_NAMES:
        raise ValueError(f"unknown chain {name!r}")
    return _CHAIN_NAMES[name]()


def _parse_weight(args) -> wt.WeightId:
    name = args.weight
    if name == "nu0":
        return wt.WeightId.nu0()
    if name in ("mertens", "nu_mertens"):
        return wt.WeightId.nu_mertens()
    if name in ("lambda", "nu_lambda"):
        return wt.WeightId.nu_lambda()
    if name in ("shifted", "nu_shifted"):
        if args.shift_p is None:
            raise ValueError("nu_shifted needs --shift-p")
        return wt.WeightId.nu_shifted(args.shift_p)
    raise ValueError(f"unknown weight {name!r}")


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _fmt(v, hexfloat: bool) -> str:
    if isinstance(v, float):
        return v.hex() if hexfloat else f"{v:.17g}"
    return str(v)


class _Writer:
    def __init__(self, args):
        self.fmt = args.format
        self.hexfloat = args.hexfloat
        self.path = args.out
        self.fh = open(self.path, "w") if self.path else sys.stdout

    def rows(self, columns, rows):
        if self.fmt == "jsonl":
            for row in rows:
                rec = {c: (v if not isinstance(v, float) else
                           (v.hex() if self.hexfloat else v))
                       for c, v in zip(columns, row)}
                self.fh.write(json.dumps(rec) + "\n")
        else:
            self.fh.write(",".join(columns) + "\n")
            for row in rows:
                self.fh.write(",".join(_fmt(v, self.hexfloat) for v in row) + "\n")

    def text(self, s: str):
        self.fh.write(s)

    def close(self):
        if self.path:
            self.fh.close()


def _add_common(p):
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--hexfloat", action="store_true",
                   help="emit floats as hex for bit-exact round trips")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int,
                   default=int(os.environ.get("DIVCHAIN_THREADS", "1")),
                   help="worker bound; results never depend on it")
    p.add_argument("--limit", type=int, default=10**4,
                   help="factor-table limit")


def _add_chain_args(p):
    p.add_argument("--chain", required=True,
                   help="random|mertens|vm|eps|obm")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--Q", default=None, help="comma-separated odd primes")


def _add_weight_args(p):
    p.add_argument("--weight", required=True,
                   help="nu0|mertens|lambda|shifted")
    p.add_argument("--shift-p", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="divchain",
        description="Markov chains on the divisibility poset: sieves, weights, "
                    "hitting masses, simulations, and certified inequalities.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sieve", help="build a factor table and print summary stats")
    _add_common(p)

    p = sub.add_parser("weight", help="evaluate a weight at one or more n")
    _add_common(p)
    _add_weight_args(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--range", dest="range_", default=None, help="a:b[:step]")

    p = sub.add_parser("chain", help="print the one-step downward law at n")
    _add_common(p)
    _add_chain_args(p)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("subinv", help="sub-invariance margin bracket at n")
    _add_common(p)
    _add_chain_args(p)
    _add_weight_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trunc-q", type=int, default=10**4)

    p = sub.add_parser("hitdown", help="exact downward hitting mass")
    _add_common(p)
    _add_chain_args(p)
    p.add_argument("--mass", required=True,
                   help="'unit:N' or a path to newline-delimited 'n value' pairs")
    p.add_argument("--X", type=int, required=True)

    p = sub.add_parser("hitup", help="exact upward (adjoint) hitting mass")
    _add_common(p)
    _add_chain_args(p)
    _add_weight_args(p)
    p.add_argument("--mass", required=True)
    p.add_argument("--X", type=int, required=True)

    p = sub.add_parser("mass1196", help="initial mass of the large-numbers bound")
    _add_common(p)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--X", type=int, required=True)

    p = sub.add_parser("bound1196", help="certified Erdos-sum bound on [x, X]")
    _add_common(p)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--X", type=int, required=True)

    p = sub.add_parser("lym", help="exact rational layer masses under the random-prime chain")
    _add_common(p)
    p.add_argument("--n0", type=int, required=True)

    p = sub.add_parser("cut", help="cut-capacity inequality sides")
    _add_common(p)
    _add_chain_args(p)
    _add_weight_args(p)
    p.add_argument("--S", required=True, help="'a:b' range or file of integers")
    p.add_argument("--A", required=True, help="file of integers (primitive set)")

    p = sub.add_parser("flowdiv", help="flow divergence bracket at n")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trunc-q", type=int, default=10**4)

    p = sub.add_parser("prim", help="primitive-set utilities")
    _add_common(p)
    p.add_argument("action", choices=("generate", "validate", "peel", "random"))
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--X", type=int, default=None)
    p.add_argument("--Q", default=None)
    p.add_argument("--in", dest="infile", default=None)
    p.add_argument("--density", type=float, default=1.0)

    p = sub.add_parser("simulate", help="Monte Carlo runs")
    _add_common(p)
    p.add_argument("mode", choices=("down", "up", "zeta", "msrw", "density"))
    p.add_argument("--chain", default="vm")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--Q", default=None)
    p.add_argument("--weight", default="nu0")
    p.add_argument("--shift-p", type=int, default=None)
    p.add_argument("--n0", type=int, default=2)
    p.add_argument("--target", default=None, help="comma-separated integers")
    p.add_argument("--trials", type=int, default=10**4)
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--p-max", type=int, default=10**4)
    p.add_argument("--x", type=int, default=10**4)
    p.add_argument("--x-list", default="1000,10000")
    p.add_argument("--trunc-X", type=int, default=10**4)

    p = sub.add_parser("certify", help="interval certificates")
    _add_common(p)
    p.add_argument("what", choices=("analytic", "constantC", "grid"))
    p.add_argument("--max-depth", type=int, default=40)
    p.add_argument("--pcut", type=int, default=10**5)
    p.add_argument("--id", dest="ineq_id", default=None)
    p.add_argument("--grid", default=None, help="lo:hi:count")
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("figure", help="figure data (CSV) plus a rendered PNG")
    _add_common(p)
    p.add_argument("which", choices=fg.FIGURE_IDS)
    p.add_argument("--grid", default=None, help="lo:hi:count")
    p.add_argument("--png", default=None, help="PNG path (default: next to --out)")
    p.add_argument("--no-png", action="store_true")
    return ap


_DEFAULT_GRIDS = {
    "phi": "0.001:5:400",
    "eta": "0.05:5:400",
    "mangoldt": "0.02:5:250",
    "mangoldt2": "0.02:5:250",
    "primesum2": "0.001:5:400",
    "primesum3": f"0.0005:{ct.ANALYTIC_U_MAX}:400",
}


def _read_mass(text: str, X: int) -> ht.MassVector:
    if text.startswith("unit:"):
        return ht.MassVector.unit(int(text.split(":")[1]), X)
    values = {}
    with open(text) as fh:
        for line in fh:
            parts = line.split()
            if parts:
                values[int(parts[0])] = float(parts[1]) if len(parts) > 1 else 1.0
    return ht.MassVector(domain_limit=X, values=values)


def _read_S(text: str, table) -> list[int]:
    if ":" in text and not os.path.exists(text):
        a, b = text.split(":")
        return list(range(int(a), int(b) + 1))
    return ac.read_int_set(text)


def _run(args) -> int:
    out = _Writer(args)
    try:
        if args.command == "sieve":
            t = sv.build_sieve(args.limit)
            out.rows(["limit", "n_primes", "largest_prime", "psi"],
                     [(t.limit, len(t.primes), int(t.primes[-1]),
                       sv.psi(t.limit, t))])
            return 0

        if args.command == "weight":
            w = _parse_weight(args)
            t = sv.build_sieve(args.limit)
            if args.n is not None:
                ns = [args.n]
            elif args.range_:
                parts = [int(x) for x in args.range_.split(":")]
                ns = list(range(parts[0], parts[1] + 1, parts[2] if len(parts) > 2 else 1))
            else:
                raise ValueError("weight needs --n or --range")
            out.rows(["n", w.kind.value],
                     [(n, wt.evaluate(w, n, t)) for n in ns])
            return 0

        if args.command == "chain":
            c = _parse_chain(args)
            t = sv.build_sieve(max(args.limit, args.n))
            tl = ch.transitions_down(c, args.n, t)
            out.rows(["source", "target", "prob"],
                     [(tl.source, m, p) for m, p in tl.entries])
            return 0

        if args.command == "subinv":
            c = _parse_chain(args)
            w = _parse_weight(args)
            t = sv.build_sieve(max(args.limit, args.trunc_q))
            rep = ch.subinvariance_margin(c, w, args.n, args.trunc_q, t)
            out.rows(["n", "lower", "upper", "trunc_Q"],
                     [(rep.n, rep.lower, rep.upper, rep.truncation_Q)])
            return 0

        if args.command == "hitdown":
            c = _parse_chain(args)
            t = sv.build_sieve(args.X)
            b = _read_mass(args.mass, args.X)
            h = ht.hitting_down(c, b, args.X, t)
            out.rows(["n", "mass"], sorted(h.items()))
            return 0

        if args.command == "hitup":
            c = _parse_chain(args)
            w = _parse_weight(args)
            t = sv.build_sieve(args.X)
            b = _read_mass(args.mass, args.X)
            h = ht.hitting_up(c, w, b, args.X, t)
            out.rows(["n", "mass"], sorted(h.items()))
            return 0

        if args.command == "mass1196":
            t = sv.build_sieve(args.X)
            b = ht.mass_1196(args.x, args.X, t)
            out.rows(["n", "mass"], sorted(b.items()))
            return 0

        if args.command == "bound1196":
            t = sv.build_sieve(args.X)
            val = ht.bound_1196(args.x, args.X, t)
            thresh = 1.0 + 10.0 / math.log(args.x)
            out.rows(["x", "X", "bound", "threshold"],
                     [(args.x, args.X, val, thresh)])
            return 0 if val <= thresh else 2

        if args.command == "lym":
            t = sv.build_sieve(args.n0)
            h = ht.lym_masses(args.n0, t)
            rows = [(d, sv.factor_stats(d, t)[0] if d > 1 else 0, str(v))
                    for d, v in sorted(h.items())]
            out.rows(["divisor", "omega", "mass"], rows)
            return 0

        if args.command == "cut":
            c = _parse_chain(args)
            w = _parse_weight(args)
            t = sv.build_sieve(args.limit)
            S = _read_S(args.S, t)
            A = ac.read_int_set(args.A)
            lhs, rhs = ht.cut_capacity(c, w, S, A, t)
            out.rows(["lhs", "rhs", "holds"], [(lhs, rhs, int(lhs <= rhs + 1e-10))])
            return 0 if lhs <= rhs + 1e-10 else 2

        if args.command == "flowdiv":
            t = sv.build_sieve(max(args.limit, args.trunc_q))
            (lo, hi), outflow = ht.flow_divergence(args.n, args.trunc_q, t)
            out.rows(["n", "inflow_lo", "inflow_hi", "outflow"],
                     [(args.n, lo, hi, outflow)])
            return 0

        if args.command == "prim":
            return _run_prim(args, out)

        if args.command == "simulate":
            return _run_simulate(args, out)

        if args.command == "certify":
            return _run_certify(args, out)

        if args.command == "figure":
            return _run_figure(args, out)

        raise ValueError(f"unknown command {args.command}")
    finally:
        out.close()


def _run_prim(args, out) -> int:
    if args.action == "generate":
        if args.k is None or args.X is None:
            raise ValueError("prim generate needs --k and --X")
        Q = _parse_int_list(args.Q) if args.Q else None
        ps = ac.generate_layer(args.k, args.X, Q)
        out.rows(["n"], [(n,) for n in ps])
        return 0
    if args.action == "random":
        if args.X is None:
            raise ValueError("prim random needs --X")
        ps = ac.random_antichain(args.X, args.density, args.seed)
        out.rows(["n"], [(n,) for n in ps])
        return 0
    if args.infile is None:
        raise ValueError(f"prim {args.action} needs --in")
    A = ac.read_int_set(args.infile)
    if args.action == "validate":
        ok = ac.is_primitive(A)
        out.rows(["primitive"], [(int(ok),)])
        return 0 if ok else 2
    t = sv.build_sieve(max(A))
    layers = ac.peel_layers(A, t)
    rows = [(i + 1, n) for i, layer in enumerate(layers) for n in layer]
    out.rows(["layer", "n"], rows)
    return 0


def _run_simulate(args, out) -> int:
    if args.mode == "down":
        c = _parse_chain(args)
        t = sv.build_sieve(max(args.limit, args.n0))
        path = mc.sample_down(c, args.n0, args.seed, t)
        out.rows(["step", "state"], list(enumerate(path.states)))
        return 0
    if args.mode == "up":
        c = _parse_chain(args)
        w = _parse_weight(args)
        t = sv.build_sieve(args.limit)
        path = mc.sample_up(c, w, args.n0, args.seed, t)
        rows = list(enumerate(path.states))
        if path.reached_infinity:
            rows.append((len(path.states), "inf"))
        out.rows(["step", "state"], rows)
        return 0
    if args.mode == "zeta":
        cfg = mc.ZetaProcessConfig(s=args.s, P_max=args.p_max)
        draws = mc.zeta_process_draws(cfg, args.seed, args.trials)
        vals, counts = np.unique(draws[draws <= 100], return_counts=True)
        rows = [(int(v), int(cnt), cnt / args.trials, cfg.bias_bound)
                for v, cnt in zip(vals, counts)]
        out.rows(["value", "count", "freq", "bias_bound"], rows)
        return 0
    if args.mode == "msrw":
        tl, Z = mc.msrw_transitions(args.x)
        rows = [(q, p, Z) for q, p in tl.entries]
        out.rows(["multiplier", "prob", "Z"], rows)
        return 0
    # density
    t = sv.build_sieve(args.trunc_X)
    x_list = _parse_int_list(args.x_list)
    stats = mc.chain_density_stats(None, x_list, args.trials, args.trunc_X,
                                   args.seed, t)
    rows = list(zip(stats.x_list, stats.mean_X, stats.second_moment_X,
                    stats.stderr))
    out.rows(["x", "mean_X", "second_moment_X", "stderr"], rows)
    return 0


def _run_certify(args, out) -> int:
    if args.what == "analytic":
        cert = ct.certify_analytic(max_depth=args.max_depth)
        out.text(ct.certificate_to_text(cert))
        return 0 if cert.verdict == "proved" else 2
    if args.what == "constantC":
        limit = max(args.limit, 2 * args.pcut, 10**6)
        pt = sv.build_prime_table(limit)
        iv = ct.enclose_constant_C(args.pcut, pt)
        out.rows(["P_cut", "lo", "hi", "width"],
                 [(args.pcut, iv.lo, iv.hi, iv.width())])
        return 0
    if args.ineq_id is None or args.grid is None:
        raise ValueError("certify grid needs --id and --grid")
    t = sv.build_sieve(max(args.limit, 10**6))
    rep = ct.grid_check(args.ineq_id, ct.GridSpec.parse(args.grid), t)
    out.rows(rep.columns, rep.rows)
    return 0 if rep.max_violation <= args.tol else 2


def _run_figure(args, out) -> int:
    grid = ct.GridSpec.parse(args.grid or _DEFAULT_GRIDS[args.which])
    t = sv.build_sieve(max(args.limit, 10**6))
    rep = ct.grid_check(fg.FIGURE_TO_INEQUALITY[args.which], grid, t)
    out.rows(rep.columns, rep.rows)
    png = args.png
    if png is None and args.out and not args.no_png:
        png = os.path.splitext(args.out)[0] + ".png"
    if png and not args.no_png:
        fg.render_figure(args.which, rep, png)
    return 0 if rep.max_violation <= 1e-9 else 2


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code not in (0, None) else 0
    try:
        return _run(args)
    except (ValueError, ch.UnsupportedPairingError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ch.SubinvarianceViolationError as e:
        print(f"verification failure: {e}", file=sys.stderr)
        return 2
    except MemoryError:
        print("error: out of memory", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
