"""Command-line driver for the corners-process experiments.

Subcommands:
  roots     crystal root tables or Bessel zero tables
  cov       covariances: spectral finite-crystal, hard-edge quadrature,
            or the full dual-route oracle comparison
  mc        Monte Carlo experiments against analytic covariances
  converge  finite-size-to-limit convergence tables

Output is CSV (comment lines prefixed with '#', floats with 17
significant digits) or JSON; identical configuration and seed give
byte-identical output.  Exit codes: 0 success, 2 invalid arguments,
3 numerical failure, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, ensembles, hard_edge, zero_temp
from .specfun import bessel_zeros

EXIT_BAD_ARGS = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _fmt(x):
    return f"{float(x):.17g}"


def _write_table(path, fmt, header, rows, comments):
    """Write a table as CSV (with '#' comments) or JSON to path or stdout."""
    if fmt == "csv":
        lines = [f"# {c}" for c in comments]
        lines.append(",".join(header))
        for row in rows:
            lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        obj = {
            "meta": {"tool": "lagcorners", "version": __version__, "comments": list(comments)},
            "columns": list(header),
            "rows": [[float(v) if isinstance(v, float) else v for v in row] for row in rows],
        }
        text = json.dumps(obj, indent=1) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _parse_pairs(text):
    """Parse a pair list like "(1,4),(2,5)" into [(1, 4), (2, 5)]."""
    vals = [v for v in text.replace("(", " ").replace(")", " ").replace(",", " ").split() if v]
    nums = [int(v) for v in vals]
    if len(nums) % 2 != 0:
        raise ValueError("pair list must contain an even number of integers")
    return [(nums[i], nums[i + 1]) for i in range(0, len(nums), 2)]


def _config_comment(args, keys):
    parts = [f"{k}={getattr(args, k)}" for k in keys if getattr(args, k, None) is not None]
    return "config " + " ".join(parts)


def cmd_roots(args):
    if args.bessel:
        tab = bessel_zeros(args.order, args.count)
        rows = [(b + 1, float(j)) for b, j in enumerate(tab.zeros)]
        comments = [_config_comment(args, ["order", "count"]), "columns: zero index b, zero j_{b,v}"]
        _write_table(args.out, args.format, ["b", "zero"], rows, comments)
        return
    if args.N is None or args.n is None:
        raise ValueError("crystal roots require --N and --n")
    crys = zero_temp.crystal(args.N, args.n)
    rows = []
    for k in range(1, crys.n + 1):
        for i, l in enumerate(crys.nonzero_roots(k), start=1):
            rows.append((k, i, float(l)))
    comments = [_config_comment(args, ["N", "n"]), "columns: level k, root index i, root l_{i,k}"]
    _write_table(args.out, args.format, ["k", "i", "root"], rows, comments)


def cmd_cov(args):
    if args.limit:
        val = hard_edge.limit_covariance(args.a, args.s, args.b, args.t)
        comments = [_config_comment(args, ["a", "s", "b", "t"])]
        _write_table(args.out, args.format, ["a", "s", "b", "t", "cov"],
                     [(args.a, args.s, args.b, args.t, float(val))], comments)
        return
    if args.N is None or args.n is None:
        raise ValueError("finite covariances require --N and --n")
    crys = zero_temp.crystal(args.N, args.n)
    if args.oracle:
        spec = zero_temp.covariance_matrix(crys)
        orac = zero_temp.precision_covariance(crys)
        dev = float(np.max(np.abs(spec - orac)))
        idx = zero_temp.field_index(crys)
        rows = []
        for i, (a, k) in enumerate(idx):
            for j, (a2, k2) in enumerate(idx):
                if j < i:
                    continue
                rows.append((a, k, a2, k2, float(spec[i, j]), float(orac[i, j])))
        comments = [
            _config_comment(args, ["N", "n"]),
            f"max deviation spectral vs precision-oracle: {dev:.3e}",
        ]
        _write_table(args.out, args.format,
                     ["a", "k", "a2", "k2", "cov_spectral", "cov_oracle"], rows, comments)
        print(f"max |spectral - oracle| = {dev:.3e}")
        return
    if not args.pairs:
        raise ValueError("finite covariances require --pairs or --oracle")
    pts = _parse_pairs(args.pairs)
    if len(pts) % 2 != 0:
        raise ValueError("--pairs must list coordinate pairs two at a time")
    rows = []
    for i in range(0, len(pts), 2):
        (a, k), (a2, k2) = pts[i], pts[i + 1]
        rows.append((a, k, a2, k2, float(zero_temp.covariance(a, k, a2, k2, crys))))
    comments = [_config_comment(args, ["N", "n", "pairs"])]
    _write_table(args.out, args.format, ["a", "k", "a2", "k2", "cov"], rows, comments)


def cmd_mc(args):
    rng = np.random.default_rng(args.seed)
    rows = []
    if args.mode == "infinity":
        crys = zero_temp.crystal(args.N, args.n)
        draws = zero_temp.sample_infinity_corners(crys, rng, size=args.samples)
        top = draws[crys.n - 1]
        exact = zero_temp.top_level_covariance(crys)
        emp = np.cov(top.T).reshape(exact.shape)
        for b in range(exact.shape[0]):
            se = np.sqrt((exact[b, b] ** 2 * 2.0) / args.samples)
            rows.append((b + 1, float(emp[b, b]), float(exact[b, b]), float(se)))
        header = ["b", "empirical_var", "exact_var", "stderr"]
        comments = [_config_comment(args, ["mode", "N", "n", "samples", "seed"]),
                    "top-level variances, empirical vs spectral"]
    elif args.mode == "tridiag":
        lev = ensembles.tridiagonal_level_batch(args.k, args.N, args.beta, args.samples, rng)
        crys = zero_temp.crystal(args.N, args.k)
        xi = np.sqrt(args.beta) * (lev - crys.nonzero_roots(args.k))
        exact = zero_temp.top_level_covariance(crys)
        for b in range(xi.shape[1]):
            v = float(np.var(xi[:, b], ddof=1))
            se = np.sqrt(2.0 / args.samples) * exact[b, b]
            rows.append((b + 1, v, float(exact[b, b]), float(se)))
        header = ["b", "empirical_var", "zero_temp_var", "stderr"]
        comments = [_config_comment(args, ["mode", "k", "N", "beta", "samples", "seed"]),
                    "single-level fluctuation variances vs zero-temperature limit"]
    elif args.mode == "polymer":
        cfg = hard_edge.PolymerConfig(depth=args.depth, size=args.size)
        draws = hard_edge.sample_polymer([(args.a, args.v)], cfg, rng, size=args.samples)
        v = float(np.var(draws[:, 0], ddof=1))
        exact = hard_edge.polymer_covariance(args.a, args.v, args.a, args.v, args.depth, args.size)
        se = np.sqrt(2.0 / args.samples) * exact
        rows.append((args.a, args.v, v, float(exact), float(se)))
        header = ["a", "v", "empirical_var", "polymer_var", "stderr"]
        comments = [_config_comment(args, ["mode", "a", "v", "depth", "size", "samples", "seed"]),
                    "hard-edge polymer sampler variance vs truncated walk sum"]
    else:
        raise ValueError(f"unknown mc mode {args.mode!r}")
    _write_table(args.out, args.format, header, rows, comments)
    for row in rows:
        print(" ".join(str(v) for v in row))


def cmd_converge(args):
    Ns = [int(s) for s in args.Ns.split(",")]
    rows = []
    if args.mode == "theorem":
        lim = hard_edge.limit_covariance(args.a, args.s, args.b, args.t)
        for N in Ns:
            n = 3 * N
            crys = zero_temp.crystal(N, n)
            k1, k2 = N - args.s, N - args.t
            i1, i2 = k1 + 1 - args.a, k2 + 1 - args.b
            val = N**2 * zero_temp.covariance(i1, k1, i2, k2, crys)
            rows.append((N, float(val), float(lim), float(abs(val - lim))))
        header = ["N", "scaled_cov", "limit", "abs_dev"]
        comments = [_config_comment(args, ["mode", "a", "s", "b", "t", "Ns"]),
                    "N^2-scaled crystal covariance (n = 3N) vs hard-edge quadrature"]
    elif args.mode == "roots":
        for N in Ns:
            k = N - args.alpha
            crys = zero_temp.crystal(N, max(k, 1))
            exact = crys.root(k + 1 - args.r, k)
            approx = hard_edge.hard_edge_root_approx(args.r, k, N)
            rows.append((N, float(exact), float(approx), float(abs(exact - approx))))
        header = ["N", "root", "bessel_approx", "abs_dev"]
        comments = [_config_comment(args, ["mode", "r", "alpha", "Ns"]),
                    "smallest crystal roots vs squared-Bessel-zero approximation"]
    elif args.mode == "qprofile":
        for N in Ns:
            k = N - args.alpha
            crys = zero_temp.crystal(N, max(k, 1))
            tab = zero_temp.dual_polys(k, crys)
            a = k + 1 - args.r
            q = tab.values[:, a - 1]
            ms = np.arange(tab.num)
            prof = (-1.0) ** (ms + 1) * q / np.sqrt(N)
            asym = hard_edge.asymptotic_Q(args.r, args.alpha, ms / tab.num)
            dev = float(np.max(np.abs(prof - asym)))
            rows.append((N, dev))
        header = ["N", "sup_dev"]
        comments = [_config_comment(args, ["mode", "r", "alpha", "Ns"]),
                    "sup deviation of the dual-polynomial profile from its Bessel limit"]
    else:
        raise ValueError(f"unknown converge mode {args.mode!r}")
    _write_table(args.out, args.format, header, rows, comments)
    for row in rows:
        print(" ".join(str(v) for v in row))


def build_parser():
    p = argparse.ArgumentParser(prog="lagcorners", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", help="JSON file with defaults for the subcommand flags")
    sub = p.add_subparsers(dest="command", required=True)

    def add_io(sp):
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=["csv", "json"], default="csv")

    sp = sub.add_parser("roots", help="crystal root or Bessel zero tables")
    sp.add_argument("--N", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--bessel", action="store_true")
    sp.add_argument("--order", type=int, default=0)
    sp.add_argument("--count", type=int, default=10)
    add_io(sp)
    sp.set_defaults(func=cmd_roots)

    sp = sub.add_parser("cov", help="covariance computations")
    sp.add_argument("--N", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--pairs", help='coordinate pairs, e.g. "(1,4),(1,5)"')
    sp.add_argument("--oracle", action="store_true",
                    help="full covariance by both routes with max deviation")
    sp.add_argument("--limit", action="store_true", help="hard-edge quadrature covariance")
    sp.add_argument("--a", type=int)
    sp.add_argument("--s", type=int)
    sp.add_argument("--b", type=int)
    sp.add_argument("--t", type=int)
    add_io(sp)
    sp.set_defaults(func=cmd_cov)

    sp = sub.add_parser("mc", help="Monte Carlo experiments")
    sp.add_argument("--mode", choices=["infinity", "tridiag", "polymer"], required=True)
    sp.add_argument("--N", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--a", type=int)
    sp.add_argument("--v", type=int)
    sp.add_argument("--depth", type=int, default=60)
    sp.add_argument("--size", type=int, default=400)
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    add_io(sp)
    sp.set_defaults(func=cmd_mc)

    sp = sub.add_parser("converge", help="finite-size to limit convergence tables")
    sp.add_argument("--mode", choices=["theorem", "roots", "qprofile"], required=True)
    sp.add_argument("--Ns", default="50,100,200", help="comma-separated sizes")
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--s", type=int, default=0)
    sp.add_argument("--b", type=int, default=1)
    sp.add_argument("--t", type=int, default=0)
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--alpha", type=int, default=0)
    add_io(sp)
    sp.set_defaults(func=cmd_converge)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                conf = json.load(fh)
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_IO
        except ValueError as exc:
            print(f"error: bad config: {exc}", file=sys.stderr)
            return EXIT_BAD_ARGS
        for key, val in conf.items():
            if getattr(args, key, None) is None:
                setattr(args, key, val)
    try:
        args.func(args)
    except (ValueError, TypeError) as exc:
        print(f"error: invalid arguments: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
